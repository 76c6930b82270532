// Copyright 2026 The tilematch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TILEMATCH_SIFT_HPP
#define TILEMATCH_SIFT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tilematch/core.hpp"
#include "tilematch/descriptor.hpp"
#include "tilematch/image.hpp"

namespace tilematch {

/// Gaussian pyramid: octaves[o][j] = L(., ., sigma0 * k^j * 2^o).
struct ScaleSpace {
  std::vector<std::vector<Image>> octaves;
  std::vector<std::vector<double>> sigmas;  // absolute scale per level
  double sigma0 = 0.0;
  double k = 0.0;
};

/// Adjacent-level differences: octaves[o][d] = L[o][d+1] - L[o][d].
struct DogPyramid {
  std::vector<std::vector<Image>> octaves;
  double sigma0 = 0.0;
  double k = 0.0;
};

struct SiftKeypoint {
  double x = 0.0;  // original-image frame
  double y = 0.0;
  double sigma = 0.0;       // absolute scale
  double orientation = 0.0; // radians, [0, 2*pi)
  double response = 0.0;    // |DoG| at the extremum
  int octave = 0;
  int level = 0;            // lower blur level of the DoG pair
};

struct SiftParams {
  int octaves = 4;
  int levels_per_octave = 6;
  double sigma0 = 1.6;
  double k = 1.2599210498948732;  // 2^(1/3)
  double contrast_threshold = 0.03;
  int descriptor_grid = 4;  // M: subregions per side
  int descriptor_bins = 8;  // B: orientation bins per subregion
  int patch_size = 16;      // S: descriptor patch side, pixels
};

/// Inter-level scale factor implied by the octave shape: chosen so the
/// second-to-last level doubles sigma0 exactly; sqrt(2) for the minimal
/// two-level stack.
inline double scale_space_k(int levels_per_octave) {
  if (levels_per_octave > 2) return std::pow(2.0, 1.0 / (levels_per_octave - 2));
  return std::sqrt(2.0);
}

/// Builds the Gaussian pyramid with an explicit inter-level factor k > 1.
/// Blurs are applied incrementally (Gaussian semigroup) in each octave's own
/// pixel grid, so level j of octave o carries absolute scale sigma0 * k^j * 2^o.
inline ScaleSpace build_scale_space(const Image& img, int octaves, int levels_per_octave,
                                    double sigma0, double k) {
  if (img.channels != 1) throw std::invalid_argument("scale space requires a grayscale image");
  if (octaves < 1) throw std::invalid_argument("octave count must be >= 1");
  if (levels_per_octave < 2) throw std::invalid_argument("levels per octave must be >= 2");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
  if (!(k > 1.0)) throw std::invalid_argument("scale factor k must exceed 1");
  const int min_dim = 1 << octaves;
  if (img.width < min_dim || img.height < min_dim) {
    throw std::invalid_argument("image too small for requested octave count");
  }

  ScaleSpace ss;
  ss.sigma0 = sigma0;
  ss.k = k;
  ss.octaves.resize(octaves);
  ss.sigmas.resize(octaves);

  // Relative (in-octave) scales are shared by every octave.
  std::vector<double> rel(levels_per_octave);
  for (int j = 0; j < levels_per_octave; ++j) rel[j] = sigma0 * std::pow(k, j);

  Image base = convolve_separable(img, gaussian_kernel(sigma0));
  for (int o = 0; o < octaves; ++o) {
    auto& levels = ss.octaves[o];
    levels.reserve(levels_per_octave);
    levels.push_back(std::move(base));
    for (int j = 1; j < levels_per_octave; ++j) {
      const double inc = std::sqrt(rel[j] * rel[j] - rel[j - 1] * rel[j - 1]);
      levels.push_back(convolve_separable(levels.back(), gaussian_kernel(inc)));
    }
    ss.sigmas[o].resize(levels_per_octave);
    for (int j = 0; j < levels_per_octave; ++j) {
      ss.sigmas[o][j] = rel[j] * static_cast<double>(1 << o);
    }

    if (o + 1 < octaves) {
      // Seed the next octave from the level nearest (from below) to 2*sigma0,
      // topping up the blur when no level lands on the boundary exactly.
      int jb = levels_per_octave - 1;
      while (jb > 0 && rel[jb] > 2.0 * sigma0 * (1.0 + 1e-9)) --jb;
      const double target = 2.0 * sigma0;
      const double extra2 = target * target - rel[jb] * rel[jb];
      Image boundary = extra2 > 1e-12
                           ? convolve_separable(levels[jb], gaussian_kernel(std::sqrt(extra2)))
                           : levels[jb];
      base = downsample_half(boundary);
    }
  }
  return ss;
}

/// Same pyramid with k derived from the level count.
inline ScaleSpace build_scale_space(const Image& img, int octaves, int levels_per_octave,
                                    double sigma0) {
  return build_scale_space(img, octaves, levels_per_octave, sigma0,
                           scale_space_k(levels_per_octave));
}

inline DogPyramid difference_of_gaussians(const ScaleSpace& ss) {
  DogPyramid dog;
  dog.sigma0 = ss.sigma0;
  dog.k = ss.k;
  dog.octaves.resize(ss.octaves.size());
  for (std::size_t o = 0; o < ss.octaves.size(); ++o) {
    const auto& levels = ss.octaves[o];
    if (levels.size() < 2) throw std::invalid_argument("DoG requires >= 2 levels per octave");
    auto& out = dog.octaves[o];
    out.reserve(levels.size() - 1);
    for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
      Image d(levels[j].width, levels[j].height, 1);
      for (std::size_t i = 0; i < d.data.size(); ++i) {
        d.data[i] = levels[j + 1].data[i] - levels[j].data[i];
      }
      out.push_back(std::move(d));
    }
  }
  return dog;
}

/// Scans interior DoG levels for pixels strictly above or strictly below all
/// 26 scale-space neighbors with |D| > contrast_threshold. Coordinates are
/// reported in the original-image frame (x 2^octave).
inline std::vector<SiftKeypoint> detect_extrema(const DogPyramid& dog,
                                                double contrast_threshold) {
  std::vector<SiftKeypoint> out;
  for (std::size_t o = 0; o < dog.octaves.size(); ++o) {
    const auto& stack = dog.octaves[o];
    if (stack.size() < 3) throw std::invalid_argument("extrema detection requires >= 3 DoG levels");
    const int w = stack[0].width;
    const int h = stack[0].height;
    const double scale = static_cast<double>(std::int64_t{1} << o);
    for (std::size_t d = 1; d + 1 < stack.size(); ++d) {
      const Image& lo = stack[d - 1];
      const Image& mid = stack[d];
      const Image& hi = stack[d + 1];
      for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
          const double v = mid.at(x, y);
          if (std::abs(v) <= contrast_threshold) continue;
          bool is_max = true;
          bool is_min = true;
          for (int dy = -1; dy <= 1 && (is_max || is_min); ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const double a = lo.at(x + dx, y + dy);
              const double b = mid.at(x + dx, y + dy);
              const double c = hi.at(x + dx, y + dy);
              is_max = is_max && v > a && v > c && (v > b || (dx == 0 && dy == 0));
              is_min = is_min && v < a && v < c && (v < b || (dx == 0 && dy == 0));
              if (!is_max && !is_min) break;
            }
          }
          if (!is_max && !is_min) continue;
          SiftKeypoint kp;
          kp.x = x * scale;
          kp.y = y * scale;
          kp.octave = static_cast<int>(o);
          kp.level = static_cast<int>(d);
          kp.sigma = dog.sigma0 * std::pow(dog.k, kp.level) * scale;
          kp.response = std::abs(v);
          out.push_back(kp);
        }
      }
    }
  }
  return out;
}

/// Assigns dominant orientations from a 36-bin gradient histogram over a
/// circular neighborhood of radius 3*sigma (in the keypoint's own level),
/// Gaussian-weighted at 1.5*sigma. Every local peak reaching 80% of the
/// maximum emits a keypoint; orientations are bin centers. An empty result
/// means the keypoint has no usable gradient support and is dropped.
inline std::vector<SiftKeypoint> assign_orientation(const SiftKeypoint& kp,
                                                    const ScaleSpace& ss) {
  if (kp.octave < 0 || kp.octave >= static_cast<int>(ss.octaves.size()) || kp.level < 0 ||
      kp.level >= static_cast<int>(ss.octaves[kp.octave].size())) {
    throw std::invalid_argument("keypoint indices outside the scale space");
  }
  const Image& img = ss.octaves[kp.octave][kp.level];
  const double inv_scale = 1.0 / static_cast<double>(std::int64_t{1} << kp.octave);
  const int cx = static_cast<int>(std::lround(kp.x * inv_scale));
  const int cy = static_cast<int>(std::lround(kp.y * inv_scale));

  constexpr int kBins = 36;
  const double sigma_rel = kp.sigma * inv_scale;
  const double radius = 3.0 * sigma_rel;
  const int r = static_cast<int>(std::ceil(radius));
  const double weight_sigma = 1.5 * sigma_rel;
  const double bin_width = kTwoPi / kBins;

  double hist[kBins] = {};
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx * dx + dy * dy > radius * radius) continue;
      const int px = cx + dx;
      const int py = cy + dy;
      if (px < 0 || px >= img.width || py < 0 || py >= img.height) continue;
      const auto g = detail::sample_gradient(img, px, py);
      const int bin = std::min(kBins - 1, static_cast<int>(g.orientation / bin_width));
      hist[bin] += g.magnitude * std::exp(-(dx * dx + dy * dy) / (2.0 * weight_sigma * weight_sigma));
    }
  }

  const double peak = *std::max_element(hist, hist + kBins);
  std::vector<SiftKeypoint> out;
  if (!(peak > 0.0)) return out;
  for (int b = 0; b < kBins; ++b) {
    const double prev = hist[(b + kBins - 1) % kBins];
    const double next = hist[(b + 1) % kBins];
    if (hist[b] >= prev && hist[b] >= next && hist[b] >= 0.8 * peak && hist[b] > 0.0) {
      SiftKeypoint oriented = kp;
      oriented.orientation = wrap_angle((b + 0.5) * bin_width);
      out.push_back(oriented);
    }
  }
  return out;
}

/// Builds the M^2*B descriptor from an S x S patch around the keypoint in its
/// own blur level, sampled along axes rotated by the keypoint orientation.
/// Gradient orientations are measured relative to the keypoint's own, binned
/// into B arcs per subregion, and weighted by magnitude times a Gaussian of
/// sigma = S/2 over the patch offset. The concatenated histograms are
/// normalized to unit length, clamped at 0.2, and renormalized. Returns
/// nothing when any patch sample falls outside the image.
inline std::optional<SiftDescriptor> compute_descriptor(const SiftKeypoint& kp,
                                                        const ScaleSpace& ss, int M, int B,
                                                        int S) {
  if (M < 1 || B < 1 || S < 1 || S % M != 0) {
    throw std::invalid_argument("descriptor geometry requires S divisible by M");
  }
  if (kp.octave < 0 || kp.octave >= static_cast<int>(ss.octaves.size()) || kp.level < 0 ||
      kp.level >= static_cast<int>(ss.octaves[kp.octave].size())) {
    throw std::invalid_argument("keypoint indices outside the scale space");
  }
  const Image& img = ss.octaves[kp.octave][kp.level];
  const double inv_scale = 1.0 / static_cast<double>(std::int64_t{1} << kp.octave);
  const double cx = kp.x * inv_scale;
  const double cy = kp.y * inv_scale;
  const double cos_t = std::cos(kp.orientation);
  const double sin_t = std::sin(kp.orientation);
  const double center = (S - 1) / 2.0;
  const double gauss_sigma = S / 2.0;
  const double bin_width = kTwoPi / B;
  const int s = S / M;

  SiftDescriptor desc(static_cast<std::size_t>(M) * M * B, 0.0);
  for (int jp = 0; jp < S; ++jp) {
    for (int ip = 0; ip < S; ++ip) {
      const double du = ip - center;
      const double dv = jp - center;
      // Patch axes follow the keypoint orientation, so the descriptor frame
      // sees the patch rotated back to canonical.
      const int px = static_cast<int>(std::lround(cx + du * cos_t - dv * sin_t));
      const int py = static_cast<int>(std::lround(cy + du * sin_t + dv * cos_t));
      if (px < 0 || px >= img.width || py < 0 || py >= img.height) return std::nullopt;
      const auto g = detail::sample_gradient(img, px, py);
      const double alpha = wrap_angle(g.orientation - kp.orientation);
      const int b = std::min(B - 1, static_cast<int>(alpha / bin_width));
      const int region = (jp / s) * M + (ip / s);
      const double w = std::exp(-(du * du + dv * dv) / (2.0 * gauss_sigma * gauss_sigma));
      desc[static_cast<std::size_t>(region) * B + b] += g.magnitude * w;
    }
  }

  double norm = 0.0;
  for (double v : desc) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& v : desc) v = std::min(v / norm, 0.2);
    double norm2 = 0.0;
    for (double v : desc) norm2 += v * v;
    norm2 = std::sqrt(norm2);
    if (norm2 > 0.0) {
      for (double& v : desc) v /= norm2;
    }
  }
  return desc;
}

struct SiftFeature {
  SiftKeypoint keypoint;
  SiftDescriptor descriptor;
  int candidate_rank = 0;  // position in the sorted oriented-candidate list
};

namespace detail {

inline bool sift_candidate_less(const SiftKeypoint& a, const SiftKeypoint& b) {
  if (a.response != b.response) return a.response > b.response;
  if (a.octave != b.octave) return a.octave < b.octave;
  if (a.level != b.level) return a.level < b.level;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return a.orientation < b.orientation;
}

}  // namespace detail

/// Full pipeline with keypoint budget: detect, orient, rank by response
/// (ties by octave, level, y, x, orientation), keep the top max_keypoints
/// candidates, then describe. Candidates whose patch leaves the image are
/// dropped. Octave count is reduced when the image cannot host the default.
inline std::vector<SiftFeature> sift_features(const Image& img, int max_keypoints,
                                              const SiftParams& params = {}) {
  if (max_keypoints < 0) throw std::invalid_argument("keypoint budget must be non-negative");
  int octaves = params.octaves;
  while (octaves > 1 && (img.width < (1 << octaves) || img.height < (1 << octaves))) --octaves;

  const ScaleSpace ss =
      build_scale_space(img, octaves, params.levels_per_octave, params.sigma0, params.k);
  const DogPyramid dog = difference_of_gaussians(ss);
  const std::vector<SiftKeypoint> raw = detect_extrema(dog, params.contrast_threshold);

  std::vector<SiftKeypoint> oriented;
  oriented.reserve(raw.size());
  for (const auto& kp : raw) {
    for (const auto& okp : assign_orientation(kp, ss)) oriented.push_back(okp);
  }
  std::sort(oriented.begin(), oriented.end(), detail::sift_candidate_less);

  const int budget = std::min<int>(max_keypoints, static_cast<int>(oriented.size()));
  std::vector<SiftFeature> out;
  out.reserve(budget);
  for (int rank = 0; rank < budget; ++rank) {
    auto desc = compute_descriptor(oriented[rank], ss, params.descriptor_grid,
                                   params.descriptor_bins, params.patch_size);
    if (!desc) continue;
    out.push_back(SiftFeature{oriented[rank], std::move(*desc), rank});
  }
  return out;
}

inline std::vector<std::pair<SiftKeypoint, SiftDescriptor>> sift_detect_and_describe(
    const Image& img, int max_keypoints, const SiftParams& params = {}) {
  std::vector<std::pair<SiftKeypoint, SiftDescriptor>> out;
  for (auto& f : sift_features(img, max_keypoints, params)) {
    out.emplace_back(f.keypoint, std::move(f.descriptor));
  }
  return out;
}

}  // namespace tilematch

#endif  // TILEMATCH_SIFT_HPP
