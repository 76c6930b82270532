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

#ifndef TILEMATCH_ORB_HPP
#define TILEMATCH_ORB_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tilematch/core.hpp"
#include "tilematch/descriptor.hpp"
#include "tilematch/image.hpp"
#include "tilematch/random.hpp"

namespace tilematch {

struct OrbKeypoint {
  int x = 0;
  int y = 0;
  double harris_score = 0.0;
  double orientation = 0.0;  // radians, [0, 2*pi)
};

/// Binary test layout: pairs[i] = {px, py, qx, qy}, integer offsets from the
/// patch center, each inside the disc of radius patch_size / 2.
struct BriefPattern {
  int patch_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::array<int, 4>> pairs;
};

struct OrbParams {
  double fast_threshold = 0.08;  // on [0, 1] intensities
  int fast_arc = 12;             // contiguous circle pixels required
  int harris_window = 3;         // half-size; (2w+1)^2 neighborhood
  double harris_alpha = 0.04;
  int patch_size = 31;  // S: orientation patch and pattern disc diameter
  int num_bits = 256;   // N: binary tests per descriptor
  std::uint64_t pattern_seed = 42;
};

namespace detail {

/// Radius-3 Bresenham circle, starting at (0, -3) and walking clockwise in
/// image coordinates (y grows downward).
inline constexpr std::array<std::array<int, 2>, 16> kFastCircle = {{
    {{0, -3}}, {{1, -3}}, {{2, -2}}, {{3, -1}},
    {{3, 0}},  {{3, 1}},  {{2, 2}},  {{1, 3}},
    {{0, 3}},  {{-1, 3}}, {{-2, 2}}, {{-3, 1}},
    {{-3, 0}}, {{-3, -1}}, {{-2, -2}}, {{-1, -3}},
}};

inline bool fast_run_at_least(const bool flags[16], int arc_n) {
  int streak = 0;
  int best = 0;
  for (int i = 0; i < 32; ++i) {
    if (flags[i % 16]) {
      ++streak;
      best = std::max(best, streak);
    } else {
      streak = 0;
    }
  }
  return std::min(best, 16) >= arc_n;
}

}  // namespace detail

/// FAST segment test: keeps pixels whose radius-3 circle holds a circularly
/// contiguous run of >= arc_n pixels all brighter than center + t or all
/// darker than center - t. The cardinal-pixel pretest is a shortcut only; a
/// run of arc_n >= 12 must cover 3 of the 4 cardinals, a run of >= 9 covers 2.
inline std::vector<OrbKeypoint> fast_detect(const Image& img, double t, int arc_n) {
  if (img.channels != 1) throw std::invalid_argument("FAST requires a grayscale image");
  if (arc_n < 9 || arc_n > 16) throw std::invalid_argument("FAST arc length must be in [9, 16]");
  if (!(t > 0.0)) throw std::invalid_argument("FAST threshold must be positive");

  const int pretest_needed = arc_n >= 12 ? 3 : 2;
  std::vector<OrbKeypoint> out;
  for (int y = 3; y < img.height - 3; ++y) {
    for (int x = 3; x < img.width - 3; ++x) {
      const double c = img.at(x, y);
      const double hi = c + t;
      const double lo = c - t;

      int n_bright = 0;
      int n_dark = 0;
      for (int k = 0; k < 16; k += 4) {
        const double v = img.at(x + detail::kFastCircle[k][0], y + detail::kFastCircle[k][1]);
        if (v > hi) ++n_bright;
        if (v < lo) ++n_dark;
      }
      if (n_bright < pretest_needed && n_dark < pretest_needed) continue;

      bool bright[16];
      bool dark[16];
      for (int k = 0; k < 16; ++k) {
        const double v = img.at(x + detail::kFastCircle[k][0], y + detail::kFastCircle[k][1]);
        bright[k] = v > hi;
        dark[k] = v < lo;
      }
      if (detail::fast_run_at_least(bright, arc_n) || detail::fast_run_at_least(dark, arc_n)) {
        out.push_back(OrbKeypoint{x, y, 0.0, 0.0});
      }
    }
  }
  return out;
}

/// Harris measure det(M) - alpha * trace(M)^2 with M accumulated from
/// Gaussian-weighted central-difference gradients over (2*window+1)^2 pixels.
inline double harris_score(const Image& img, int x, int y, int window, double alpha) {
  if (img.channels != 1) throw std::invalid_argument("Harris requires a grayscale image");
  if (window < 1) throw std::invalid_argument("Harris window must be >= 1");
  const int margin = window + 1;  // gradients need one extra pixel
  if (x < margin || x >= img.width - margin || y < margin || y >= img.height - margin) {
    throw std::invalid_argument("Harris window does not fit inside the image");
  }
  const double sigma = 2.0 * window / 3.0;
  double mxx = 0.0, mxy = 0.0, myy = 0.0;
  for (int dy = -window; dy <= window; ++dy) {
    for (int dx = -window; dx <= window; ++dx) {
      const int px = x + dx;
      const int py = y + dy;
      const double gx = 0.5 * (img.at(px + 1, py) - img.at(px - 1, py));
      const double gy = 0.5 * (img.at(px, py + 1) - img.at(px, py - 1));
      const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      mxx += w * gx * gx;
      mxy += w * gx * gy;
      myy += w * gy * gy;
    }
  }
  const double det = mxx * myy - mxy * mxy;
  const double trace = mxx + myy;
  return det - alpha * trace * trace;
}

/// Dominant gradient direction over the S x S patch: 36-bin magnitude-weighted
/// orientation histogram, peak bin center returned (ties toward the lower
/// bin). A patch with no gradient support yields 0.
inline double orb_orientation(const Image& img, int x, int y, int patch_size) {
  if (img.channels != 1) throw std::invalid_argument("orientation requires a grayscale image");
  const int half = patch_size / 2;
  if (x < half || x >= img.width - half || y < half || y >= img.height - half) {
    throw std::invalid_argument("orientation patch does not fit inside the image");
  }
  constexpr int kBins = 36;
  const double bin_width = kTwoPi / kBins;
  double hist[kBins] = {};
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) {
      const auto g = detail::sample_gradient(img, x + dx, y + dy);
      const int bin = std::min(kBins - 1, static_cast<int>(g.orientation / bin_width));
      hist[bin] += g.magnitude;
    }
  }
  int best = 0;
  for (int b = 1; b < kBins; ++b) {
    if (hist[b] > hist[best]) best = b;
  }
  if (!(hist[best] > 0.0)) return 0.0;
  return wrap_angle((best + 0.5) * bin_width);
}

/// Random binary-test layout: offsets drawn i.i.d. Gaussian (sigma = S/5) and
/// redrawn until the rounded point lies inside the disc of radius S/2.
/// A pure function of (seed, S, N).
inline BriefPattern brief_pattern(std::uint64_t seed, int patch_size, int num_bits) {
  if (num_bits < 1) throw std::invalid_argument("pattern needs at least one pair");
  if (patch_size < 8) throw std::invalid_argument("pattern patch size must be >= 8");
  BriefPattern pat;
  pat.patch_size = patch_size;
  pat.seed = seed;
  pat.pairs.reserve(num_bits);

  Xorshift64Star rng(seed);
  const double sigma = patch_size / 5.0;
  const double r2_max = (patch_size / 2.0) * (patch_size / 2.0);
  auto draw_point = [&]() {
    while (true) {
      const auto px = static_cast<int>(std::lround(rng.next_gaussian() * sigma));
      const auto py = static_cast<int>(std::lround(rng.next_gaussian() * sigma));
      if (px * px + py * py <= r2_max) return std::array<int, 2>{px, py};
    }
  };
  for (int i = 0; i < num_bits; ++i) {
    const auto p = draw_point();
    const auto q = draw_point();
    pat.pairs.push_back({p[0], p[1], q[0], q[1]});
  }
  return pat;
}

namespace detail {

/// Steered binary tests against an already-blurred image.
inline std::optional<BriefDescriptor> brief_describe_blurred(const Image& blurred,
                                                             const OrbKeypoint& kp,
                                                             const BriefPattern& pattern) {
  const double c = std::cos(kp.orientation);
  const double s = std::sin(kp.orientation);
  BriefDescriptor d(static_cast<int>(pattern.pairs.size()));
  auto sample = [&](int ox, int oy, double* value) {
    const int rx = kp.x + static_cast<int>(std::lround(ox * c - oy * s));
    const int ry = kp.y + static_cast<int>(std::lround(ox * s + oy * c));
    if (rx < 0 || rx >= blurred.width || ry < 0 || ry >= blurred.height) return false;
    *value = blurred.at(rx, ry);
    return true;
  };
  for (std::size_t i = 0; i < pattern.pairs.size(); ++i) {
    const auto& pr = pattern.pairs[i];
    double ip = 0.0, iq = 0.0;
    if (!sample(pr[0], pr[1], &ip) || !sample(pr[2], pr[3], &iq)) return std::nullopt;
    if (ip < iq) d.set_bit(static_cast<int>(i));
  }
  return d;
}

}  // namespace detail

/// Steered BRIEF: each pattern offset is rotated by the keypoint orientation
/// (rounded to the nearest pixel), and bit i is set iff the first sample is
/// strictly darker than the second. Sampling happens on a sigma = 2 blur of
/// the image. Returns nothing when any rotated sample leaves the image.
inline std::optional<BriefDescriptor> brief_describe(const Image& img, const OrbKeypoint& kp,
                                                     const BriefPattern& pattern) {
  if (img.channels != 1) throw std::invalid_argument("BRIEF requires a grayscale image");
  const Image blurred = convolve_separable(img, gaussian_kernel(2.0));
  return detail::brief_describe_blurred(blurred, kp, pattern);
}

struct OrbFeature {
  OrbKeypoint keypoint;
  BriefDescriptor descriptor;
  int candidate_rank = 0;  // position in the Harris-sorted candidate list
};

/// Full pipeline with keypoint budget: FAST detection, Harris scoring and
/// descending sort (ties by y then x), truncation, orientation assignment,
/// steered BRIEF. Detections too close to the border to carry a descriptor
/// (closer than circle radius + S/2) are excluded before ranking so the
/// budget is spent on describable keypoints only.
inline std::vector<OrbFeature> orb_features(const Image& img, int max_keypoints,
                                            const OrbParams& params = {}) {
  if (max_keypoints < 0) throw std::invalid_argument("keypoint budget must be non-negative");
  if (img.channels != 1) throw std::invalid_argument("ORB requires a grayscale image");

  std::vector<OrbKeypoint> kps = fast_detect(img, params.fast_threshold, params.fast_arc);

  const int margin = static_cast<int>(std::ceil(3.0 + params.patch_size / 2.0));
  std::erase_if(kps, [&](const OrbKeypoint& kp) {
    return kp.x < margin || kp.x >= img.width - margin || kp.y < margin ||
           kp.y >= img.height - margin;
  });

  for (auto& kp : kps) {
    kp.harris_score = harris_score(img, kp.x, kp.y, params.harris_window, params.harris_alpha);
  }
  std::sort(kps.begin(), kps.end(), [](const OrbKeypoint& a, const OrbKeypoint& b) {
    if (a.harris_score != b.harris_score) return a.harris_score > b.harris_score;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  if (static_cast<int>(kps.size()) > max_keypoints) kps.resize(max_keypoints);

  const BriefPattern pattern =
      brief_pattern(params.pattern_seed, params.patch_size, params.num_bits);
  const Image blurred = convolve_separable(img, gaussian_kernel(2.0));

  std::vector<OrbFeature> out;
  out.reserve(kps.size());
  for (int rank = 0; rank < static_cast<int>(kps.size()); ++rank) {
    OrbKeypoint kp = kps[rank];
    kp.orientation = orb_orientation(img, kp.x, kp.y, params.patch_size);
    auto desc = detail::brief_describe_blurred(blurred, kp, pattern);
    if (!desc) continue;  // unreachable under the margin filter; kept for safety
    out.push_back(OrbFeature{kp, std::move(*desc), rank});
  }
  return out;
}

inline std::vector<std::pair<OrbKeypoint, BriefDescriptor>> orb_detect_and_describe(
    const Image& img, int max_keypoints, const OrbParams& params = {}) {
  std::vector<std::pair<OrbKeypoint, BriefDescriptor>> out;
  for (auto& f : orb_features(img, max_keypoints, params)) {
    out.emplace_back(f.keypoint, std::move(f.descriptor));
  }
  return out;
}

}  // namespace tilematch

#endif  // TILEMATCH_ORB_HPP
