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

#ifndef TILEMATCH_GEOMETRY_HPP
#define TILEMATCH_GEOMETRY_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tilematch/core.hpp"
#include "tilematch/random.hpp"

namespace tilematch {

/// 3x3 projective transform, stored row-major and normalized so h33 = 1.
class Homography {
 public:
  Homography() : h_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

  static Homography identity() { return Homography(); }

  /// Normalizes by h33; rejects the degenerate h33 ~ 0 form.
  static Homography from_row_major(const std::array<double, 9>& values) {
    if (std::abs(values[8]) < 1e-12) {
      throw EstimationError("homography normalization failed: |h33| < 1e-12");
    }
    Homography H;
    for (int i = 0; i < 9; ++i) H.h_[i] = values[i] / values[8];
    return H;
  }

  double at(int row, int col) const { return h_[row * 3 + col]; }
  const std::array<double, 9>& row_major() const { return h_; }

  double det() const {
    return h_[0] * (h_[4] * h_[8] - h_[5] * h_[7]) -
           h_[1] * (h_[3] * h_[8] - h_[5] * h_[6]) +
           h_[2] * (h_[3] * h_[7] - h_[4] * h_[6]);
  }

 private:
  std::array<double, 9> h_;
};

struct Correspondence {
  Point2 src;
  Point2 dst;
};

/// Projects p through H with dehomogenization; throws when the homogeneous
/// denominator vanishes.
inline Point2 apply_homography(const Homography& H, Point2 p) {
  const auto& h = H.row_major();
  const double w = h[6] * p.x + h[7] * p.y + h[8];
  if (std::abs(w) < 1e-12) throw PointAtInfinityError("point maps to infinity");
  return {(h[0] * p.x + h[1] * p.y + h[2]) / w,
          (h[3] * p.x + h[4] * p.y + h[5]) / w};
}

/// Euclidean distance between c.dst and the projection of c.src.
/// A point at infinity yields +inf (never an inlier).
inline double reprojection_error(const Homography& H, const Correspondence& c) {
  try {
    const Point2 q = apply_homography(H, c.src);
    const double dx = q.x - c.dst.x;
    const double dy = q.y - c.dst.y;
    return std::sqrt(dx * dx + dy * dy);
  } catch (const PointAtInfinityError&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace detail {

/// Similarity transform placing the centroid at the origin with mean
/// distance sqrt(2) (Hartley normalization).
struct PointNormalizer {
  double scale = 1.0;
  double cx = 0.0, cy = 0.0;

  static PointNormalizer fit(std::span<const Point2> pts) {
    PointNormalizer n;
    for (const auto& p : pts) {
      n.cx += p.x;
      n.cy += p.y;
    }
    n.cx /= static_cast<double>(pts.size());
    n.cy /= static_cast<double>(pts.size());
    double mean_dist = 0.0;
    for (const auto& p : pts) {
      mean_dist += std::hypot(p.x - n.cx, p.y - n.cy);
    }
    mean_dist /= static_cast<double>(pts.size());
    if (mean_dist < 1e-12) throw EstimationError("degenerate correspondences: coincident points");
    n.scale = std::sqrt(2.0) / mean_dist;
    return n;
  }

  Point2 apply(Point2 p) const { return {(p.x - cx) * scale, (p.y - cy) * scale}; }

  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d t;
    t << scale, 0, -scale * cx, 0, scale, -scale * cy, 0, 0, 1;
    return t;
  }
};

/// Twice the signed triangle area.
inline double triangle_area2(Point2 a, Point2 b, Point2 c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline bool any_three_collinear(std::span<const Point2> pts, double tol) {
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        if (std::abs(triangle_area2(pts[i], pts[j], pts[k])) < tol) return true;
      }
    }
  }
  return false;
}

}  // namespace detail

/// DLT homography fit from n >= 4 correspondences.
///
/// Builds the stacked 2n x 9 system with Hartley-normalized points and takes
/// the null-space direction as the eigenvector of the smallest eigenvalue of
/// A^T A (orthogonal diagonalization; equals the smallest singular vector of A).
inline Homography estimate_homography_dlt(std::span<const Correspondence> corrs) {
  const int n = static_cast<int>(corrs.size());
  if (n < 4) throw EstimationError("homography estimation requires at least 4 correspondences");

  std::vector<Point2> src(n), dst(n);
  for (int i = 0; i < n; ++i) {
    src[i] = corrs[i].src;
    dst[i] = corrs[i].dst;
  }
  const auto t_src = detail::PointNormalizer::fit(src);
  const auto t_dst = detail::PointNormalizer::fit(dst);

  Eigen::Matrix<double, 9, 9> ata = Eigen::Matrix<double, 9, 9>::Zero();
  for (int i = 0; i < n; ++i) {
    const Point2 p = t_src.apply(src[i]);
    const Point2 q = t_dst.apply(dst[i]);
    Eigen::Matrix<double, 1, 9> r1, r2;
    r1 << p.x, p.y, 1, 0, 0, 0, -p.x * q.x, -p.y * q.x, -q.x;
    r2 << 0, 0, 0, p.x, p.y, 1, -p.x * q.y, -p.y * q.y, -q.y;
    ata += r1.transpose() * r1 + r2.transpose() * r2;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> eig(ata);
  if (eig.info() != Eigen::Success) throw EstimationError("eigendecomposition failed");
  const auto& evals = eig.eigenvalues();  // ascending
  // Rank-deficient system: a two-dimensional (or larger) null space means the
  // configuration does not pin down a homography.
  const double rank_tol = std::max(evals(8), 1.0) * 1e-20;
  if (evals(1) <= rank_tol) throw EstimationError("degenerate configuration: rank-deficient system");

  const Eigen::Matrix<double, 9, 1> hvec = eig.eigenvectors().col(0);
  Eigen::Matrix3d hn;
  hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), hvec(8);
  const Eigen::Matrix3d h = t_dst.matrix().inverse() * hn * t_src.matrix();

  if (std::abs(h(2, 2)) < 1e-12) throw EstimationError("homography normalization failed: |h33| < 1e-12");
  std::array<double, 9> raw;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) raw[r * 3 + c] = h(r, c);
  Homography result = Homography::from_row_major(raw);
  if (std::abs(result.det()) <= 1e-12) throw EstimationError("estimated homography is singular");
  return result;
}

struct RansacParams {
  double epsilon = 3.0;   // reprojection threshold, pixels
  int max_iters = 2000;
  bool adaptive_stop = false;  // stop once the (1 - w^4) confidence bound reaches `confidence`
  double confidence = 0.999;
};

struct RansacResult {
  Homography homography;
  std::vector<int> inlier_indices;  // ascending
  int iterations_run = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline int count_inliers(const Homography& H, std::span<const Correspondence> corrs, double eps) {
  int count = 0;
  for (const auto& c : corrs) {
    if (reprojection_error(H, c) < eps) ++count;
  }
  return count;
}

inline std::vector<int> collect_inliers(const Homography& H, std::span<const Correspondence> corrs,
                                        double eps) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(corrs.size()); ++i) {
    if (reprojection_error(H, corrs[i]) < eps) idx.push_back(i);
  }
  return idx;
}

}  // namespace detail

/// Robust homography fit: repeatedly samples 4 distinct correspondences,
/// fits by DLT, and keeps the model with the largest strict-inlier count.
/// The winner is refit on its full inlier set and inliers are recomputed once.
/// Deterministic for a fixed seed.
inline RansacResult ransac_homography(std::span<const Correspondence> corrs,
                                      const RansacParams& params, std::uint64_t seed) {
  const int n = static_cast<int>(corrs.size());
  if (n < 4) throw NoConsensusError("RANSAC requires at least 4 correspondences");
  if (!(params.epsilon > 0.0)) throw std::invalid_argument("RANSAC epsilon must be positive");

  Xorshift64Star rng(seed);
  int best_count = 0;
  Homography best_model;
  int iterations = 0;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    ++iterations;

    // 4 distinct indices, drawn with rejection.
    int idx[4];
    for (int k = 0; k < 4; ++k) {
      bool fresh;
      do {
        idx[k] = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n)));
        fresh = true;
        for (int j = 0; j < k; ++j) fresh = fresh && idx[j] != idx[k];
      } while (!fresh);
    }

    std::array<Correspondence, 4> sample;
    std::array<Point2, 4> sample_src, sample_dst;
    for (int k = 0; k < 4; ++k) {
      sample[k] = corrs[idx[k]];
      sample_src[k] = sample[k].src;
      sample_dst[k] = sample[k].dst;
    }
    if (detail::any_three_collinear(sample_src, 1e-6) ||
        detail::any_three_collinear(sample_dst, 1e-6)) {
      continue;
    }

    Homography model;
    try {
      model = estimate_homography_dlt(sample);
    } catch (const EstimationError&) {
      continue;
    }

    const int count = detail::count_inliers(model, corrs, params.epsilon);
    if (count > best_count) {
      best_count = count;
      best_model = model;
    }

    if (params.adaptive_stop && best_count >= 4) {
      const double w = static_cast<double>(best_count) / n;
      if (w >= 1.0) break;
      const double p_bad_sample = 1.0 - w * w * w * w;
      if (p_bad_sample <= 0.0) break;
      const double needed = std::log(1.0 - params.confidence) / std::log(p_bad_sample);
      if (static_cast<double>(iterations) >= needed) break;
    }
  }

  if (best_count < 4) throw NoConsensusError("RANSAC found no consensus of at least 4 inliers");

  std::vector<int> inliers = detail::collect_inliers(best_model, corrs, params.epsilon);
  Homography final_model = best_model;
  try {
    std::vector<Correspondence> support;
    support.reserve(inliers.size());
    for (int i : inliers) support.push_back(corrs[i]);
    final_model = estimate_homography_dlt(support);
    inliers = detail::collect_inliers(final_model, corrs, params.epsilon);
    if (static_cast<int>(inliers.size()) < 4) {
      // Refit degraded the consensus; fall back to the minimal-sample winner.
      final_model = best_model;
      inliers = detail::collect_inliers(best_model, corrs, params.epsilon);
    }
  } catch (const EstimationError&) {
    final_model = best_model;
    inliers = detail::collect_inliers(best_model, corrs, params.epsilon);
  }

  return RansacResult{final_model, std::move(inliers), iterations, seed};
}

inline RansacResult ransac_homography(std::span<const Correspondence> corrs, double epsilon,
                                      int max_iters, std::uint64_t seed) {
  RansacParams p;
  p.epsilon = epsilon;
  p.max_iters = max_iters;
  return ransac_homography(corrs, p, seed);
}

}  // namespace tilematch

#endif  // TILEMATCH_GEOMETRY_HPP
