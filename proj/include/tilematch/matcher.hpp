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

#ifndef TILEMATCH_MATCHER_HPP
#define TILEMATCH_MATCHER_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "tilematch/descriptor.hpp"

namespace tilematch {

enum class Metric { kEuclidean, kHamming };

inline const char* metric_name(Metric m) {
  return m == Metric::kEuclidean ? "euclidean" : "hamming";
}

/// A query descriptor paired with its nearest neighbor.
struct Match {
  int index_a = 0;
  int index_b = 0;
  double distance = 0.0;
};

/// One-directional nearest-neighbor matches: at most one entry per index_a,
/// listed in ascending index_a order.
struct MatchSet {
  Metric metric = Metric::kEuclidean;
  int count_a = 0;
  int count_b = 0;
  std::vector<Match> matches;
};

inline double euclidean_distance(const SiftDescriptor& a, const SiftDescriptor& b) {
  if (a.size() != b.size()) throw std::invalid_argument("descriptor length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline int hamming_distance(const BriefDescriptor& a, const BriefDescriptor& b) {
  if (a.num_bits != b.num_bits) throw std::invalid_argument("descriptor bit-length mismatch");
  int dist = 0;
  for (std::size_t w = 0; w < a.words.size(); ++w) {
    dist += std::popcount(a.words[w] ^ b.words[w]);
  }
  return dist;
}

/// Optional filters on top of plain nearest-neighbor matching; both default
/// off so the baseline pipeline passes every nearest neighbor through.
struct MatchOptions {
  bool cross_check = false;    // keep (i, j) only when i is also j's nearest neighbor
  double ratio = 0.0;          // Lowe-style ratio test when in (0, 1); 0 disables
};

namespace detail {

/// Squared-Euclidean argmin over b for one query, with running-best early
/// exit. Comparisons on squared distances with strict '<' reproduce the
/// naive first-minimum tie-break exactly.
inline Match nearest_euclidean(std::span<const SiftDescriptor> b, const SiftDescriptor& q, int ia,
                               double* second_best = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  int best_j = 0;
  for (int j = 0; j < static_cast<int>(b.size()); ++j) {
    const SiftDescriptor& cand = b[j];
    if (cand.size() != q.size()) throw std::invalid_argument("descriptor length mismatch");
    const double bound = second_best ? second : best;
    double sum = 0.0;
    std::size_t i = 0;
    for (; i < q.size(); ++i) {
      const double d = q[i] - cand[i];
      sum += d * d;
      if (sum >= bound) break;
    }
    if (i < q.size()) continue;  // exceeded the running bound; cannot improve
    if (sum < best) {
      second = best;
      best = sum;
      best_j = j;
    } else if (sum < second) {
      second = sum;
    }
  }
  if (second_best) *second_best = std::sqrt(second);
  return Match{ia, best_j, std::sqrt(best)};
}

inline Match nearest_hamming(std::span<const BriefDescriptor> b, const BriefDescriptor& q, int ia,
                             double* second_best = nullptr) {
  int best = std::numeric_limits<int>::max();
  int second = std::numeric_limits<int>::max();
  int best_j = 0;
  for (int j = 0; j < static_cast<int>(b.size()); ++j) {
    const int d = hamming_distance(q, b[j]);
    if (d < best) {
      second = best;
      best = d;
      best_j = j;
    } else if (d < second) {
      second = d;
    }
  }
  if (second_best) {
    *second_best = second == std::numeric_limits<int>::max()
                       ? std::numeric_limits<double>::infinity()
                       : static_cast<double>(second);
  }
  return Match{ia, best_j, static_cast<double>(best)};
}

template <typename Desc, typename NearestFn>
MatchSet match_impl(std::span<const Desc> a, std::span<const Desc> b, Metric metric,
                    const MatchOptions& opts, NearestFn nearest) {
  MatchSet out;
  out.metric = metric;
  out.count_a = static_cast<int>(a.size());
  out.count_b = static_cast<int>(b.size());
  if (a.empty() || b.empty()) return out;

  const bool use_ratio = opts.ratio > 0.0 && opts.ratio < 1.0;
  out.matches.reserve(a.size());
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    double second = 0.0;
    const Match m = nearest(b, a[i], i, use_ratio ? &second : nullptr);
    if (use_ratio && b.size() > 1 && !(m.distance < opts.ratio * second)) continue;
    if (opts.cross_check) {
      const Match back = nearest(a, b[m.index_b], m.index_b, nullptr);
      if (back.index_b != i) continue;
    }
    out.matches.push_back(m);
  }
  return out;
}

}  // namespace detail

/// Exhaustive nearest-neighbor matching of every descriptor in `a` against
/// all of `b`. Ties break toward the lowest candidate index.
inline MatchSet brute_force_match(std::span<const SiftDescriptor> a,
                                  std::span<const SiftDescriptor> b,
                                  const MatchOptions& opts = {}) {
  return detail::match_impl<SiftDescriptor>(
      a, b, Metric::kEuclidean, opts,
      [](std::span<const SiftDescriptor> bb, const SiftDescriptor& q, int ia, double* snd) {
        return detail::nearest_euclidean(bb, q, ia, snd);
      });
}

inline MatchSet brute_force_match(std::span<const BriefDescriptor> a,
                                  std::span<const BriefDescriptor> b,
                                  const MatchOptions& opts = {}) {
  return detail::match_impl<BriefDescriptor>(
      a, b, Metric::kHamming, opts,
      [](std::span<const BriefDescriptor> bb, const BriefDescriptor& q, int ia, double* snd) {
        return detail::nearest_hamming(bb, q, ia, snd);
      });
}

}  // namespace tilematch

#endif  // TILEMATCH_MATCHER_HPP
