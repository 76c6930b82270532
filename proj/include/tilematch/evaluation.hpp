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

#ifndef TILEMATCH_EVALUATION_HPP
#define TILEMATCH_EVALUATION_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tilematch/dataset.hpp"
#include "tilematch/geometry.hpp"
#include "tilematch/image.hpp"
#include "tilematch/image_io.hpp"
#include "tilematch/matcher.hpp"
#include "tilematch/orb.hpp"
#include "tilematch/random.hpp"
#include "tilematch/sift.hpp"

namespace tilematch {

struct PairReport {
  std::string descriptor;  // "sift" | "orb"
  int keypoint_budget = 0;
  std::string id_a;
  std::string id_b;
  int n_matches = 0;
  int n_inliers = 0;
  double inlier_ratio = 0.0;
  bool predicted = false;
  bool ground_truth = false;
  std::uint64_t seed = 0;  // RANSAC seed used for this pair
};

/// One Table-style row per (descriptor, budget) configuration.
struct SummaryRow {
  std::string descriptor;
  int keypoint_budget = 0;
  int n_positive = 0;
  int n_negative = 0;
  double tp_mean_ratio = 0.0;  // mean inlier ratio over ground-truth positives
  double tn_mean_ratio = 0.0;  // mean inlier ratio over ground-truth negatives
  int tp = 0, tn = 0, fp = 0, fn = 0;
};

struct EvaluationSummary {
  std::vector<SummaryRow> rows;
};

struct ConfusionCounts {
  int tp = 0, tn = 0, fp = 0, fn = 0;
};

struct EvalConfig {
  double rho = 0.10;  // minimum inlier ratio for a positive prediction
  RansacParams ransac;
  SiftParams sift;
  OrbParams orb;
  std::uint64_t seed = 0;  // root seed; per-pair RANSAC seeds derive from it
};

/// Fraction of matches that are inliers; zero matches count as 0.
inline double inlier_ratio(int n_matches, int n_inliers) {
  if (n_matches < 0 || n_inliers < 0) throw std::invalid_argument("counts must be non-negative");
  if (n_inliers > n_matches) throw std::invalid_argument("inliers cannot exceed matches");
  if (n_matches == 0) return 0.0;
  return static_cast<double>(n_inliers) / n_matches;
}

/// Threshold decision: a pair is declared matching iff ratio >= rho.
inline bool predict(double ratio, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
  return ratio >= rho;
}

inline ConfusionCounts confusion_counts(std::span<const PairReport> reports) {
  ConfusionCounts c;
  for (const auto& r : reports) {
    if (r.ground_truth) {
      (r.predicted ? c.tp : c.fn) += 1;
    } else {
      (r.predicted ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

namespace detail {

/// Budget-tagged detections of one image under one descriptor kind.
struct FeatureSet {
  bool binary = false;
  std::vector<Point2> points;
  std::vector<int> ranks;  // candidate_rank per entry, strictly increasing
  std::vector<SiftDescriptor> real_desc;
  std::vector<BriefDescriptor> bin_desc;
};

inline FeatureSet detect_features(const Image& gray, const std::string& descriptor, int budget,
                                  const EvalConfig& cfg) {
  FeatureSet set;
  if (descriptor == "sift") {
    for (auto& f : sift_features(gray, budget, cfg.sift)) {
      set.points.push_back({f.keypoint.x, f.keypoint.y});
      set.ranks.push_back(f.candidate_rank);
      set.real_desc.push_back(std::move(f.descriptor));
    }
  } else if (descriptor == "orb") {
    set.binary = true;
    for (auto& f : orb_features(gray, budget, cfg.orb)) {
      set.points.push_back(
          {static_cast<double>(f.keypoint.x), static_cast<double>(f.keypoint.y)});
      set.ranks.push_back(f.candidate_rank);
      set.bin_desc.push_back(std::move(f.descriptor));
    }
  } else {
    throw std::invalid_argument("unknown descriptor tag: " + descriptor);
  }
  return set;
}

/// Entries with candidate_rank < budget are exactly the detections a direct
/// run at that budget would produce (ranks are assigned before truncation).
inline FeatureSet filter_budget(const FeatureSet& full, int budget) {
  FeatureSet out;
  out.binary = full.binary;
  std::size_t n = 0;
  while (n < full.ranks.size() && full.ranks[n] < budget) ++n;
  out.points.assign(full.points.begin(), full.points.begin() + n);
  out.ranks.assign(full.ranks.begin(), full.ranks.begin() + n);
  if (full.binary) {
    out.bin_desc.assign(full.bin_desc.begin(), full.bin_desc.begin() + n);
  } else {
    out.real_desc.assign(full.real_desc.begin(), full.real_desc.begin() + n);
  }
  return out;
}

struct VerifyOutcome {
  int n_matches = 0;
  int n_inliers = 0;
};

/// Brute-force match (a queries b) then RANSAC verification; a no-consensus
/// outcome reports zero inliers rather than erroring.
inline VerifyOutcome match_and_verify(const FeatureSet& a, const FeatureSet& b,
                                      const RansacParams& ransac, std::uint64_t seed) {
  MatchSet matches;
  if (a.binary != b.binary) throw std::invalid_argument("mixed descriptor kinds");
  if (a.binary) {
    matches = brute_force_match(std::span<const BriefDescriptor>(a.bin_desc),
                                std::span<const BriefDescriptor>(b.bin_desc));
  } else {
    matches = brute_force_match(std::span<const SiftDescriptor>(a.real_desc),
                                std::span<const SiftDescriptor>(b.real_desc));
  }
  VerifyOutcome out;
  out.n_matches = static_cast<int>(matches.matches.size());
  if (out.n_matches < 4) return out;

  std::vector<Correspondence> corrs;
  corrs.reserve(matches.matches.size());
  for (const auto& m : matches.matches) {
    corrs.push_back({a.points[m.index_a], b.points[m.index_b]});
  }
  try {
    const RansacResult r = ransac_homography(corrs, ransac, seed);
    out.n_inliers = static_cast<int>(r.inlier_indices.size());
  } catch (const NoConsensusError&) {
    out.n_inliers = 0;
  }
  return out;
}

}  // namespace detail

/// Full single-pair pipeline at one budget. Standalone runs derive the RANSAC
/// seed as derive_seed(cfg.seed, "ransac"); tile ids and ground truth are the
/// caller's to fill.
inline PairReport evaluate_pair(const Image& img_a, const Image& img_b,
                                const std::string& descriptor, int budget,
                                const EvalConfig& cfg) {
  if (budget <= 0) throw std::invalid_argument("keypoint budget must be positive");
  const Image gray_a = to_grayscale(img_a);
  const Image gray_b = to_grayscale(img_b);
  const auto set_a = detail::detect_features(gray_a, descriptor, budget, cfg);
  const auto set_b = detail::detect_features(gray_b, descriptor, budget, cfg);
  const std::uint64_t seed = derive_seed(cfg.seed, "ransac");
  const auto outcome = detail::match_and_verify(set_a, set_b, cfg.ransac, seed);

  PairReport rep;
  rep.descriptor = descriptor;
  rep.keypoint_budget = budget;
  rep.n_matches = outcome.n_matches;
  rep.n_inliers = outcome.n_inliers;
  rep.inlier_ratio = inlier_ratio(outcome.n_matches, outcome.n_inliers);
  rep.predicted = predict(rep.inlier_ratio, cfg.rho);
  rep.seed = seed;
  return rep;
}

struct EvaluationRun {
  std::vector<PairReport> reports;  // sorted by (descriptor, budget, id_a, id_b)
  EvaluationSummary summary;        // sorted by (descriptor, budget)
};

/// Evaluates every unordered tile pair (lexicographically smaller id as the
/// query side) for each (descriptor, budget) configuration. Detection runs
/// once per (tile, descriptor) at the largest budget; smaller budgets reuse
/// the candidate-rank prefix, which reproduces direct runs exactly. Ground
/// truth comes from grid adjacency. Per-pair RANSAC seeds derive from
/// cfg.seed and the (descriptor, budget, id_a, id_b) labels.
inline EvaluationRun evaluate_dataset(const TileManifest& manifest,
                                      const std::vector<std::string>& descriptors,
                                      const std::vector<int>& budgets, double rho,
                                      const EvalConfig& cfg) {
  if (manifest.tiles.size() < 2) throw std::invalid_argument("manifest needs at least 2 tiles");
  if (descriptors.empty()) throw std::invalid_argument("descriptor list must not be empty");
  if (budgets.empty()) throw std::invalid_argument("budget list must not be empty");
  for (int b : budgets) {
    if (b <= 0) throw std::invalid_argument("keypoint budgets must be positive");
  }
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");

  std::vector<const TileRecord*> tiles;
  for (const auto& t : manifest.tiles) tiles.push_back(&t);
  std::sort(tiles.begin(), tiles.end(),
            [](const TileRecord* a, const TileRecord* b) { return a->id < b->id; });

  std::map<std::pair<std::string, std::string>, bool> truth;
  for (const auto& lab : ground_truth_from_grid(manifest)) {
    truth[{lab.id_a, lab.id_b}] = lab.label;
  }

  const int max_budget = *std::max_element(budgets.begin(), budgets.end());

  // cache[tile][descriptor] at the largest budget
  std::map<std::pair<std::string, std::string>, detail::FeatureSet> cache;
  for (const TileRecord* t : tiles) {
    const Image img = load_image(t->path);
    if (img.width != t->width || img.height != t->height) {
      throw IoError("tile " + t->id + " has size " + std::to_string(img.width) + "x" +
                    std::to_string(img.height) + ", manifest declares " +
                    std::to_string(t->width) + "x" + std::to_string(t->height));
    }
    const Image gray = to_grayscale(img);
    for (const auto& d : descriptors) {
      cache[{t->id, d}] = detail::detect_features(gray, d, max_budget, cfg);
    }
  }

  EvaluationRun run;
  for (const auto& d : descriptors) {
    for (int budget : budgets) {
      std::map<std::string, detail::FeatureSet> at_budget;
      for (const TileRecord* t : tiles) {
        at_budget[t->id] = detail::filter_budget(cache.at({t->id, d}), budget);
      }
      for (std::size_t i = 0; i < tiles.size(); ++i) {
        for (std::size_t j = i + 1; j < tiles.size(); ++j) {
          PairReport rep;
          rep.descriptor = d;
          rep.keypoint_budget = budget;
          rep.id_a = tiles[i]->id;
          rep.id_b = tiles[j]->id;
          rep.ground_truth = truth.at({rep.id_a, rep.id_b});
          rep.seed = derive_seed(cfg.seed, "ransac/" + d + "/" + std::to_string(budget) + "/" +
                                               rep.id_a + "/" + rep.id_b);
          const auto outcome = detail::match_and_verify(at_budget.at(rep.id_a),
                                                        at_budget.at(rep.id_b), cfg.ransac,
                                                        rep.seed);
          rep.n_matches = outcome.n_matches;
          rep.n_inliers = outcome.n_inliers;
          rep.inlier_ratio = inlier_ratio(outcome.n_matches, outcome.n_inliers);
          rep.predicted = predict(rep.inlier_ratio, rho);
          run.reports.push_back(std::move(rep));
        }
      }
    }
  }

  std::sort(run.reports.begin(), run.reports.end(), [](const PairReport& a, const PairReport& b) {
    if (a.descriptor != b.descriptor) return a.descriptor < b.descriptor;
    if (a.keypoint_budget != b.keypoint_budget) return a.keypoint_budget < b.keypoint_budget;
    if (a.id_a != b.id_a) return a.id_a < b.id_a;
    return a.id_b < b.id_b;
  });

  for (std::size_t lo = 0; lo < run.reports.size();) {
    std::size_t hi = lo;
    while (hi < run.reports.size() &&
           run.reports[hi].descriptor == run.reports[lo].descriptor &&
           run.reports[hi].keypoint_budget == run.reports[lo].keypoint_budget) {
      ++hi;
    }
    SummaryRow row;
    row.descriptor = run.reports[lo].descriptor;
    row.keypoint_budget = run.reports[lo].keypoint_budget;
    double pos_sum = 0.0, neg_sum = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const PairReport& r = run.reports[k];
      if (r.ground_truth) {
        ++row.n_positive;
        pos_sum += r.inlier_ratio;
        (r.predicted ? row.tp : row.fn) += 1;
      } else {
        ++row.n_negative;
        neg_sum += r.inlier_ratio;
        (r.predicted ? row.fp : row.tn) += 1;
      }
    }
    row.tp_mean_ratio = row.n_positive > 0 ? pos_sum / row.n_positive : 0.0;
    row.tn_mean_ratio = row.n_negative > 0 ? neg_sum / row.n_negative : 0.0;
    run.summary.rows.push_back(std::move(row));
    lo = hi;
  }
  return run;
}

}  // namespace tilematch

#endif  // TILEMATCH_EVALUATION_HPP
