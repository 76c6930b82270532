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

#ifndef TILEMATCH_SERIALIZE_HPP
#define TILEMATCH_SERIALIZE_HPP

#include <charconv>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "tilematch/evaluation.hpp"
#include "tilematch/matcher.hpp"
#include "tilematch/orb.hpp"
#include "tilematch/sift.hpp"

namespace tilematch {

/// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// JSON-lines detection records, one keypoint per line:
/// {x, y, sigma, orientation, response, descriptor: [...]}.
inline std::string detection_lines(std::span<const SiftFeature> features) {
  std::string out;
  for (const auto& f : features) {
    nlohmann::json j;
    j["x"] = f.keypoint.x;
    j["y"] = f.keypoint.y;
    j["sigma"] = f.keypoint.sigma;
    j["orientation"] = f.keypoint.orientation;
    j["response"] = f.keypoint.response;
    j["descriptor"] = f.descriptor;
    out += j.dump();
    out += '\n';
  }
  return out;
}

/// JSON-lines detection records with hex-packed binary descriptors:
/// {x, y, harris_score, orientation, descriptor: "..."}.
inline std::string detection_lines(std::span<const OrbFeature> features) {
  std::string out;
  for (const auto& f : features) {
    nlohmann::json j;
    j["x"] = f.keypoint.x;
    j["y"] = f.keypoint.y;
    j["harris_score"] = f.keypoint.harris_score;
    j["orientation"] = f.keypoint.orientation;
    j["descriptor"] = to_hex(f.descriptor);
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline nlohmann::json match_set_to_json(const MatchSet& set) {
  nlohmann::json j;
  j["metric"] = metric_name(set.metric);
  j["matches"] = nlohmann::json::array();
  for (const auto& m : set.matches) {
    j["matches"].push_back({{"a", m.index_a}, {"b", m.index_b}, {"distance", m.distance}});
  }
  return j;
}

/// CSV of per-pair reports; booleans serialized as 1/0, ratios in shortest
/// round-trip form.
inline std::string pair_reports_csv(std::span<const PairReport> reports) {
  std::string out =
      "descriptor,budget,id_a,id_b,n_matches,n_inliers,inlier_ratio,predicted,ground_truth,seed\n";
  for (const auto& r : reports) {
    out += r.descriptor;
    out += ',';
    out += std::to_string(r.keypoint_budget);
    out += ',';
    out += r.id_a;
    out += ',';
    out += r.id_b;
    out += ',';
    out += std::to_string(r.n_matches);
    out += ',';
    out += std::to_string(r.n_inliers);
    out += ',';
    out += format_double(r.inlier_ratio);
    out += ',';
    out += r.predicted ? '1' : '0';
    out += ',';
    out += r.ground_truth ? '1' : '0';
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

inline std::string summary_csv(const EvaluationSummary& summary) {
  std::string out =
      "descriptor,budget,n_positive,n_negative,tp_mean_inlier_ratio,tn_mean_inlier_ratio,tp,tn,"
      "fp,fn\n";
  for (const auto& row : summary.rows) {
    out += row.descriptor;
    out += ',';
    out += std::to_string(row.keypoint_budget);
    out += ',';
    out += std::to_string(row.n_positive);
    out += ',';
    out += std::to_string(row.n_negative);
    out += ',';
    out += format_double(row.tp_mean_ratio);
    out += ',';
    out += format_double(row.tn_mean_ratio);
    out += ',';
    out += std::to_string(row.tp);
    out += ',';
    out += std::to_string(row.tn);
    out += ',';
    out += std::to_string(row.fp);
    out += ',';
    out += std::to_string(row.fn);
    out += '\n';
  }
  return out;
}

/// Fixed-width text table of mean inlier ratios per configuration, one row
/// per (method, keypoint budget), percentages with two decimals.
inline std::string summary_table(const EvaluationSummary& summary) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-8s %9s %12s %12s %4s %4s %4s %4s\n", "method",
                "keypoints", "TP-mean", "TN-mean", "TP", "TN", "FP", "FN");
  out += line;
  for (const auto& row : summary.rows) {
    std::string name = row.descriptor;
    for (auto& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    std::snprintf(line, sizeof(line), "%-8s %9d %11.2f%% %11.2f%% %4d %4d %4d %4d\n",
                  name.c_str(), row.keypoint_budget, 100.0 * row.tp_mean_ratio,
                  100.0 * row.tn_mean_ratio, row.tp, row.tn, row.fp, row.fn);
    out += line;
  }
  return out;
}

}  // namespace tilematch

#endif  // TILEMATCH_SERIALIZE_HPP
