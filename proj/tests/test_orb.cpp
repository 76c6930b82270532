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

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "tilematch/dataset.hpp"
#include "tilematch/matcher.hpp"
#include "tilematch/orb.hpp"

using namespace tilematch;
using namespace tilematch::test;

TEST_CASE("circular run detector") {
  bool flags[16] = {};
  CHECK(!detail::fast_run_at_least(flags, 9));
  for (int i = 0; i < 12; ++i) flags[i] = true;
  CHECK(detail::fast_run_at_least(flags, 12));
  CHECK(!detail::fast_run_at_least(flags, 13));
  // Wraparound run: 12..15 plus 0..7 is a contiguous arc of 12.
  bool wrap[16] = {};
  for (int i = 12; i < 16; ++i) wrap[i] = true;
  for (int i = 0; i < 8; ++i) wrap[i] = true;
  CHECK(detail::fast_run_at_least(wrap, 12));
  CHECK(!detail::fast_run_at_least(wrap, 13));
  bool full[16];
  for (bool& f : full) f = true;
  CHECK(detail::fast_run_at_least(full, 16));
}

TEST_CASE("fast detector equals the rotation oracle") {
  Xorshift64Star rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 12 + static_cast<int>(rng.next_below(20));
    const int h = 12 + static_cast<int>(rng.next_below(20));
    const double t = rng.next_in(0.02, 0.3);
    const int arc = 9 + static_cast<int>(rng.next_below(8));
    const Image img = make_noise_image(w, h, rng.next_u64());

    const auto fast = fast_detect(img, t, arc);
    const auto slow = fast_reference(img, t, arc);
    CAPTURE(trial);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].x == slow[i][0]);
      CHECK(fast[i].y == slow[i][1]);
    }
  }
}

TEST_CASE("fast fires on an ideal corner and stays quiet on flats") {
  Image flat(32, 32, 1, 0.5);
  CHECK(fast_detect(flat, 0.05, 12).empty());

  // Bright quadrant corner at (16, 16): the pixel just inside the corner sees
  // 11 of 16 circle pixels in the dark region — a segment-test corner for
  // arc 9, and deliberately one pixel short of the arc-12 variant.
  Image corner(32, 32, 1, 0.2);
  for (int y = 16; y < 32; ++y) {
    for (int x = 16; x < 32; ++x) corner.at(x, y) = 0.9;
  }
  CHECK(fast_detect(corner, 0.3, 12).empty());
  const auto kps = fast_detect(corner, 0.3, 9);
  CHECK(!kps.empty());
  bool found_near_corner = false;
  for (const auto& kp : kps) {
    if (std::abs(kp.x - 16) <= 2 && std::abs(kp.y - 16) <= 2) found_near_corner = true;
  }
  CHECK(found_near_corner);

  CHECK_THROWS_AS(fast_detect(flat, 0.0, 12), std::invalid_argument);
  CHECK_THROWS_AS(fast_detect(flat, 0.1, 8), std::invalid_argument);
  CHECK_THROWS_AS(fast_detect(flat, 0.1, 17), std::invalid_argument);
}

TEST_CASE("harris separates corners from edges and flats") {
  Image flat(32, 32, 1, 0.5);
  CHECK(harris_score(flat, 16, 16, 3, 0.04) == doctest::Approx(0.0));

  Image corner(32, 32, 1, 0.0);
  for (int y = 16; y < 32; ++y) {
    for (int x = 16; x < 32; ++x) corner.at(x, y) = 1.0;
  }
  const double corner_score = harris_score(corner, 16, 16, 3, 0.04);
  CHECK(corner_score > 0.0);

  Image edge(32, 32, 1, 0.0);
  for (int x = 16; x < 32; ++x) {
    for (int y = 0; y < 32; ++y) edge.at(x, y) = 1.0;
  }
  const double edge_score = harris_score(edge, 16, 16, 3, 0.04);
  CHECK(edge_score < corner_score);
  CHECK(edge_score <= 0.0);

  CHECK_THROWS_AS(harris_score(flat, 2, 16, 3, 0.04), std::invalid_argument);
  CHECK_THROWS_AS(harris_score(flat, 16, 16, 0, 0.04), std::invalid_argument);
}

namespace {

double angular_gap(double a, double b) {
  const double d = std::abs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

}  // namespace

TEST_CASE("patch orientation tracks the gradient direction") {
  SUBCASE("horizontal ramp") {
    Image ramp(64, 64, 1);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) ramp.at(x, y) = 0.01 * x;
    }
    const double theta = orb_orientation(ramp, 32, 32, 31);
    CHECK(angular_gap(theta, 0.0) < kTwoPi / 36.0 + 1e-9);
  }
  SUBCASE("vertical ramp") {
    Image ramp(64, 64, 1);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) ramp.at(x, y) = 0.01 * y;
    }
    const double theta = orb_orientation(ramp, 32, 32, 31);
    CHECK(angular_gap(theta, std::numbers::pi / 2.0) < kTwoPi / 36.0 + 1e-9);
  }
  SUBCASE("flat patch has no orientation") {
    Image flat(64, 64, 1, 0.5);
    CHECK(orb_orientation(flat, 32, 32, 31) == 0.0);
  }
}

TEST_CASE("brief pattern is deterministic, seeded, and disc-bounded") {
  const BriefPattern a = brief_pattern(42, 31, 256);
  const BriefPattern b = brief_pattern(42, 31, 256);
  const BriefPattern c = brief_pattern(43, 31, 256);
  CHECK(a.pairs == b.pairs);
  CHECK(a.pairs != c.pairs);
  REQUIRE(a.pairs.size() == 256);
  const double r = 31 / 2.0;
  for (const auto& p : a.pairs) {
    CHECK(std::hypot(p[0], p[1]) <= r + 1e-9);
    CHECK(std::hypot(p[2], p[3]) <= r + 1e-9);
  }
}

TEST_CASE("orb features respect budget, margin, and ranking") {
  const Image img = generate_textured_image(160, 160, 88);
  const auto feats = orb_features(img, 60);
  REQUIRE(!feats.empty());
  CHECK(feats.size() <= 60);

  OrbParams params;
  const int margin = static_cast<int>(std::ceil(3.0 + params.patch_size / 2.0));
  for (std::size_t i = 0; i < feats.size(); ++i) {
    CHECK(feats[i].descriptor.num_bits == 256);
    CHECK(feats[i].keypoint.x >= margin);
    CHECK(feats[i].keypoint.x < 160 - margin);
    CHECK(feats[i].keypoint.y >= margin);
    CHECK(feats[i].keypoint.y < 160 - margin);
    CHECK(feats[i].candidate_rank == static_cast<int>(i));
    if (i > 0) {
      CHECK(feats[i].keypoint.harris_score <= feats[i - 1].keypoint.harris_score);
    }
  }

  // Budgeted run is a prefix of a larger run.
  const auto more = orb_features(img, 200);
  REQUIRE(more.size() >= feats.size());
  for (std::size_t i = 0; i < feats.size(); ++i) {
    CHECK(more[i].keypoint.x == feats[i].keypoint.x);
    CHECK(more[i].keypoint.y == feats[i].keypoint.y);
    CHECK(more[i].descriptor.words == feats[i].descriptor.words);
  }

  CHECK(orb_features(img, 0).empty());
  CHECK_THROWS_AS(orb_features(img, -1), std::invalid_argument);
}

TEST_CASE("orb pipeline is deterministic; pattern seed steers descriptors only") {
  const Image img = generate_textured_image(128, 128, 89);
  const auto a = orb_features(img, 50);
  const auto b = orb_features(img, 50);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].keypoint.x == b[i].keypoint.x);
    CHECK(a[i].keypoint.y == b[i].keypoint.y);
    CHECK(a[i].keypoint.harris_score == b[i].keypoint.harris_score);
    CHECK(a[i].descriptor.words == b[i].descriptor.words);
  }

  OrbParams reseeded;
  reseeded.pattern_seed = 777;
  const auto c = orb_features(img, 50, reseeded);
  REQUIRE(c.size() == a.size());
  bool any_descriptor_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(c[i].keypoint.x == a[i].keypoint.x);
    CHECK(c[i].keypoint.y == a[i].keypoint.y);
    if (c[i].descriptor.words != a[i].descriptor.words) any_descriptor_differs = true;
  }
  CHECK(any_descriptor_differs);
}

TEST_CASE("matched orb descriptors separate from unrelated ones") {
  // Same texture twice: descriptors at identical keypoints must match with
  // distance zero, while cross-texture distances concentrate near half the
  // bits.
  const Image img = generate_textured_image(128, 128, 90);
  const Image other = generate_textured_image(128, 128, 91);
  const auto a = orb_features(img, 40);
  const auto b = orb_features(img, 40);
  const auto u = orb_features(other, 40);
  REQUIRE(a.size() == b.size());
  REQUIRE(!a.empty());
  REQUIRE(!u.empty());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(hamming_distance(a[i].descriptor, b[i].descriptor) == 0);
  }
  double mean_unrelated = 0.0;
  int count = 0;
  for (const auto& fa : a) {
    for (const auto& fu : u) {
      mean_unrelated += hamming_distance(fa.descriptor, fu.descriptor);
      ++count;
    }
  }
  mean_unrelated /= count;
  CHECK(mean_unrelated > 64.0);
}
