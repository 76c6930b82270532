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
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tilematch/matcher.hpp"
#include "tilematch/random.hpp"

using namespace tilematch;
using namespace tilematch::test;

namespace {

std::vector<SiftDescriptor> random_real_descriptors(int count, int dim, Xorshift64Star& rng) {
  std::vector<SiftDescriptor> out(count);
  for (auto& d : out) {
    d.resize(dim);
    for (auto& v : d) v = rng.next_double();
  }
  return out;
}

std::vector<BriefDescriptor> random_binary_descriptors(int count, int bits, Xorshift64Star& rng) {
  std::vector<BriefDescriptor> out;
  for (int i = 0; i < count; ++i) {
    BriefDescriptor d(bits);
    for (int b = 0; b < bits; ++b) {
      if (rng.next_below(2)) d.set_bit(b);
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

TEST_CASE("euclidean distance matches the reference") {
  Xorshift64Star rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pair = random_real_descriptors(2, 1 + static_cast<int>(rng.next_below(128)), rng);
    CHECK(euclidean_distance(pair[0], pair[1]) ==
          doctest::Approx(euclidean_reference(pair[0], pair[1])).epsilon(1e-12));
  }
  CHECK(euclidean_distance({1, 2}, {1, 2}) == 0.0);
  CHECK(euclidean_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(euclidean_distance({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("hamming distance matches the bit-loop reference") {
  Xorshift64Star rng(32);
  for (int bits : {8, 64, 100, 128, 256, 333}) {
    for (int trial = 0; trial < 25; ++trial) {
      const auto pair = random_binary_descriptors(2, bits, rng);
      CHECK(hamming_distance(pair[0], pair[1]) == hamming_reference(pair[0], pair[1]));
    }
  }
  BriefDescriptor a(256), b(256);
  CHECK(hamming_distance(a, b) == 0);
  b.set_bit(0);
  b.set_bit(255);
  CHECK(hamming_distance(a, b) == 2);
  BriefDescriptor c(128);
  CHECK_THROWS_AS(hamming_distance(a, c), std::invalid_argument);
}

TEST_CASE("brute-force euclidean matcher equals the double loop") {
  Xorshift64Star rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next_below(40));
    const int na = static_cast<int>(rng.next_below(25));
    const int nb = static_cast<int>(rng.next_below(25));
    const auto a = random_real_descriptors(na, dim, rng);
    const auto b = random_real_descriptors(nb, dim, rng);

    const MatchSet fast = brute_force_match(std::span<const SiftDescriptor>(a),
                                            std::span<const SiftDescriptor>(b));
    const auto slow = naive_match(a, b, euclidean_reference);

    CHECK(fast.metric == Metric::kEuclidean);
    CHECK(fast.count_a == na);
    CHECK(fast.count_b == nb);
    REQUIRE(fast.matches.size() == slow.size());
    for (std::size_t i = 0; i < slow.size(); ++i) {
      CHECK(fast.matches[i].index_a == slow[i].a);
      CHECK(fast.matches[i].index_b == slow[i].b);
      CHECK(fast.matches[i].distance == doctest::Approx(slow[i].dist).epsilon(1e-12));
    }
  }
}

TEST_CASE("brute-force hamming matcher equals the double loop") {
  Xorshift64Star rng(34);
  for (int trial = 0; trial < 60; ++trial) {
    const int bits = 64 + static_cast<int>(rng.next_below(4)) * 64;
    const int na = static_cast<int>(rng.next_below(25));
    const int nb = static_cast<int>(rng.next_below(25));
    const auto a = random_binary_descriptors(na, bits, rng);
    const auto b = random_binary_descriptors(nb, bits, rng);

    const MatchSet fast = brute_force_match(std::span<const BriefDescriptor>(a),
                                            std::span<const BriefDescriptor>(b));
    const auto slow = naive_match(a, b, [](const BriefDescriptor& x, const BriefDescriptor& y) {
      return static_cast<double>(hamming_reference(x, y));
    });

    REQUIRE(fast.matches.size() == slow.size());
    for (std::size_t i = 0; i < slow.size(); ++i) {
      CHECK(fast.matches[i].index_a == slow[i].a);
      CHECK(fast.matches[i].index_b == slow[i].b);
      CHECK(fast.matches[i].distance == slow[i].dist);
    }
  }
}

TEST_CASE("ties break toward the lowest candidate index") {
  SiftDescriptor q = {1.0, 0.0};
  std::vector<SiftDescriptor> b = {{2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}};
  const MatchSet ms =
      brute_force_match(std::span<const SiftDescriptor>(&q, 1), std::span<const SiftDescriptor>(b));
  REQUIRE(ms.matches.size() == 1);
  CHECK(ms.matches[0].index_b == 0);  // distance 1 at indices 0 and 3; keep 0

  std::vector<BriefDescriptor> qb(1, BriefDescriptor(64));
  std::vector<BriefDescriptor> bb(3, BriefDescriptor(64));
  bb[1].set_bit(5);  // indices 0 and 2 tie at distance 0
  const MatchSet mh = brute_force_match(std::span<const BriefDescriptor>(qb),
                                        std::span<const BriefDescriptor>(bb));
  REQUIRE(mh.matches.size() == 1);
  CHECK(mh.matches[0].index_b == 0);
}

TEST_CASE("empty sides produce empty match sets") {
  const std::vector<SiftDescriptor> none;
  const std::vector<SiftDescriptor> one = {{1.0, 2.0}};
  const MatchSet ab = brute_force_match(std::span<const SiftDescriptor>(none),
                                        std::span<const SiftDescriptor>(one));
  CHECK(ab.matches.empty());
  CHECK(ab.count_a == 0);
  CHECK(ab.count_b == 1);
  const MatchSet ba = brute_force_match(std::span<const SiftDescriptor>(one),
                                        std::span<const SiftDescriptor>(none));
  CHECK(ba.matches.empty());
}

TEST_CASE("match set lists each query once, in order") {
  Xorshift64Star rng(35);
  const auto a = random_real_descriptors(20, 8, rng);
  const auto b = random_real_descriptors(15, 8, rng);
  const MatchSet ms = brute_force_match(std::span<const SiftDescriptor>(a),
                                        std::span<const SiftDescriptor>(b));
  REQUIRE(ms.matches.size() == 20);
  for (int i = 0; i < 20; ++i) CHECK(ms.matches[i].index_a == i);
}

TEST_CASE("cross-check keeps only mutual nearest neighbors") {
  // b0 sits between a0 and a1 but closer to a1; a0's forward match to b0 is
  // dropped while a1's survives.
  std::vector<SiftDescriptor> a = {{0.0}, {2.0}};
  std::vector<SiftDescriptor> b = {{1.8}};
  MatchOptions opts;
  opts.cross_check = true;
  const MatchSet ms = brute_force_match(std::span<const SiftDescriptor>(a),
                                        std::span<const SiftDescriptor>(b), opts);
  REQUIRE(ms.matches.size() == 1);
  CHECK(ms.matches[0].index_a == 1);
  CHECK(ms.matches[0].index_b == 0);
}

TEST_CASE("ratio test drops ambiguous matches") {
  std::vector<SiftDescriptor> a = {{0.0, 0.0}};
  MatchOptions opts;
  opts.ratio = 0.8;

  // Two nearly equidistant candidates: ambiguous, dropped.
  std::vector<SiftDescriptor> ambiguous = {{1.0, 0.0}, {1.05, 0.0}};
  CHECK(brute_force_match(std::span<const SiftDescriptor>(a),
                          std::span<const SiftDescriptor>(ambiguous), opts)
            .matches.empty());

  // A clearly unique nearest neighbor survives.
  std::vector<SiftDescriptor> distinct = {{0.1, 0.0}, {3.0, 0.0}};
  CHECK(brute_force_match(std::span<const SiftDescriptor>(a),
                          std::span<const SiftDescriptor>(distinct), opts)
            .matches.size() == 1);

  // With a single candidate there is no second distance; the match passes.
  std::vector<SiftDescriptor> single = {{9.0, 0.0}};
  CHECK(brute_force_match(std::span<const SiftDescriptor>(a),
                          std::span<const SiftDescriptor>(single), opts)
            .matches.size() == 1);
}
