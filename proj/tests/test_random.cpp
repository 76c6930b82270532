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
#include "tilematch/random.hpp"

using namespace tilematch;

TEST_CASE("xorshift64star regression values") {
  // Frozen outputs of the documented recurrence, computed independently with
  // big-integer arithmetic. Any drift in the state update breaks replays.
  Xorshift64Star a(1);
  CHECK(a.next_u64() == 0x47e4ce4b896cdd1dULL);
  CHECK(a.next_u64() == 0xabcfa6a8e079651dULL);
  CHECK(a.next_u64() == 0xb9d10d8feb731f57ULL);

  Xorshift64Star b(42);
  CHECK(b.next_u64() == 0x56ce4ab7719ba3a0ULL);
  CHECK(b.next_u64() == 0xc841eb53ebbb2ddaULL);
  CHECK(b.next_u64() == 0xca466be0c9980276ULL);
}

TEST_CASE("zero seed is remapped, not absorbing") {
  Xorshift64Star zero(0);
  Xorshift64Star remapped(0x9E3779B97F4A7C15ULL);
  for (int i = 0; i < 16; ++i) CHECK(zero.next_u64() == remapped.next_u64());
  CHECK(zero.next_u64() != 0);
}

TEST_CASE("streams are deterministic per seed") {
  Xorshift64Star a(123456789), b(123456789), c(987654321);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && va == b.next_u64();
    any_diff = any_diff || va != c.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("next_double is uniform on [0, 1)") {
  Xorshift64Star rng(7);
  const int n = 100000;
  double sum = 0.0;
  std::vector<int> buckets(10, 0);
  for (int i = 0; i < n; ++i) {
    const double v = rng.next_double();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    sum += v;
    ++buckets[static_cast<int>(v * 10.0)];
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  for (int count : buckets) {
    CHECK(count > n / 10 * 0.9);
    CHECK(count < n / 10 * 1.1);
  }
}

TEST_CASE("next_below stays in range and covers residues") {
  Xorshift64Star rng(11);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.next_below(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int count : hits) {
    CHECK(count > 9000);
    CHECK(count < 11000);
  }
  CHECK(rng.next_below(1) == 0);
}

TEST_CASE("next_in spans the requested interval") {
  Xorshift64Star rng(13);
  double lo_seen = 1e9, hi_seen = -1e9;
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.next_in(-2.5, 4.0);
    CHECK(v >= -2.5);
    CHECK(v < 4.0);
    lo_seen = std::min(lo_seen, v);
    hi_seen = std::max(hi_seen, v);
  }
  CHECK(lo_seen < -2.4);
  CHECK(hi_seen > 3.9);
}

TEST_CASE("next_gaussian has standard moments") {
  Xorshift64Star rng(17);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.next_gaussian();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("derive_seed regression and sensitivity") {
  // Frozen values computed independently (FNV-1a + splitmix64 finalizer).
  CHECK(derive_seed(0, "ransac") == 0x580ea28b2cf5a128ULL);
  CHECK(derive_seed(7, "ransac") == 0x7cba46e40ab680b9ULL);
  CHECK(derive_seed(7, "texture") == 0xaed2487644b59971ULL);
  CHECK(derive_seed(20260815, "brief-pattern") == 0x4da24d78f85bdf65ULL);

  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "") != derive_seed(1, "x"));
}
