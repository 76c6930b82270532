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
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "tilematch/image.hpp"

using namespace tilematch;
using namespace tilematch::test;

TEST_CASE("image construction and validation") {
  Image img(4, 3, 1, 0.25);
  CHECK(img.width == 4);
  CHECK(img.height == 3);
  CHECK(img.data.size() == 12);
  CHECK(img.at(3, 2) == 0.25);

  img.at(1, 2) = 0.75;
  CHECK(img.at(1, 2) == 0.75);

  CHECK_THROWS_AS(Image(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Image(4, -1), std::invalid_argument);
  CHECK_THROWS_AS(Image(4, 4, 2), std::invalid_argument);
}

TEST_CASE("reflect_index matches iterative folding") {
  for (int n : {1, 2, 3, 5, 8, 17}) {
    for (int i = -3 * n; i <= 3 * n; ++i) {
      CAPTURE(i);
      CAPTURE(n);
      CHECK(reflect_index(i, n) == fold_reflect101(i, n));
    }
  }
  // The mirror never repeats the edge pixel.
  CHECK(reflect_index(-1, 5) == 1);
  CHECK(reflect_index(5, 5) == 3);
}

TEST_CASE("gaussian kernel shape") {
  for (double sigma : {0.5, 1.0, 1.6, 3.2}) {
    const GaussianKernel k = gaussian_kernel(sigma);
    CHECK(k.radius == static_cast<int>(std::ceil(3.0 * sigma)));
    CHECK(k.weights.size() == static_cast<std::size_t>(2 * k.radius + 1));
    double sum = 0.0;
    for (double w : k.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i <= k.radius; ++i) {
      CHECK(k.weights[k.radius - i] == doctest::Approx(k.weights[k.radius + i]).epsilon(1e-15));
    }
    // Monotone decay away from the center.
    for (int i = k.radius; i < 2 * k.radius; ++i) CHECK(k.weights[i] >= k.weights[i + 1]);
  }
  CHECK_THROWS_AS(gaussian_kernel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_kernel(-1.0), std::invalid_argument);
}

TEST_CASE("separable convolution equals brute-force 2-D convolution") {
  Xorshift64Star rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const int w = 3 + static_cast<int>(rng.next_below(30));
    const int h = 3 + static_cast<int>(rng.next_below(30));
    const double sigma = rng.next_in(0.4, 2.5);
    const Image img = make_noise_image(w, h, rng.next_u64());
    const GaussianKernel k = gaussian_kernel(sigma);
    const Image fast = convolve_separable(img, k);
    const Image slow = conv2d_reference(img, k);
    double max_err = 0.0;
    for (std::size_t i = 0; i < fast.data.size(); ++i) {
      max_err = std::max(max_err, std::abs(fast.data[i] - slow.data[i]));
    }
    CAPTURE(w);
    CAPTURE(h);
    CAPTURE(sigma);
    CHECK(max_err < 1e-12);
  }
}

TEST_CASE("convolution preserves constants and rejects color input") {
  Image flat(9, 7, 1, 0.6);
  const Image out = convolve_separable(flat, gaussian_kernel(1.3));
  for (double v : out.data) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));

  Image rgb(4, 4, 3, 0.5);
  CHECK_THROWS_AS(convolve_separable(rgb, gaussian_kernel(1.0)), std::invalid_argument);
}

TEST_CASE("grayscale conversion uses BT.601 weights") {
  Image rgb(2, 1, 3);
  rgb.at(0, 0, 0) = 1.0;  // pure red
  rgb.at(1, 0, 0) = 0.2;
  rgb.at(1, 0, 1) = 0.4;
  rgb.at(1, 0, 2) = 0.8;
  const Image gray = to_grayscale(rgb);
  CHECK(gray.channels == 1);
  CHECK(gray.at(0, 0) == doctest::Approx(0.299).epsilon(1e-12));
  CHECK(gray.at(1, 0) ==
        doctest::Approx(0.299 * 0.2 + 0.587 * 0.4 + 0.114 * 0.8).epsilon(1e-12));

  const Image gray_again = to_grayscale(gray);
  CHECK(gray_again.data == gray.data);
}

TEST_CASE("gradients of a linear ramp are constant") {
  Image ramp(12, 10, 1);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 12; ++x) ramp.at(x, y) = 0.05 * x + 0.02 * y;
  }
  const GradientField g = gradients(ramp);
  // Interior pixels see the exact central difference; borders fold.
  for (int y = 1; y < 9; ++y) {
    for (int x = 1; x < 11; ++x) {
      CHECK(g.magnitude.at(x, y) == doctest::Approx(std::hypot(0.05, 0.02)).epsilon(1e-12));
      CHECK(g.orientation.at(x, y) == doctest::Approx(std::atan2(0.02, 0.05)).epsilon(1e-12));
    }
  }
  // Point sampler agrees with the field everywhere.
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 12; ++x) {
      const auto s = detail::sample_gradient(ramp, x, y);
      CHECK(s.magnitude == g.magnitude.at(x, y));
      CHECK(s.orientation == g.orientation.at(x, y));
    }
  }
  CHECK_THROWS_AS(gradients(Image(2, 5)), std::invalid_argument);
}

TEST_CASE("downsample keeps even-indexed pixels") {
  const Image img = make_noise_image(9, 7, 5);
  const Image half = downsample_half(img);
  CHECK(half.width == 4);
  CHECK(half.height == 3);
  for (int y = 0; y < half.height; ++y) {
    for (int x = 0; x < half.width; ++x) {
      CHECK(half.at(x, y) == img.at(2 * x, 2 * y));
    }
  }
  CHECK_THROWS_AS(downsample_half(Image(1, 8)), std::invalid_argument);
}
