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

#ifndef TILEMATCH_IMAGE_HPP
#define TILEMATCH_IMAGE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "tilematch/core.hpp"

namespace tilematch {

/// Row-major intensity grid, 1 or 3 interleaved channels.
///
/// Loaded images hold values in [0, 1]; intermediate pipeline images
/// (difference images, gradients) may leave that range.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> data;

  Image() = default;

  Image(int w, int h, int c = 1, double fill = 0.0)
      : width(w), height(h), channels(c) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("image dimensions must be positive");
    if (c != 1 && c != 3) throw std::invalid_argument("image must have 1 or 3 channels");
    data.assign(static_cast<std::size_t>(w) * h * c, fill);
  }

  double& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool empty() const { return data.empty(); }
};

/// Separable 1-D Gaussian, weights normalized to sum 1.
struct GaussianKernel {
  double sigma = 0.0;
  int radius = 0;
  std::vector<double> weights;  // length 2*radius + 1, symmetric
};

/// Per-pixel gradient magnitude and direction (angles in [0, 2*pi)).
struct GradientField {
  Image magnitude;
  Image orientation;
};

/// Reflect-101 border index: mirrors without repeating the edge pixel.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = i % period;
  if (i < 0) i += period;
  return (i < n) ? i : period - i;
}

/// BT.601 luma conversion. Single-channel input is returned unchanged.
inline Image to_grayscale(const Image& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) throw std::invalid_argument("to_grayscale: expected 1 or 3 channels");
  Image out(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
    }
  }
  return out;
}

/// 1-D Gaussian sampled at integer offsets, truncated at radius ceil(3*sigma).
inline GaussianKernel gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  GaussianKernel k;
  k.sigma = sigma;
  k.radius = static_cast<int>(std::ceil(3.0 * sigma));
  k.weights.resize(2 * k.radius + 1);
  double sum = 0.0;
  for (int i = -k.radius; i <= k.radius; ++i) {
    const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k.weights[i + k.radius] = w;
    sum += w;
  }
  for (double& w : k.weights) w /= sum;
  return k;
}

/// Separable convolution (horizontal then vertical pass), reflect-101 borders.
/// Equivalent to full 2-D convolution with the outer-product kernel.
inline Image convolve_separable(const Image& img, const GaussianKernel& k) {
  if (img.channels != 1) throw std::invalid_argument("convolve_separable: single-channel image required");
  const int w = img.width, h = img.height, r = k.radius;

  Image tmp(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += k.weights[i + r] * img.at(reflect_index(x + i, w), y);
      }
      tmp.at(x, y) = acc;
    }
  }
  Image out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        acc += k.weights[i + r] * tmp.at(x, reflect_index(y + i, h));
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

/// Central-difference gradients with reflect-101 borders.
inline GradientField gradients(const Image& img) {
  if (img.channels != 1) throw std::invalid_argument("gradients: single-channel image required");
  if (img.width < 3 || img.height < 3) throw std::invalid_argument("gradients: image must be at least 3x3");
  GradientField g{Image(img.width, img.height, 1), Image(img.width, img.height, 1)};
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double lx = (img.at(reflect_index(x + 1, img.width), y) -
                         img.at(reflect_index(x - 1, img.width), y)) * 0.5;
      const double ly = (img.at(x, reflect_index(y + 1, img.height)) -
                         img.at(x, reflect_index(y - 1, img.height))) * 0.5;
      g.magnitude.at(x, y) = std::sqrt(lx * lx + ly * ly);
      g.orientation.at(x, y) = wrap_angle(std::atan2(ly, lx));
    }
  }
  return g;
}

namespace detail {

struct GradientSample {
  double magnitude;
  double orientation;
};

/// Single-pixel central-difference gradient; matches `gradients` exactly.
inline GradientSample sample_gradient(const Image& img, int x, int y) {
  const double lx = (img.at(reflect_index(x + 1, img.width), y) -
                     img.at(reflect_index(x - 1, img.width), y)) * 0.5;
  const double ly = (img.at(x, reflect_index(y + 1, img.height)) -
                     img.at(x, reflect_index(y - 1, img.height))) * 0.5;
  return {std::sqrt(lx * lx + ly * ly), wrap_angle(std::atan2(ly, lx))};
}

}  // namespace detail

/// Strided 2x subsampling: out(x, y) = in(2x, 2y), floor semantics on size.
inline Image downsample_half(const Image& img) {
  if (img.width < 2 || img.height < 2) throw std::invalid_argument("downsample_half: image must be at least 2x2");
  Image out(img.width / 2, img.height / 2, img.channels);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        out.at(x, y, c) = img.at(2 * x, 2 * y, c);
      }
    }
  }
  return out;
}

}  // namespace tilematch

#endif  // TILEMATCH_IMAGE_HPP
