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

#ifndef TILEMATCH_VISUALIZE_HPP
#define TILEMATCH_VISUALIZE_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "tilematch/core.hpp"
#include "tilematch/image.hpp"
#include "tilematch/matcher.hpp"

namespace tilematch {

struct Color {
  double r = 0.0, g = 0.0, b = 0.0;
};

inline constexpr Color kGreen{0.1, 0.9, 0.1};
inline constexpr Color kRed{0.95, 0.15, 0.15};
inline constexpr Color kYellow{0.95, 0.9, 0.2};

inline Image to_rgb(const Image& img) {
  if (img.channels == 3) return img;
  Image out(img.width, img.height, 3);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double v = img.at(x, y);
      out.at(x, y, 0) = v;
      out.at(x, y, 1) = v;
      out.at(x, y, 2) = v;
    }
  }
  return out;
}

namespace detail {

inline void put_pixel(Image& rgb, int x, int y, Color c) {
  if (x < 0 || x >= rgb.width || y < 0 || y >= rgb.height) return;
  rgb.at(x, y, 0) = c.r;
  rgb.at(x, y, 1) = c.g;
  rgb.at(x, y, 2) = c.b;
}

}  // namespace detail

/// DDA line; dashed style draws 4-pixel segments separated by 4-pixel gaps.
inline void draw_line(Image& rgb, double x0, double y0, double x1, double y1, Color c,
                      bool dashed = false) {
  const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(x1 - x0),
                                                                    std::abs(y1 - y0)))));
  for (int t = 0; t <= steps; ++t) {
    if (dashed && (t / 4) % 2 == 1) continue;
    const double f = static_cast<double>(t) / steps;
    detail::put_pixel(rgb, static_cast<int>(std::lround(x0 + f * (x1 - x0))),
                      static_cast<int>(std::lround(y0 + f * (y1 - y0))), c);
  }
}

inline void draw_circle(Image& rgb, double cx, double cy, double radius, Color c) {
  const int steps = std::max(8, static_cast<int>(std::ceil(kTwoPi * radius)));
  for (int t = 0; t < steps; ++t) {
    const double a = kTwoPi * t / steps;
    detail::put_pixel(rgb, static_cast<int>(std::lround(cx + radius * std::cos(a))),
                      static_cast<int>(std::lround(cy + radius * std::sin(a))), c);
  }
}

/// Side-by-side match rendering: image A left, image B right, keypoint
/// circles (radius per keypoint, default 3), and one line per match. When
/// inliers_only is false every match is drawn — inliers as solid green,
/// outliers as dashed red (brute-force view); otherwise only inliers appear
/// (post-verification view). inlier_flags holds one flag per match.
inline Image render_matches(const Image& img_a, const Image& img_b,
                            std::span<const Point2> pts_a, std::span<const Point2> pts_b,
                            std::span<const Match> matches,
                            std::span<const bool> inlier_flags, bool inliers_only,
                            std::span<const double> radii_a = {},
                            std::span<const double> radii_b = {}) {
  const Image left = to_rgb(img_a);
  const Image right = to_rgb(img_b);
  Image canvas(left.width + right.width, std::max(left.height, right.height), 3);
  for (int y = 0; y < left.height; ++y) {
    for (int x = 0; x < left.width; ++x) {
      for (int c = 0; c < 3; ++c) canvas.at(x, y, c) = left.at(x, y, c);
    }
  }
  for (int y = 0; y < right.height; ++y) {
    for (int x = 0; x < right.width; ++x) {
      for (int c = 0; c < 3; ++c) canvas.at(left.width + x, y, c) = right.at(x, y, c);
    }
  }

  for (std::size_t i = 0; i < pts_a.size(); ++i) {
    draw_circle(canvas, pts_a[i].x, pts_a[i].y, i < radii_a.size() ? radii_a[i] : 3.0, kYellow);
  }
  for (std::size_t i = 0; i < pts_b.size(); ++i) {
    draw_circle(canvas, left.width + pts_b[i].x, pts_b[i].y,
                i < radii_b.size() ? radii_b[i] : 3.0, kYellow);
  }

  for (std::size_t i = 0; i < matches.size(); ++i) {
    const bool inlier = i < inlier_flags.size() && inlier_flags[i];
    if (inliers_only && !inlier) continue;
    const Point2 pa = pts_a[matches[i].index_a];
    const Point2 pb = pts_b[matches[i].index_b];
    draw_line(canvas, pa.x, pa.y, left.width + pb.x, pb.y, inlier ? kGreen : kRed, !inlier);
  }
  return canvas;
}

}  // namespace tilematch

#endif  // TILEMATCH_VISUALIZE_HPP
