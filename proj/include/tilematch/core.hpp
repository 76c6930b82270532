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

#ifndef TILEMATCH_CORE_HPP
#define TILEMATCH_CORE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tilematch {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File or decode failure while reading/writing images and reports.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Homography estimation failed (degenerate configuration, h33 ~ 0, singular matrix).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// A projected point mapped to infinity (homogeneous denominator ~ 0).
class PointAtInfinityError : public Error {
 public:
  using Error::Error;
};

/// RANSAC could not find a model with a minimal consensus set.
class NoConsensusError : public Error {
 public:
  using Error::Error;
};

/// Tile download failed after the configured retries.
class FetchError : public Error {
 public:
  using Error::Error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double theta) {
  double a = std::fmod(theta, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

}  // namespace tilematch

#endif  // TILEMATCH_CORE_HPP
