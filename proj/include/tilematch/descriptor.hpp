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

#ifndef TILEMATCH_DESCRIPTOR_HPP
#define TILEMATCH_DESCRIPTOR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilematch {

/// Real-valued gradient-histogram descriptor (length M^2 * B, 128 by default).
using SiftDescriptor = std::vector<double>;

/// Packed binary descriptor. Bit i lives at words[i / 64], position i % 64.
struct BriefDescriptor {
  int num_bits = 0;
  std::vector<std::uint64_t> words;

  BriefDescriptor() = default;
  explicit BriefDescriptor(int bits)
      : num_bits(bits), words(static_cast<std::size_t>((bits + 63) / 64), 0) {
    if (bits <= 0) throw std::invalid_argument("descriptor bit count must be positive");
  }

  bool bit(int i) const { return (words[i / 64] >> (i % 64)) & 1u; }
  void set_bit(int i) { words[i / 64] |= (std::uint64_t{1} << (i % 64)); }
};

/// Lowercase hex, two digits per byte, byte 0 (bits 0-7) first; bit 0 is the
/// least significant bit of the first byte.
inline std::string to_hex(const BriefDescriptor& d) {
  static const char* digits = "0123456789abcdef";
  const int n_bytes = (d.num_bits + 7) / 8;
  std::string out;
  out.reserve(static_cast<std::size_t>(n_bytes) * 2);
  for (int b = 0; b < n_bytes; ++b) {
    const auto byte = static_cast<unsigned>((d.words[b / 8] >> ((b % 8) * 8)) & 0xFFu);
    out.push_back(digits[byte >> 4]);
    out.push_back(digits[byte & 0xF]);
  }
  return out;
}

inline BriefDescriptor brief_from_hex(const std::string& hex, int num_bits) {
  const int n_bytes = (num_bits + 7) / 8;
  if (static_cast<int>(hex.size()) != n_bytes * 2) {
    throw std::invalid_argument("hex descriptor length does not match bit count");
  }
  auto nibble = [](char c) -> std::uint64_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint64_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint64_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint64_t>(c - 'A' + 10);
    throw std::invalid_argument("invalid hex digit in descriptor");
  };
  BriefDescriptor d(num_bits);
  for (int b = 0; b < n_bytes; ++b) {
    const std::uint64_t byte = (nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]);
    d.words[b / 8] |= byte << ((b % 8) * 8);
  }
  return d;
}

}  // namespace tilematch

#endif  // TILEMATCH_DESCRIPTOR_HPP
