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

#ifndef TILEMATCH_IMAGE_IO_HPP
#define TILEMATCH_IMAGE_IO_HPP

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tilematch/image.hpp"

namespace tilematch {

namespace detail {

inline std::uint8_t to_byte(double v) {
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

/// Writes to a sibling temp file, then renames into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PngReadCtx {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

inline void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
  if (ctx->pos + len > ctx->size) {
    png_error(png, "unexpected end of PNG stream");
  }
  std::memcpy(out, ctx->data + ctx->pos, len);
  ctx->pos += len;
}

inline void png_write_to_string(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), len);
}

inline void png_flush_noop(png_structp) {}

}  // namespace detail

/// Decodes an 8-bit gray or RGB PNG from memory; values mapped to [0, 1] by /255.
/// Palette, low-bit-depth, 16-bit and alpha variants are normalized to 8-bit gray/RGB.
inline Image decode_png(const std::string& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw IoError("not a PNG stream");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  std::vector<std::uint8_t> raw;
  std::vector<png_bytep> rows;
  int width = 0, height = 0, channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decode failed");
  }
  detail::PngReadCtx ctx{reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size(), 0};
  png_set_read_fn(png, &ctx, detail::png_read_from_memory);
  png_read_info(png, info);

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  channels = static_cast<int>(png_get_channels(png, info));
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported PNG channel count: " + std::to_string(channels));
  }
  const std::size_t stride = png_get_rowbytes(png, info);
  raw.resize(stride * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) rows[y] = raw.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(width, height, channels);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* row = raw.data() + static_cast<std::size_t>(y) * stride;
    for (std::size_t i = 0; i < static_cast<std::size_t>(width) * channels; ++i) {
      img.data[static_cast<std::size_t>(y) * width * channels + i] = row[i] / 255.0;
    }
  }
  return img;
}

/// Encodes as 8-bit gray (1 channel) or RGB (3 channels) PNG.
inline std::string encode_png(const Image& img) {
  if (img.empty()) throw std::invalid_argument("encode_png: empty image");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encode failed");
  }
  png_set_write_fn(png, &out, detail::png_write_to_string, detail::png_flush_noop);
  const int color = (img.channels == 1) ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, img.width, img.height, 8, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        row[static_cast<std::size_t>(x) * img.channels + c] = detail::to_byte(img.at(x, y, c));
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

/// Binary PGM (P5), 8-bit, single channel.
inline Image decode_pgm(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError("not a binary PGM (P5) stream");
  auto next_token = [&in]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError("truncated PGM header");
  };
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w <= 0 || h <= 0 || maxval != 255) throw IoError("unsupported PGM header");
  in.get();  // single whitespace after maxval
  Image img(w, h, 1);
  std::vector<char> raw(static_cast<std::size_t>(w) * h);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError("truncated PGM data");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    img.data[i] = static_cast<std::uint8_t>(raw[i]) / 255.0;
  }
  return img;
}

inline std::string encode_pgm(const Image& img) {
  if (img.channels != 1) throw std::invalid_argument("encode_pgm: single-channel image required");
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.reserve(out.size() + img.data.size());
  for (double v : img.data) out.push_back(static_cast<char>(detail::to_byte(v)));
  return out;
}

/// Loads a PNG or binary PGM, dispatching on magic bytes.
inline Image load_image(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
  try {
    return decode_png(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

/// Saves by extension (.png or .pgm); write is atomic (temp + rename).
inline void save_image(const Image& img, const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pgm") {
    detail::write_file_atomic(path, encode_pgm(img));
  } else if (ext == ".png") {
    detail::write_file_atomic(path, encode_png(img));
  } else {
    throw std::invalid_argument("save_image: unsupported extension " + ext);
  }
}

}  // namespace tilematch

#endif  // TILEMATCH_IMAGE_IO_HPP
