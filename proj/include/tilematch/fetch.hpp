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

#ifndef TILEMATCH_FETCH_HPP
#define TILEMATCH_FETCH_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <thread>

#include "httplib.h"

// glibc's <resolv.h>, dragged in by httplib, leaks a `_res` object-like macro
// that mangles later Eigen includes; scrub it so include order stays free.
#ifdef _res
#undef _res
#endif

#include "tilematch/core.hpp"
#include "tilematch/dataset.hpp"
#include "tilematch/image_io.hpp"

namespace tilematch {

struct FetchConfig {
  std::string base_url = "http://localhost:8080";  // scheme://host[:port]
  std::string path = "/maps/api/staticmap";
  std::string api_key;  // supplied via environment; never persisted
  std::string maptype = "satellite";
  int retries = 3;       // attempts per tile
  int delay_ms = 200;    // pause between consecutive HTTP requests
  int timeout_sec = 10;  // connection and read timeout
};

struct FetchRegion {
  double origin_lat = 0.0;  // center of tile (0, 0)
  double origin_lon = 0.0;
  int zoom = 17;
  int tile_size = 256;  // requested square size, pixels
  int rows = 0;
  int cols = 0;
  double overlap_fraction = 0.5;
};

namespace detail {

/// Web Mercator world-pixel coordinates at the given zoom (256 * 2^zoom
/// pixels per world side).
inline Point2 latlon_to_world(double lat, double lon, int zoom) {
  const double world = 256.0 * static_cast<double>(std::int64_t{1} << zoom);
  const double x = (lon + 180.0) / 360.0 * world;
  double siny = std::sin(lat * std::numbers::pi / 180.0);
  siny = std::min(std::max(siny, -0.9999), 0.9999);
  const double y =
      (0.5 - std::log((1.0 + siny) / (1.0 - siny)) / (4.0 * std::numbers::pi)) * world;
  return {x, y};
}

inline void world_to_latlon(Point2 p, int zoom, double* lat, double* lon) {
  const double world = 256.0 * static_cast<double>(std::int64_t{1} << zoom);
  *lon = p.x / world * 360.0 - 180.0;
  const double n = std::numbers::pi * (1.0 - 2.0 * p.y / world);
  *lat = std::atan(std::sinh(n)) * 180.0 / std::numbers::pi;
}

inline std::string format_center(double lat, double lon) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.8f,%.8f", lat, lon);
  return buf;
}

}  // namespace detail

/// Downloads the grid of static-map tiles, one sequential HTTP GET per cell
/// in row-major order, with bounded retries and an inter-request delay.
/// Tile centers are spaced round(tile_size * (1 - overlap)) world pixels
/// apart at the configured zoom. Already-present files that decode to the
/// requested size are skipped, so an interrupted run can resume. On a tile
/// failing all retries, a manifest covering the tiles fetched so far is
/// written before a FetchError naming the tile is thrown. The API key is
/// sent in the request only, never written to disk.
inline TileManifest fetch_tiles(const FetchConfig& config, const FetchRegion& region,
                                const std::filesystem::path& out_dir) {
  if (region.rows < 1 || region.cols < 1) {
    throw std::invalid_argument("fetch grid must be at least 1x1");
  }
  if (region.tile_size < 1) throw std::invalid_argument("tile size must be positive");
  if (region.zoom < 0 || region.zoom > 23) throw std::invalid_argument("zoom must be in [0, 23]");
  if (!(region.overlap_fraction > 0.0 && region.overlap_fraction < 1.0)) {
    throw std::invalid_argument("overlap_fraction must lie in (0, 1)");
  }
  if (config.api_key.empty()) {
    throw std::invalid_argument("missing API key: set the configured environment variable");
  }
  if (config.retries < 1) throw std::invalid_argument("retries must be at least 1");

  std::filesystem::create_directories(out_dir);

  const double stride =
      std::round(region.tile_size * (1.0 - region.overlap_fraction));
  const Point2 origin =
      detail::latlon_to_world(region.origin_lat, region.origin_lon, region.zoom);
  const std::string size_param =
      std::to_string(region.tile_size) + "x" + std::to_string(region.tile_size);

  httplib::Client client(config.base_url);
  client.set_connection_timeout(config.timeout_sec);
  client.set_read_timeout(config.timeout_sec);

  TileManifest manifest;
  manifest.source = "fetched";
  manifest.grid_rows = region.rows;
  manifest.grid_cols = region.cols;
  manifest.overlap_fraction = region.overlap_fraction;
  manifest.zoom = region.zoom;

  bool any_request = false;
  for (int r = 0; r < region.rows; ++r) {
    for (int c = 0; c < region.cols; ++c) {
      double lat = 0.0, lon = 0.0;
      detail::world_to_latlon({origin.x + c * stride, origin.y + r * stride}, region.zoom,
                              &lat, &lon);
      TileRecord rec;
      rec.id = tile_id(r, c);
      rec.row = r;
      rec.col = c;
      rec.center_lat = lat;
      rec.center_lon = lon;
      rec.path = rec.id + ".png";
      rec.width = region.tile_size;
      rec.height = region.tile_size;
      const std::filesystem::path file = out_dir / rec.path;

      bool have_tile = false;
      if (std::filesystem::exists(file)) {
        try {
          const Image existing = load_image(file);
          have_tile = existing.width == region.tile_size && existing.height == region.tile_size;
        } catch (const Error&) {
          have_tile = false;  // corrupt partial download; refetch
        }
      }

      std::string failure;
      for (int attempt = 0; !have_tile && attempt < config.retries; ++attempt) {
        if (any_request && config.delay_ms > 0) {
          std::this_thread::sleep_for(std::chrono::milliseconds(config.delay_ms));
        }
        any_request = true;
        httplib::Params params{{"center", detail::format_center(lat, lon)},
                               {"zoom", std::to_string(region.zoom)},
                               {"size", size_param},
                               {"maptype", config.maptype},
                               {"key", config.api_key}};
        httplib::Result res = client.Get(config.path, params, httplib::Headers{});
        if (!res) {
          failure = "transport error: " + httplib::to_string(res.error());
          continue;
        }
        if (res->status != 200) {
          failure = "HTTP status " + std::to_string(res->status);
          continue;
        }
        try {
          const Image img = decode_png(res->body);
          if (img.width != region.tile_size || img.height != region.tile_size) {
            failure = "server returned " + std::to_string(img.width) + "x" +
                      std::to_string(img.height) + ", expected " + size_param;
            continue;
          }
        } catch (const Error& e) {
          failure = std::string("undecodable response: ") + e.what();
          continue;
        }
        detail::write_file_atomic(file, res->body);
        have_tile = true;
      }

      if (!have_tile) {
        // Checkpoint what we have so a re-run can skip completed tiles.
        save_manifest(manifest, out_dir / "manifest.json");
        throw FetchError("tile (" + std::to_string(r) + ", " + std::to_string(c) +
                         ") failed after " + std::to_string(config.retries) +
                         " attempts: " + failure);
      }
      manifest.tiles.push_back(std::move(rec));
    }
  }

  save_manifest(manifest, out_dir / "manifest.json");
  for (auto& t : manifest.tiles) t.path = (out_dir / t.path).string();
  return manifest;
}

}  // namespace tilematch

#endif  // TILEMATCH_FETCH_HPP
