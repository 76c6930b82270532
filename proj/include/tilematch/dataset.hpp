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

#ifndef TILEMATCH_DATASET_HPP
#define TILEMATCH_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "tilematch/core.hpp"
#include "tilematch/geometry.hpp"
#include "tilematch/image.hpp"
#include "tilematch/image_io.hpp"
#include "tilematch/random.hpp"

namespace tilematch {

struct TileRecord {
  std::string id;
  int row = 0;
  int col = 0;
  // Degrees for fetched tiles; planted crop-origin pixel offsets (y, x) for
  // synthetic tiles.
  double center_lat = 0.0;
  double center_lon = 0.0;
  std::string path;
  int width = 0;
  int height = 0;
};

struct TileManifest {
  std::string source;  // "synthetic" | "fetched"
  int grid_rows = 0;
  int grid_cols = 0;
  double overlap_fraction = 0.0;
  std::optional<int> zoom;
  std::vector<TileRecord> tiles;
};

struct GroundTruthLabel {
  std::string id_a;  // lexicographically smaller
  std::string id_b;
  bool label = false;
  std::optional<Homography> planted_homography;  // synthetic positives only
};

/// Zero-padded grid id; lexicographic order equals row-major grid order.
inline std::string tile_id(int row, int col) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "r%03d_c%03d", row, col);
  return buf;
}

/// One label per unordered tile pair: positive iff 4-neighborhood adjacent.
/// Synthetic positives carry the exact planted translation taking tile-A
/// pixel coordinates into tile B's frame.
inline std::vector<GroundTruthLabel> ground_truth_from_grid(const TileManifest& manifest) {
  std::vector<const TileRecord*> tiles;
  tiles.reserve(manifest.tiles.size());
  for (const auto& t : manifest.tiles) tiles.push_back(&t);
  std::sort(tiles.begin(), tiles.end(),
            [](const TileRecord* a, const TileRecord* b) { return a->id < b->id; });

  std::vector<GroundTruthLabel> labels;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    for (std::size_t j = i + 1; j < tiles.size(); ++j) {
      const TileRecord& a = *tiles[i];
      const TileRecord& b = *tiles[j];
      GroundTruthLabel lab;
      lab.id_a = a.id;
      lab.id_b = b.id;
      lab.label = std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
      if (lab.label && manifest.source == "synthetic") {
        lab.planted_homography = Homography::from_row_major(
            {1, 0, a.center_lon - b.center_lon, 0, 1, a.center_lat - b.center_lat, 0, 0, 1});
      }
      labels.push_back(std::move(lab));
    }
  }
  return labels;
}

namespace detail {

inline Image crop(const Image& img, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || x0 + w > img.width || y0 + h > img.height) {
    throw std::invalid_argument("crop window outside the image");
  }
  Image out(w, h, img.channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels; ++c) {
        out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Deterministic multi-scale texture. A multi-octave value-noise relief is
/// covered with dense translucent shapes (star polygons, ellipses, annuli)
/// drawn coarse to fine, then dusted with fine noise. The relief shows through
/// every shape, so even same-looking corners sit on locally unique intensity
/// patterns and descriptors stay distinctive between unrelated regions; the
/// octave wavelengths avoid divisors of common tile strides so the lattice
/// never aligns across crops. Shape counts scale with image area.
inline Image generate_textured_image(int width, int height, std::uint64_t seed) {
  if (width < 8 || height < 8) throw std::invalid_argument("textured image must be at least 8x8");
  Image img(width, height, 1);
  Xorshift64Star rng(seed);

  // Value-noise relief: bilinear interpolation of random grids at several
  // wavelengths, blended into a mid-gray base.
  for (auto& v : img.data) v = 0.5;
  const struct {
    int cell;
    double weight;
  } octaves[] = {{52, 0.26}, {23, 0.24}, {11, 0.20}, {5, 0.18}};
  for (const auto& oct : octaves) {
    const int gw = width / oct.cell + 2;
    const int gh = height / oct.cell + 2;
    std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
    for (auto& v : grid) v = rng.next_double();
    for (int y = 0; y < height; ++y) {
      const double gy = static_cast<double>(y) / oct.cell;
      const int iy = static_cast<int>(gy);
      const double fy = gy - iy;
      for (int x = 0; x < width; ++x) {
        const double gx = static_cast<double>(x) / oct.cell;
        const int ix = static_cast<int>(gx);
        const double fx = gx - ix;
        const double top = grid[iy * gw + ix] * (1 - fx) + grid[iy * gw + ix + 1] * fx;
        const double bot = grid[(iy + 1) * gw + ix] * (1 - fx) + grid[(iy + 1) * gw + ix + 1] * fx;
        img.at(x, y) += oct.weight * (top * (1 - fy) + bot * fy - 0.5);
      }
    }
  }

  const double area_scale = static_cast<double>(width) * height / (1024.0 * 1024.0);
  struct Band {
    int count;
    int min_size;
    int max_size;
    bool polygons_only;   // curved rims at this scale read as corner chains
    bool contrast_forced; // value pinned relative to the local background
  };
  const Band bands[] = {
      {static_cast<int>(std::lround(120 * area_scale)), 48, 128, false, false},
      {static_cast<int>(std::lround(1800 * area_scale)), 12, 44, true, false},
      {static_cast<int>(std::lround(24000 * area_scale)), 4, 10, false, true},
  };

  // Shapes are star polygons with jittered vertex angles and radii (corner
  // angles vary continuously, so no two corners look alike), plus ellipses
  // and elliptical annuli for curved variety. They are translucent: the
  // relief underneath keeps their interiors locally unique.
  for (const Band& band : bands) {
    for (int i = 0; i < std::max(band.count, 1); ++i) {
      const int size = band.min_size + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(
                                           band.max_size - band.min_size + 1)));
      const double cx = rng.next_below(static_cast<std::uint32_t>(width)) + rng.next_double();
      const double cy = rng.next_below(static_cast<std::uint32_t>(height)) + rng.next_double();
      double value = 0.12 + 0.76 * rng.next_double();
      double alpha = 0.45 + 0.15 * rng.next_double();
      if (band.contrast_forced) {
        // The finest band must stay visible to a blob detector no matter what
        // was drawn underneath, so its value is offset from the local
        // background instead of sampled independently.
        const double bg = img.at(std::min(static_cast<int>(cx), width - 1),
                                 std::min(static_cast<int>(cy), height - 1));
        const double c = 0.30 + 0.40 * rng.next_double();
        value = std::min(0.97, std::max(0.03, bg + (rng.next_below(2) ? c : -c)));
        alpha = 0.90;
      }
      // Linear intensity ramp across the shape: repeated shapes get distinct
      // interiors, which keeps descriptors between unrelated tiles apart.
      const double ramp_dir = kTwoPi * rng.next_double();
      const double ramp = 0.10 * rng.next_double();
      const double rx = ramp * std::cos(ramp_dir) / size, ry = ramp * std::sin(ramp_dir) / size;
      const std::uint64_t kind = band.polygons_only ? rng.next_below(2) : rng.next_below(4);

      std::function<bool(double, double)> inside;
      if (kind <= 1) {  // star polygon, 3..7 vertices
        const int k = 3 + static_cast<int>(rng.next_below(5));
        std::vector<double> px(k + 1), py(k + 1);
        for (int v = 0; v < k; ++v) {
          const double ang = kTwoPi * (v + 0.2 + 0.6 * rng.next_double()) / k;
          const double rad = 0.5 * size * (0.55 + 0.45 * rng.next_double());
          px[v] = rad * std::cos(ang);
          py[v] = rad * std::sin(ang);
        }
        px[k] = px[0];
        py[k] = py[0];
        inside = [k, px = std::move(px), py = std::move(py)](double dx, double dy) {
          bool in = false;  // even-odd crossing rule
          for (int v = 0; v < k; ++v) {
            if ((py[v] > dy) != (py[v + 1] > dy) &&
                dx < px[v] + (dy - py[v]) / (py[v + 1] - py[v]) * (px[v + 1] - px[v])) {
              in = !in;
            }
          }
          return in;
        };
      } else {  // ellipse (kind 2) or elliptical annulus (kind 3)
        const double a = 0.5 * size;
        const double b = a * (0.45 + 0.55 * rng.next_double());
        const double phi = kTwoPi * rng.next_double();
        const double cph = std::cos(phi), sph = std::sin(phi);
        const double hole = kind == 3 ? 0.45 + 0.3 * rng.next_double() : 0.0;
        inside = [a, b, cph, sph, hole](double dx, double dy) {
          const double u = (dx * cph + dy * sph) / a;
          const double v = (-dx * sph + dy * cph) / b;
          const double q = u * u + v * v;
          return q <= 1.0 && q >= hole * hole;
        };
      }

      const int reach = size / 2 + 2;
      const int x0 = std::max(0, static_cast<int>(cx) - reach);
      const int y0 = std::max(0, static_cast<int>(cy) - reach);
      const int x1 = std::min(width - 1, static_cast<int>(cx) + reach);
      const int y1 = std::min(height - 1, static_cast<int>(cy) + reach);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double dx = x - cx, dy = y - cy;
          if (inside(dx, dy)) {
            const double fill = value + rx * dx + ry * dy;
            img.at(x, y) = alpha * fill + (1.0 - alpha) * img.at(x, y);
          }
        }
      }
    }
  }

  // Single-pixel gravel: isolated one-pixel corners for the corner detector,
  // below the blob detector's contrast threshold at its coarser scales.
  const int gravel = static_cast<int>(std::lround(30000 * area_scale));
  for (int i = 0; i < gravel; ++i) {
    const int cx = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(width)));
    const int cy = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(height)));
    const double delta =
        (0.45 + 0.30 * rng.next_double()) * (rng.next_below(2) ? 1 : -1);
    img.at(cx, cy) = std::min(0.97, std::max(0.03, img.at(cx, cy) + delta));
  }

  for (auto& v : img.data) {
    v = std::min(1.0, std::max(0.0, v + 0.02 * (rng.next_double() - 0.5)));
  }
  return img;
}

struct SynthesisResult {
  TileManifest manifest;  // tile paths resolved against out_dir
  std::vector<GroundTruthLabel> labels;
};

namespace detail {

inline nlohmann::json manifest_to_json(const TileManifest& m) {
  nlohmann::json j;
  j["source"] = m.source;
  j["grid_rows"] = m.grid_rows;
  j["grid_cols"] = m.grid_cols;
  j["overlap_fraction"] = m.overlap_fraction;
  if (m.zoom) j["zoom"] = *m.zoom;
  j["tiles"] = nlohmann::json::array();
  for (const auto& t : m.tiles) {
    nlohmann::json tj;
    tj["id"] = t.id;
    tj["row"] = t.row;
    tj["col"] = t.col;
    tj["center_lat"] = t.center_lat;
    tj["center_lon"] = t.center_lon;
    tj["path"] = t.path;
    tj["width"] = t.width;
    tj["height"] = t.height;
    j["tiles"].push_back(std::move(tj));
  }
  return j;
}

inline nlohmann::json labels_to_json(const std::vector<GroundTruthLabel>& labels) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& lab : labels) {
    nlohmann::json lj;
    lj["id_a"] = lab.id_a;
    lj["id_b"] = lab.id_b;
    lj["label"] = lab.label;
    if (lab.planted_homography) {
      lj["planted_homography"] = lab.planted_homography->row_major();
    }
    j.push_back(std::move(lj));
  }
  return j;
}

}  // namespace detail

inline void save_manifest(const TileManifest& manifest, const std::filesystem::path& path) {
  detail::write_file_atomic(path, detail::manifest_to_json(manifest).dump(2) + "\n");
}

inline void save_labels(const std::vector<GroundTruthLabel>& labels,
                        const std::filesystem::path& path) {
  detail::write_file_atomic(path, detail::labels_to_json(labels).dump(2) + "\n");
}

/// Parses a manifest file; relative tile paths are resolved against the
/// manifest's own directory.
inline TileManifest load_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest parse failed: " + std::string(e.what()));
  }
  TileManifest m;
  try {
    m.source = j.at("source").get<std::string>();
    m.grid_rows = j.at("grid_rows").get<int>();
    m.grid_cols = j.at("grid_cols").get<int>();
    m.overlap_fraction = j.at("overlap_fraction").get<double>();
    if (j.contains("zoom")) m.zoom = j["zoom"].get<int>();
    const auto base = path.parent_path();
    std::set<std::pair<int, int>> cells;
    for (const auto& tj : j.at("tiles")) {
      TileRecord t;
      t.id = tj.at("id").get<std::string>();
      t.row = tj.at("row").get<int>();
      t.col = tj.at("col").get<int>();
      if (tj.contains("center_lat")) t.center_lat = tj["center_lat"].get<double>();
      if (tj.contains("center_lon")) t.center_lon = tj["center_lon"].get<double>();
      std::filesystem::path p = tj.at("path").get<std::string>();
      t.path = (p.is_absolute() ? p : base / p).string();
      t.width = tj.at("width").get<int>();
      t.height = tj.at("height").get<int>();
      if (!cells.insert({t.row, t.col}).second) {
        throw IoError("manifest lists grid cell (" + std::to_string(t.row) + ", " +
                      std::to_string(t.col) + ") twice");
      }
      m.tiles.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest field error: " + std::string(e.what()));
  }
  if (!(m.overlap_fraction > 0.0 && m.overlap_fraction < 1.0)) {
    throw IoError("manifest overlap_fraction must lie in (0, 1)");
  }
  return m;
}

inline std::vector<GroundTruthLabel> load_labels(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("labels parse failed: " + std::string(e.what()));
  }
  std::vector<GroundTruthLabel> labels;
  try {
    for (const auto& lj : j) {
      GroundTruthLabel lab;
      lab.id_a = lj.at("id_a").get<std::string>();
      lab.id_b = lj.at("id_b").get<std::string>();
      lab.label = lj.at("label").get<bool>();
      if (lj.contains("planted_homography")) {
        lab.planted_homography =
            Homography::from_row_major(lj["planted_homography"].get<std::array<double, 9>>());
      }
      labels.push_back(std::move(lab));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("labels field error: " + std::string(e.what()));
  }
  return labels;
}

/// Crops an overlapping tile grid from the base image (stride =
/// round(tile_size * (1 - overlap_fraction))), writes one PNG per tile plus
/// manifest.json and labels.json into out_dir, and returns both structures.
/// The grid must be at least 2x2.
inline SynthesisResult synthesize_tiles(const Image& base, int tile_size,
                                        double overlap_fraction,
                                        const std::filesystem::path& out_dir) {
  if (tile_size < 8) throw std::invalid_argument("tile size must be at least 8 pixels");
  if (!(overlap_fraction > 0.0 && overlap_fraction < 1.0)) {
    throw std::invalid_argument("overlap_fraction must lie in (0, 1)");
  }
  const int stride = static_cast<int>(std::lround(tile_size * (1.0 - overlap_fraction)));
  if (stride < 1) throw std::invalid_argument("overlap too large: stride rounds to zero");
  if (base.width < tile_size + stride || base.height < tile_size + stride) {
    throw std::invalid_argument("base image too small for a 2x2 tile grid");
  }
  const int n_cols = (base.width - tile_size) / stride + 1;
  const int n_rows = (base.height - tile_size) / stride + 1;

  std::filesystem::create_directories(out_dir);

  TileManifest manifest;
  manifest.source = "synthetic";
  manifest.grid_rows = n_rows;
  manifest.grid_cols = n_cols;
  manifest.overlap_fraction = overlap_fraction;
  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c < n_cols; ++c) {
      const int x0 = c * stride;
      const int y0 = r * stride;
      TileRecord rec;
      rec.id = tile_id(r, c);
      rec.row = r;
      rec.col = c;
      rec.center_lat = y0;
      rec.center_lon = x0;
      rec.path = rec.id + ".png";
      rec.width = tile_size;
      rec.height = tile_size;
      save_image(detail::crop(base, x0, y0, tile_size, tile_size), out_dir / rec.path);
      manifest.tiles.push_back(std::move(rec));
    }
  }

  SynthesisResult result;
  result.labels = ground_truth_from_grid(manifest);
  save_manifest(manifest, out_dir / "manifest.json");
  save_labels(result.labels, out_dir / "labels.json");
  for (auto& t : manifest.tiles) t.path = (out_dir / t.path).string();
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace tilematch

#endif  // TILEMATCH_DATASET_HPP
