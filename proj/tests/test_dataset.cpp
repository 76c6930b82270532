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

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>

#include "doctest.h"
#include "test_util.hpp"
#include "tilematch/dataset.hpp"
#include "tilematch/image_io.hpp"

using namespace tilematch;
using namespace tilematch::test;

TEST_CASE("tile ids are zero-padded and ordered") {
  CHECK(tile_id(0, 0) == "r000_c000");
  CHECK(tile_id(12, 345) == "r012_c345");
  CHECK(tile_id(1, 2) < tile_id(1, 10));
  CHECK(tile_id(2, 0) > tile_id(1, 99));
}

TEST_CASE("grid adjacency defines ground truth") {
  TileManifest m;
  m.source = "synthetic";
  m.grid_rows = 2;
  m.grid_cols = 2;
  m.overlap_fraction = 0.5;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      TileRecord t;
      t.id = tile_id(r, c);
      t.row = r;
      t.col = c;
      t.center_lat = r * 128.0;  // planted crop offsets (y, x)
      t.center_lon = c * 128.0;
      m.tiles.push_back(t);
    }
  }

  const auto labels = ground_truth_from_grid(m);
  REQUIRE(labels.size() == 6);  // C(4,2)

  std::map<std::pair<std::string, std::string>, const GroundTruthLabel*> by_pair;
  for (const auto& lab : labels) {
    CHECK(lab.id_a < lab.id_b);
    by_pair[{lab.id_a, lab.id_b}] = &lab;
  }
  CHECK(by_pair.at({"r000_c000", "r000_c001"})->label);
  CHECK(by_pair.at({"r000_c000", "r001_c000"})->label);
  CHECK(by_pair.at({"r000_c001", "r001_c001"})->label);
  CHECK(by_pair.at({"r001_c000", "r001_c001"})->label);
  CHECK(!by_pair.at({"r000_c000", "r001_c001"})->label);  // diagonal
  CHECK(!by_pair.at({"r000_c001", "r001_c000"})->label);  // anti-diagonal

  // The planted homography is the translation taking tile-A coordinates into
  // tile B's frame.
  const auto* right = by_pair.at({"r000_c000", "r000_c001"});
  REQUIRE(right->planted_homography.has_value());
  CHECK(right->planted_homography->at(0, 2) == doctest::Approx(-128.0));
  CHECK(right->planted_homography->at(1, 2) == doctest::Approx(0.0));
  const auto* down = by_pair.at({"r000_c000", "r001_c000"});
  REQUIRE(down->planted_homography.has_value());
  CHECK(down->planted_homography->at(0, 2) == doctest::Approx(0.0));
  CHECK(down->planted_homography->at(1, 2) == doctest::Approx(-128.0));

  // Negatives and fetched manifests carry no planted transform.
  CHECK(!by_pair.at({"r000_c000", "r001_c001"})->planted_homography.has_value());
  m.source = "fetched";
  for (const auto& lab : ground_truth_from_grid(m)) {
    CHECK(!lab.planted_homography.has_value());
  }
}

TEST_CASE("textured base image is deterministic and in range") {
  const Image a = generate_textured_image(96, 80, 123);
  const Image b = generate_textured_image(96, 80, 123);
  const Image c = generate_textured_image(96, 80, 124);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);
  CHECK(a.width == 96);
  CHECK(a.height == 80);
  for (double v : a.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  // Texture has real contrast, not a near-constant field.
  double lo = 1.0, hi = 0.0;
  for (double v : a.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo > 0.5);
  CHECK_THROWS_AS(generate_textured_image(4, 64, 1), std::invalid_argument);
}

TEST_CASE("synthesized tiles are exact crops with full bookkeeping") {
  TempDir dir("synth");
  const Image base = generate_textured_image(256, 256, 321);
  const SynthesisResult res = synthesize_tiles(base, 128, 0.5, dir.path());

  // stride = 64: (256 - 128) / 64 + 1 = 3 per side.
  CHECK(res.manifest.grid_rows == 3);
  CHECK(res.manifest.grid_cols == 3);
  CHECK(res.manifest.source == "synthetic");
  CHECK(res.manifest.overlap_fraction == 0.5);
  REQUIRE(res.manifest.tiles.size() == 9);
  CHECK(res.labels.size() == 36);  // C(9,2)

  for (const auto& t : res.manifest.tiles) {
    CHECK(std::filesystem::exists(t.path));
    const Image tile = load_image(t.path);
    CHECK(tile.width == 128);
    CHECK(tile.height == 128);
    // Pixels equal the base crop at the planted offsets (quantized to 8 bit).
    const int x0 = static_cast<int>(t.center_lon);
    const int y0 = static_cast<int>(t.center_lat);
    CHECK(x0 == t.col * 64);
    CHECK(y0 == t.row * 64);
    for (int y = 0; y < 128; y += 17) {
      for (int x = 0; x < 128; x += 17) {
        const double expected = detail::to_byte(base.at(x0 + x, y0 + y)) / 255.0;
        CHECK(tile.at(x, y) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }

  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "labels.json"));

  // Round trips through the saved files.
  const TileManifest loaded = load_manifest(dir / "manifest.json");
  CHECK(loaded.grid_rows == 3);
  REQUIRE(loaded.tiles.size() == 9);
  for (std::size_t i = 0; i < loaded.tiles.size(); ++i) {
    CHECK(loaded.tiles[i].id == res.manifest.tiles[i].id);
    CHECK(std::filesystem::exists(loaded.tiles[i].path));  // resolved to the manifest dir
  }
  const auto labels = load_labels(dir / "labels.json");
  REQUIRE(labels.size() == res.labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(labels[i].id_a == res.labels[i].id_a);
    CHECK(labels[i].label == res.labels[i].label);
  }
}

TEST_CASE("synthesis rejects bad geometry") {
  const Image base = generate_textured_image(128, 128, 5);
  TempDir dir("synthbad");
  CHECK_THROWS_AS(synthesize_tiles(base, 4, 0.5, dir.path()), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_tiles(base, 128, 0.5, dir.path()), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_tiles(base, 64, 1.5, dir.path()), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_tiles(base, 64, 0.0, dir.path()), std::invalid_argument);
}

TEST_CASE("manifest io validates content") {
  TempDir dir("manifest");
  CHECK_THROWS_AS(load_manifest(dir / "missing.json"), IoError);

  detail::write_file_atomic(dir / "garbage.json", "{not json");
  CHECK_THROWS(load_manifest(dir / "garbage.json"));

  // A fetched manifest with zoom survives a save/load cycle.
  TileManifest m;
  m.source = "fetched";
  m.grid_rows = 1;
  m.grid_cols = 2;
  m.overlap_fraction = 0.5;
  m.zoom = 17;
  for (int c = 0; c < 2; ++c) {
    TileRecord t;
    t.id = tile_id(0, c);
    t.row = 0;
    t.col = c;
    t.center_lat = 37.5 + 0.001 * c;
    t.center_lon = -122.0;
    t.path = "tile_" + std::to_string(c) + ".png";
    t.width = 64;
    t.height = 64;
    m.tiles.push_back(t);
  }
  save_manifest(m, dir / "manifest.json");
  const TileManifest back = load_manifest(dir / "manifest.json");
  CHECK(back.source == "fetched");
  REQUIRE(back.zoom.has_value());
  CHECK(*back.zoom == 17);
  REQUIRE(back.tiles.size() == 2);
  CHECK(back.tiles[1].center_lat == doctest::Approx(37.501));
  // Relative paths resolve against the manifest's directory.
  CHECK(std::filesystem::path(back.tiles[0].path).is_absolute());
}
