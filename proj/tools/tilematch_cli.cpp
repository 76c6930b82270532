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

// Command-line front end: detect, match, evaluate, synth, fetch.
//
// Every command is deterministic given its flags; all randomness (RANSAC
// sampling, the BRIEF test pattern, synthetic textures) derives from the
// top-level --seed with fixed labels. Output files are written atomically
// (temp + rename). Exit code 0 iff the requested artifact was produced.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tilematch/tilematch.hpp"

namespace {

using namespace tilematch;

/// Pipeline knobs shared by detect/match/evaluate. CLI flags beat config-file
/// values, which beat these built-in defaults (CLI11's native precedence).
struct RunConfig {
  std::string descriptor = "sift";
  int budget = 500;
  double epsilon = 3.0;
  int iters = 2000;
  double rho = 0.10;
  SiftParams sift;
  OrbParams orb;
  bool pattern_seed_given = false;
};

void add_pipeline_options(CLI::App* cmd, RunConfig& rc, bool with_descriptor = true) {
  if (with_descriptor) {
    cmd->add_option("--descriptor", rc.descriptor, "Feature kind")
        ->check(CLI::IsMember({"sift", "orb"}))
        ->capture_default_str();
    cmd->add_option("--budget", rc.budget, "Keypoint budget per image")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  cmd->add_option("--epsilon", rc.epsilon, "RANSAC reprojection threshold, px")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--iters", rc.iters, "RANSAC iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--rho", rc.rho, "Inlier-ratio threshold for a positive prediction")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9))
      ->capture_default_str();

  cmd->add_option("--sift-octaves", rc.sift.octaves)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--sift-levels", rc.sift.levels_per_octave)->check(CLI::Range(2, 64))
      ->capture_default_str();
  cmd->add_option("--sift-sigma0", rc.sift.sigma0)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--sift-contrast", rc.sift.contrast_threshold)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--orb-threshold", rc.orb.fast_threshold)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--orb-arc", rc.orb.fast_arc)->check(CLI::Range(9, 16))
      ->capture_default_str();
  cmd->add_option("--orb-patch", rc.orb.patch_size)->check(CLI::Range(8, 255))
      ->capture_default_str();
  cmd->add_option("--orb-bits", rc.orb.num_bits)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--orb-pattern-seed", rc.orb.pattern_seed,
                  "BRIEF pattern seed (default: derived from --seed)")
      ->trigger_on_parse()
      ->each([&rc](const std::string&) { rc.pattern_seed_given = true; });
}

/// Per-component seed expansion so one --seed reproduces everything.
EvalConfig make_eval_config(const RunConfig& rc, std::uint64_t seed) {
  EvalConfig cfg;
  cfg.rho = rc.rho;
  cfg.ransac.epsilon = rc.epsilon;
  cfg.ransac.max_iters = rc.iters;
  cfg.sift = rc.sift;
  cfg.orb = rc.orb;
  cfg.seed = seed;
  if (!rc.pattern_seed_given) cfg.orb.pattern_seed = derive_seed(seed, "brief-pattern");
  return cfg;
}

int cmd_detect(const std::string& image_path, const RunConfig& rc, std::uint64_t seed,
               std::string out) {
  const EvalConfig cfg = make_eval_config(rc, seed);
  const Image gray = to_grayscale(load_image(image_path));
  if (out.empty()) out = image_path + ".detections.jsonl";

  std::string lines;
  std::size_t count = 0;
  if (rc.descriptor == "sift") {
    const auto feats = sift_features(gray, rc.budget, cfg.sift);
    count = feats.size();
    lines = detection_lines(feats);
  } else {
    const auto feats = orb_features(gray, rc.budget, cfg.orb);
    count = feats.size();
    lines = detection_lines(feats);
  }
  detail::write_file_atomic(out, lines);
  std::cout << count << " keypoints -> " << out << "\n";
  return 0;
}

int cmd_match(const std::string& path_a, const std::string& path_b, const RunConfig& rc,
              std::uint64_t seed, std::string out, const std::string& viz) {
  const EvalConfig cfg = make_eval_config(rc, seed);
  const Image img_a = load_image(path_a);
  const Image img_b = load_image(path_b);
  const Image gray_a = to_grayscale(img_a);
  const Image gray_b = to_grayscale(img_b);
  if (out.empty()) out = "match.json";

  const auto set_a = detail::detect_features(gray_a, rc.descriptor, rc.budget, cfg);
  const auto set_b = detail::detect_features(gray_b, rc.descriptor, rc.budget, cfg);

  MatchSet matches;
  if (set_a.binary) {
    matches = brute_force_match(std::span<const BriefDescriptor>(set_a.bin_desc),
                                std::span<const BriefDescriptor>(set_b.bin_desc));
  } else {
    matches = brute_force_match(std::span<const SiftDescriptor>(set_a.real_desc),
                                std::span<const SiftDescriptor>(set_b.real_desc));
  }

  std::vector<Correspondence> corrs;
  corrs.reserve(matches.matches.size());
  for (const auto& m : matches.matches) {
    corrs.push_back({set_a.points[m.index_a], set_b.points[m.index_b]});
  }

  // No consensus is a valid negative result, not an error.
  const std::uint64_t ransac_seed = derive_seed(seed, "ransac");
  std::vector<int> inliers;
  Homography H;
  bool have_model = false;
  if (corrs.size() >= 4) {
    try {
      RansacResult res = ransac_homography(corrs, cfg.ransac, ransac_seed);
      inliers = std::move(res.inlier_indices);
      H = res.homography;
      have_model = true;
    } catch (const NoConsensusError&) {
    }
  }

  const double ratio = inlier_ratio(static_cast<int>(matches.matches.size()),
                                    static_cast<int>(inliers.size()));
  nlohmann::json j;
  j["descriptor"] = rc.descriptor;
  j["keypoint_budget"] = rc.budget;
  j["n_keypoints_a"] = set_a.points.size();
  j["n_keypoints_b"] = set_b.points.size();
  j["n_matches"] = matches.matches.size();
  j["n_inliers"] = inliers.size();
  j["inlier_ratio"] = ratio;
  j["predicted"] = predict(ratio, rc.rho);
  j["rho"] = rc.rho;
  j["seed"] = ransac_seed;
  j["homography"] = have_model ? nlohmann::json(H.row_major()) : nlohmann::json(nullptr);
  j["matches"] = match_set_to_json(matches)["matches"];
  detail::write_file_atomic(out, j.dump(2) + "\n");
  std::cout << matches.matches.size() << " matches, " << inliers.size()
            << " inliers (ratio " << format_double(ratio) << ") -> " << out << "\n";

  if (!viz.empty()) {
    std::unique_ptr<bool[]> flag_store(new bool[matches.matches.size() + 1]());
    const std::span<const bool> flags(flag_store.get(), matches.matches.size());
    for (int i : inliers) flag_store[static_cast<std::size_t>(i)] = true;
    std::vector<double> radii_a, radii_b;
    if (rc.descriptor == "sift") {  // circle radius tracks keypoint scale
      const auto fa = sift_features(gray_a, rc.budget, cfg.sift);
      const auto fb = sift_features(gray_b, rc.budget, cfg.sift);
      for (const auto& f : fa) radii_a.push_back(f.keypoint.sigma);
      for (const auto& f : fb) radii_b.push_back(f.keypoint.sigma);
    }
    const std::string stem = std::filesystem::path(out).replace_extension().string();
    if (viz == "pre" || viz == "both") {
      save_image(render_matches(img_a, img_b, set_a.points, set_b.points, matches.matches,
                                flags, false, radii_a, radii_b),
                 stem + "_pre.png");
      std::cout << "viz -> " << stem + "_pre.png" << "\n";
    }
    if (viz == "post" || viz == "both") {
      save_image(render_matches(img_a, img_b, set_a.points, set_b.points, matches.matches,
                                flags, true, radii_a, radii_b),
                 stem + "_post.png");
      std::cout << "viz -> " << stem + "_post.png" << "\n";
    }
  }
  return 0;
}

int cmd_evaluate(const std::string& manifest_path, const RunConfig& rc,
                 const std::vector<std::string>& descriptors, const std::vector<int>& budgets,
                 std::uint64_t seed, std::string out) {
  const EvalConfig cfg = make_eval_config(rc, seed);
  const TileManifest manifest = load_manifest(manifest_path);
  if (out.empty()) out = ".";
  std::filesystem::create_directories(out);

  const EvaluationRun run = evaluate_dataset(manifest, descriptors, budgets, rc.rho, cfg);
  const std::filesystem::path pair_csv = std::filesystem::path(out) / "pair_reports.csv";
  const std::filesystem::path summ_csv = std::filesystem::path(out) / "summary.csv";
  detail::write_file_atomic(pair_csv, pair_reports_csv(run.reports));
  detail::write_file_atomic(summ_csv, summary_csv(run.summary));
  std::cout << summary_table(run.summary);
  std::cout << "pair reports -> " << pair_csv.string() << "\n"
            << "summary      -> " << summ_csv.string() << "\n";
  return 0;
}

int cmd_synth(const std::string& base_path, int width, int height, int tile_size,
              double overlap, std::uint64_t seed, std::string out) {
  if (out.empty()) out = "synth";
  const Image base = base_path.empty()
                         ? generate_textured_image(width, height, derive_seed(seed, "texture"))
                         : load_image(base_path);
  const SynthesisResult result = synthesize_tiles(base, tile_size, overlap, out);
  std::cout << result.manifest.tiles.size() << " tiles ("
            << result.manifest.grid_rows << "x" << result.manifest.grid_cols << ") -> " << out
            << "/manifest.json\n";
  return 0;
}

int cmd_fetch(const FetchRegion& region, FetchConfig config, const std::string& key_env,
              std::string out) {
  if (out.empty()) out = "fetched";
  const char* key = std::getenv(key_env.c_str());
  if (key == nullptr || *key == '\0') {
    std::cerr << "error: missing API key: environment variable " << key_env << " is not set\n";
    return 1;
  }
  config.api_key = key;
  try {
    const TileManifest manifest = fetch_tiles(config, region, out);
    std::cout << manifest.tiles.size() << " tiles -> " << out << "/manifest.json\n";
    return 0;
  } catch (const FetchError& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "partial manifest checkpoint: " << out << "/manifest.json\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tilematch: local-feature matching over overlapping map-tile grids"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key=value config file (flat; sub.key for subcommand options)");
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Root seed; every random component derives from it")
      ->capture_default_str();

  RunConfig rc;
  std::string out, image, image_b, viz, manifest_path, base_path;
  std::vector<std::string> descriptors{"sift", "orb"};
  std::vector<int> budgets{100, 200, 500, 1000, 2000};
  int width = 1024, height = 1024, tile_size = 256;
  double overlap = 0.5;
  FetchRegion region;
  FetchConfig fetch_cfg;
  std::string key_env = "TILEMATCH_API_KEY";

  CLI::App* det = app.add_subcommand("detect", "Detect keypoints, write JSON-lines records");
  det->add_option("image", image, "Input image (PNG or PGM)")->required();
  det->add_option("--out", out, "Output path (default <image>.detections.jsonl)");
  add_pipeline_options(det, rc);

  CLI::App* mat = app.add_subcommand("match", "Match two images and verify with RANSAC");
  mat->add_option("image_a", image, "Query image")->required();
  mat->add_option("image_b", image_b, "Train image")->required();
  mat->add_option("--out", out, "Report path (default match.json)");
  mat->add_option("--viz", viz, "Write side-by-side match PNGs")
      ->check(CLI::IsMember({"pre", "post", "both"}));
  add_pipeline_options(mat, rc);

  CLI::App* eva = app.add_subcommand("evaluate", "Evaluate every tile pair of a manifest");
  eva->add_option("manifest", manifest_path, "manifest.json path")->required();
  eva->add_option("--out", out, "Output directory (default .)");
  eva->add_option("--descriptors", descriptors, "Feature kinds to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"sift", "orb"}))
      ->capture_default_str();
  eva->add_option("--budgets", budgets, "Keypoint budgets to sweep")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_pipeline_options(eva, rc, /*with_descriptor=*/false);

  CLI::App* syn = app.add_subcommand("synth", "Crop an overlapping tile grid from a base image");
  syn->add_option("base", base_path, "Base image (default: generated texture)");
  syn->add_option("--width", width, "Generated base width")->check(CLI::Range(8, 1 << 20))
      ->capture_default_str();
  syn->add_option("--height", height, "Generated base height")->check(CLI::Range(8, 1 << 20))
      ->capture_default_str();
  syn->add_option("--tile-size", tile_size, "Tile side, px")->check(CLI::PositiveNumber)
      ->capture_default_str();
  syn->add_option("--overlap", overlap, "Linear overlap fraction between neighbors")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9))
      ->capture_default_str();
  syn->add_option("--out", out, "Output directory (default synth)");

  CLI::App* fet = app.add_subcommand("fetch", "Download a static-map tile grid over HTTP");
  fet->add_option("--origin-lat", region.origin_lat, "Latitude of tile (0,0) center")
      ->required();
  fet->add_option("--origin-lon", region.origin_lon, "Longitude of tile (0,0) center")
      ->required();
  fet->add_option("--zoom", region.zoom)->check(CLI::Range(0, 23))->capture_default_str();
  fet->add_option("--rows", region.rows, "Grid rows")->required()->check(CLI::PositiveNumber);
  fet->add_option("--cols", region.cols, "Grid cols")->required()->check(CLI::PositiveNumber);
  fet->add_option("--tile-size", region.tile_size)->check(CLI::PositiveNumber)
      ->capture_default_str();
  fet->add_option("--overlap", region.overlap_fraction)
      ->check(CLI::Range(1e-9, 1.0 - 1e-9))
      ->capture_default_str();
  fet->add_option("--base-url", fetch_cfg.base_url)->capture_default_str();
  fet->add_option("--url-path", fetch_cfg.path)->capture_default_str();
  fet->add_option("--maptype", fetch_cfg.maptype)->capture_default_str();
  fet->add_option("--key-env", key_env, "Environment variable holding the API key")
      ->capture_default_str();
  fet->add_option("--retries", fetch_cfg.retries)->check(CLI::PositiveNumber)
      ->capture_default_str();
  fet->add_option("--delay-ms", fetch_cfg.delay_ms)->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fet->add_option("--timeout", fetch_cfg.timeout_sec)->check(CLI::PositiveNumber)
      ->capture_default_str();
  fet->add_option("--out", out, "Output directory (default fetched)");

  for (CLI::App* sub : {det, mat, eva, syn, fet}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (det->parsed()) return cmd_detect(image, rc, seed, out);
    if (mat->parsed()) return cmd_match(image, image_b, rc, seed, out, viz);
    if (eva->parsed()) return cmd_evaluate(manifest_path, rc, descriptors, budgets, seed, out);
    if (syn->parsed()) return cmd_synth(base_path, width, height, tile_size, overlap, seed, out);
    if (fet->parsed()) return cmd_fetch(region, fetch_cfg, key_env, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
