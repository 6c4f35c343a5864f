#include "doctest.h"

#include <fstream>
#include <map>
#include <set>

#include "oracles.hpp"
#include "viscrf/pipeline.hpp"

using namespace viscrf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

PipelineConfig wall_config(const fs::path& out) {
  PipelineConfig cfg = parse_config(R"({
    "input": {"cafe_wall": {"rows": 3, "cols": 9, "tile": 50, "mortar": 2}},
    "dog": {"scales": [1, 2, 3, 4]}, "s": 2, "h": 8,
    "hough": {"fill_gap": 5, "min_length": 50}})");
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("cafe wall run produces rasters and statistics") {
  const auto dir = oracle::scratch_dir("int_wall");
  const RunReport report = run_pipeline(wall_config(dir));
  int rasters = 0, csvs = 0;
  for (const auto& f : report.files) {
    rasters += f.find("_dog_s") != std::string::npos && f.ends_with(".pgm");
    csvs += f.ends_with("_tilt.csv");
  }
  CHECK(rasters == 4);
  CHECK(csvs == 1);
  CHECK(report.scales == std::vector<double>{1, 2, 3, 4});
  REQUIRE(report.dog_analysis.size() == 4);
  bool h_at_2 = false;
  for (const auto& t : report.dog_analysis[1].stats) h_at_2 = h_at_2 || (t.bin == OrientationBin::H && t.n >= 1);
  CHECK(h_at_2);

  const std::string csv = slurp(dir / "cafewall_tilt.csv");
  CHECK(csv.starts_with("scale,bin,ref_angle_deg,n_segments,mean_angle_deg,mean_dev_deg,std_dev_deg,total_length_px\n"));
  CHECK(csv.find("\n2.000000,H,") != std::string::npos);
  CHECK(report.files.back() == "cafewall_report.json");
}

TEST_CASE("manifest lists exactly the files written") {
  const auto dir = oracle::scratch_dir("int_manifest");
  PipelineConfig cfg = wall_config(dir);
  cfg.log_enabled = true;
  cfg.outputs.binary = true;
  cfg.outputs.jet = true;
  cfg.outputs.overlays = true;
  run_pipeline(cfg);
  const Manifest m = read_manifest(dir);
  std::set<std::string> listed(m.files.begin(), m.files.end());
  CHECK(listed.size() == m.files.size());
  std::set<std::string> present;
  for (const auto& e : fs::directory_iterator(dir)) present.insert(e.path().filename().string());
  CHECK(listed == present);
  CHECK(m.layers.size() == 4 + 3);
  CHECK(listed.count("cafewall_log_s1_overlay.png") == 1);
  CHECK(listed.count("cafewall_log_tilt.csv") == 1);
}

TEST_CASE("identical configs give identical trees") {
  const auto a = oracle::scratch_dir("int_det_a");
  const auto b = oracle::scratch_dir("int_det_b");
  PipelineConfig cfg = wall_config(a);
  cfg.outputs.overlays = true;
  run_pipeline(cfg);
  cfg.out_dir = b;
  run_pipeline(cfg);
  auto ta = tree(a), tb = tree(b);
  REQUIRE(ta.size() == tb.size());
  for (const auto& [name, bytes] : ta) {
    if (name.ends_with("_report.json")) continue;
    CAPTURE(name);
    CHECK(tb.at(name) == bytes);
  }
}

TEST_CASE("golden image input matches the generated stimulus") {
  const auto a = oracle::scratch_dir("int_golden_a");
  const auto b = oracle::scratch_dir("int_golden_b");
  PipelineConfig cfg = parse_config(R"({
    "input": {"dot_grid": {"n_rows": 3, "n_cols": 3, "tile": 100, "dot": 20, "gap": 5, "layout": "cross_bulge"}},
    "stem": "bulge", "dog": {"scales": [2, 4]}, "s": 2, "h": 8, "outputs": {"overlays": true}})");
  cfg.out_dir = a;
  run_pipeline(cfg);
  cfg.input = fs::path(VISCRF_FIXTURES_DIR) / "cross_bulge_3x3.pgm";
  cfg.out_dir = b;
  run_pipeline(cfg);
  const auto ta = tree(a), tb = tree(b);
  CHECK(ta.size() == tb.size());
  int compared = 0;
  for (const auto& [name, bytes] : ta) {
    if (name.ends_with("_report.json") || name == "manifest.json") continue;
    CAPTURE(name);
    CHECK(tb.at(name) == bytes);
    ++compared;
  }
  CHECK(compared >= 6);
}

TEST_CASE("feature sizes drive the scale list") {
  const auto dir = oracle::scratch_dir("int_features");
  PipelineConfig cfg = parse_config(R"({
    "input": {"cafe_wall": {"rows": 2, "cols": 4, "tile": 20, "mortar": 2}},
    "dog": {"feature_sizes": [4, 8], "grid_step": 0.5}, "s": 2, "outputs": {"csv": false}})");
  cfg.out_dir = dir;
  const RunReport report = run_pipeline(cfg);
  CHECK(report.scales == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(report.dog_analysis.empty());
  CHECK(fs::exists(dir / "cafewall_dog_s1.5.pgm"));
}
