// Acceptance suite: one line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "oracles.hpp"
#include "viscrf/pipeline.hpp"

using namespace viscrf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // 0 = no runtime bound
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const double kSweepS[] = {1.4, 1.6, 2.0, 2.6, 2.8, 5.0};
const double kSweepSigma[] = {4.0, 8.0, 12.0};
const double kSweepH[] = {2.0, 4.0, 6.0, 8.0, 10.0, 12.0};

Outcome kernel_zero_sum() {
  double worst = 0.0;
  for (double s : kSweepS) {
    for (double sc : kSweepSigma) {
      for (double h : kSweepH) worst = std::max(worst, std::abs(dog_kernel({sc, s, h}).sum()));
    }
  }
  return {worst <= 1e-12, fmt("max |sum| = %.3g", worst)};
}

Outcome path_equivalence() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Raster r = oracle::noise(64, 64, 1000 + i);
    for (double s : kSweepS) {
      for (double sc : kSweepSigma) {
        for (double h : kSweepH) {
          const DoGParams p{sc, s, h};
          worst = std::max(worst, oracle::max_abs_diff(dog_response(r, p, DoGMethod::direct),
                                                       dog_response(r, p, DoGMethod::blur_diff)));
        }
      }
    }
  }
  return {worst <= 1e-9, fmt("max |direct - blur_diff| = %.3g", worst)};
}

Outcome log_limit() {
  const Raster r = oracle::noise(128, 128, 4242);
  const EdgeMap log = emap_log(emap_dog(r, ScaleList({1.00, 1.25}), 1.6, 8.0));
  const double sigma = 1.12;
  const Kernel k = log_kernel(sigma, window_size(sigma, 8.0));
  const Raster ref = oracle::convolve_clamped(r, {k.size, k.weights});
  // best-fit scalar including sign: |cosine|
  const double c = std::abs(oracle::cosine(log.layers[0].response, ref));
  return {c >= 0.99, fmt("|cosine| = %.4f (need >= 0.99)", c)};
}

Outcome brightness_invariance() {
  double worst = 0.0;
  for (double level : {0.0, 0.5, 1.0}) {
    const EdgeMap dog = emap_dog(Raster(64, 64, level), ScaleList({1, 2, 4, 8}), 1.6, 8.0);
    for (const auto& l : dog.layers) worst = std::max(worst, max_abs(l.response));
    for (const auto& l : emap_log(dog).layers) worst = std::max(worst, max_abs(l.response));
  }
  return {worst <= 1e-9, fmt("max |response| = %.3g", worst)};
}

Outcome rotation_equivariance() {
  const Raster r = oracle::noise(96, 80, 7);
  const ScaleList scales({1.0, 2.0, 4.0});
  const EdgeMap plain = emap_dog(r, scales, 1.6, 8.0);
  const EdgeMap turned = emap_dog(rotate90(r), scales, 1.6, 8.0);
  const int band = window_size(scales.values().back(), 8.0) / 2;
  double interior = 0.0, border = 0.0;
  for (std::size_t l = 0; l < scales.size(); ++l) {
    const Raster expect = rotate90(plain.layers[l].response);
    const Raster& got = turned.layers[l].response;
    for (int y = 0; y < got.height(); ++y) {
      for (int x = 0; x < got.width(); ++x) {
        const double d = std::abs(got(x, y) - expect(x, y));
        const bool inside = x >= band && y >= band && x < got.width() - band && y < got.height() - band;
        double& slot = inside ? interior : border;
        slot = std::max(slot, d);
      }
    }
  }
  return {interior == 0.0 && border <= 1e-9,
          fmt("interior max diff = %.3g", interior) + fmt(", border band max diff = %.3g", border)};
}

Outcome mortar_cue_scales() {
  CafeWallSpec spec;
  spec.rows = 3;
  spec.cols = 4;
  spec.tile = 200;
  spec.mortar = 8;
  // (T+M) x 2T window holding one complete interior mortar row
  const int y0 = spec.tile / 2;
  const Raster patch = crop(cafe_wall(spec), {0, y0, 2 * spec.tile, spec.tile + spec.mortar});
  const double mortar_mid = spec.tile - y0 + (spec.mortar - 1) / 2.0;
  const EdgeMap map = emap_dog(patch, ScaleList({4, 8, 12, 16, 20, 24, 28}), 2.0, 8.0);
  HoughParams hp;
  hp.fill_gap = 5;
  hp.min_length = 200;

  int along_mortar_8 = 0, long_h_28 = 0;
  for (const auto& layer : map.layers) {
    if (layer.scale != 8.0 && layer.scale != 28.0) continue;
    const LayerAnalysis la = analyze_layer(layer.response, layer.scale, hp, {}, false);
    for (const auto& s : la.segments) {
      if (bin_orientation(s.angle) != OrientationBin::H || s.length < 200.0) continue;
      const double mid = (s.y1 + s.y2) / 2.0;
      if (layer.scale == 8.0 && std::abs(mid - mortar_mid) <= spec.tile / 4.0) ++along_mortar_8;
      if (layer.scale == 28.0) ++long_h_28;
    }
  }
  return {along_mortar_8 > 0 && long_h_28 == 0,
          "sigma 8: " + std::to_string(along_mortar_8) + " H segments >= 200 px along the mortar row; sigma 28: " +
              std::to_string(long_h_28) + " H segments >= 200 px (need 0)"};
}

Outcome tilt_alternation() {
  const CafeWallSpec spec;  // 3 x 9, T=50, M=2
  HoughParams hp;
  hp.fill_gap = 5;
  hp.min_length = 50;
  const LayerAnalysis la = analyze_layer(dog_response(cafe_wall(spec), {2.0, 2.0, 8.0}), 2.0, hp, {}, false);

  // mortar centre lines
  std::vector<double> rows;
  for (int k = 1; k < spec.rows; ++k) rows.push_back(k * spec.tile + (k - 1) * spec.mortar + (spec.mortar - 1) / 2.0);
  std::vector<double> dev_sum(rows.size(), 0.0);
  std::vector<int> pos(rows.size(), 0), neg(rows.size(), 0);
  double abs_sum = 0.0;
  int n = 0;
  for (const auto& s : la.segments) {
    if (bin_orientation(s.angle) != OrientationBin::H) continue;
    const double d = deviation(s.angle, OrientationBin::H);
    abs_sum += std::abs(d);
    ++n;
    const double mid = (s.y1 + s.y2) / 2.0;
    std::size_t best = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (std::abs(mid - rows[k]) < std::abs(mid - rows[best])) best = k;
    }
    dev_sum[best] += d;
    (d > 0 ? pos : neg)[best] += d != 0.0;
  }
  const double mean_abs = n ? abs_sum / n : 0.0;
  bool alternating = rows.size() >= 2;
  std::string signs;
  int prev = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int sign = pos[k] > neg[k] ? 1 : (neg[k] > pos[k] ? -1 : 0);
    signs += sign > 0 ? '+' : (sign < 0 ? '-' : '0');
    if (sign == 0 || (k > 0 && sign == prev)) alternating = false;
    prev = sign;
  }
  return {n > 0 && mean_abs >= 1.0 && mean_abs <= 15.0 && alternating,
          std::to_string(n) + " H segments, mean |dev| = " + fmt("%.2f deg", mean_abs) + ", row signs " + signs};
}

Outcome scale_arithmetic() {
  const ScaleSelection sel = select_scales({20, 100, 1}, 1.6, 0.5);
  const bool ok = sel.raw == std::vector<double>{6.25, 31.25, 0.3125};
  return {ok, fmt("raw = {%.10g", sel.raw[0]) + fmt(", %.10g", sel.raw[1]) + fmt(", %.10g}", sel.raw[2])};
}

Outcome stimulus_audits() {
  CafeWallSpec wall;
  wall.rows = 3;
  wall.cols = 9;
  wall.tile = 50;
  wall.mortar = 2;
  const Raster w = cafe_wall(wall);
  std::size_t mortar = 0;
  for (double v : w.samples()) mortar += v == wall.lum_mortar;
  bool ok = w.width() == 450 && w.height() == 154 && mortar == 2u * 2u * 450u;

  DotGridSpec dots;
  dots.n_rows = dots.n_cols = 9;
  dots.tile = 100;
  dots.dot = 20;
  dots.gap = 5;
  dots.layout = DotLayout::cross_bulge;
  const Raster d = dot_checkerboard(dots);
  ok = ok && d.width() == 900 && d.height() == 900;
  int bad_tiles = 0;
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) {
      if (!dots.is_dark_tile(r, c)) continue;
      int light = 0;
      for (int y = r * 100; y < r * 100 + 100; ++y) {
        for (int x = c * 100; x < c * 100 + 100; ++x) light += d(x, y) == dots.lum_light;
      }
      bad_tiles += light != 1600;
    }
  }
  ok = ok && bad_tiles == 0;
  return {ok, std::to_string(w.width()) + "x" + std::to_string(w.height()) + ", mortar px " + std::to_string(mortar) +
                  "; dots " + std::to_string(d.width()) + "x" + std::to_string(d.height()) + ", dark tiles off 1600: " +
                  std::to_string(bad_tiles)};
}

std::map<std::string, std::string> data_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.ends_with("_report.json")) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[name] = {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  return out;
}

Outcome determinism() {
  PipelineConfig cfg = parse_config(R"({
    "input": {"cafe_wall": {"rows": 3, "cols": 9, "tile": 50, "mortar": 2}},
    "dog": {"scales": [1, 2, 3, 4]}, "s": 2, "h": 8, "log_enabled": true,
    "outputs": {"binary": true, "jet": true, "overlays": true}})");
  const fs::path dir_a = oracle::scratch_dir("acceptance_det_a");
  const fs::path dir_b = oracle::scratch_dir("acceptance_det_b");
  cfg.out_dir = dir_a;
  run_pipeline(cfg);
  cfg.out_dir = dir_b;
  run_pipeline(cfg);
  const auto a = data_tree(dir_a);
  const auto b = data_tree(dir_b);
  int differing = 0;
  for (const auto& [name, bytes] : a) differing += !b.count(name) || b.at(name) != bytes;
  return {a.size() == b.size() && differing == 0 && !a.empty(),
          std::to_string(a.size()) + " files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "kernel zero-sum over the parameter sweep", 5.0, kernel_zero_sum},
      {2, "direct and blur_diff paths agree", 30.0, path_equivalence},
      {3, "EMap-LoG approximates the analytic LoG", 0.0, log_limit},
      {4, "brightness invariance", 0.0, brightness_invariance},
      {5, "rotation equivariance", 0.0, rotation_equivariance},
      {6, "mortar cue present at sigma 8, gone at sigma 28", 120.0, mortar_cue_scales},
      {7, "H-bin tilt magnitude and alternating sign", 0.0, tilt_alternation},
      {8, "scale-selection arithmetic", 0.0, scale_arithmetic},
      {9, "stimulus audits", 0.0, stimulus_audits},
      {10, "pipeline determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.budget_s);
    }
    failed += !o.pass;
    std::printf("%s  criterion %2d  %-48s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
