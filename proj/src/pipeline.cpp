#include "viscrf/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace viscrf {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kManifestFormat = "viscrf-manifest/1";

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// -- JSON field access with dotted error paths --------------------------------

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(join(path, key), "unknown field");
  }
}

double get_double(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_doubles(const json& obj, const std::string& path, const char* key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(join(path, key), "expected an array of numbers");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

CafeWallSpec parse_cafe_wall(const json& j, const std::string& path) {
  check_keys(j, path, {"rows", "cols", "tile", "mortar", "shift", "lum_dark", "lum_light", "lum_mortar"});
  CafeWallSpec s;
  s.rows = get_int(j, path, "rows", s.rows);
  s.cols = get_int(j, path, "cols", s.cols);
  s.tile = get_int(j, path, "tile", s.tile);
  s.mortar = get_int(j, path, "mortar", s.mortar);
  if (j.contains("shift")) s.shift = get_int(j, path, "shift", 0);
  s.lum_dark = get_double(j, path, "lum_dark", s.lum_dark);
  s.lum_light = get_double(j, path, "lum_light", s.lum_light);
  s.lum_mortar = get_double(j, path, "lum_mortar", s.lum_mortar);
  return s;
}

DotGridSpec parse_dot_grid(const json& j, const std::string& path) {
  check_keys(j, path, {"n_rows", "n_cols", "tile", "dot", "gap", "layout", "placements", "lum_dark", "lum_light"});
  DotGridSpec s;
  s.n_rows = get_int(j, path, "n_rows", s.n_rows);
  s.n_cols = get_int(j, path, "n_cols", s.n_cols);
  s.tile = get_int(j, path, "tile", s.tile);
  s.dot = get_int(j, path, "dot", s.dot);
  s.gap = get_int(j, path, "gap", s.gap);
  try {
    s.layout = parse_dot_layout(get_string(j, path, "layout", to_string(s.layout)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(join(path, "layout"), e.what());
  }
  if (j.contains("placements")) {
    const json& list = j.at("placements");
    const std::string lpath = join(path, "placements");
    if (!list.is_array()) throw ConfigError(lpath, "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string ip = lpath + "[" + std::to_string(i) + "]";
      check_keys(list[i], ip, {"tile_row", "tile_col", "x", "y"});
      s.placements.push_back({get_int(list[i], ip, "tile_row", 0), get_int(list[i], ip, "tile_col", 0),
                              get_int(list[i], ip, "x", 0), get_int(list[i], ip, "y", 0)});
    }
  }
  s.lum_dark = get_double(j, path, "lum_dark", s.lum_dark);
  s.lum_light = get_double(j, path, "lum_light", s.lum_light);
  return s;
}

json cafe_wall_json(const CafeWallSpec& s) {
  json j = {{"rows", s.rows},         {"cols", s.cols},           {"tile", s.tile},
            {"mortar", s.mortar},     {"lum_dark", s.lum_dark},   {"lum_light", s.lum_light},
            {"lum_mortar", s.lum_mortar}};
  if (s.shift) j["shift"] = *s.shift;
  return j;
}

json dot_grid_json(const DotGridSpec& s) {
  json j = {{"n_rows", s.n_rows}, {"n_cols", s.n_cols},     {"tile", s.tile},          {"dot", s.dot},
            {"gap", s.gap},       {"layout", to_string(s.layout)}, {"lum_dark", s.lum_dark}, {"lum_light", s.lum_light}};
  if (s.layout == DotLayout::custom) {
    json list = json::array();
    for (const auto& p : s.placements) {
      list.push_back({{"tile_row", p.tile_row}, {"tile_col", p.tile_col}, {"x", p.x}, {"y", p.y}});
    }
    j["placements"] = list;
  }
  return j;
}

json config_json(const PipelineConfig& cfg) {
  json j;
  if (const auto* cw = std::get_if<CafeWallSpec>(&cfg.input)) {
    j["input"] = {{"cafe_wall", cafe_wall_json(*cw)}};
  } else if (const auto* dg = std::get_if<DotGridSpec>(&cfg.input)) {
    j["input"] = {{"dot_grid", dot_grid_json(*dg)}};
  } else if (const auto* p = std::get_if<fs::path>(&cfg.input)) {
    j["input"] = {{"image", p->string()}};
  }
  if (cfg.crop) j["crop"] = {{"x0", cfg.crop->x0}, {"y0", cfg.crop->y0}, {"w", cfg.crop->w}, {"h", cfg.crop->h}};
  if (!cfg.stem.empty()) j["stem"] = cfg.stem;
  json dog;
  if (!cfg.scales.empty()) dog["scales"] = cfg.scales;
  if (!cfg.feature_sizes.empty()) dog["feature_sizes"] = cfg.feature_sizes;
  dog["grid_step"] = cfg.grid_step;
  j["dog"] = dog;
  j["s"] = cfg.surround_ratio;
  j["h"] = cfg.window_ratio;
  j["log_enabled"] = cfg.log_enabled;
  j["threshold"] = to_string(cfg.threshold.mode);
  j["hough"] = {{"theta_res", cfg.hough.theta_res}, {"rho_res", cfg.hough.rho_res},
                {"num_peaks", cfg.hough.num_peaks}, {"peak_floor", cfg.hough.peak_floor},
                {"fill_gap", cfg.hough.fill_gap},   {"min_length", cfg.hough.min_length}};
  const auto& o = cfg.outputs;
  j["outputs"] = {{"rasters", o.rasters}, {"binary", o.binary},     {"jet", o.jet},          {"csv", o.csv},
                  {"segments", o.segments}, {"overlays", o.overlays}, {"manifest", o.manifest}};
  j["out_dir"] = cfg.out_dir.string();
  return j;
}

// -- stage wrappers ------------------------------------------------------------

template <class F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(stage, e.what(), false);
  } catch (const IoError& e) {
    throw StageError(stage, e.what(), true);
  } catch (const fs::filesystem_error& e) {
    throw StageError(stage, e.what(), true);
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), false);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

std::string kind_name(EdgeMap::Kind k) { return k == EdgeMap::Kind::dog ? "dog" : "log"; }

json layers_json(const std::vector<ManifestLayer>& layers) {
  json out = json::array();
  for (const auto& l : layers) {
    out.push_back({{"kind", kind_name(l.kind)}, {"scale", l.scale}, {"max_abs", l.max_abs}, {"file", l.file}});
  }
  return out;
}

struct LayerFiles {
  std::string signed_file, binary_file, jet_file;
};

// Writes one layer's rasters and records the files written.
void write_layer(const fs::path& dir, const std::string& stem, EdgeMap::Kind kind, const EdgeLayer& layer,
                 const EdgeMapWriteOptions& opts, const ThresholdPolicy& policy) {
  if (opts.rasters) {
    write_raster(layer.response, dir / layer_file_name(stem, kind, layer.scale, "", ".pgm"),
                 DisplayMode::signed_symmetric);
  }
  if (opts.binary) {
    ThresholdPolicy sign = policy;
    sign.mode = ThresholdPolicy::Mode::sign;
    write_raster(binarize(layer.response, sign), dir / layer_file_name(stem, kind, layer.scale, "_bin", ".pgm"),
                 DisplayMode::linear_unit);
  }
  if (opts.jet) {
    write_rgb(render_jetwhite(layer.response), dir / layer_file_name(stem, kind, layer.scale, "_jet", ".png"));
  }
}

std::vector<std::string> planned_layer_files(const std::string& stem, const EdgeMap& map,
                                             const EdgeMapWriteOptions& opts) {
  std::vector<std::string> files;
  for (const auto& layer : map.layers) {
    if (opts.rasters) files.push_back(layer_file_name(stem, map.kind, layer.scale, "", ".pgm"));
    if (opts.binary) files.push_back(layer_file_name(stem, map.kind, layer.scale, "_bin", ".pgm"));
    if (opts.jet) files.push_back(layer_file_name(stem, map.kind, layer.scale, "_jet", ".png"));
  }
  return files;
}

std::vector<ManifestLayer> manifest_layers(const std::string& stem, const EdgeMap& map, bool rasters) {
  std::vector<ManifestLayer> out;
  for (const auto& layer : map.layers) {
    out.push_back({map.kind, layer.scale, max_abs(layer.response),
                   rasters ? layer_file_name(stem, map.kind, layer.scale, "", ".pgm") : std::string()});
  }
  return out;
}

std::string stats_csv(const std::vector<LayerAnalysis>& layers) {
  std::ostringstream out;
  write_tilt_csv(layers, out);
  return out.str();
}

std::string segments_csv(const std::vector<LayerAnalysis>& layers) {
  std::ostringstream out;
  write_segments_csv(layers, out);
  return out.str();
}

json stats_json(const std::vector<LayerAnalysis>& layers) {
  json out = json::array();
  for (const auto& layer : layers) {
    for (const auto& t : layer.stats) {
      out.push_back({{"scale", t.scale},       {"bin", to_string(t.bin)}, {"n", t.n},
                     {"mean_dev", t.mean_dev}, {"std_dev", t.std_dev},    {"total_length", t.total_length}});
    }
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

// -- config --------------------------------------------------------------------

void PipelineConfig::validate() const {
  if (std::holds_alternative<std::monostate>(input)) throw ConfigError("input", "no input source given");
  try {
    if (const auto* cw = std::get_if<CafeWallSpec>(&input)) cw->validate();
    if (const auto* dg = std::get_if<DotGridSpec>(&input)) dg->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::holds_alternative<CafeWallSpec>(input) ? "input.cafe_wall" : "input.dot_grid", e.what());
  }
  if (const auto* p = std::get_if<fs::path>(&input); p && p->empty()) throw ConfigError("input.image", "empty path");
  if (crop && (crop->x0 < 0 || crop->y0 < 0 || crop->w < 1 || crop->h < 1)) {
    throw ConfigError("crop", "offsets must be >= 0 and sizes >= 1");
  }
  if (scales.empty() && feature_sizes.empty()) {
    throw ConfigError("dog.scales", "no scales given and no feature_sizes to derive them from");
  }
  if (!scales.empty()) {
    try {
      ScaleList check(scales);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("dog.scales", e.what());
    }
  } else {
    for (double f : feature_sizes) {
      if (!(f > 0.0)) throw ConfigError("dog.feature_sizes", "feature sizes must be positive");
    }
    if (!(grid_step > 0.0)) throw ConfigError("dog.grid_step", "must be positive");
  }
  if (!(surround_ratio > 1.0) || !std::isfinite(surround_ratio)) throw ConfigError("s", "surround ratio must exceed 1");
  if (!(window_ratio > 0.0) || !std::isfinite(window_ratio)) throw ConfigError("h", "window ratio must be positive");
  if (!(threshold.zero_tolerance >= 0.0)) throw ConfigError("threshold", "zero tolerance must be >= 0");
  try {
    hough.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("hough", e.what());
  }
  if (out_dir.empty()) throw ConfigError("out_dir", "empty path");
}

std::string PipelineConfig::effective_stem() const {
  if (!stem.empty()) return stem;
  if (std::holds_alternative<CafeWallSpec>(input)) return "cafewall";
  if (const auto* dg = std::get_if<DotGridSpec>(&input)) return to_string(dg->layout);
  if (const auto* p = std::get_if<fs::path>(&input)) return p->stem().string();
  return "viscrf";
}

PipelineConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  check_keys(root, "",
             {"input", "crop", "stem", "dog", "s", "h", "log_enabled", "threshold", "hough", "outputs", "out_dir"});
  PipelineConfig cfg;

  if (!root.contains("input")) throw ConfigError("input", "missing");
  const json& in = root.at("input");
  check_keys(in, "input", {"image", "cafe_wall", "dot_grid"});
  if (in.size() != 1) throw ConfigError("input", "exactly one of image, cafe_wall, dot_grid is required");
  if (in.contains("image")) cfg.input = fs::path(get_string(in, "input", "image", ""));
  if (in.contains("cafe_wall")) cfg.input = parse_cafe_wall(in.at("cafe_wall"), "input.cafe_wall");
  if (in.contains("dot_grid")) cfg.input = parse_dot_grid(in.at("dot_grid"), "input.dot_grid");

  if (root.contains("crop")) {
    const json& c = root.at("crop");
    check_keys(c, "crop", {"x0", "y0", "w", "h"});
    cfg.crop = CropRect{get_int(c, "crop", "x0", 0), get_int(c, "crop", "y0", 0), get_int(c, "crop", "w", 1),
                        get_int(c, "crop", "h", 1)};
  }
  cfg.stem = get_string(root, "", "stem", "");

  if (root.contains("dog")) {
    const json& d = root.at("dog");
    check_keys(d, "dog", {"scales", "feature_sizes", "grid_step"});
    cfg.scales = get_doubles(d, "dog", "scales");
    cfg.feature_sizes = get_doubles(d, "dog", "feature_sizes");
    cfg.grid_step = get_double(d, "dog", "grid_step", cfg.grid_step);
  }
  cfg.surround_ratio = get_double(root, "", "s", cfg.surround_ratio);
  cfg.window_ratio = get_double(root, "", "h", cfg.window_ratio);
  cfg.log_enabled = get_bool(root, "", "log_enabled", cfg.log_enabled);
  try {
    cfg.threshold.mode = parse_threshold_mode(get_string(root, "", "threshold", "sign"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("threshold", e.what());
  }

  if (root.contains("hough")) {
    const json& hj = root.at("hough");
    check_keys(hj, "hough", {"theta_res", "rho_res", "num_peaks", "peak_floor", "fill_gap", "min_length"});
    auto& hp = cfg.hough;
    hp.theta_res = get_double(hj, "hough", "theta_res", hp.theta_res);
    hp.rho_res = get_double(hj, "hough", "rho_res", hp.rho_res);
    hp.num_peaks = get_int(hj, "hough", "num_peaks", hp.num_peaks);
    hp.peak_floor = get_double(hj, "hough", "peak_floor", hp.peak_floor);
    hp.fill_gap = get_double(hj, "hough", "fill_gap", hp.fill_gap);
    hp.min_length = get_double(hj, "hough", "min_length", hp.min_length);
  }
  if (root.contains("outputs")) {
    const json& oj = root.at("outputs");
    check_keys(oj, "outputs", {"rasters", "binary", "jet", "csv", "segments", "overlays", "manifest"});
    auto& o = cfg.outputs;
    o.rasters = get_bool(oj, "outputs", "rasters", o.rasters);
    o.binary = get_bool(oj, "outputs", "binary", o.binary);
    o.jet = get_bool(oj, "outputs", "jet", o.jet);
    o.csv = get_bool(oj, "outputs", "csv", o.csv);
    o.segments = get_bool(oj, "outputs", "segments", o.segments);
    o.overlays = get_bool(oj, "outputs", "overlays", o.overlays);
    o.manifest = get_bool(oj, "outputs", "manifest", o.manifest);
  }
  cfg.out_dir = get_string(root, "", "out_dir", cfg.out_dir.string());
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const PipelineConfig& cfg) { return config_json(cfg).dump(2); }

ScaleList resolve_scales(const PipelineConfig& cfg) {
  if (!cfg.scales.empty()) return ScaleList(cfg.scales);
  return select_scales(cfg.feature_sizes, cfg.surround_ratio, cfg.grid_step).scales;
}

Raster load_input(const PipelineConfig& cfg) {
  Raster img = std::visit(
      [](const auto& src) -> Raster {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, CafeWallSpec>) {
          return cafe_wall(src);
        } else if constexpr (std::is_same_v<T, DotGridSpec>) {
          return dot_checkerboard(src);
        } else if constexpr (std::is_same_v<T, fs::path>) {
          return read_image(src);
        } else {
          throw ConfigError("input", "no input source given");
        }
      },
      cfg.input);
  return cfg.crop ? crop(img, *cfg.crop) : img;
}

// -- files ---------------------------------------------------------------------

std::string format_scale(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", sigma);
  return buf;
}

std::string layer_file_name(const std::string& stem, EdgeMap::Kind kind, double scale, const std::string& suffix,
                            const std::string& ext) {
  return stem + "_" + kind_name(kind) + "_s" + format_scale(scale) + suffix + ext;
}

Manifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestName;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": malformed manifest: " + e.what());
  }
  try {
    if (j.value("format", std::string()) != kManifestFormat) throw IoError(path.string() + ": unknown manifest format");
    Manifest m;
    m.stem = j.at("stem").get<std::string>();
    m.surround_ratio = j.at("params").at("s").get<double>();
    m.window_ratio = j.at("params").at("h").get<double>();
    m.scales = j.at("scales").get<std::vector<double>>();
    for (const auto& l : j.at("layers")) {
      const std::string kind = l.at("kind").get<std::string>();
      m.layers.push_back({kind == "log" ? EdgeMap::Kind::log : EdgeMap::Kind::dog, l.at("scale").get<double>(),
                          l.at("max_abs").get<double>(), l.at("file").get<std::string>()});
    }
    m.files = j.at("files").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": incomplete manifest: " + e.what());
  }
}

Raster dequantize_layer(const Raster& unit_samples, double max_abs) {
  Raster out(unit_samples.width(), unit_samples.height());
  auto src = unit_samples.samples();
  auto dst = out.samples();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double level = std::floor(src[i] * 255.0 + 0.5);
    dst[i] = (level - 128.0) / 127.5 * max_abs;
  }
  return out;
}

std::vector<std::string> write_edge_maps(const fs::path& dir, const std::string& stem, const EdgeMap& dog,
                                         const EdgeMap* log, const EdgeMapWriteOptions& opts) {
  fs::create_directories(dir);
  std::vector<std::string> files = planned_layer_files(stem, dog, opts);
  std::vector<ManifestLayer> layers = manifest_layers(stem, dog, opts.rasters);
  if (log) {
    auto more = planned_layer_files(stem, *log, opts);
    files.insert(files.end(), more.begin(), more.end());
    auto ml = manifest_layers(stem, *log, opts.rasters);
    layers.insert(layers.end(), ml.begin(), ml.end());
  }
  if (opts.manifest) {
    files.insert(files.begin(), kManifestName);
    std::vector<double> scales;
    for (const auto& l : dog.layers) scales.push_back(l.scale);
    json m = {{"format", kManifestFormat},
              {"stem", stem},
              {"params", {{"s", dog.surround_ratio}, {"h", dog.window_ratio}}},
              {"scales", scales},
              {"layers", layers_json(layers)},
              {"files", files}};
    write_text(dir / kManifestName, m.dump(2) + "\n");
  }
  const ThresholdPolicy sign;
  for (const auto& layer : dog.layers) write_layer(dir, stem, dog.kind, layer, opts, sign);
  if (log) {
    for (const auto& layer : log->layers) write_layer(dir, stem, log->kind, layer, opts, sign);
  }
  return files;
}

// -- pipeline ------------------------------------------------------------------

RunReport run_pipeline(const PipelineConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();

  RunReport report;
  report.out_dir = cfg.out_dir;
  const std::string stem = cfg.effective_stem();
  if (const auto* cw = std::get_if<CafeWallSpec>(&cfg.input)) report.warnings = cw->warnings();

  const Raster image = in_stage("input", [&] { return load_input(cfg); });
  const ScaleList scales = in_stage("model", [&] { return resolve_scales(cfg); });
  report.scales = scales.values();

  const EdgeMap dog = in_stage(
      "model", [&] { return emap_dog(image, scales, cfg.surround_ratio, cfg.window_ratio, DoGMethod::blur_diff); });
  std::optional<EdgeMap> log;
  if (cfg.log_enabled) {
    if (dog.layers.size() < 2) throw StageError("model", "log_enabled needs at least two scales", false);
    log = in_stage("model", [&] { return emap_log(dog); });
  }

  // Plan every output up front so the manifest can list them.
  const auto& out = cfg.outputs;
  const EdgeMapWriteOptions layer_opts{out.rasters, out.binary, out.jet, out.manifest};
  const std::string input_file = stem + "_input.pgm";
  const std::string tilt_file = stem + "_tilt.csv";
  const std::string seg_file = stem + "_segments.csv";
  const std::string log_tilt_file = stem + "_log_tilt.csv";
  const std::string log_seg_file = stem + "_log_segments.csv";
  const std::string report_file = stem + "_report.json";

  std::vector<std::string> planned;
  if (out.manifest) planned.push_back(kManifestName);
  if (out.rasters) planned.push_back(input_file);
  auto dog_files = planned_layer_files(stem, dog, layer_opts);
  planned.insert(planned.end(), dog_files.begin(), dog_files.end());
  if (log) {
    auto log_files = planned_layer_files(stem, *log, layer_opts);
    planned.insert(planned.end(), log_files.begin(), log_files.end());
  }
  const bool analyze = out.csv || out.overlays;
  if (out.csv) {
    planned.push_back(tilt_file);
    if (out.segments) planned.push_back(seg_file);
    if (log) {
      planned.push_back(log_tilt_file);
      if (out.segments) planned.push_back(log_seg_file);
    }
  }
  auto overlay_name = [&](EdgeMap::Kind kind, double scale) {
    return layer_file_name(stem, kind, scale, "_overlay", ".png");
  };
  if (out.overlays) {
    for (const auto& l : dog.layers) planned.push_back(overlay_name(EdgeMap::Kind::dog, l.scale));
    if (log) {
      for (const auto& l : log->layers) planned.push_back(overlay_name(EdgeMap::Kind::log, l.scale));
    }
  }
  planned.push_back(report_file);

  const fs::path dir = cfg.out_dir;
  in_stage("output", [&] { fs::create_directories(dir); });

  if (out.manifest) {
    in_stage("manifest", [&] {
      std::vector<ManifestLayer> layers = manifest_layers(stem, dog, out.rasters);
      if (log) {
        auto ml = manifest_layers(stem, *log, out.rasters);
        layers.insert(layers.end(), ml.begin(), ml.end());
      }
      json config = config_json(cfg);
      config.erase("out_dir");
      json m = {{"format", kManifestFormat},
                {"stem", stem},
                {"config", config},
                {"source", {{"width", image.width()}, {"height", image.height()}}},
                {"params", {{"s", cfg.surround_ratio}, {"h", cfg.window_ratio}}},
                {"scales", report.scales},
                {"layers", layers_json(layers)},
                {"files", planned}};
      write_text(dir / kManifestName, m.dump(2) + "\n");
    });
  }

  in_stage("edges", [&] {
    if (out.rasters) write_raster(image, dir / input_file, DisplayMode::linear_unit);
    for (const auto& layer : dog.layers) write_layer(dir, stem, dog.kind, layer, layer_opts, cfg.threshold);
    if (log) {
      for (const auto& layer : log->layers) write_layer(dir, stem, log->kind, layer, layer_opts, cfg.threshold);
    }
  });

  if (analyze) {
    report.dog_analysis = in_stage("hough", [&] { return run_analysis(dog, cfg.hough, cfg.threshold, out.overlays); });
    if (log) {
      report.log_analysis =
          in_stage("hough", [&] { return run_analysis(*log, cfg.hough, cfg.threshold, out.overlays); });
    }
    in_stage("analysis", [&] {
      if (out.csv) {
        write_text(dir / tilt_file, stats_csv(report.dog_analysis));
        if (out.segments) write_text(dir / seg_file, segments_csv(report.dog_analysis));
        if (log) {
          write_text(dir / log_tilt_file, stats_csv(report.log_analysis));
          if (out.segments) write_text(dir / log_seg_file, segments_csv(report.log_analysis));
        }
      }
      if (out.overlays) {
        for (const auto& la : report.dog_analysis) write_rgb(*la.overlay, dir / overlay_name(EdgeMap::Kind::dog, la.scale));
        for (const auto& la : report.log_analysis) write_rgb(*la.overlay, dir / overlay_name(EdgeMap::Kind::log, la.scale));
      }
    });
  }

  report.files = planned;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  in_stage("report", [&] {
    json r = {{"stem", stem},
              {"generated_utc", utc_timestamp()},
              {"seconds", report.seconds},
              {"scales", report.scales},
              {"files", planned},
              {"warnings", report.warnings},
              {"dog_stats", stats_json(report.dog_analysis)},
              {"log_stats", stats_json(report.log_analysis)}};
    write_text(dir / report_file, r.dump(2) + "\n");
  });
  return report;
}

}  // namespace viscrf
