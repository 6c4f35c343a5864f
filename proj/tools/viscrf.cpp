// viscrf command-line front end.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "viscrf/pipeline.hpp"

namespace fs = std::filesystem;
using namespace viscrf;

namespace {

enum Exit { kOk = 0, kConfig = 1, kIo = 2 };

std::vector<std::string> g_written;

void note(const fs::path& p) { g_written.push_back(p.string()); }

std::optional<CropRect> parse_crop(const std::vector<int>& v) {
  if (v.empty()) return std::nullopt;
  if (v.size() != 4) throw ConfigError("crop", "expected x0,y0,w,h");
  return CropRect{v[0], v[1], v[2], v[3]};
}

void write_stream(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  if (!out) throw IoError("error writing " + path.string());
  note(path);
}

// -- generate --------------------------------------------------------------------

struct GenerateArgs {
  CafeWallSpec wall;
  int shift = -1;
  DotGridSpec dots;
  std::string layout = "cross_bulge";
  std::vector<int> gaps;
  fs::path out;
  fs::path out_dir = ".";
  std::string stem = "gap";
};

void add_dot_flags(CLI::App* cmd, GenerateArgs& a) {
  cmd->add_option("--rows", a.dots.n_rows, "tile rows")->capture_default_str();
  cmd->add_option("--cols", a.dots.n_cols, "tile columns")->capture_default_str();
  cmd->add_option("--tile", a.dots.tile, "tile side in pixels")->capture_default_str();
  cmd->add_option("--dot", a.dots.dot, "dot side in pixels")->capture_default_str();
  cmd->add_option("--gap", a.dots.gap, "dot inset from the tile borders")->capture_default_str();
  cmd->add_option("--layout", a.layout, "cross_bulge | one_three_tilt")->capture_default_str();
  cmd->add_option("--lum-dark", a.dots.lum_dark, "dark luminance")->capture_default_str();
  cmd->add_option("--lum-light", a.dots.lum_light, "light luminance")->capture_default_str();
}

// -- analyze ---------------------------------------------------------------------

struct AnalyzeArgs {
  fs::path in_dir;
  HoughParams hough;
  std::string threshold = "sign";
  std::string kind = "dog";
  fs::path csv;
  fs::path segments;
  fs::path overlays;
};

int run_analyze(const AnalyzeArgs& a) {
  ThresholdPolicy policy;
  policy.mode = parse_threshold_mode(a.threshold);
  a.hough.validate();
  if (a.kind != "dog" && a.kind != "log") throw ConfigError("kind", "expected dog or log");
  const Manifest m = read_manifest(a.in_dir);
  std::vector<LayerAnalysis> results;
  for (const auto& layer : m.layers) {
    if ((layer.kind == EdgeMap::Kind::log) != (a.kind == "log")) continue;
    if (layer.file.empty()) throw IoError("manifest lists no raster for scale " + format_scale(layer.scale));
    const Raster response = dequantize_layer(read_image(a.in_dir / layer.file), layer.max_abs);
    results.push_back(analyze_layer(response, layer.scale, a.hough, policy, !a.overlays.empty()));
  }
  if (results.empty()) throw ConfigError("kind", "manifest has no " + a.kind + " layers");
  write_stream(a.csv, [&](std::ostream& out) { write_tilt_csv(results, out); });
  if (!a.segments.empty()) write_stream(a.segments, [&](std::ostream& out) { write_segments_csv(results, out); });
  if (!a.overlays.empty()) {
    fs::create_directories(a.overlays);
    for (const auto& r : results) {
      const fs::path p = a.overlays / layer_file_name(m.stem, a.kind == "log" ? EdgeMap::Kind::log : EdgeMap::Kind::dog,
                                                      r.scale, "_overlay", ".png");
      write_rgb(*r.overlay, p);
      note(p);
    }
  }
  return kOk;
}

// -- pipeline overrides ------------------------------------------------------------

struct PipelineArgs {
  fs::path config;
  fs::path out_dir;
  std::string stem;
  std::vector<double> scales;
  double s = 1.6;
  double h = 8.0;
  bool log = false;
  std::string threshold;
  double fill_gap = 5.0;
  double min_length = 50.0;
  bool overlays = false;
  bool dump = false;
};

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Multiscale DoG edge maps and tilt analysis for tile illusions"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // generate
  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "write a stimulus image");
  generate->require_subcommand(1);
  auto* cafewall = generate->add_subcommand("cafewall", "Café Wall pattern");
  cafewall->add_option("--rows", gen.wall.rows, "tile rows")->capture_default_str();
  cafewall->add_option("--cols", gen.wall.cols, "tiles per row")->capture_default_str();
  cafewall->add_option("--tile", gen.wall.tile, "tile side in pixels")->capture_default_str();
  cafewall->add_option("--mortar", gen.wall.mortar, "mortar thickness in pixels")->capture_default_str();
  cafewall->add_option("--shift", gen.shift, "odd-row offset in pixels (default tile/2)");
  cafewall->add_option("--lum-dark", gen.wall.lum_dark, "dark tile luminance")->capture_default_str();
  cafewall->add_option("--lum-light", gen.wall.lum_light, "light tile luminance")->capture_default_str();
  cafewall->add_option("--lum-mortar", gen.wall.lum_mortar, "mortar luminance")->capture_default_str();
  cafewall->add_option("--out", gen.out, "output image (.pgm or .png)")->required();

  auto* dots = generate->add_subcommand("dots", "checkerboard with superimposed dots");
  add_dot_flags(dots, gen);
  dots->add_option("--out", gen.out, "output image (.pgm or .png)")->required();

  auto* gaps = generate->add_subcommand("gaps", "dot checkerboards for several gap values");
  add_dot_flags(gaps, gen);
  gaps->add_option("--gaps", gen.gaps, "comma-separated gap values")->delimiter(',')->required();
  gaps->add_option("--out-dir", gen.out_dir, "output directory")->capture_default_str();
  gaps->add_option("--stem", gen.stem, "file prefix; files are <stem>_g<gap>.pgm")->capture_default_str();

  // edgemap
  PipelineConfig em;
  std::vector<int> em_crop;
  std::string em_in;
  std::string em_method = "blur_diff";
  EdgeMapWriteOptions em_opts;
  auto* edgemap = app.add_subcommand("edgemap", "compute DoG (and LoG) edge maps of an image");
  edgemap->add_option("--in", em_in, "input image (PGM/PPM/PNG)")->required();
  auto* em_scales = edgemap->add_option("--scales", em.scales, "comma-separated centre sigmas")->delimiter(',');
  edgemap->add_option("--features", em.feature_sizes, "feature sizes in pixels, used without --scales")
      ->delimiter(',')
      ->excludes(em_scales);
  edgemap->add_option("--grid", em.grid_step, "scale grid step for --features")->capture_default_str();
  edgemap->add_option("--s", em.surround_ratio, "surround ratio")->capture_default_str();
  edgemap->add_option("--h", em.window_ratio, "window ratio")->capture_default_str();
  edgemap->add_flag("--log", em.log_enabled, "also write LoG layers from consecutive DoG scales");
  edgemap->add_option("--crop", em_crop, "crop x0,y0,w,h before filtering")->delimiter(',');
  edgemap->add_option("--method", em_method, "blur_diff | direct")->capture_default_str();
  edgemap->add_flag("--binary", em_opts.binary, "also write sign-binarized layers");
  edgemap->add_flag("--jet", em_opts.jet, "also write jetwhite renderings");
  edgemap->add_option("--out-dir", em.out_dir, "output directory")->required();
  edgemap->add_option("--stem", em.stem, "file prefix (default: input file name)");

  // analyze
  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Hough tilt analysis of an edgemap output directory");
  analyze->add_option("--in-dir", an.in_dir, "directory containing manifest.json")->required();
  analyze->add_option("--fillgap", an.hough.fill_gap, "merge gap in pixels")->capture_default_str();
  analyze->add_option("--minlen", an.hough.min_length, "minimum segment length")->capture_default_str();
  analyze->add_option("--theta-res", an.hough.theta_res, "theta resolution in degrees")->capture_default_str();
  analyze->add_option("--rho-res", an.hough.rho_res, "rho resolution in pixels")->capture_default_str();
  analyze->add_option("--peaks", an.hough.num_peaks, "maximum Hough peaks per layer")->capture_default_str();
  analyze->add_option("--peak-floor", an.hough.peak_floor, "peak threshold as a fraction of the maximum")
      ->capture_default_str();
  analyze->add_option("--threshold", an.threshold, "sign | mean_pos_neg")->capture_default_str();
  analyze->add_option("--kind", an.kind, "dog | log")->capture_default_str();
  analyze->add_option("--csv", an.csv, "tilt statistics CSV (stdout when omitted)");
  analyze->add_option("--segments", an.segments, "segment list CSV");
  analyze->add_option("--overlays", an.overlays, "directory for segment overlay PNGs");

  // pipeline
  PipelineArgs pa;
  auto* pipeline = app.add_subcommand("pipeline", "run a full config-driven experiment");
  pipeline->add_option("--config", pa.config, "JSON config file (see docs/config.md)")->required();
  auto* o_out = pipeline->add_option("--out-dir", pa.out_dir, "override out_dir");
  auto* o_stem = pipeline->add_option("--stem", pa.stem, "override stem");
  auto* o_scales = pipeline->add_option("--scales", pa.scales, "override dog.scales")->delimiter(',');
  auto* o_s = pipeline->add_option("--s", pa.s, "override surround ratio (default 1.6)");
  auto* o_h = pipeline->add_option("--h", pa.h, "override window ratio (default 8)");
  auto* o_log = pipeline->add_flag("--log", pa.log, "enable LoG layers");
  auto* o_thr = pipeline->add_option("--threshold", pa.threshold, "override threshold (default sign)");
  auto* o_gap = pipeline->add_option("--fillgap", pa.fill_gap, "override hough.fill_gap (default 5)");
  auto* o_len = pipeline->add_option("--minlen", pa.min_length, "override hough.min_length (default 50)");
  auto* o_ovl = pipeline->add_flag("--overlays", pa.overlays, "write overlay PNGs");
  pipeline->add_flag("--print-config", pa.dump, "print the effective config and exit");

  // render
  auto* render = app.add_subcommand("render", "visualize a layer or a kernel");
  render->require_subcommand(1);
  fs::path r_layer, r_jet, r_bin;
  double r_max_abs = 1.0;
  auto* rlayer = render->add_subcommand("layer", "render a signed layer PGM");
  rlayer->add_option("--in", r_layer, "signed layer PGM written by edgemap")->required();
  rlayer->add_option("--max-abs", r_max_abs, "amplitude recorded in the manifest")->capture_default_str();
  rlayer->add_option("--jet", r_jet, "jetwhite PNG output");
  rlayer->add_option("--bin", r_bin, "sign-binarized PGM output");

  DoGParams kp{4.0, 1.6, 8.0};
  std::string k_type = "dog";
  fs::path k_csv, k_png;
  auto* rkernel = render->add_subcommand("kernel", "dump a DoG or LoG kernel");
  rkernel->add_option("--type", k_type, "dog | log")->capture_default_str();
  rkernel->add_option("--sigma", kp.sigma_c, "centre sigma")->capture_default_str();
  rkernel->add_option("--s", kp.surround_ratio, "surround ratio")->capture_default_str();
  rkernel->add_option("--h", kp.window_ratio, "window ratio")->capture_default_str();
  rkernel->add_option("--csv", k_csv, "weights as CSV (stdout when neither output is given)");
  rkernel->add_option("--png", k_png, "jetwhite PNG of the weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return kConfig;
  }

  try {
    if (*generate) {
      if (*cafewall) {
        if (gen.shift >= 0) gen.wall.shift = gen.shift;
        for (const auto& w : gen.wall.warnings()) std::cerr << "warning: " << w << "\n";
        write_raster(cafe_wall(gen.wall), gen.out, DisplayMode::linear_unit);
        note(gen.out);
      } else {
        gen.dots.layout = parse_dot_layout(gen.layout);
        if (*dots) {
          write_raster(dot_checkerboard(gen.dots), gen.out, DisplayMode::linear_unit);
          note(gen.out);
        } else {
          fs::create_directories(gen.out_dir);
          const auto images = gap_variant(gen.dots, gen.gaps);
          for (std::size_t i = 0; i < images.size(); ++i) {
            const fs::path p = gen.out_dir / (gen.stem + "_g" + std::to_string(gen.gaps[i]) + ".pgm");
            write_raster(images[i], p, DisplayMode::linear_unit);
            note(p);
          }
        }
      }
    } else if (*edgemap) {
      em.input = fs::path(em_in);
      em.crop = parse_crop(em_crop);
      em.validate();
      const DoGMethod method = em_method == "direct" ? DoGMethod::direct : DoGMethod::blur_diff;
      if (em_method != "direct" && em_method != "blur_diff") throw ConfigError("method", "expected blur_diff or direct");
      const Raster image = load_input(em);
      const ScaleList scales = resolve_scales(em);
      const EdgeMap dog = emap_dog(image, scales, em.surround_ratio, em.window_ratio, method);
      std::optional<EdgeMap> log;
      if (em.log_enabled) {
        if (dog.layers.size() < 2) throw ConfigError("scales", "--log needs at least two scales");
        log = emap_log(dog);
      }
      for (const auto& f : write_edge_maps(em.out_dir, em.effective_stem(), dog, log ? &*log : nullptr, em_opts)) {
        note(em.out_dir / f);
      }
    } else if (*analyze) {
      run_analyze(an);
    } else if (*pipeline) {
      PipelineConfig cfg = load_config(pa.config);
      if (*o_out) cfg.out_dir = pa.out_dir;
      if (*o_stem) cfg.stem = pa.stem;
      if (*o_scales) cfg.scales = pa.scales;
      if (*o_s) cfg.surround_ratio = pa.s;
      if (*o_h) cfg.window_ratio = pa.h;
      if (*o_log) cfg.log_enabled = pa.log;
      if (*o_thr) cfg.threshold.mode = parse_threshold_mode(pa.threshold);
      if (*o_gap) cfg.hough.fill_gap = pa.fill_gap;
      if (*o_len) cfg.hough.min_length = pa.min_length;
      if (*o_ovl) cfg.outputs.overlays = pa.overlays;
      if (pa.dump) {
        std::cout << dump_config(cfg) << "\n";
        return kOk;
      }
      const RunReport report = run_pipeline(cfg);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& f : report.files) note(report.out_dir / f);
    } else if (*render) {
      if (*rlayer) {
        const Raster layer = dequantize_layer(read_image(r_layer), r_max_abs);
        if (!r_jet.empty()) {
          write_rgb(render_jetwhite(layer), r_jet);
          note(r_jet);
        }
        if (!r_bin.empty()) {
          write_raster(binarize(layer, ThresholdPolicy{}), r_bin, DisplayMode::linear_unit);
          note(r_bin);
        }
      } else {
        kp.validate();
        Kernel k = dog_kernel(kp);
        if (k_type == "log") {
          k = log_kernel(kp.sigma_c, window_size(kp.sigma_c, kp.window_ratio));
        } else if (k_type != "dog") {
          throw ConfigError("type", "expected dog or log");
        }
        if (!k_png.empty()) {
          Raster r(k.size, k.size);
          for (int y = 0; y < k.size; ++y) {
            for (int x = 0; x < k.size; ++x) r(x, y) = k.at(x - k.radius(), y - k.radius());
          }
          write_rgb(render_jetwhite(r), k_png);
          note(k_png);
        }
        if (!k_csv.empty() || k_png.empty()) write_stream(k_csv, [&](std::ostream& out) { write_kernel_csv(k, out); });
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const StageError& e) {
    std::cerr << (e.io() ? "io error " : "error ") << e.what() << "\n";
    return e.io() ? kIo : kConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }
  for (const auto& f : g_written) std::cerr << "wrote " << f << "\n";
  return kOk;
}

int main(int argc, char** argv) { return cli_main(argc, argv); }
