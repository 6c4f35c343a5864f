#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "viscrf/raster.hpp"
#include "viscrf/scalespace.hpp"
#include "viscrf/stimuli.hpp"
#include "viscrf/tiltanalysis.hpp"

namespace viscrf {

/// Invalid configuration; `field` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Failure inside a pipeline stage. `io` distinguishes file-system failures
/// from invalid inputs.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message, bool io)
      : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)), io_(io) {}
  const std::string& stage() const { return stage_; }
  bool io() const { return io_; }

 private:
  std::string stage_;
  bool io_;
};

struct OutputFlags {
  bool rasters = true;    ///< signed layer PGMs
  bool binary = false;    ///< sign-binarized layer PGMs (_bin)
  bool jet = false;       ///< jetwhite PNGs (_jet)
  bool csv = true;        ///< tilt statistics CSV
  bool segments = true;   ///< segment CSV (only with csv)
  bool overlays = false;  ///< segment overlay PNGs
  bool manifest = true;
};

using InputSource = std::variant<std::monostate, CafeWallSpec, DotGridSpec, std::filesystem::path>;

struct PipelineConfig {
  InputSource input;
  std::optional<CropRect> crop;
  std::string stem;  ///< output file prefix; derived from the input when empty

  std::vector<double> scales;         ///< explicit sigma_c list
  std::vector<double> feature_sizes;  ///< used when scales is empty
  double grid_step = 0.5;

  double surround_ratio = 1.6;
  double window_ratio = 8.0;
  bool log_enabled = false;
  ThresholdPolicy threshold;
  HoughParams hough;
  OutputFlags outputs;
  std::filesystem::path out_dir = "out";

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  std::string effective_stem() const;
};

/// Parses the JSON config document (schema in docs/config.md).
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string dump_config(const PipelineConfig& cfg);

/// Explicit scales, or scales derived from feature sizes.
ScaleList resolve_scales(const PipelineConfig& cfg);

/// Generates or reads the input raster and applies the crop.
Raster load_input(const PipelineConfig& cfg);

/// Formats a scale for file names: up to six significant digits, no
/// trailing zeros ("2", "0.5", "1.25").
std::string format_scale(double sigma);

std::string layer_file_name(const std::string& stem, EdgeMap::Kind kind, double scale, const std::string& suffix,
                            const std::string& ext);

struct ManifestLayer {
  EdgeMap::Kind kind;
  double scale;
  double max_abs;
  std::string file;  ///< signed raster, relative to the manifest directory
};

struct Manifest {
  std::string stem;
  double surround_ratio = 1.6;
  double window_ratio = 8.0;
  std::vector<double> scales;
  std::vector<ManifestLayer> layers;
  std::vector<std::string> files;
};

Manifest read_manifest(const std::filesystem::path& dir);

/// Recovers signed responses from a signed_symmetric PGM layer: level 128 is
/// zero, one level is max_abs / 127.5.
Raster dequantize_layer(const Raster& unit_samples, double max_abs);

struct EdgeMapWriteOptions {
  bool rasters = true;
  bool binary = false;
  bool jet = false;
  bool manifest = true;
};

/// Writes layer files plus manifest.json for the `edgemap` subcommand;
/// returns written file names relative to dir.
std::vector<std::string> write_edge_maps(const std::filesystem::path& dir, const std::string& stem,
                                         const EdgeMap& dog, const EdgeMap* log, const EdgeMapWriteOptions& opts);

struct RunReport {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  ///< relative to out_dir, in write order
  std::vector<double> scales;
  std::vector<LayerAnalysis> dog_analysis;
  std::vector<LayerAnalysis> log_analysis;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

/// MODEL (edge maps) then EDGES, HOUGH and ANALYSIS. Writes the manifest
/// first, artifacts next and `<stem>_report.json` last.
RunReport run_pipeline(const PipelineConfig& cfg);

}  // namespace viscrf
