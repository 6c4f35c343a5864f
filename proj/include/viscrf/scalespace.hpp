#pragma once

#include <limits>
#include <string>
#include <vector>

#include "viscrf/kernels.hpp"
#include "viscrf/raster.hpp"

namespace viscrf {

/// Strictly increasing list of positive centre sigmas.
class ScaleList {
 public:
  ScaleList() = default;
  explicit ScaleList(std::vector<double> scales);

  const std::vector<double>& values() const { return scales_; }
  std::size_t size() const { return scales_.size(); }
  bool empty() const { return scales_.empty(); }
  double operator[](std::size_t i) const { return scales_[i]; }

 private:
  std::vector<double> scales_;
};

enum class BorderMode { replicate };

enum class DoGMethod {
  direct,     ///< 2D convolution with the DoG kernel
  blur_diff,  ///< difference of two separable Gaussian blurs
};

/// out(x,y) = sum_{i,j} k(i,j) r(x-i, y-j), reads outside the raster
/// clamped to the nearest edge pixel.
Raster convolve(const Raster& r, const Kernel& k, BorderMode border = BorderMode::replicate);

/// Separable convolution with symmetric odd-length taps, replicate border.
///
/// Both pass orders (rows first, columns first) are evaluated and averaged,
/// and mirrored taps are summed pairwise, so the result commutes exactly
/// with 90-degree rotations and reflections of the input.
Raster separable_blur(const Raster& r, const std::vector<double>& taps);

Raster dog_response(const Raster& r, const DoGParams& p, DoGMethod method = DoGMethod::blur_diff);

struct EdgeLayer {
  double scale;  ///< sigma_c, or the lower sigma_c of the differenced pair
  Raster response;
};

struct EdgeMap {
  enum class Kind { dog, log };

  Kind kind = Kind::dog;
  double surround_ratio = 1.6;
  double window_ratio = 8.0;
  std::vector<EdgeLayer> layers;
};

/// One DoG layer per scale, each computed independently from `r`.
EdgeMap emap_dog(const Raster& r, const ScaleList& scales, double surround_ratio, double window_ratio,
                 DoGMethod method = DoGMethod::blur_diff);

/// Layer i = dog.layers[i+1] - dog.layers[i], tagged with the lower scale.
EdgeMap emap_log(const EdgeMap& dog);

/// Responses with magnitude at or below this are treated as zero when
/// thresholding; covers round-off left by zero-sum kernels on flat regions.
inline constexpr double kDefaultZeroTolerance = 1e-12;

struct ThresholdPolicy {
  enum class Mode {
    sign,          ///< 1 where response > 0, else 0
    mean_pos_neg,  ///< +1 above mean of positives, -1 below mean of negatives
  };
  Mode mode = Mode::sign;
  double zero_tolerance = kDefaultZeroTolerance;
};

std::string to_string(ThresholdPolicy::Mode mode);
ThresholdPolicy::Mode parse_threshold_mode(const std::string& name);

struct Thresholds {
  double upper = std::numeric_limits<double>::infinity();   ///< Thr-Max
  double lower = -std::numeric_limits<double>::infinity();  ///< Thr-Min
};

/// Mean of positive and mean of negative samples; +/-infinity when a side
/// has no samples.
Thresholds mean_thresholds(const Raster& layer, double zero_tolerance = kDefaultZeroTolerance);

Raster binarize(const Raster& layer, const ThresholdPolicy& policy);

/// Diverging colormap: white at zero, cyan then blue towards -A, yellow then
/// red towards +A, A = max |sample|.
RgbImage render_jetwhite(const Raster& layer);

/// Colour for a normalized value t in [-1, 1] (clamped).
RgbImage::Pixel jetwhite(double t);

struct ScaleSelection {
  std::vector<double> raw;  ///< feature / (2 s) for each feature, input order
  ScaleList scales;         ///< grid multiples from snapped min to snapped max
};

/// Picks centre sigmas so that twice the surround sigma matches each feature
/// size, then fills the grid between the extremes. Snapping rounds to the
/// nearest multiple of grid_step (half-up), never below one step.
ScaleSelection select_scales(const std::vector<double>& feature_sizes, double surround_ratio, double grid_step);

}  // namespace viscrf
