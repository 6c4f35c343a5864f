#pragma once

#include <iosfwd>
#include <vector>

namespace viscrf {

/// Centre-surround filter parameters.
///
/// `sigma_c` is the centre Gaussian's standard deviation in pixels,
/// `surround_ratio` the ratio sigma_surround / sigma_centre and
/// `window_ratio` the multiplier fixing the kernel side length.
struct DoGParams {
  double sigma_c = 1.0;
  double surround_ratio = 1.6;
  double window_ratio = 8.0;

  double sigma_s() const { return surround_ratio * sigma_c; }

  /// Throws std::invalid_argument unless sigma_c > 0, surround_ratio > 1
  /// and window_ratio > 0 (all finite).
  void validate() const;
};

/// Square, odd-sized 2D kernel stored row-major. Offsets (dx, dy) are
/// relative to the centre tap.
struct Kernel {
  int size = 1;
  std::vector<double> weights;

  Kernel(int size, std::vector<double> weights);

  int radius() const { return size / 2; }
  double at(int dx, int dy) const {
    return weights[static_cast<std::size_t>(dy + radius()) * size + (dx + radius())];
  }
  double sum() const;
};

/// Kernel side length for a window ratio: h*sigma_c + 1 rounded half-up to
/// an integer, bumped to the next odd value if even, never below 3.
int window_size(double sigma_c, double window_ratio);

/// One-dimensional sampled Gaussian of odd length, normalized to unit sum.
/// The 2D Gaussian kernel is the outer product of these taps.
std::vector<double> gaussian_taps(double sigma, int size);

Kernel gaussian_kernel(double sigma, int size);

/// Normalized centre Gaussian minus normalized surround Gaussian over the
/// shared window; sums to zero, positive centre (ON-centre).
Kernel dog_kernel(const DoGParams& p);

/// Sampled Laplacian of Gaussian (x^2+y^2-2s^2)/(2 pi s^6) exp(-(x^2+y^2)/(2s^2))
/// with the mean removed so the weights sum to zero. The centre is negative.
Kernel log_kernel(double sigma, int size);

/// Writes one kernel row per line, comma separated, 9 significant digits.
void write_kernel_csv(const Kernel& k, std::ostream& out);

}  // namespace viscrf
