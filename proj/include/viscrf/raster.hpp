#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace viscrf {

/// Raised when a file cannot be read, parsed or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-channel field of real samples, row-major, x to the right and y
/// down. Holds luminance images as well as signed filter responses.
class Raster {
 public:
  Raster(int width, int height, double fill = 0.0);
  Raster(int width, int height, std::vector<double> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return samples_.size(); }

  double operator()(int x, int y) const { return samples_[index(x, y)]; }
  double& operator()(int x, int y) { return samples_[index(x, y)]; }

  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  std::span<const double> row(int y) const {
    return {samples_.data() + static_cast<std::size_t>(y) * width_,
            static_cast<std::size_t>(width_)};
  }

  bool operator==(const Raster& other) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<double> samples_;
};

/// 8-bit RGB image used for false-colour renderings and overlays.
struct RgbImage {
  struct Pixel {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Pixel&) const = default;
  };

  RgbImage(int w, int h) : RgbImage(w, h, Pixel{}) {}
  RgbImage(int w, int h, Pixel fill) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Pixel& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Pixel& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  int width;
  int height;
  std::vector<Pixel> pixels;
};

struct CropRect {
  int x0 = 0;
  int y0 = 0;
  int w = 1;
  int h = 1;
};

/// Throws std::invalid_argument if any sample is NaN or infinite.
void require_finite(const Raster& r, const char* what);

/// Largest absolute sample value.
double max_abs(const Raster& r);

Raster crop(const Raster& r, const CropRect& rect);

/// Rotates clockwise by 90 degrees: the source pixel (x, y) lands at
/// (height-1-y, x) and the output is height x width.
Raster rotate90(const Raster& r);

// ---------------------------------------------------------------------------
// File IO

enum class DisplayMode {
  linear_unit,       ///< [0,1] -> [0,255]
  signed_symmetric,  ///< [-A,+A] -> [0,255], zero at mid-grey
};

/// Reads P2/P5 graymaps, P3/P6 pixmaps and 8-bit PNG. Samples are scaled to
/// [0,1]; colour is reduced to luminance with weights (0.299, 0.587, 0.114).
Raster read_image(const std::filesystem::path& path);

/// Quantizes a sample to an 8-bit level. Rounding is half-up.
std::uint8_t quantize(double value, DisplayMode mode, double amplitude);

/// Writes a raster as P5 (.pgm, default) or 8-bit grayscale PNG (.png).
void write_raster(const Raster& r, const std::filesystem::path& path, DisplayMode mode);

/// Writes as P6 (.ppm) or RGB PNG (.png).
void write_rgb(const RgbImage& img, const std::filesystem::path& path);

}  // namespace viscrf
