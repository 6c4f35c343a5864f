#include "viscrf/raster.hpp"

#include <cmath>
#include <string>

namespace viscrf {

Raster::Raster(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("raster dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  if (!std::isfinite(fill)) throw std::invalid_argument("raster fill value must be finite");
  samples_.assign(static_cast<std::size_t>(width) * height, fill);
}

Raster::Raster(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("raster dimensions must be positive, got " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  if (samples_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("raster sample count does not match " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  require_finite(*this, "raster");
}

void require_finite(const Raster& r, const char* what) {
  for (double v : r.samples()) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " contains a non-finite sample");
  }
}

double max_abs(const Raster& r) {
  double a = 0.0;
  for (double v : r.samples()) a = std::max(a, std::abs(v));
  return a;
}

Raster crop(const Raster& r, const CropRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.w < 1 || rect.h < 1 ||
      rect.x0 + rect.w > r.width() || rect.y0 + rect.h > r.height()) {
    throw std::out_of_range("crop rectangle (" + std::to_string(rect.x0) + "," +
                            std::to_string(rect.y0) + ") " + std::to_string(rect.w) + "x" +
                            std::to_string(rect.h) + " exceeds " + std::to_string(r.width()) +
                            "x" + std::to_string(r.height()));
  }
  Raster out(rect.w, rect.h);
  for (int y = 0; y < rect.h; ++y) {
    for (int x = 0; x < rect.w; ++x) out(x, y) = r(rect.x0 + x, rect.y0 + y);
  }
  return out;
}

Raster rotate90(const Raster& r) {
  const int w = r.width();
  const int h = r.height();
  Raster out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out(h - 1 - y, x) = r(x, y);
  }
  return out;
}

}  // namespace viscrf
