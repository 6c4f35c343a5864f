#include <algorithm>
#include <array>
#include <cmath>

#include "viscrf/scalespace.hpp"

namespace viscrf {
namespace {

struct Stop {
  double t;
  double r, g, b;
};

// blue -> cyan -> white -> yellow -> red
constexpr std::array<Stop, 5> kJetWhite = {{
    {-1.0, 0.0, 0.0, 255.0},
    {-0.5, 0.0, 255.0, 255.0},
    {0.0, 255.0, 255.0, 255.0},
    {0.5, 255.0, 255.0, 0.0},
    {1.0, 255.0, 0.0, 0.0},
}};

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); }

}  // namespace

RgbImage::Pixel jetwhite(double t) {
  t = std::clamp(t, -1.0, 1.0);
  std::size_t k = 1;
  while (k + 1 < kJetWhite.size() && t > kJetWhite[k].t) ++k;
  const Stop& a = kJetWhite[k - 1];
  const Stop& b = kJetWhite[k];
  const double u = (t - a.t) / (b.t - a.t);
  return {to_byte(a.r + u * (b.r - a.r)), to_byte(a.g + u * (b.g - a.g)), to_byte(a.b + u * (b.b - a.b))};
}

RgbImage render_jetwhite(const Raster& layer) {
  const double amplitude = max_abs(layer);
  RgbImage img(layer.width(), layer.height());
  auto src = layer.samples();
  for (std::size_t i = 0; i < src.size(); ++i) {
    img.pixels[i] = jetwhite(amplitude > 0.0 ? src[i] / amplitude : 0.0);
  }
  return img;
}

}  // namespace viscrf
