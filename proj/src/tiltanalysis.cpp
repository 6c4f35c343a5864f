#include "viscrf/tiltanalysis.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "viscrf/parallel.hpp"

namespace viscrf {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v + 0.0);
  return buf;
}

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, RgbImage::Pixel colour) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && y0 >= 0 && x0 < img.width && y0 < img.height) img.at(x0, y0) = colour;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_cross(RgbImage& img, int x, int y, RgbImage::Pixel colour) {
  constexpr int kArm = 3;
  draw_line(img, x - kArm, y - kArm, x + kArm, y + kArm, colour);
  draw_line(img, x - kArm, y + kArm, x + kArm, y - kArm, colour);
}

}  // namespace

void HoughParams::validate() const {
  if (!(theta_res > 0.0) || !(rho_res > 0.0)) throw std::invalid_argument("hough resolutions must be positive");
  if (!(peak_floor > 0.0 && peak_floor <= 1.0)) throw std::invalid_argument("hough peak_floor must lie in (0, 1]");
  if (num_peaks < 0) throw std::invalid_argument("hough num_peaks must be non-negative");
  if (!(fill_gap >= 0.0)) throw std::invalid_argument("hough fill_gap must be >= 0");
  if (!(min_length >= 1.0)) throw std::invalid_argument("hough min_length must be >= 1");
}

OrientationBin bin_orientation(double angle) {
  if (!(angle >= 0.0 && angle < 180.0)) {
    throw std::invalid_argument("segment angle must lie in [0, 180), got " + std::to_string(angle));
  }
  if (angle < 22.5 || angle >= 157.5) return OrientationBin::H;
  if (angle < 67.5) return OrientationBin::DPlus;
  if (angle < 112.5) return OrientationBin::V;
  return OrientationBin::DMinus;
}

double reference_angle(OrientationBin bin) {
  switch (bin) {
    case OrientationBin::H: return 0.0;
    case OrientationBin::DPlus: return 45.0;
    case OrientationBin::V: return 90.0;
    case OrientationBin::DMinus: return 135.0;
  }
  return 0.0;
}

std::string to_string(OrientationBin bin) {
  switch (bin) {
    case OrientationBin::H: return "H";
    case OrientationBin::DPlus: return "D+";
    case OrientationBin::V: return "V";
    case OrientationBin::DMinus: return "D-";
  }
  return "?";
}

double deviation(double angle, OrientationBin bin) {
  double d = angle - reference_angle(bin);
  if (d >= 90.0) d -= 180.0;
  if (d < -90.0) d += 180.0;
  return d;
}

std::vector<TiltStats> tilt_statistics(const std::vector<LineSegment>& segments, double scale) {
  std::vector<TiltStats> out;
  for (OrientationBin bin : kAllBins) {
    std::vector<double> devs;
    double total_length = 0.0;
    for (const auto& s : segments) {
      if (bin_orientation(s.angle) != bin) continue;
      devs.push_back(deviation(s.angle, bin));
      total_length += s.length;
    }
    if (devs.empty()) continue;
    double mean = 0.0;
    for (double d : devs) mean += d;
    mean /= static_cast<double>(devs.size());
    double var = 0.0;
    for (double d : devs) var += (d - mean) * (d - mean);
    var /= static_cast<double>(devs.size());
    const double ref = reference_angle(bin);
    out.push_back({scale, bin, ref, static_cast<int>(devs.size()), ref + mean, mean, std::sqrt(var), total_length});
  }
  return out;
}

Raster edge_pixels(const Raster& layer, const ThresholdPolicy& policy) {
  Raster bin = binarize(layer, policy);
  for (double& v : bin.samples()) v = v != 0.0 ? 1.0 : 0.0;
  return bin;
}

LayerAnalysis analyze_layer(const Raster& response, double scale, const HoughParams& hp,
                            const ThresholdPolicy& policy, bool with_overlay) {
  hp.validate();
  const Raster on = edge_pixels(response, policy);
  const HoughAccumulator acc = hough_accumulate(on, hp.theta_res, hp.rho_res);
  const auto peaks = hough_peaks(acc, hp.num_peaks, hp.peak_floor);
  LayerAnalysis out{scale, extract_segments(on, acc, peaks, hp.fill_gap, hp.min_length, scale), {}, std::nullopt};
  out.stats = tilt_statistics(out.segments, scale);
  if (with_overlay) out.overlay = draw_overlay(on, out.segments);
  return out;
}

std::vector<LayerAnalysis> run_analysis(const EdgeMap& emap, const HoughParams& hp, const ThresholdPolicy& policy,
                                        bool with_overlays) {
  hp.validate();
  std::vector<LayerAnalysis> out(emap.layers.size());
  parallel_for(0, static_cast<int>(emap.layers.size()), [&](int i) {
    const auto& layer = emap.layers[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = analyze_layer(layer.response, layer.scale, hp, policy, with_overlays);
  });
  return out;
}

RgbImage draw_overlay(const Raster& bin_layer, const std::vector<LineSegment>& segments) {
  RgbImage img(bin_layer.width(), bin_layer.height());
  auto src = bin_layer.samples();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] != 0.0) img.pixels[i] = {255, 255, 255};
  }
  for (const auto& s : segments) draw_line(img, s.x1, s.y1, s.x2, s.y2, {0, 200, 0});
  for (const auto& s : segments) {
    draw_cross(img, s.x1, s.y1, {255, 220, 0});
    draw_cross(img, s.x2, s.y2, {230, 0, 0});
  }
  return img;
}

void write_tilt_csv(const std::vector<LayerAnalysis>& layers, std::ostream& out) {
  out << kTiltCsvHeader << '\n';
  for (const auto& layer : layers) {
    for (const auto& t : layer.stats) {
      out << fixed6(t.scale) << ',' << to_string(t.bin) << ',' << fixed6(t.ref_angle) << ',' << t.n << ','
          << fixed6(t.mean_angle) << ',' << fixed6(t.mean_dev) << ',' << fixed6(t.std_dev) << ','
          << fixed6(t.total_length) << '\n';
    }
  }
}

void write_segments_csv(const std::vector<LayerAnalysis>& layers, std::ostream& out) {
  out << kSegmentCsvHeader << '\n';
  for (const auto& layer : layers) {
    for (const auto& s : layer.segments) {
      out << fixed6(s.scale) << ',' << s.x1 << ',' << s.y1 << ',' << s.x2 << ',' << s.y2 << ',' << fixed6(s.angle)
          << ',' << fixed6(s.length) << '\n';
    }
  }
}

}  // namespace viscrf
