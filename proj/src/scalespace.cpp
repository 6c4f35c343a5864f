#include "viscrf/scalespace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "viscrf/parallel.hpp"

namespace viscrf {
namespace {

void require_fits(int kernel_size, const Raster& r) {
  const int extent = std::max(r.width(), r.height());
  if (kernel_size >= 4 * extent) {
    throw std::invalid_argument("kernel of size " + std::to_string(kernel_size) +
                                " is too large for a " + std::to_string(r.width()) + "x" +
                                std::to_string(r.height()) + " raster");
  }
}

// Horizontal pass: out[x] = t0 v[x] + sum_i t_i (v[x-i] + v[x+i]).
Raster blur_rows(const Raster& src, const std::vector<double>& taps) {
  const int w = src.width();
  const int h = src.height();
  const int r = static_cast<int>(taps.size()) / 2;
  Raster out(w, h);
  parallel_for(0, h, [&](int y) {
    std::vector<double> padded(static_cast<std::size_t>(w + 2 * r));
    auto row = src.row(y);
    for (int i = 0; i < w + 2 * r; ++i) padded[i] = row[std::clamp(i - r, 0, w - 1)];
    double* dst = &out(0, y);
    const double* c = padded.data() + r;
    const double t0 = taps[r];
    for (int x = 0; x < w; ++x) dst[x] = t0 * c[x];
    for (int i = 1; i <= r; ++i) {
      const double t = taps[r + i];
      const double* lo = c - i;
      const double* hi = c + i;
      for (int x = 0; x < w; ++x) dst[x] += t * (lo[x] + hi[x]);
    }
  });
  return out;
}

// Vertical pass, same arithmetic as blur_rows along columns.
Raster blur_cols(const Raster& src, const std::vector<double>& taps) {
  const int w = src.width();
  const int h = src.height();
  const int r = static_cast<int>(taps.size()) / 2;
  Raster out(w, h);
  parallel_for(0, h, [&](int y) {
    double* dst = &out(0, y);
    const double* c = src.row(y).data();
    const double t0 = taps[r];
    for (int x = 0; x < w; ++x) dst[x] = t0 * c[x];
    for (int i = 1; i <= r; ++i) {
      const double t = taps[r + i];
      const double* lo = src.row(std::max(y - i, 0)).data();
      const double* hi = src.row(std::min(y + i, h - 1)).data();
      for (int x = 0; x < w; ++x) dst[x] += t * (lo[x] + hi[x]);
    }
  });
  return out;
}

}  // namespace

ScaleList::ScaleList(std::vector<double> scales) : scales_(std::move(scales)) {
  if (scales_.empty()) throw std::invalid_argument("scale list is empty");
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    if (!(scales_[i] > 0.0) || !std::isfinite(scales_[i])) {
      throw std::invalid_argument("scales must be positive and finite");
    }
    if (i > 0 && !(scales_[i] > scales_[i - 1])) {
      throw std::invalid_argument("scales must be strictly increasing");
    }
  }
}

Raster convolve(const Raster& r, const Kernel& k, BorderMode) {
  require_fits(k.size, r);
  const int w = r.width();
  const int h = r.height();
  const int rad = k.radius();
  const int pw = w + 2 * rad;
  const int ph = h + 2 * rad;
  std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
  for (int py = 0; py < ph; ++py) {
    const int sy = std::clamp(py - rad, 0, h - 1);
    for (int px = 0; px < pw; ++px) {
      padded[static_cast<std::size_t>(py) * pw + px] = r(std::clamp(px - rad, 0, w - 1), sy);
    }
  }

  Raster out(w, h);
  parallel_for(0, h, [&](int y) {
    double* dst = &out(0, y);
    for (int j = -rad; j <= rad; ++j) {
      const double* prow = padded.data() + static_cast<std::size_t>(y - j + rad) * pw;
      for (int i = -rad; i <= rad; ++i) {
        const double kv = k.at(i, j);
        const double* src = prow + (rad - i);
        for (int x = 0; x < w; ++x) dst[x] += kv * src[x];
      }
    }
  });
  return out;
}

Raster separable_blur(const Raster& r, const std::vector<double>& taps) {
  if (taps.size() % 2 == 0) throw std::invalid_argument("separable taps must have odd length");
  require_fits(static_cast<int>(taps.size()), r);
  Raster a = blur_cols(blur_rows(r, taps), taps);
  const Raster b = blur_rows(blur_cols(r, taps), taps);
  auto as = a.samples();
  auto bs = b.samples();
  for (std::size_t i = 0; i < as.size(); ++i) as[i] = (as[i] + bs[i]) * 0.5;
  return a;
}

Raster dog_response(const Raster& r, const DoGParams& p, DoGMethod method) {
  p.validate();
  if (method == DoGMethod::direct) return convolve(r, dog_kernel(p));

  const int size = window_size(p.sigma_c, p.window_ratio);
  Raster centre = separable_blur(r, gaussian_taps(p.sigma_c, size));
  const Raster surround = separable_blur(r, gaussian_taps(p.sigma_s(), size));
  auto cs = centre.samples();
  auto ss = surround.samples();
  for (std::size_t i = 0; i < cs.size(); ++i) cs[i] -= ss[i];
  return centre;
}

EdgeMap emap_dog(const Raster& r, const ScaleList& scales, double surround_ratio, double window_ratio,
                 DoGMethod method) {
  if (scales.empty()) throw std::invalid_argument("scale list is empty");
  EdgeMap map;
  map.kind = EdgeMap::Kind::dog;
  map.surround_ratio = surround_ratio;
  map.window_ratio = window_ratio;
  map.layers.reserve(scales.size());
  for (double sigma : scales.values()) {
    map.layers.push_back({sigma, dog_response(r, {sigma, surround_ratio, window_ratio}, method)});
  }
  return map;
}

EdgeMap emap_log(const EdgeMap& dog) {
  if (dog.kind != EdgeMap::Kind::dog) throw std::invalid_argument("EMap-LoG needs a DoG edge map");
  if (dog.layers.size() < 2) throw std::invalid_argument("EMap-LoG needs at least two DoG layers");
  EdgeMap map;
  map.kind = EdgeMap::Kind::log;
  map.surround_ratio = dog.surround_ratio;
  map.window_ratio = dog.window_ratio;
  for (std::size_t i = 0; i + 1 < dog.layers.size(); ++i) {
    Raster diff = dog.layers[i + 1].response;
    auto d = diff.samples();
    auto lower = dog.layers[i].response.samples();
    if (d.size() != lower.size()) throw std::invalid_argument("DoG layers differ in size");
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= lower[k];
    map.layers.push_back({dog.layers[i].scale, std::move(diff)});
  }
  return map;
}

std::string to_string(ThresholdPolicy::Mode mode) {
  return mode == ThresholdPolicy::Mode::sign ? "sign" : "mean_pos_neg";
}

ThresholdPolicy::Mode parse_threshold_mode(const std::string& name) {
  if (name == "sign") return ThresholdPolicy::Mode::sign;
  if (name == "mean_pos_neg") return ThresholdPolicy::Mode::mean_pos_neg;
  throw std::invalid_argument("unknown threshold mode '" + name + "' (expected sign or mean_pos_neg)");
}

Thresholds mean_thresholds(const Raster& layer, double zero_tolerance) {
  double pos_sum = 0.0, neg_sum = 0.0;
  std::size_t pos_n = 0, neg_n = 0;
  for (double v : layer.samples()) {
    if (v > zero_tolerance) {
      pos_sum += v;
      ++pos_n;
    } else if (v < -zero_tolerance) {
      neg_sum += v;
      ++neg_n;
    }
  }
  Thresholds t;
  if (pos_n) t.upper = pos_sum / static_cast<double>(pos_n);
  if (neg_n) t.lower = neg_sum / static_cast<double>(neg_n);
  return t;
}

Raster binarize(const Raster& layer, const ThresholdPolicy& policy) {
  Raster out(layer.width(), layer.height());
  auto src = layer.samples();
  auto dst = out.samples();
  if (policy.mode == ThresholdPolicy::Mode::sign) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > policy.zero_tolerance ? 1.0 : 0.0;
    return out;
  }
  const Thresholds t = mean_thresholds(layer, policy.zero_tolerance);
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] > t.upper ? 1.0 : (src[i] < t.lower ? -1.0 : 0.0);
  }
  return out;
}

ScaleSelection select_scales(const std::vector<double>& feature_sizes, double surround_ratio, double grid_step) {
  if (feature_sizes.empty()) throw std::invalid_argument("feature size list is empty");
  if (!(surround_ratio > 1.0)) throw std::invalid_argument("surround ratio s must exceed 1");
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw std::invalid_argument("grid step must be positive");
  ScaleSelection sel;
  for (double f : feature_sizes) {
    if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("feature sizes must be positive");
    sel.raw.push_back(f / (2.0 * surround_ratio));
  }
  auto snap = [&](double v) { return std::max(1LL, static_cast<long long>(std::floor(v / grid_step + 0.5))); };
  const auto [lo, hi] = std::minmax_element(sel.raw.begin(), sel.raw.end());
  std::vector<double> grid;
  for (long long k = snap(*lo); k <= snap(*hi); ++k) grid.push_back(static_cast<double>(k) * grid_step);
  sel.scales = ScaleList(std::move(grid));
  return sel;
}

}  // namespace viscrf
