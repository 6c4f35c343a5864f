#include "viscrf/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace viscrf {
namespace {

void require_odd_size(int size) {
  if (size < 3 || size % 2 == 0) {
    throw std::invalid_argument("kernel size must be odd and >= 3, got " + std::to_string(size));
  }
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void DoGParams::validate() const {
  require_positive(sigma_c, "sigma_c");
  require_positive(window_ratio, "window ratio h");
  if (!(surround_ratio > 1.0) || !std::isfinite(surround_ratio)) {
    throw std::invalid_argument("surround ratio s must exceed 1 (s = 1 is the zero filter)");
  }
}

Kernel::Kernel(int size_, std::vector<double> weights_) : size(size_), weights(std::move(weights_)) {
  if (size < 1 || size % 2 == 0) throw std::invalid_argument("kernel size must be odd and positive");
  if (weights.size() != static_cast<std::size_t>(size) * size) {
    throw std::invalid_argument("kernel weight count does not match size");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("kernel contains a non-finite weight");
  }
}

double Kernel::sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

int window_size(double sigma_c, double window_ratio) {
  require_positive(sigma_c, "sigma_c");
  require_positive(window_ratio, "window ratio h");
  const double w = window_ratio * sigma_c + 1.0;
  auto n = static_cast<long long>(std::floor(w + 0.5));
  if (n % 2 == 0) ++n;
  if (n < 3) n = 3;
  if (n > 1'000'001) throw std::invalid_argument("window size too large");
  return static_cast<int>(n);
}

std::vector<double> gaussian_taps(double sigma, int size) {
  require_positive(sigma, "sigma");
  require_odd_size(size);
  const int r = size / 2;
  std::vector<double> taps(static_cast<std::size_t>(size));
  for (int i = -r; i <= r; ++i) {
    taps[i + r] = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
  }
  // Pairwise sum from the tails inwards keeps the mirrored taps bit-identical.
  double total = taps[r];
  for (int i = r; i >= 1; --i) total += taps[r - i] + taps[r + i];
  for (double& t : taps) t /= total;
  return taps;
}

Kernel gaussian_kernel(double sigma, int size) {
  require_positive(sigma, "sigma");
  require_odd_size(size);
  const int r = size / 2;
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  double total = 0.0;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double v = std::exp(-static_cast<double>(x * x + y * y) / (2.0 * sigma * sigma));
      w[static_cast<std::size_t>(y + r) * size + (x + r)] = v;
      total += v;
    }
  }
  for (double& v : w) v /= total;
  return Kernel(size, std::move(w));
}

Kernel dog_kernel(const DoGParams& p) {
  p.validate();
  const int size = window_size(p.sigma_c, p.window_ratio);
  Kernel centre = gaussian_kernel(p.sigma_c, size);
  const Kernel surround = gaussian_kernel(p.sigma_s(), size);
  for (std::size_t i = 0; i < centre.weights.size(); ++i) centre.weights[i] -= surround.weights[i];
  return centre;
}

Kernel log_kernel(double sigma, int size) {
  require_positive(sigma, "sigma");
  require_odd_size(size);
  const int r = size / 2;
  const double s2 = sigma * sigma;
  const double norm = 1.0 / (2.0 * std::numbers::pi * s2 * s2 * s2);
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  double total = 0.0;
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double rr = static_cast<double>(x * x + y * y);
      const double v = (rr - 2.0 * s2) * norm * std::exp(-rr / (2.0 * s2));
      w[static_cast<std::size_t>(y + r) * size + (x + r)] = v;
      total += v;
    }
  }
  const double mean = total / static_cast<double>(w.size());
  for (double& v : w) v -= mean;
  return Kernel(size, std::move(w));
}

void write_kernel_csv(const Kernel& k, std::ostream& out) {
  char buf[32];
  for (int y = 0; y < k.size; ++y) {
    for (int x = 0; x < k.size; ++x) {
      std::snprintf(buf, sizeof buf, "%.9g", k.weights[static_cast<std::size_t>(y) * k.size + x]);
      if (x) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace viscrf
