#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "viscrf/tiltanalysis.hpp"

namespace viscrf {

HoughAccumulator::HoughAccumulator(int width, int height, double theta_res, double rho_res)
    : theta_res_(theta_res), rho_res_(rho_res) {
  if (!(theta_res > 0.0) || !(rho_res > 0.0) || theta_res > 180.0) {
    throw std::invalid_argument("Hough resolutions must be positive");
  }
  n_theta_ = static_cast<int>(std::ceil(180.0 / theta_res - 1e-9));
  const double diag = std::hypot(static_cast<double>(width - 1), static_cast<double>(height - 1));
  rho_offset_ = static_cast<int>(std::ceil(diag / rho_res));
  n_rho_ = 2 * rho_offset_ + 1;
  cos_.resize(static_cast<std::size_t>(n_theta_));
  sin_.resize(static_cast<std::size_t>(n_theta_));
  for (int t = 0; t < n_theta_; ++t) {
    const double rad = theta_deg(t) * std::numbers::pi / 180.0;
    double c = std::cos(rad);
    double s = std::sin(rad);
    // cos(-pi/2) is not exactly zero in floating point
    if (std::abs(c) < 1e-12) c = 0.0;
    if (std::abs(s) < 1e-12) s = 0.0;
    cos_[t] = c;
    sin_[t] = s;
  }
  anchor_x_.assign(static_cast<std::size_t>(n_theta_), 0);
  anchor_y_.assign(static_cast<std::size_t>(n_theta_), 0);
  votes_.assign(static_cast<std::size_t>(n_theta_) * n_rho_, 0);
}

int HoughAccumulator::rho_bin(int x, int y, int ti) const {
  const double rel = (x - anchor_x_[ti]) * cos_[ti] + (y - anchor_y_[ti]) * sin_[ti];
  return static_cast<int>(std::floor(rel / rho_res_ + 0.5)) + rho_offset_;
}

int HoughAccumulator::rho_index(double rho, int ti) const {
  return static_cast<int>(std::floor((rho - anchor_rho(ti)) / rho_res_ + 0.5)) + rho_offset_;
}

void HoughAccumulator::anchor_to(const Raster& bin_layer) {
  std::vector<char> set(static_cast<std::size_t>(n_theta_), 0);
  for (int y = 0; y < bin_layer.height(); ++y) {
    for (int x = 0; x < bin_layer.width(); ++x) {
      if (bin_layer(x, y) == 0.0) continue;
      for (int t = 0; t < n_theta_; ++t) {
        // compared through integer offsets so the choice moves with the layer
        if (!set[t] || (x - anchor_x_[t]) * cos_[t] + (y - anchor_y_[t]) * sin_[t] < 0.0) {
          anchor_x_[t] = x;
          anchor_y_[t] = y;
          set[t] = 1;
        }
      }
    }
  }
}

int HoughAccumulator::max_votes() const {
  return votes_.empty() ? 0 : *std::max_element(votes_.begin(), votes_.end());
}

long long HoughAccumulator::total_votes() const {
  long long n = 0;
  for (int v : votes_) n += v;
  return n;
}

HoughAccumulator hough_accumulate(const Raster& bin_layer, double theta_res, double rho_res) {
  HoughAccumulator acc(bin_layer.width(), bin_layer.height(), theta_res, rho_res);
  acc.anchor_to(bin_layer);
  for (int y = 0; y < bin_layer.height(); ++y) {
    for (int x = 0; x < bin_layer.width(); ++x) {
      const double v = bin_layer(x, y);
      if (v == 0.0) continue;
      if (v != 1.0) throw std::invalid_argument("Hough input must be binary (0/1)");
      for (int t = 0; t < acc.n_theta(); ++t) ++acc.votes(t, acc.rho_bin(x, y, t));
    }
  }
  return acc;
}

std::vector<HoughPeak> hough_peaks(const HoughAccumulator& acc, int num_peaks, double peak_floor) {
  std::vector<HoughPeak> peaks;
  const int top = acc.max_votes();
  if (top <= 0 || num_peaks <= 0) return peaks;
  const double floor_votes = peak_floor * top;

  const int nt = acc.n_theta();
  const int nr = acc.n_rho();
  std::vector<char> suppressed(static_cast<std::size_t>(nt) * nr, 0);
  auto cell = [nr](int t, int r) { return static_cast<std::size_t>(t) * nr + r; };

  while (static_cast<int>(peaks.size()) < num_peaks) {
    int best = 0, bt = -1, br = -1;
    for (int t = 0; t < nt; ++t) {
      for (int r = 0; r < nr; ++r) {
        if (suppressed[cell(t, r)]) continue;
        const int v = acc.votes(t, r);
        if (v > best) {
          best = v;
          bt = t;
          br = r;
        }
      }
    }
    if (bt < 0 || best < floor_votes) break;
    peaks.push_back({bt, br, acc.theta_deg(bt), acc.rho(bt, br), best});
    for (int dt = -1; dt <= 1; ++dt) {
      for (int dr = -1; dr <= 1; ++dr) {
        int t = bt + dt;
        int r = br + dr;
        // theta wraps at +/-90 degrees where the same line has rho negated
        if (t < 0 || t >= nt) {
          const double rho = acc.rho(bt, r);
          t = (t + nt) % nt;
          r = acc.rho_index(-rho, t);
        }
        if (r < 0 || r >= nr) continue;
        suppressed[cell(t, r)] = 1;
      }
    }
  }
  return peaks;
}

double segment_angle(int x1, int y1, int x2, int y2) {
  double a = std::atan2(static_cast<double>(y2 - y1), static_cast<double>(x2 - x1)) * 180.0 / std::numbers::pi;
  a = std::fmod(a, 180.0);
  if (a < 0.0) a += 180.0;
  if (a >= 180.0) a -= 180.0;
  return a + 0.0;  // normalizes -0
}

std::vector<LineSegment> extract_segments(const Raster& bin_layer, const HoughAccumulator& acc,
                                          const std::vector<HoughPeak>& peaks, double fill_gap,
                                          double min_length, double scale) {
  struct Pixel {
    int x, y;
  };
  std::vector<Pixel> on;
  for (int y = 0; y < bin_layer.height(); ++y) {
    for (int x = 0; x < bin_layer.width(); ++x) {
      if (bin_layer(x, y) != 0.0) on.push_back({x, y});
    }
  }

  std::vector<LineSegment> segments;
  const double gap2 = fill_gap * fill_gap;
  for (const auto& peak : peaks) {
    const double rad = peak.theta_deg * std::numbers::pi / 180.0;
    const double dir_x = -std::sin(rad);
    const double dir_y = std::cos(rad);

    struct Member {
      double t;
      int x, y;
    };
    const int ax = acc.anchor_x(peak.theta_index);
    const int ay = acc.anchor_y(peak.theta_index);
    std::vector<Member> members;
    for (const auto& p : on) {
      if (acc.rho_bin(p.x, p.y, peak.theta_index) == peak.rho_index) {
        members.push_back({(p.x - ax) * dir_x + (p.y - ay) * dir_y, p.x, p.y});
      }
    }
    std::sort(members.begin(), members.end(), [](const Member& a, const Member& b) {
      if (a.t != b.t) return a.t < b.t;
      if (a.x != b.x) return a.x < b.x;
      return a.y < b.y;
    });

    auto emit = [&](const Member& a, const Member& b) {
      const double len = std::hypot(static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y));
      if (len < min_length) return;
      const bool a_first = a.x < b.x || (a.x == b.x && a.y <= b.y);
      const Member& s = a_first ? a : b;
      const Member& e = a_first ? b : a;
      segments.push_back({s.x, s.y, e.x, e.y, segment_angle(s.x, s.y, e.x, e.y), len, scale});
    };

    std::size_t start = 0;
    for (std::size_t i = 1; i <= members.size(); ++i) {
      bool split = i == members.size();
      if (!split) {
        const double dx = members[i].x - members[i - 1].x;
        const double dy = members[i].y - members[i - 1].y;
        split = dx * dx + dy * dy > gap2;
      }
      if (split && !members.empty()) {
        emit(members[start], members[i - 1]);
        start = i;
      }
    }
  }
  return segments;
}

}  // namespace viscrf
