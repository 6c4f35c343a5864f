#include "viscrf/stimuli.hpp"

#include <cmath>
#include <stdexcept>

namespace viscrf {
namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_luminance(double v, const char* name) {
  require(std::isfinite(v) && v >= 0.0 && v <= 1.0, std::string(name) + " must lie in [0,1]");
}

int floor_div(int a, int b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

enum Corner { top_left, top_right, bottom_left, bottom_right };

DotPlacement corner_dot(const DotGridSpec& s, int r, int c, Corner corner) {
  const int near = s.gap;
  const int far = s.tile - s.gap - s.dot;
  const bool right = corner == top_right || corner == bottom_right;
  const bool bottom = corner == bottom_left || corner == bottom_right;
  return {r, c, right ? far : near, bottom ? far : near};
}

}  // namespace

void CafeWallSpec::validate() const {
  require(rows >= 1 && cols >= 1, "cafe wall needs at least one row and column");
  require(tile >= 1, "tile size must be >= 1");
  require(mortar >= 0 && mortar < tile, "mortar must satisfy 0 <= M < T");
  const int s = effective_shift();
  require(s >= 0 && s < 2 * tile, "shift must satisfy 0 <= shift < 2T");
  require_luminance(lum_dark, "lum_dark");
  require_luminance(lum_light, "lum_light");
  require_luminance(lum_mortar, "lum_mortar");
}

std::vector<std::string> CafeWallSpec::warnings() const {
  std::vector<std::string> w;
  if (!(lum_dark < lum_mortar && lum_mortar < lum_light)) {
    w.emplace_back("mortar luminance is not strictly between dark and light tiles");
  }
  return w;
}

Raster cafe_wall(const CafeWallSpec& spec) {
  spec.validate();
  Raster out(spec.width(), spec.height(), spec.lum_mortar);
  const int pitch = spec.tile + spec.mortar;
  for (int k = 0; k < spec.rows; ++k) {
    const int phase = (k % 2) * spec.effective_shift();
    for (int y = k * pitch; y < k * pitch + spec.tile; ++y) {
      for (int x = 0; x < spec.width(); ++x) {
        const bool dark = floor_div(x - phase, spec.tile) % 2 == 0;
        out(x, y) = dark ? spec.lum_dark : spec.lum_light;
      }
    }
  }
  return out;
}

std::string to_string(DotLayout layout) {
  switch (layout) {
    case DotLayout::cross_bulge: return "cross_bulge";
    case DotLayout::one_three_tilt: return "one_three_tilt";
    case DotLayout::custom: return "custom";
  }
  return "custom";
}

DotLayout parse_dot_layout(const std::string& name) {
  if (name == "cross_bulge") return DotLayout::cross_bulge;
  if (name == "one_three_tilt") return DotLayout::one_three_tilt;
  if (name == "custom") return DotLayout::custom;
  throw std::invalid_argument("unknown dot layout '" + name + "'");
}

void DotGridSpec::validate() const {
  require(n_rows >= 1 && n_cols >= 1, "dot grid needs at least one tile row and column");
  require(tile >= 1, "tile size must be >= 1");
  require(dot >= 0 && gap >= 0, "dot size and gap must be non-negative");
  require_luminance(lum_dark, "lum_dark");
  require_luminance(lum_light, "lum_light");
  if (layout != DotLayout::custom) {
    require(2 * (dot + gap) <= tile, "corner dots need dot + gap <= tile/2");
    return;
  }
  for (const auto& p : placements) {
    require(p.tile_row >= 0 && p.tile_row < n_rows && p.tile_col >= 0 && p.tile_col < n_cols,
            "dot placement refers to a tile outside the grid");
    require(p.x >= 0 && p.y >= 0 && p.x + dot <= tile && p.y + dot <= tile, "dot placement exceeds tile bounds");
  }
}

std::vector<DotPlacement> dot_placements(const DotGridSpec& spec) {
  if (spec.layout == DotLayout::custom) return spec.placements;
  std::vector<DotPlacement> out;
  if (spec.dot == 0) return out;
  for (int r = 0; r < spec.n_rows; ++r) {
    for (int c = 0; c < spec.n_cols; ++c) {
      const bool dark = spec.is_dark_tile(r, c);
      if (spec.layout == DotLayout::cross_bulge) {
        if (!dark) continue;
        for (Corner k : {top_left, top_right, bottom_left, bottom_right}) out.push_back(corner_dot(spec, r, c, k));
        continue;
      }
      const bool mirrored = c % 2 == 1;
      if (dark) {
        out.push_back(corner_dot(spec, r, c, mirrored ? top_left : top_right));
      } else {
        out.push_back(corner_dot(spec, r, c, mirrored ? top_right : top_left));
        out.push_back(corner_dot(spec, r, c, mirrored ? bottom_right : bottom_left));
        out.push_back(corner_dot(spec, r, c, mirrored ? bottom_left : bottom_right));
      }
    }
  }
  return out;
}

Raster dot_checkerboard(const DotGridSpec& spec) {
  spec.validate();
  Raster out(spec.width(), spec.height());
  for (int y = 0; y < spec.height(); ++y) {
    for (int x = 0; x < spec.width(); ++x) {
      out(x, y) = spec.is_dark_tile(y / spec.tile, x / spec.tile) ? spec.lum_dark : spec.lum_light;
    }
  }
  for (const auto& p : dot_placements(spec)) {
    const double lum = spec.is_dark_tile(p.tile_row, p.tile_col) ? spec.lum_light : spec.lum_dark;
    const int ox = p.tile_col * spec.tile + p.x;
    const int oy = p.tile_row * spec.tile + p.y;
    for (int y = oy; y < oy + spec.dot; ++y) {
      for (int x = ox; x < ox + spec.dot; ++x) out(x, y) = lum;
    }
  }
  return out;
}

std::vector<Raster> gap_variant(const DotGridSpec& spec, const std::vector<int>& gaps) {
  std::vector<Raster> out;
  out.reserve(gaps.size());
  for (int g : gaps) {
    DotGridSpec s = spec;
    s.gap = g;
    out.push_back(dot_checkerboard(s));
  }
  return out;
}

}  // namespace viscrf
