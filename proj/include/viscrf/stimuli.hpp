#pragma once

#include <optional>
#include <string>
#include <vector>

#include "viscrf/raster.hpp"

namespace viscrf {

/// Café Wall: rows of alternating dark/light square tiles, every other row
/// shifted horizontally, separated by horizontal mortar lines. No mortar on
/// the outer border.
struct CafeWallSpec {
  int rows = 3;
  int cols = 9;
  int tile = 50;
  int mortar = 2;
  std::optional<int> shift;  ///< phase of odd rows; tile/2 when unset
  double lum_dark = 0.0;
  double lum_light = 1.0;
  double lum_mortar = 0.5;

  int effective_shift() const { return shift.value_or(tile / 2); }
  int width() const { return cols * tile; }
  int height() const { return rows * tile + (rows - 1) * mortar; }

  void validate() const;
  /// Non-fatal oddities, e.g. mortar luminance outside (dark, light).
  std::vector<std::string> warnings() const;
};

Raster cafe_wall(const CafeWallSpec& spec);

enum class DotLayout { cross_bulge, one_three_tilt, custom };

std::string to_string(DotLayout layout);
DotLayout parse_dot_layout(const std::string& name);

/// One dot inside one tile; (x, y) is the dot's top-left pixel relative to
/// the tile's top-left corner.
struct DotPlacement {
  int tile_row = 0;
  int tile_col = 0;
  int x = 0;
  int y = 0;
};

/// Checkerboard with square dots of the opposite luminance superimposed on
/// the tiles. Tile (r, c) is dark when r + c is even.
///
/// cross_bulge: four dots in the corners of every dark tile.
/// one_three_tilt: one dot on dark tiles, three on light tiles; on even
/// columns the single dot sits top-right and the triple occupies top-left,
/// bottom-left and bottom-right, odd columns are the left-right mirror
/// image. Corner dots are inset `gap` pixels from both adjacent borders.
struct DotGridSpec {
  int n_rows = 3;
  int n_cols = 3;
  int tile = 100;
  int dot = 20;
  int gap = 5;
  DotLayout layout = DotLayout::cross_bulge;
  std::vector<DotPlacement> placements;  ///< used when layout == custom
  double lum_dark = 0.0;
  double lum_light = 1.0;

  int width() const { return n_cols * tile; }
  int height() const { return n_rows * tile; }
  bool is_dark_tile(int r, int c) const { return (r + c) % 2 == 0; }

  void validate() const;
};

/// Dot placements implied by the layout (the explicit list for custom).
std::vector<DotPlacement> dot_placements(const DotGridSpec& spec);

Raster dot_checkerboard(const DotGridSpec& spec);

/// One raster per gap value, spec otherwise unchanged.
std::vector<Raster> gap_variant(const DotGridSpec& spec, const std::vector<int>& gaps);

}  // namespace viscrf
