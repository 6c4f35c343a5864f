#include "doctest.h"

#include "oracles.hpp"
#include "viscrf/scalespace.hpp"
#include "viscrf/stimuli.hpp"

using namespace viscrf;

namespace {

oracle::Grid grid_of(const Kernel& k) { return {k.size, k.weights}; }

Raster mortar_wall_crop() {
  CafeWallSpec wall;
  wall.rows = 3;
  wall.cols = 4;
  wall.tile = 200;
  wall.mortar = 8;
  return crop(cafe_wall(wall), {0, wall.tile / 2, 2 * wall.tile, wall.tile + wall.mortar});
}

}  // namespace

TEST_CASE("scale list validation") {
  CHECK_NOTHROW(ScaleList({0.5, 1.0, 2.0}));
  CHECK_THROWS_AS(ScaleList(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(ScaleList({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ScaleList({2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ScaleList({0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("convolve basics") {
  const Raster r = oracle::noise(9, 7, 2);
  CHECK(convolve(r, Kernel(1, {1.0})) == r);

  const Raster flat(16, 16, 0.7);
  CHECK(max_abs(convolve(flat, dog_kernel({2.0, 1.6, 4.0}))) <= 1e-12);

  Raster impulse(3, 3, 0.0);
  impulse(1, 1) = 1.0;
  const Kernel k(3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Raster out = convolve(impulse, k);
  // out(c+i, c+j) = k(i, j) r(c, c): the stored layout reappears around the impulse
  for (int j = -1; j <= 1; ++j) {
    for (int i = -1; i <= 1; ++i) CHECK(out(1 + i, 1 + j) == k.at(i, j));
  }
}

TEST_CASE("convolve matches the clamped direct sum") {
  const Raster r = oracle::noise(23, 17, 4);
  std::vector<double> w(25);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(1.0 + static_cast<double>(i));
  const Kernel k(5, w);
  CHECK(oracle::max_abs_diff(convolve(r, k), oracle::convolve_clamped(r, grid_of(k))) <= 1e-12);

  const Kernel big = dog_kernel({3.0, 2.0, 8.0});  // wider than the raster
  CHECK(oracle::max_abs_diff(convolve(r, big), oracle::convolve_clamped(r, grid_of(big))) <= 1e-12);
}

TEST_CASE("separable blur equals 2D Gaussian convolution") {
  const Raster r = oracle::noise(30, 20, 8);
  for (double sigma : {0.7, 2.0, 5.0}) {
    const int size = window_size(sigma, 8);
    const Raster sep = separable_blur(r, gaussian_taps(sigma, size));
    const Raster ref = oracle::convolve_clamped(r, oracle::sampled_gaussian(sigma, size));
    CHECK(oracle::max_abs_diff(sep, ref) <= 1e-12);
  }
  CHECK_THROWS_AS(separable_blur(r, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("dog response of a constant is zero") {
  for (double level : {0.0, 0.5, 1.0}) {
    const Raster flat(40, 30, level);
    for (auto method : {DoGMethod::direct, DoGMethod::blur_diff}) {
      CHECK(max_abs(dog_response(flat, {3.0, 1.6, 8.0}, method)) <= 1e-9);
    }
  }
}

TEST_CASE("step edge yields an undershoot and an overshoot") {
  Raster step(80, 5, 0.0);
  for (int y = 0; y < 5; ++y) {
    for (int x = 40; x < 80; ++x) step(x, y) = 1.0;
  }
  const Raster d = dog_response(step, {3.0, 2.0, 8.0});
  int argmin = 0, argmax = 0, changes = 0;
  double prev = 0.0;
  for (int x = 0; x < 80; ++x) {
    const double v = d(x, 2);
    if (v < d(argmin, 2)) argmin = x;
    if (v > d(argmax, 2)) argmax = x;
    if (std::abs(v) > 1e-12) {
      if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
      prev = v;
    }
  }
  CHECK(d(argmin, 2) < 0.0);
  CHECK(d(argmax, 2) > 0.0);
  CHECK(argmin < 40);
  CHECK(argmax >= 40);
  CHECK(changes == 1);
}

TEST_CASE("direct and blur_diff agree") {
  const Raster r = oracle::noise(64, 64, 21);
  for (double s : {1.6, 2.0, 5.0}) {
    for (double sc : {1.0, 4.0}) {
      const DoGParams p{sc, s, 8.0};
      CHECK(oracle::max_abs_diff(dog_response(r, p, DoGMethod::direct), dog_response(r, p, DoGMethod::blur_diff)) <=
            1e-9);
    }
  }
}

TEST_CASE("dog response is linear") {
  const Raster a = oracle::noise(32, 24, 1, -1.0, 1.0);
  const Raster b = oracle::noise(32, 24, 2, -1.0, 1.0);
  Raster mix(32, 24);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.samples()[i] = 2.5 * a.samples()[i] - 0.75 * b.samples()[i];
  const DoGParams p{2.0, 1.6, 8.0};
  const Raster ra = dog_response(a, p), rb = dog_response(b, p), rm = dog_response(mix, p);
  double worst = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    worst = std::max(worst, std::abs(rm.samples()[i] - (2.5 * ra.samples()[i] - 0.75 * rb.samples()[i])));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("emap_dog layers") {
  const EdgeMap wall = emap_dog(mortar_wall_crop(), ScaleList({4, 8, 12, 16, 20, 24, 28}), 2.0, 8.0);
  CHECK(wall.layers.size() == 7);
  CHECK(wall.kind == EdgeMap::Kind::dog);

  const Raster patch = oracle::noise(84, 84, 6);
  const EdgeMap fine = emap_dog(patch, ScaleList({0.5, 1.0, 1.5, 2.0, 2.5}), 2.0, 8.0);
  CHECK(fine.layers.size() == 5);
  for (const auto& layer : fine.layers) CHECK(layer.response.width() == 84);

  const EdgeMap one = emap_dog(patch, ScaleList({1.5}), 2.0, 8.0);
  REQUIRE(one.layers.size() == 1);
  CHECK(one.layers[0].response == dog_response(patch, {1.5, 2.0, 8.0}));
}

TEST_CASE("emap_log differences consecutive layers") {
  const Raster r = oracle::noise(32, 32, 12);
  const EdgeMap dog = emap_dog(r, ScaleList({1.0, 1.25}), 1.6, 8.0);
  const EdgeMap log = emap_log(dog);
  REQUIRE(log.layers.size() == 1);
  CHECK(log.kind == EdgeMap::Kind::log);
  CHECK(log.layers[0].scale == 1.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(log.layers[0].response.samples()[i] ==
          dog.layers[1].response.samples()[i] - dog.layers[0].response.samples()[i]);
  }
  for (double level : {0.0, 0.5, 1.0}) {
    const EdgeMap flat = emap_log(emap_dog(Raster(20, 20, level), ScaleList({1, 2, 3}), 1.6, 8.0));
    for (const auto& layer : flat.layers) CHECK(max_abs(layer.response) <= 1e-9);
  }
  CHECK_THROWS_AS(emap_log(emap_dog(r, ScaleList({1.0}), 1.6, 8.0)), std::invalid_argument);
  CHECK_THROWS_AS(emap_log(log), std::invalid_argument);
}

TEST_CASE("emap_dog commutes with rotate90") {
  const Raster r = oracle::noise(48, 36, 77);
  const ScaleList scales({1.0, 2.0, 3.5});
  const EdgeMap plain = emap_dog(r, scales, 1.6, 8.0);
  const EdgeMap turned = emap_dog(rotate90(r), scales, 1.6, 8.0);
  const int band = window_size(3.5, 8.0) / 2;
  for (std::size_t l = 0; l < scales.size(); ++l) {
    const Raster expect = rotate90(plain.layers[l].response);
    const Raster& got = turned.layers[l].response;
    double interior = 0.0, border = 0.0;
    for (int y = 0; y < got.height(); ++y) {
      for (int x = 0; x < got.width(); ++x) {
        const double d = std::abs(got(x, y) - expect(x, y));
        const bool inside = x >= band && y >= band && x < got.width() - band && y < got.height() - band;
        (inside ? interior : border) = std::max(inside ? interior : border, d);
      }
    }
    CHECK(interior == 0.0);
    CHECK(border <= 1e-9);
  }
}

TEST_CASE("binarize") {
  CHECK(binarize(Raster(3, 3, 0.0), {}) == Raster(3, 3, 0.0));
  CHECK(binarize(Raster(1, 1, 0.5), {}) == Raster(1, 1, 1.0));

  const Raster four(4, 1, {-3.0, -1.0, 1.0, 3.0});
  const Thresholds t = mean_thresholds(four);
  CHECK(t.upper == 2.0);
  CHECK(t.lower == -2.0);
  ThresholdPolicy mean{ThresholdPolicy::Mode::mean_pos_neg};
  CHECK(binarize(four, mean) == Raster(4, 1, {-1.0, 0.0, 0.0, 1.0}));

  // round-off from a zero-sum kernel on a flat patch is not an edge
  CHECK(binarize(Raster(2, 1, {6.7e-16, -4e-16}), {}) == Raster(2, 1, 0.0));
  const Thresholds none = mean_thresholds(Raster(2, 2, 0.0));
  CHECK(std::isinf(none.upper));
  CHECK(std::isinf(none.lower));

  CHECK(parse_threshold_mode("sign") == ThresholdPolicy::Mode::sign);
  CHECK(to_string(ThresholdPolicy::Mode::mean_pos_neg) == "mean_pos_neg");
  CHECK_THROWS_AS(parse_threshold_mode("otsu"), std::invalid_argument);
}

TEST_CASE("jetwhite colormap") {
  const RgbImage img = render_jetwhite(Raster(3, 1, {-2.0, 0.0, 2.0}));
  CHECK(img.at(0, 0) == RgbImage::Pixel{0, 0, 255});
  CHECK(img.at(1, 0) == RgbImage::Pixel{255, 255, 255});
  CHECK(img.at(2, 0) == RgbImage::Pixel{255, 0, 0});
  CHECK(render_jetwhite(Raster(2, 2, 0.0)).at(1, 1) == RgbImage::Pixel{255, 255, 255});

  // within each linear piece every channel moves one way only
  const double stops[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int piece = 0; piece < 4; ++piece) {
    int dir[3] = {0, 0, 0};
    RgbImage::Pixel prev = jetwhite(stops[piece]);
    for (int i = 1; i <= 64; ++i) {
      const RgbImage::Pixel p = jetwhite(stops[piece] + (stops[piece + 1] - stops[piece]) * i / 64.0);
      const int delta[3] = {p.r - prev.r, p.g - prev.g, p.b - prev.b};
      for (int c = 0; c < 3; ++c) {
        if (delta[c] == 0) continue;
        const int sgn = delta[c] > 0 ? 1 : -1;
        CHECK((dir[c] == 0 || dir[c] == sgn));
        dir[c] = sgn;
      }
      prev = p;
    }
  }
}

TEST_CASE("scale selection from feature sizes") {
  const ScaleSelection sel = select_scales({20, 100, 1}, 1.6, 0.5);
  REQUIRE(sel.raw.size() == 3);
  CHECK(sel.raw[0] == 6.25);
  CHECK(sel.raw[1] == 31.25);
  CHECK(sel.raw[2] == 0.3125);
  CHECK(sel.scales.values().front() == 0.5);
  CHECK(sel.scales.values().back() == 31.5);
  CHECK(sel.scales.size() == 63);

  const ScaleSelection one = select_scales({20}, 1.6, 0.5);
  CHECK(one.scales.values() == std::vector<double>{6.5});
  CHECK_THROWS_AS(select_scales({}, 1.6, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(select_scales({10}, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(select_scales({10}, 1.6, 0.0), std::invalid_argument);
}

// Mortar band of the crop occupies rows [T/2, T/2 + M).
TEST_CASE("mortar cue is gone at coarse scale") {
  const Raster patch = mortar_wall_crop();
  const Raster bin = binarize(dog_response(patch, {28.0, 2.0, 8.0}), {});
  CHECK(oracle::widest_component_span(bin, 100, 108) < 200);
}

TEST_CASE("mortar cue persists at fine scale" * doctest::may_fail()) {
  const Raster patch = mortar_wall_crop();
  const Raster bin = binarize(dog_response(patch, {8.0, 2.0, 8.0}), {});
  CHECK(oracle::widest_component_span(bin, 100, 108) >= 400);
}
