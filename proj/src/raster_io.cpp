#include "viscrf/raster.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace viscrf {
namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

double luminance(double r, double g, double b) { return kLumaR * r + kLumaG * g + kLumaB * b; }

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

// Minimal tokenizer for the PNM header; '#' starts a comment running to end of line.
class PnmReader {
 public:
  PnmReader(std::vector<unsigned char> bytes, std::string name)
      : bytes_(std::move(bytes)), name_(std::move(name)) {}

  std::string token() {
    skip_space_and_comments();
    std::string t;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      t.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (t.empty()) throw IoError(name_ + ": truncated header");
    return t;
  }

  int integer() {
    const std::string t = token();
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(t, &used);
    } catch (const std::exception&) {
      throw IoError(name_ + ": expected integer, got '" + t + "'");
    }
    if (used != t.size() || v < 0 || v > 1'000'000) throw IoError(name_ + ": bad integer '" + t + "'");
    return static_cast<int>(v);
  }

  // After maxval a binary file has exactly one whitespace byte before the raster.
  std::span<const unsigned char> binary_payload(std::size_t count) {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw IoError(name_ + ": malformed header");
    ++pos_;
    if (bytes_.size() - pos_ < count) throw IoError(name_ + ": truncated pixel data");
    return {bytes_.data() + pos_, count};
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::vector<unsigned char> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

Raster read_pnm(std::vector<unsigned char> bytes, const std::string& name) {
  PnmReader rd(std::move(bytes), name);
  const std::string magic = rd.token();
  const bool ascii = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    throw IoError(name + ": unsupported format '" + magic + "'");
  }
  const int w = rd.integer();
  const int h = rd.integer();
  const int maxval = rd.integer();
  if (w == 0 || h == 0) throw IoError(name + ": zero-dimension image");
  if (maxval < 1 || maxval > 255) throw IoError(name + ": only 8-bit images are supported (maxval " + std::to_string(maxval) + ")");

  const int channels = color ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(w) * h * channels;
  std::vector<int> values(count);
  if (ascii) {
    for (auto& v : values) v = rd.integer();
  } else {
    auto raw = rd.binary_payload(count);
    std::copy(raw.begin(), raw.end(), values.begin());
  }
  const double scale = 1.0 / maxval;
  std::vector<double> samples(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (int c = 0; c < channels; ++c) {
      if (values[i * channels + c] > maxval) throw IoError(name + ": sample exceeds maxval");
    }
    samples[i] = color ? luminance(values[3 * i] * scale, values[3 * i + 1] * scale, values[3 * i + 2] * scale)
                       : values[i] * scale;
  }
  return Raster(w, h, std::move(samples));
}

Raster read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError(path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw IoError(path.string() + ": 16-bit PNG is not supported");
  }
  const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + image.message);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  if (w == 0 || h == 0) throw IoError(path.string() + ": zero-dimension image");
  std::vector<double> samples(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = color ? luminance(buf[3 * i] / 255.0, buf[3 * i + 1] / 255.0, buf[3 * i + 2] / 255.0)
                       : buf[i] / 255.0;
  }
  return Raster(w, h, std::move(samples));
}

void write_file(const std::filesystem::path& path, const std::string& header,
                std::span<const std::uint8_t> payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << header;
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("error writing " + path.string());
}

void write_png(const std::filesystem::path& path, int w, int h, bool color,
               std::span<const std::uint8_t> payload) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, payload.data(), 0, nullptr)) {
    throw IoError("cannot write " + path.string() + ": " + image.message);
  }
}

}  // namespace

Raster read_image(const std::filesystem::path& path) {
  auto bytes = slurp(path);
  static constexpr std::array<unsigned char, 8> kPngMagic = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= kPngMagic.size() && std::equal(kPngMagic.begin(), kPngMagic.end(), bytes.begin())) {
    return read_png(path);
  }
  return read_pnm(std::move(bytes), path.string());
}

std::uint8_t quantize(double value, DisplayMode mode, double amplitude) {
  if (std::isnan(value)) throw std::invalid_argument("cannot quantize a NaN sample");
  double level = 0.0;
  switch (mode) {
    case DisplayMode::linear_unit:
      if (value < 0.0 || value > 1.0) {
        throw std::invalid_argument("linear_unit mode requires samples in [0,1], got " + std::to_string(value));
      }
      level = std::floor(value * 255.0 + 0.5);
      break;
    case DisplayMode::signed_symmetric: {
      const double t = amplitude > 0.0 ? value / amplitude : 0.0;
      level = std::floor((t + 1.0) * 127.5 + 0.5);
      break;
    }
  }
  return static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0));
}

void write_raster(const Raster& r, const std::filesystem::path& path, DisplayMode mode) {
  const double amplitude = max_abs(r);
  std::vector<std::uint8_t> bytes(r.size());
  auto src = r.samples();
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize(src[i], mode, amplitude);
  if (lower_ext(path) == ".png") {
    write_png(path, r.width(), r.height(), false, bytes);
    return;
  }
  write_file(path, "P5\n" + std::to_string(r.width()) + " " + std::to_string(r.height()) + "\n255\n", bytes);
}

void write_rgb(const RgbImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(img.pixels.size() * 3);
  for (const auto& p : img.pixels) {
    bytes.push_back(p.r);
    bytes.push_back(p.g);
    bytes.push_back(p.b);
  }
  if (lower_ext(path) == ".png") {
    write_png(path, img.width, img.height, true, bytes);
    return;
  }
  write_file(path, "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n", bytes);
}

}  // namespace viscrf
