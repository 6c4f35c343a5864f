#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "viscrf/raster.hpp"
#include "viscrf/scalespace.hpp"

namespace viscrf {

struct HoughParams {
  double theta_res = 1.0;  ///< degrees per accumulator column
  double rho_res = 1.0;    ///< pixels per accumulator row
  int num_peaks = 100;
  double peak_floor = 0.3;  ///< fraction of the accumulator maximum
  double fill_gap = 5.0;    ///< pixels
  double min_length = 50.0; ///< pixels

  void validate() const;
};

/// Vote grid over theta in [-90, 90) and rho in [-D, D], D the image
/// diagonal. A pixel (x, y) votes for rho = x cos(theta) + y sin(theta).
/// Each theta column measures rho from an anchor pixel, the origin until
/// anchor_to() picks the on-pixel of least projection, so integer
/// translations of the layer leave every vote index unchanged.
class HoughAccumulator {
 public:
  HoughAccumulator(int width, int height, double theta_res, double rho_res);

  int n_theta() const { return n_theta_; }
  int n_rho() const { return n_rho_; }
  double theta_res() const { return theta_res_; }
  double rho_res() const { return rho_res_; }
  double theta_deg(int ti) const { return -90.0 + ti * theta_res_; }
  double rho(int ti, int rj) const { return anchor_rho(ti) + (rj - rho_offset_) * rho_res_; }
  int anchor_x(int ti) const { return anchor_x_[ti]; }
  int anchor_y(int ti) const { return anchor_y_[ti]; }

  /// Row index of the rho bin nearest to x cos(theta) + y sin(theta).
  int rho_bin(int x, int y, int ti) const;
  /// Row index nearest to an absolute rho; may fall outside [0, n_rho).
  int rho_index(double rho, int ti) const;
  /// Re-anchors every column at the on-pixel of least projection. Call
  /// before voting.
  void anchor_to(const Raster& bin_layer);

  int votes(int ti, int rj) const { return votes_[index(ti, rj)]; }
  int& votes(int ti, int rj) { return votes_[index(ti, rj)]; }
  int max_votes() const;
  long long total_votes() const;

 private:
  std::size_t index(int ti, int rj) const { return static_cast<std::size_t>(ti) * n_rho_ + rj; }

  double theta_res_;
  double rho_res_;
  int n_theta_;
  int n_rho_;
  int rho_offset_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<int> anchor_x_;
  std::vector<int> anchor_y_;
  std::vector<int> votes_;

  double anchor_rho(int ti) const { return anchor_x_[ti] * cos_[ti] + anchor_y_[ti] * sin_[ti]; }
};

/// Throws std::invalid_argument if the layer holds anything but 0 and 1.
HoughAccumulator hough_accumulate(const Raster& bin_layer, double theta_res = 1.0, double rho_res = 1.0);

struct HoughPeak {
  int theta_index;
  int rho_index;
  double theta_deg;
  double rho;
  int votes;
};

/// Greedy maxima: repeatedly take the largest remaining bin (ties to the
/// smaller theta index, then smaller rho index) while it reaches
/// peak_floor * max, suppressing its 3x3 neighbourhood. The neighbourhood
/// wraps across theta = +/-90 with rho mirrored.
std::vector<HoughPeak> hough_peaks(const HoughAccumulator& acc, int num_peaks, double peak_floor);

struct LineSegment {
  int x1, y1, x2, y2;  ///< start is the leftmost endpoint (topmost on ties)
  double angle;        ///< degrees in [0,180), from +x towards +y (y points down)
  double length;       ///< Euclidean endpoint distance
  double scale;
};

/// Endpoint angle, in [0, 180).
double segment_angle(int x1, int y1, int x2, int y2);

/// For every peak: gathers on-pixels falling into the peak's rho bin, orders
/// them along the line, splits where consecutive pixels are more than
/// fill_gap apart, and keeps runs whose endpoint distance is >= min_length.
std::vector<LineSegment> extract_segments(const Raster& bin_layer, const HoughAccumulator& acc,
                                          const std::vector<HoughPeak>& peaks, double fill_gap,
                                          double min_length, double scale = 0.0);

enum class OrientationBin { H, DPlus, V, DMinus };

inline constexpr std::array<OrientationBin, 4> kAllBins = {OrientationBin::H, OrientationBin::DPlus,
                                                           OrientationBin::V, OrientationBin::DMinus};

OrientationBin bin_orientation(double angle);
double reference_angle(OrientationBin bin);
std::string to_string(OrientationBin bin);

/// Signed angle - reference, wrapped into [-90, 90).
double deviation(double angle, OrientationBin bin);

struct TiltStats {
  double scale;
  OrientationBin bin;
  double ref_angle;
  int n;
  double mean_angle;  ///< ref_angle + mean_dev, may leave [0,180) for H
  double mean_dev;
  double std_dev;     ///< population standard deviation of deviations
  double total_length;
};

/// One entry per non-empty bin, ordered H, D+, V, D-.
std::vector<TiltStats> tilt_statistics(const std::vector<LineSegment>& segments, double scale);

struct LayerAnalysis {
  double scale = 0.0;
  std::vector<LineSegment> segments;
  std::vector<TiltStats> stats;
  std::optional<RgbImage> overlay;
};

/// On-pixels for the Hough stage: every non-zero sample of the thresholded
/// layer.
Raster edge_pixels(const Raster& layer, const ThresholdPolicy& policy);

LayerAnalysis analyze_layer(const Raster& response, double scale, const HoughParams& hp,
                            const ThresholdPolicy& policy, bool with_overlay = false);

/// Threshold, accumulate, pick peaks, extract segments and summarize every
/// layer of the edge map.
std::vector<LayerAnalysis> run_analysis(const EdgeMap& emap, const HoughParams& hp, const ThresholdPolicy& policy,
                                        bool with_overlays = false);

/// Binary layer in white on black with segments in green, a yellow cross at
/// each start point and a red cross at each end point.
RgbImage draw_overlay(const Raster& bin_layer, const std::vector<LineSegment>& segments);

inline constexpr const char* kTiltCsvHeader =
    "scale,bin,ref_angle_deg,n_segments,mean_angle_deg,mean_dev_deg,std_dev_deg,total_length_px";
inline constexpr const char* kSegmentCsvHeader = "scale,x1,y1,x2,y2,angle_deg,length_px";

void write_tilt_csv(const std::vector<LayerAnalysis>& layers, std::ostream& out);
void write_segments_csv(const std::vector<LayerAnalysis>& layers, std::ostream& out);

}  // namespace viscrf
