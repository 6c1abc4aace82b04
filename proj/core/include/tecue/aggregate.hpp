#pragma once

#include "tecue/detector.hpp"
#include "tecue/time_series.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tecue {

/// per_trial: a trial adds at most 1 to a bin in which any of its cues is
/// active. per_sample: every cue-active sample adds 1 to its bin.
enum class HistogramCounting { per_trial, per_sample };

const char* to_string(HistogramCounting c) noexcept;
HistogramCounting parse_histogram_counting(const std::string& s);

/// Events of one trial. Bins are measured from `origin_t`, the trial's
/// alignment point; `duration_s` bounds the trial-relative time axis.
struct HistogramTrial {
  std::vector<CueEvent> events;
  double origin_t = 0.0;
  double duration_s = 0.0;
  double dt = 0.0;
};

struct CueHistogram {
  double bin_dt = 1.0;
  std::vector<std::int64_t> counts;
  std::int64_t n_trials = 0;
  Direction direction = Direction::src2tgt;
  HistogramCounting counting = HistogramCounting::per_trial;

  double bin_start(std::size_t k) const noexcept { return static_cast<double>(k) * bin_dt; }
};

/// Bin k spans [k bin_dt, (k+1) bin_dt) and an event [s, e) touches it when
/// s < (k+1) bin_dt and e > k bin_dt.
CueHistogram temporal_histogram(const std::vector<HistogramTrial>& trials, double bin_dt,
                                 Direction direction = Direction::src2tgt,
                                 HistogramCounting counting = HistogramCounting::per_trial);

/// Positions are the first two columns (x, y) of `positions`.
struct GridTrial {
  std::vector<CueEvent> events;
  TimeSeries positions;
};

struct GridExtent {
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::int64_t nx = 0;
  std::int64_t ny = 0;
};

struct CueGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size_m = 1.0;
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  /// Row-major by ix: counts[ix * ny + iy].
  std::vector<std::int64_t> counts;
  Direction direction = Direction::src2tgt;

  std::int64_t at(std::int64_t ix, std::int64_t iy) const {
    return counts[static_cast<std::size_t>(ix * ny + iy)];
  }
  std::int64_t total() const noexcept;
};

/// Counts position samples inside cue intervals per cell
/// floor((p - origin) / cell_size_m). Without `extent` the origin is the
/// componentwise minimum over all positions less one cell, and one empty
/// cell pads the far side as well.
CueGrid spatial_grid(const std::vector<GridTrial>& trials, double cell_size_m,
                     Direction direction = Direction::src2tgt,
                     std::optional<GridExtent> extent = std::nullopt);

struct TTestResult {
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

/// Two-sided p of Student's t with `df` degrees of freedom,
/// I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

/// Welch unequal-variance test with Welch-Satterthwaite degrees of freedom.
TTestResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b);

struct PeakStudyRow {
  Direction direction = Direction::src2tgt;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double t_stat = 0.0;
  double p_value = 1.0;
};

PeakStudyRow compare_peaks(const std::vector<double>& peaks_a, const std::vector<double>& peaks_b,
                           Direction direction);

}  // namespace tecue
