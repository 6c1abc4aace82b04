#include "tecue/aggregate.hpp"

#include "tecue/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tecue {

namespace {

constexpr double kTimeTol = 1e-9;

std::size_t bin_count(double span, double bin_dt) {
  const double n = std::ceil(span / bin_dt - kTimeTol);
  return n > 0.0 ? static_cast<std::size_t>(n) : 0;
}

}  // namespace

const char* to_string(HistogramCounting c) noexcept {
  return c == HistogramCounting::per_trial ? "per_trial" : "per_sample";
}

HistogramCounting parse_histogram_counting(const std::string& s) {
  if (s == "per_trial" || s == "trial") return HistogramCounting::per_trial;
  if (s == "per_sample" || s == "sample") return HistogramCounting::per_sample;
  throw_config("unknown histogram counting '" + s + "'");
}

CueHistogram temporal_histogram(const std::vector<HistogramTrial>& trials, double bin_dt,
                                Direction direction, HistogramCounting counting) {
  if (!(bin_dt > 0.0)) throw_config("histogram bin width must be positive");
  CueHistogram h;
  h.bin_dt = bin_dt;
  h.direction = direction;
  h.counting = counting;
  h.n_trials = static_cast<std::int64_t>(trials.size());

  double span = 0.0;
  for (const auto& tr : trials) span = std::max(span, tr.duration_s);
  h.counts.assign(bin_count(span, bin_dt), 0);

  std::vector<std::uint8_t> touched;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& tr = trials[i];
    if (counting == HistogramCounting::per_sample && !(tr.dt > 0.0)) {
      throw_config("per-sample histogram counting needs the trial sample interval");
    }
    touched.assign(h.counts.size(), 0);
    for (const auto& ev : tr.events) {
      const double s = ev.start_t - tr.origin_t;
      const double e = ev.end_t - tr.origin_t;
      if (s < -kTimeTol || e > tr.duration_s + kTimeTol || s > e) {
        throw_data("cue event [" + std::to_string(ev.start_t) + ", " + std::to_string(ev.end_t) +
                   ") lies outside trial " + std::to_string(i) + " duration");
      }
      if (counting == HistogramCounting::per_trial) {
        for (std::size_t k = 0; k < h.counts.size(); ++k) {
          if (s < h.bin_start(k + 1) && e > h.bin_start(k)) touched[k] = 1;
        }
      } else {
        const auto n = static_cast<std::int64_t>(std::ceil((e - s) / tr.dt - kTimeTol));
        for (std::int64_t j = 0; j < n; ++j) {
          const double ts = s + static_cast<double>(j) * tr.dt;
          const auto k = static_cast<std::size_t>(std::floor(ts / bin_dt + kTimeTol));
          if (k < h.counts.size()) ++h.counts[k];
        }
      }
    }
    if (counting == HistogramCounting::per_trial) {
      for (std::size_t k = 0; k < h.counts.size(); ++k) h.counts[k] += touched[k];
    }
  }
  return h;
}

std::int64_t CueGrid::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

CueGrid spatial_grid(const std::vector<GridTrial>& trials, double cell_size_m, Direction direction,
                     std::optional<GridExtent> extent) {
  if (!(cell_size_m > 0.0)) throw_config("grid cell size must be positive");
  for (const auto& tr : trials) {
    if (tr.positions.data.cols() < 2) throw_data("grid positions need x and y columns");
  }

  CueGrid g;
  g.cell_size_m = cell_size_m;
  g.direction = direction;
  if (extent) {
    if (extent->nx <= 0 || extent->ny <= 0) throw_config("fixed grid extent must be non-empty");
    g.origin_x = extent->origin_x;
    g.origin_y = extent->origin_y;
    g.nx = extent->nx;
    g.ny = extent->ny;
  } else {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x;
    double max_x = -min_x;
    double max_y = -min_x;
    for (const auto& tr : trials) {
      const auto& p = tr.positions.data;
      if (p.rows() == 0) continue;
      min_x = std::min(min_x, p.col(0).minCoeff());
      max_x = std::max(max_x, p.col(0).maxCoeff());
      min_y = std::min(min_y, p.col(1).minCoeff());
      max_y = std::max(max_y, p.col(1).maxCoeff());
    }
    if (!std::isfinite(min_x)) {
      min_x = min_y = 0.0;
      max_x = max_y = 0.0;
    }
    g.origin_x = min_x - cell_size_m;
    g.origin_y = min_y - cell_size_m;
    g.nx = static_cast<std::int64_t>(std::floor((max_x - g.origin_x) / cell_size_m)) + 2;
    g.ny = static_cast<std::int64_t>(std::floor((max_y - g.origin_y) / cell_size_m)) + 2;
  }
  g.counts.assign(static_cast<std::size_t>(g.nx * g.ny), 0);

  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& tr = trials[i];
    const auto& ps = tr.positions;
    if (tr.events.empty()) continue;
    if (ps.rows() == 0) throw_data("trial " + std::to_string(i) + " has cues but no positions");
    const double tol = kTimeTol * std::max(1.0, ps.dt);
    const double first = ps.time(0);
    const double last = ps.t_end() + ps.dt;
    for (const auto& ev : tr.events) {
      if (ev.start_t < first - tol || ev.end_t > last + tol) {
        throw_data("cue event [" + std::to_string(ev.start_t) + ", " + std::to_string(ev.end_t) +
                   ") lies outside the position series of trial " + std::to_string(i));
      }
      const auto begin = static_cast<Eigen::Index>(std::ceil((ev.start_t - first) / ps.dt - 1e-9));
      for (Eigen::Index r = std::max<Eigen::Index>(begin, 0); r < ps.rows(); ++r) {
        if (ps.time(r) >= ev.end_t - tol) break;
        const auto ix = static_cast<std::int64_t>(std::floor((ps.data(r, 0) - g.origin_x) / cell_size_m));
        const auto iy = static_cast<std::int64_t>(std::floor((ps.data(r, 1) - g.origin_y) / cell_size_m));
        if (ix < 0 || iy < 0 || ix >= g.nx || iy >= g.ny) {
          throw_data("position (" + std::to_string(ps.data(r, 0)) + ", " +
                     std::to_string(ps.data(r, 1)) + ") falls outside the grid extent");
        }
        ++g.counts[static_cast<std::size_t>(ix * g.ny + iy)];
      }
    }
  }
  return g;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw_numeric("t distribution needs positive degrees of freedom");
  if (std::isnan(t)) throw_numeric("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return boost::math::ibeta(0.5 * df, 0.5, x);
}

TTestResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw_data("t-test groups need at least 2 values each");
  auto moments = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / (n - 1.0)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  if (!(va > 0.0) || !(vb > 0.0)) throw_data("t-test group has zero variance");

  const double sa = va / static_cast<double>(a.size());
  const double sb = vb / static_cast<double>(b.size());
  TTestResult r;
  r.t_stat = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) /
         (sa * sa / static_cast<double>(a.size() - 1) + sb * sb / static_cast<double>(b.size() - 1));
  r.p_value = student_t_two_sided_p(r.t_stat, r.df);
  return r;
}

PeakStudyRow compare_peaks(const std::vector<double>& peaks_a, const std::vector<double>& peaks_b,
                           Direction direction) {
  const auto tt = welch_ttest(peaks_a, peaks_b);
  return {direction, peaks_a.size(), peaks_b.size(), tt.t_stat, tt.p_value};
}

}  // namespace tecue
