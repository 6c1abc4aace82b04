#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tecue {

/// Uniformly sampled multichannel signal. Rows are time, columns channels.
///
/// `raw_times` is only populated by `load_csv` and holds the original
/// (possibly jittered) timestamps; `resample` consumes it and returns a
/// series with `raw_times` empty. Every analysis stage assumes the
/// uniform grid `t0 + i * dt`.
struct TimeSeries {
  std::vector<std::string> channels;
  Eigen::MatrixXd data;
  double dt = 1.0;
  double t0 = 0.0;
  std::vector<double> raw_times;

  Eigen::Index rows() const noexcept { return data.rows(); }
  double time(Eigen::Index i) const noexcept {
    return raw_times.empty() ? t0 + static_cast<double>(i) * dt
                             : raw_times[static_cast<std::size_t>(i)];
  }
  double t_end() const noexcept { return time(rows() - 1); }
  double duration() const noexcept { return static_cast<double>(rows()) * dt; }

  /// Index of a named channel; throws a data error if absent.
  Eigen::Index channel_index(const std::string& name) const;
  bool has_channel(const std::string& name) const noexcept;
  /// New series holding the named channels in the given order.
  TimeSeries select(std::span<const std::string> names) const;
  /// Samples `[begin, end)` on the uniform grid.
  TimeSeries slice(Eigen::Index begin, Eigen::Index end) const;

  /// Throws if any invariant (dt > 0, finite values, shape) is broken.
  void validate() const;
};

struct Trial {
  std::string id;
  std::string scenario;
  TimeSeries series;
  /// Alignment point supplied by the user; samples before it are dropped.
  std::optional<double> start_t;
};

/// Trials sharing one channel schema.
struct TrialSet {
  std::vector<Trial> trials;
  std::map<std::string, std::string> metadata;

  void validate() const;
  /// Scenario labels in order of first appearance.
  std::vector<std::string> scenarios() const;
};

/// Reads `t,<ch1>,...` with strictly increasing time. `schema` lists the
/// channels that must be present; an empty schema accepts whatever the
/// header declares. dt is the median successive time difference.
TimeSeries load_csv(const std::filesystem::path& path,
                    std::span<const std::string> schema = {});
TimeSeries parse_csv(const std::string& text, std::span<const std::string> schema = {},
                     const std::string& source_name = "<memory>");

/// Linear interpolation onto `t0, t0 + 1/rate, ...` up to the last sample.
TimeSeries resample(const TimeSeries& ts, double rate_hz);

/// One-channel Euclidean norm of three channels.
TimeSeries magnitude(const TimeSeries& ts, std::span<const std::string> channels,
                     const std::string& out_name = "magnitude");

/// Planar unit direction (vx, vy) / |(vx, vy)| of a 3-D vector channel
/// triple. Rows whose planar norm is below 1e-9 repeat the previous
/// direction; a degenerate first row emits (1, 0).
TimeSeries project_normalize_xy(const TimeSeries& ts,
                                std::span<const std::string> channels,
                                const std::string& prefix = "dir");

/// Loads every `*.csv` in `dir` as a trial. An optional `manifest.csv`
/// (`trial,scenario,start_t`) fixes order, scenario labels and alignment.
TrialSet load_trial_dir(const std::filesystem::path& dir,
                        std::span<const std::string> schema = {});

}  // namespace tecue
