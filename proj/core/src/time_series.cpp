#include "tecue/time_series.hpp"

#include "tecue/error.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tecue {

Eigen::Index TimeSeries::channel_index(const std::string& name) const {
  auto it = std::find(channels.begin(), channels.end(), name);
  if (it == channels.end()) throw_data("unknown channel '" + name + "'");
  return static_cast<Eigen::Index>(it - channels.begin());
}

bool TimeSeries::has_channel(const std::string& name) const noexcept {
  return std::find(channels.begin(), channels.end(), name) != channels.end();
}

TimeSeries TimeSeries::select(std::span<const std::string> names) const {
  TimeSeries out;
  out.dt = dt;
  out.t0 = t0;
  out.raw_times = raw_times;
  out.data.resize(rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    out.data.col(static_cast<Eigen::Index>(j)) = data.col(channel_index(names[j]));
    out.channels.push_back(names[j]);
  }
  return out;
}

TimeSeries TimeSeries::slice(Eigen::Index begin, Eigen::Index end) const {
  if (begin < 0 || end > rows() || begin >= end) {
    throw_data("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
               ") out of range for " + std::to_string(rows()) + " rows");
  }
  TimeSeries out;
  out.channels = channels;
  out.dt = dt;
  out.t0 = time(begin);
  out.data = data.middleRows(begin, end - begin);
  if (!raw_times.empty()) {
    out.raw_times.assign(raw_times.begin() + begin, raw_times.begin() + end);
  }
  return out;
}

void TimeSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw_data("sample interval must be positive");
  if (data.rows() < 1) throw_data("series has no samples");
  if (static_cast<std::size_t>(data.cols()) != channels.size()) {
    throw_data("column count does not match channel names");
  }
  if (!data.allFinite()) throw_data("series contains non-finite values");
  if (!raw_times.empty() && raw_times.size() != static_cast<std::size_t>(data.rows())) {
    throw_data("timestamp count does not match row count");
  }
}

void TrialSet::validate() const {
  std::set<std::string> ids;
  for (const auto& trial : trials) {
    if (!ids.insert(trial.id).second) throw_data("duplicate trial id '" + trial.id + "'");
    trial.series.validate();
    if (trial.series.channels != trials.front().series.channels) {
      throw_data("trial '" + trial.id + "' channel schema differs from '" +
                 trials.front().id + "'");
    }
  }
}

std::vector<std::string> TrialSet::scenarios() const {
  std::vector<std::string> out;
  for (const auto& trial : trials) {
    if (std::find(out.begin(), out.end(), trial.scenario) == out.end()) {
      out.push_back(trial.scenario);
    }
  }
  return out;
}

TimeSeries parse_csv(const std::string& text, std::span<const std::string> schema,
                     const std::string& source_name) {
  std::istringstream in(text);
  std::string line;
  if (!detail::next_line(in, line)) throw_data(source_name + ": empty file");
  auto header = detail::split_csv(line);
  if (header.size() < 2) throw_data(source_name + ": need a time column and a channel");
  if (header.front() != "t") {
    throw_data(source_name + ": first column must be 't', found '" + header.front() + "'");
  }
  std::vector<std::string> channels(header.begin() + 1, header.end());
  for (const auto& want : schema) {
    if (std::find(channels.begin(), channels.end(), want) == channels.end()) {
      throw_data(source_name + ": missing channel '" + want + "'");
    }
  }

  std::vector<double> times;
  std::vector<double> values;
  std::size_t row = 0;
  while (detail::next_line(in, line)) {
    if (line.empty()) continue;
    ++row;
    auto cells = detail::split_csv(line);
    if (cells.size() != header.size()) {
      throw_data(source_name + ": expected " + std::to_string(header.size()) +
                     " cells, found " + std::to_string(cells.size()),
                 row);
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      auto v = detail::parse_double(cells[j]);
      if (!v || !std::isfinite(*v)) {
        throw_data(source_name + ": non-numeric value '" + cells[j] + "' in column '" +
                       header[j] + "'",
                   row);
      }
      if (j == 0) {
        if (!times.empty() && !(*v > times.back())) {
          throw_data(source_name + ": time is not strictly increasing", row);
        }
        times.push_back(*v);
      } else {
        values.push_back(*v);
      }
    }
  }
  if (times.empty()) throw_data(source_name + ": no data rows");

  TimeSeries ts;
  ts.channels = std::move(channels);
  const auto n = static_cast<Eigen::Index>(times.size());
  const auto m = static_cast<Eigen::Index>(ts.channels.size());
  ts.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(values.data(), n, m);
  ts.t0 = times.front();
  if (times.size() >= 2) {
    std::vector<double> diffs(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) diffs[i - 1] = times[i] - times[i - 1];
    auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
    std::nth_element(diffs.begin(), mid, diffs.end());
    double median = *mid;
    if (diffs.size() % 2 == 0) {
      median = 0.5 * (median + *std::max_element(diffs.begin(), mid));
    }
    ts.dt = median;
  }
  ts.raw_times = std::move(times);
  return ts;
}

TimeSeries load_csv(const std::filesystem::path& path, std::span<const std::string> schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema, path.string());
}

TimeSeries resample(const TimeSeries& ts, double rate_hz) {
  if (!(rate_hz > 0.0)) throw_config("resample rate must be positive");
  if (ts.rows() < 2) throw_data("resampling needs at least 2 samples");

  const double t0 = ts.time(0);
  const double t_end = ts.t_end();
  const double step = 1.0 / rate_hz;
  const auto n = static_cast<Eigen::Index>(std::floor((t_end - t0) * rate_hz + 1e-9)) + 1;

  TimeSeries out;
  out.channels = ts.channels;
  out.dt = step;
  out.t0 = t0;
  out.data.resize(n, ts.data.cols());

  Eigen::Index k = 0;  // segment [k, k+1] brackets t
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * step;
    while (k + 2 < ts.rows() && ts.time(k + 1) <= t) ++k;
    const double ta = ts.time(k);
    const double tb = ts.time(k + 1);
    double w = (t - ta) / (tb - ta);
    w = std::clamp(w, 0.0, 1.0);
    if (w == 0.0) {
      out.data.row(i) = ts.data.row(k);
    } else if (w == 1.0) {
      out.data.row(i) = ts.data.row(k + 1);
    } else {
      out.data.row(i) = (1.0 - w) * ts.data.row(k) + w * ts.data.row(k + 1);
    }
  }
  return out;
}

namespace {

std::array<Eigen::Index, 3> triple(const TimeSeries& ts, std::span<const std::string> channels) {
  if (channels.size() != 3) throw_config("expected exactly 3 channel names");
  return {ts.channel_index(channels[0]), ts.channel_index(channels[1]),
          ts.channel_index(channels[2])};
}

TimeSeries like(const TimeSeries& ts, std::vector<std::string> names) {
  TimeSeries out;
  out.channels = std::move(names);
  out.dt = ts.dt;
  out.t0 = ts.t0;
  out.raw_times = ts.raw_times;
  out.data.resize(ts.rows(), static_cast<Eigen::Index>(out.channels.size()));
  return out;
}

}  // namespace

TimeSeries magnitude(const TimeSeries& ts, std::span<const std::string> channels,
                     const std::string& out_name) {
  const auto idx = triple(ts, channels);
  TimeSeries out = like(ts, {out_name});
  for (Eigen::Index i = 0; i < ts.rows(); ++i) {
    out.data(i, 0) = std::hypot(ts.data(i, idx[0]), ts.data(i, idx[1]), ts.data(i, idx[2]));
  }
  return out;
}

TimeSeries project_normalize_xy(const TimeSeries& ts, std::span<const std::string> channels,
                                const std::string& prefix) {
  const auto idx = triple(ts, channels);
  TimeSeries out = like(ts, {prefix + "_x", prefix + "_y"});
  double ux = 1.0;
  double uy = 0.0;
  for (Eigen::Index i = 0; i < ts.rows(); ++i) {
    const double vx = ts.data(i, idx[0]);
    const double vy = ts.data(i, idx[1]);
    const double norm = std::hypot(vx, vy);
    if (norm >= 1e-9) {
      ux = vx / norm;
      uy = vy / norm;
    }
    out.data(i, 0) = ux;
    out.data(i, 1) = uy;
  }
  return out;
}

TrialSet load_trial_dir(const std::filesystem::path& dir, std::span<const std::string> schema) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw_data("trial directory '" + dir.string() + "' not found");

  TrialSet set;
  const fs::path manifest = dir / "manifest.csv";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    std::string line;
    detail::next_line(in, line);
    const auto header = detail::split_csv(line);
    if (header.size() < 2 || header[0] != "trial" || header[1] != "scenario") {
      throw_data(manifest.string() + ": header must start with 'trial,scenario'");
    }
    const bool has_start = header.size() >= 3 && header[2] == "start_t";
    std::size_t row = 0;
    while (detail::next_line(in, line)) {
      if (line.empty()) continue;
      ++row;
      auto cells = detail::split_csv(line);
      if (cells.size() != header.size()) throw_data(manifest.string() + ": bad cell count", row);
      Trial trial;
      trial.id = cells[0];
      trial.scenario = cells[1];
      if (has_start && !cells[2].empty()) {
        auto v = detail::parse_double(cells[2]);
        if (!v) throw_data(manifest.string() + ": bad start_t '" + cells[2] + "'", row);
        trial.start_t = *v;
      }
      trial.series = load_csv(dir / (trial.id + ".csv"), schema);
      set.trials.push_back(std::move(trial));
    }
  } else {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      Trial trial;
      trial.id = file.stem().string();
      trial.scenario = "default";
      trial.series = load_csv(file, schema);
      set.trials.push_back(std::move(trial));
    }
  }
  if (set.trials.empty()) throw_data("no trials found in '" + dir.string() + "'");
  set.validate();
  return set;
}

}  // namespace tecue
