#pragma once

#include "tecue/aggregate.hpp"
#include "tecue/detector.hpp"
#include "tecue/time_series.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tecue {

/// One row per sample of `t,te_raw,te_filtered,threshold,cue`.
/// The first threshold is NaN and is written as `nan`.
struct TeTable {
  Direction direction = Direction::src2tgt;
  std::vector<double> t;
  std::vector<double> te_raw;
  std::vector<double> te_filtered;
  std::vector<double> threshold;
  std::vector<std::uint8_t> cue;

  std::size_t size() const noexcept { return t.size(); }
};

TeTable te_table(const DetectionTrace& trace);

struct EventRecord {
  std::string trial;
  CueEvent event;
};

struct PeakRecord {
  std::string trial;
  std::string scenario;
  Direction direction = Direction::src2tgt;
  double t_peak = 0.0;
  double peak_te = 0.0;
};

/// What the report step needs to rebuild aggregates without the raw data.
struct TrialInfo {
  std::string trial;
  std::string scenario;
  double origin_t = 0.0;
  double duration_s = 0.0;
  double dt = 0.0;
};

void write_te_csv(const TeTable& table, const std::filesystem::path& path);
TeTable read_te_csv(const std::filesystem::path& path, Direction direction = Direction::src2tgt);

void write_events_csv(const std::vector<EventRecord>& events, const std::filesystem::path& path);
std::vector<EventRecord> read_events_csv(const std::filesystem::path& path);

/// Nonzero cells as `ix,iy,count` plus a `<path>.meta` key=value sidecar.
void write_grid(const CueGrid& grid, const std::filesystem::path& path);
CueGrid read_grid(const std::filesystem::path& path);

/// `bin,t_start,count` plus a `<path>.meta` sidecar.
void write_histogram(const CueHistogram& hist, const std::filesystem::path& path);
CueHistogram read_histogram(const std::filesystem::path& path);

void write_peaks_csv(const std::vector<PeakRecord>& peaks, const std::filesystem::path& path);
std::vector<PeakRecord> read_peaks_csv(const std::filesystem::path& path);

/// `direction,n_a,n_b,t_stat,p_value`.
void write_report_csv(const std::vector<PeakStudyRow>& rows, const std::filesystem::path& path);
std::vector<PeakStudyRow> read_report_csv(const std::filesystem::path& path);

void write_trials_csv(const std::vector<TrialInfo>& trials, const std::filesystem::path& path);
std::vector<TrialInfo> read_trials_csv(const std::filesystem::path& path);

/// `t,<channels...>` on the series' time axis, readable by `load_csv`.
void write_trial_csv(const TimeSeries& ts, const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace tecue
