#pragma once

#include "tecue/aggregate.hpp"
#include "tecue/detector.hpp"
#include "tecue/models.hpp"
#include "tecue/transfer_entropy.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tecue {

/// Per-agent feature derived from the selected channels before embedding.
/// magnitude and xy_direction each consume exactly three channels.
enum class Feature { raw, magnitude, xy_direction };

enum class DirectionSet { both, src2tgt, tgt2src };

const char* to_string(Feature f) noexcept;
const char* to_string(DirectionSet d) noexcept;
std::vector<Direction> directions_of(DirectionSet d);

struct PipelineConfig {
  // [io]
  std::vector<std::string> target_channels;
  std::vector<std::string> source_channels;
  /// Analysis rate; 0 keeps the first trial's native rate.
  double resample_hz = 0.0;
  Feature feature = Feature::raw;
  /// x and y channels of the position stream used for spatial grids.
  std::vector<std::string> position_channels;

  // [embedding]
  int d = 4;
  double delta_s = 0.1;
  /// Round delta to the nearest whole number of samples instead of failing.
  bool snap_delta = true;

  // [model]
  ModelKind kind = ModelKind::var_linear;
  MlpArch arch;
  TrainConfig train;
  TeMode te_mode = TeMode::entropy_diff;
  DirectionSet directions = DirectionSet::both;

  // [detector]; dt is taken from the analysis rate.
  DetectorConfig detector;

  // [aggregate]
  double bin_dt = 1.0;
  HistogramCounting counting = HistogramCounting::per_trial;
  double cell_size_m = 0.5;
  std::optional<GridExtent> grid_extent;
  /// Moving-average width applied before taking per-trial peaks; 1 = raw.
  int peak_smoothing = 1;
};

enum class SynthKind { var1, cue };

struct SynthConfig {
  SynthKind kind = SynthKind::cue;
  int n_trials = 1;
  std::uint64_t seed = 1;
  std::string scenario = "default";
  // var1
  std::int64_t n = 10000;
  double dt = 0.05;
  double a_xx = 0.5, a_xy = 0.5, a_yx = 0.0, a_yy = 0.0;
  double q_xx = 1.0, q_xy = 0.0, q_yy = 1.0;
  // cue
  double duration_s = 20.0;
  std::vector<double> cue_times{10.0};
  double response_delay_s = 0.05;
  double amplitude = 1.0;
  double noise_sigma = 0.2;
  double ramp_s = 0.15;
  double omega = 25.0;
};

struct Config {
  PipelineConfig pipeline;
  SynthConfig synth;
};

/// INI-style `key = value` lines under `[section]` headers; `#` and `;`
/// start comments. Unknown sections or keys are config errors.
Config parse_config(const std::string& text, const std::string& source_name = "<memory>");
Config load_config(const std::filesystem::path& path);

/// Applies `section.key=value`.
void apply_override(Config& cfg, const std::string& assignment);

/// Canonical text with every key; parses back to an equal config.
std::string config_to_text(const Config& cfg);

/// Built-in parameter sets: handover, following, synth_cue, synth_var.
Config preset_config(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace tecue
