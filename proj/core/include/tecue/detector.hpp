#pragma once

#include "tecue/transfer_entropy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tecue {

/// standard is Holt double exponential smoothing with an exponentially
/// weighted variance; literal replays the printed recursions unchanged
/// (its level term grows without bound, so it is only useful for
/// side-by-side comparison).
enum class DesMode { standard, literal };

const char* to_string(DesMode m) noexcept;
DesMode parse_des_mode(const std::string& s);

struct DetectorConfig {
  double alpha = 0.01;
  double beta = 0.05;
  double gamma = 3.0;
  double hp_cutoff_hz = 1.0;
  double dt = 0.01;
  DesMode des_mode = DesMode::standard;
  /// Cues are suppressed for this long after the series starts, while the
  /// smoothing statistics settle. Defaults to the level time constant.
  std::optional<double> warmup_s;

  void validate() const;
  double effective_warmup() const;
};

/// Contiguous run of cue samples. The interval is half-open: it spans
/// `[start_t, end_t)` where end_t is one sample past the last cue sample.
struct CueEvent {
  double start_t = 0.0;
  double end_t = 0.0;
  double peak_te = 0.0;
  Direction direction = Direction::src2tgt;
};

struct DesResult {
  std::vector<double> mu;
  std::vector<double> sigma;
  /// threshold[0] is NaN; the threshold is defined from the second sample.
  std::vector<double> threshold;
};

struct DetectionTrace {
  TeSeries raw;
  std::vector<double> filtered;
  DesResult des;
  std::vector<std::uint8_t> cue;
  std::vector<CueEvent> events;
};

/// First-order high-pass: y_t = a (y_{t-1} + x_t - x_{t-1}), y_0 = 0,
/// a = RC / (RC + dt), RC = 1 / (2π f_c).
TeSeries highpass(const TeSeries& series, double cutoff_hz, double dt);

/// Level, spread and the lagged threshold μ_{t-1} + γ σ_{t-1}.
DesResult des_threshold(const TeSeries& series, const DetectorConfig& cfg);

/// High-pass, smooth, threshold. A sample is a cue when raw TE > 0 and the
/// filtered TE exceeds the threshold; maximal runs become events.
DetectionTrace detect_trace(const TeSeries& raw, const DetectorConfig& cfg);
std::vector<CueEvent> detect(const TeSeries& raw, const DetectorConfig& cfg);

struct TimeConstants {
  double tau_alpha_s = 0.0;
  double tau_beta_s = 0.0;
};

/// τ = -dt / ln(1 - factor).
TimeConstants time_constants(double alpha, double beta, double dt);

/// Smoothing factor with the given time constant (inverse of the above).
double factor_for_time_constant(double tau_s, double dt);

}  // namespace tecue
