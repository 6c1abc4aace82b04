#include "tecue/detector.hpp"

#include "tecue/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tecue {

const char* to_string(DesMode m) noexcept {
  return m == DesMode::standard ? "standard" : "literal";
}

DesMode parse_des_mode(const std::string& s) {
  if (s == "standard") return DesMode::standard;
  if (s == "literal") return DesMode::literal;
  throw_config("unknown DES mode '" + s + "'");
}

void DetectorConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_config("detector alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw_config("detector beta must lie in (0, 1)");
  if (!(gamma > 0.0)) throw_config("detector gamma must be positive");
  if (!(hp_cutoff_hz > 0.0)) throw_config("high-pass cutoff must be positive");
  if (!(dt > 0.0)) throw_config("detector dt must be positive");
  if (warmup_s && !(*warmup_s >= 0.0)) throw_config("warm-up must be non-negative");
}

double DetectorConfig::effective_warmup() const {
  return warmup_s ? *warmup_s : time_constants(alpha, beta, dt).tau_alpha_s;
}

TeSeries highpass(const TeSeries& series, double cutoff_hz, double dt) {
  if (!(dt > 0.0)) throw_config("high-pass dt must be positive");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 / dt) {
    throw_config("high-pass cutoff " + std::to_string(cutoff_hz) +
                 " Hz is not below the Nyquist frequency " + std::to_string(0.5 / dt) + " Hz");
  }
  const double rc = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
  const double a = rc / (rc + dt);
  TeSeries out = series;
  if (series.empty()) return out;
  out.te_raw[0] = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    out.te_raw[i] = a * (out.te_raw[i - 1] + series.te_raw[i] - series.te_raw[i - 1]);
  }
  return out;
}

DesResult des_threshold(const TeSeries& series, const DetectorConfig& cfg) {
  if (series.empty()) throw_data("smoothing an empty series");
  const double a = cfg.alpha;
  const double b_f = cfg.beta;
  const auto& x = series.te_raw;
  const std::size_t n = x.size();

  DesResult r;
  r.mu.resize(n);
  r.sigma.resize(n);
  r.threshold.resize(n);
  r.mu[0] = x[0];
  r.sigma[0] = 0.0;
  r.threshold[0] = std::numeric_limits<double>::quiet_NaN();
  double trend = 0.0;
  double var = 0.0;

  for (std::size_t t = 1; t < n; ++t) {
    const double mu_prev = r.mu[t - 1];
    r.threshold[t] = mu_prev + cfg.gamma * r.sigma[t - 1];
    const double err = x[t] - mu_prev - trend;
    if (cfg.des_mode == DesMode::standard) {
      const double mu = a * x[t] + (1.0 - a) * (mu_prev + trend);
      trend = b_f * (mu - mu_prev) + (1.0 - b_f) * trend;
      var = (1.0 - a) * (var + a * err * (x[t] - mu_prev));
      r.mu[t] = mu;
      r.sigma[t] = std::sqrt(std::max(var, 0.0));
    } else {
      const double mu = a * x[t] + (1.0 + a) * (mu_prev + trend);
      r.sigma[t] = (1.0 - a) * (r.sigma[t - 1] + a * err * (x[t] - mu_prev));
      trend = b_f * (x[t] - x[t - 1]) + (1.0 - b_f) * trend;
      r.mu[t] = mu;
    }
  }
  return r;
}

DetectionTrace detect_trace(const TeSeries& raw, const DetectorConfig& cfg) {
  cfg.validate();
  if (raw.size() < 2) throw_data("cue detection needs at least 2 samples");
  if (raw.t.size() != raw.te_raw.size()) throw_data("TE series time and value lengths differ");

  DetectionTrace tr;
  tr.raw = raw;
  const TeSeries filtered = highpass(raw, cfg.hp_cutoff_hz, cfg.dt);
  tr.filtered = filtered.te_raw;
  tr.des = des_threshold(filtered, cfg);

  const double warmup_end = raw.t.front() + cfg.effective_warmup();
  const std::size_t n = raw.size();
  tr.cue.assign(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    // Warm-up uses a small tolerance so grid-aligned warm-ups include the boundary sample.
    const bool settled = raw.t[i] >= warmup_end - 1e-9 * cfg.dt;
    tr.cue[i] = settled && raw.te_raw[i] > 0.0 && tr.filtered[i] > tr.des.threshold[i];
  }

  for (std::size_t i = 0; i < n;) {
    if (!tr.cue[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double peak = raw.te_raw[i];
    while (j + 1 < n && tr.cue[j + 1]) {
      ++j;
      peak = std::max(peak, raw.te_raw[j]);
    }
    tr.events.push_back({raw.t[i], raw.t[j] + cfg.dt, peak, raw.direction});
    i = j + 1;
  }
  return tr;
}

std::vector<CueEvent> detect(const TeSeries& raw, const DetectorConfig& cfg) {
  return detect_trace(raw, cfg).events;
}

TimeConstants time_constants(double alpha, double beta, double dt) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    throw_config("smoothing factors must lie in (0, 1)");
  }
  if (!(dt > 0.0)) throw_config("dt must be positive");
  return {-dt / std::log1p(-alpha), -dt / std::log1p(-beta)};
}

double factor_for_time_constant(double tau_s, double dt) {
  if (!(tau_s > 0.0) || !(dt > 0.0)) throw_config("time constant and dt must be positive");
  return -std::expm1(-dt / tau_s);
}

}  // namespace tecue
