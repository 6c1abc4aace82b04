// Acceptance checks. One line per criterion; exit status is nonzero if any fails.

#include "tecue/aggregate.hpp"
#include "tecue/config.hpp"
#include "tecue/detector.hpp"
#include "tecue/embedding.hpp"
#include "tecue/io.hpp"
#include "tecue/models.hpp"
#include "tecue/pipeline.hpp"
#include "tecue/synth.hpp"
#include "tecue/transfer_entropy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace tecue;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kEntropyTol = 1e-9;
constexpr double kFixedPointTol = 1e-12;
constexpr double kEntropyBudgetS = 1.0;

constexpr double kOracleTe = 0.11157;
constexpr double kDrivenTol = 0.01;
constexpr double kReverseTol = 0.005;
constexpr double kSweepTol = 0.01;
constexpr std::int64_t kVarSamples = 100000;
constexpr double kOracleBudgetS = 30.0;

constexpr double kPulseTol = 0.1;
constexpr int kSubThresholdMin = 18;
constexpr double kDetectorBudgetS = 30.0;

constexpr int kCueSeeds = 20;
constexpr double kCueOnsetTol = 0.3;
constexpr double kCueHitRate = 0.9;
constexpr double kFalsePerMinute = 1.0;
constexpr double kCueBudgetS = 180.0;

constexpr int kStudyTrials = 30;
constexpr std::int64_t kStudySamples = 2000;
constexpr double kStrongCoupling = 0.5;
constexpr double kWeakCoupling = 0.1;
constexpr double kNullCoupling = 0.3;
constexpr double kDrivenP = 0.05;
constexpr double kReverseP = 0.3;
constexpr int kNullReps = 20;
constexpr int kNullTrials = 10;
constexpr int kNullMaxSignificant = 2;
constexpr double kStudyBudgetS = 180.0;

constexpr double kGradTol = 1e-4;
constexpr double kNllRelTol = 0.01;
constexpr double kCoefTol = 0.02;

constexpr double kRoundTripTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::MatrixXd random_spd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

// ---------------------------------------------------------------- 1

Outcome entropy() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 5);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int d = dim(rng);
    const Eigen::MatrixXd s = random_spd(d, rng);
    // Closed form through the eigenvalues rather than a Cholesky factor.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const double ref = 0.5 * d * (1.0 + std::log(2.0 * std::numbers::pi)) +
                       0.5 * es.eigenvalues().array().log().sum();
    worst = std::max(worst, std::abs(gaussian_entropy(Covariance::full(s)) - ref));
  }
  const double c = 0.5 * (1.0 + std::log(2.0 * std::numbers::pi));
  const double v0 = 1.0 / (2.0 * std::numbers::pi * std::numbers::e);
  const double f1 = std::abs(gaussian_entropy(Covariance::diagonal(Eigen::VectorXd::Ones(1))) - c);
  const double f2 = std::abs(gaussian_entropy(Covariance::full(Eigen::MatrixXd::Identity(2, 2))) - 2.0 * c);
  const double f3 = std::abs(gaussian_entropy(Covariance::diagonal(Eigen::VectorXd::Constant(1, v0))));
  const double fixed = std::max({f1, f2, f3});
  const double secs = seconds_since(t0);
  return {worst <= kEntropyTol && fixed <= kFixedPointTol && secs < kEntropyBudgetS,
          fmt("max err %.2e (tol %.0e), fixed points %.2e (tol %.0e), %.3f s", worst, kEntropyTol, fixed,
              kFixedPointTol, secs)};
}

// ---------------------------------------------------------------- 2

TrialSet var_trials(double c, std::uint64_t seed) {
  Var1Spec s;
  s.A << 0.5, c, 0.0, 0.0;
  s.n = kVarSamples;
  s.seed = seed;
  s.dt = 0.01;
  auto [x, y] = gen_var1(s);
  TimeSeries ts = x;
  ts.channels = {"x", "y"};
  ts.data.conservativeResize(Eigen::NoChange, 2);
  ts.data.col(1) = y.data.col(0);
  TrialSet set;
  set.trials.push_back({"var", "var", std::move(ts), {}});
  return set;
}

std::pair<double, double> pipeline_mean_te(double c, std::uint64_t seed) {
  PipelineConfig cfg = preset_config("synth_var").pipeline;
  cfg.kind = ModelKind::var_linear;
  cfg.te_mode = TeMode::entropy_diff;
  cfg.d = 1;
  const RunResult r = run(var_trials(c, seed), cfg, {1, {}});
  return {mean_te(r.trials[0].directions[0].trace.raw), mean_te(r.trials[0].directions[1].trace.raw)};
}

Outcome oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto [fwd, rev] = pipeline_mean_te(0.5, 7);
  bool ok = std::abs(fwd - kOracleTe) <= kDrivenTol && std::abs(rev) <= kReverseTol;
  double sweep_worst = 0.0;
  std::uint64_t seed = 100;
  for (double c : {0.1, 0.3, 0.5, 0.7}) {
    Var1Spec s;
    s.A << 0.5, c, 0.0, 0.0;
    const double ref = te_oracle_var1(s, Direction::src2tgt);
    sweep_worst = std::max(sweep_worst, std::abs(pipeline_mean_te(c, seed++).first - ref));
  }
  ok = ok && sweep_worst <= kSweepTol;
  const double secs = seconds_since(t0);
  return {ok && secs < kOracleBudgetS,
          fmt("TE(Y->X) %.5f (target %.5f +- %.3f), TE(X->Y) %.5f (+- %.3f), sweep max dev %.4f (tol %.2f), %.1f s",
              fwd, kOracleTe, kDrivenTol, rev, kReverseTol, sweep_worst, kSweepTol, secs)};
}

// ---------------------------------------------------------------- 3

Outcome time_constant_check() {
  struct Case {
    double rate, alpha, beta, ta, tb;
  };
  const Case cases[] = {{115.0, 0.005, 0.01, 1.7, 0.9}, {200.0, 0.01, 0.05, 0.5, 0.1}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto tc = time_constants(c.alpha, c.beta, 1.0 / c.rate);
    // Two significant figures: one decimal place for sub-10 s values.
    const double ra = std::round(tc.tau_alpha_s * 10.0) / 10.0;
    const double rb = std::round(tc.tau_beta_s * 10.0) / 10.0;
    ok = ok && std::abs(ra - c.ta) < 1e-9 && std::abs(rb - c.tb) < 1e-9;
    detail += fmt("%g Hz: tau_alpha %.3f s -> %.1f (want %.1f), tau_beta %.3f s -> %.1f (want %.1f); ", c.rate,
                  tc.tau_alpha_s, ra, c.ta, tc.tau_beta_s, rb, c.tb);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// ---------------------------------------------------------------- 4

TeSeries te_series(const std::vector<double>& v, double dt) {
  TeSeries s;
  s.te_raw = v;
  for (std::size_t i = 0; i < v.size(); ++i) s.t.push_back(static_cast<double>(i) * dt);
  return s;
}

TeSeries pulse_series(double dt, double duration, double onset, double width, double amp, double noise,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  const auto count = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) * dt;
    v[i] = (t >= onset - 1e-9 && t < onset + width - 1e-9 ? amp : 0.0) + noise * n(rng);
  }
  return te_series(v, dt);
}

Outcome detector_props() {
  const auto t0 = std::chrono::steady_clock::now();
  const double dt = 0.01;
  DetectorConfig cfg;
  cfg.alpha = 0.01;
  cfg.beta = 0.05;
  cfg.gamma = 3.0;
  cfg.dt = dt;

  const auto dc = detect(te_series(std::vector<double>(2000, 0.7), dt), cfg);
  const bool dc_ok = dc.empty();

  const auto pulse = detect(pulse_series(dt, 5.0, 2.0, 0.3, 1.0, 0.0, 1), cfg);
  const double onset_err = pulse.size() == 1 ? std::abs(pulse[0].start_t - 2.0) : INFINITY;
  const bool pulse_ok = onset_err <= kPulseTol;

  int monotone_violations = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = pulse_series(dt, 20.0, 8.0, 0.5, 2.0, 1.0, seed);
    std::size_t prev = SIZE_MAX;
    for (double g : {1.0, 2.0, 3.0, 4.0, 5.0}) {
      cfg.gamma = g;
      const std::size_t n = detect(s, cfg).size();
      monotone_violations += n > prev;
      prev = n;
    }
  }
  cfg.gamma = 3.0;

  int clean = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto ev = detect(pulse_series(dt, 5.0, 2.0, 0.3, 0.5, 1.0, seed), cfg);
    bool hit = false;
    for (const auto& e : ev) hit |= e.start_t < 2.3 && e.end_t > 2.0;
    clean += !hit;
  }
  const double secs = seconds_since(t0);
  return {dc_ok && pulse_ok && monotone_violations == 0 && clean >= kSubThresholdMin && secs < kDetectorBudgetS,
          fmt("DC events %zu, pulse onset err %.3f s (tol %.1f), gamma violations %d, sub-threshold clean %d/20 "
              "(min %d), %.2f s",
              dc.size(), onset_err, kPulseTol, monotone_violations, clean, kSubThresholdMin, secs)};
}

// ---------------------------------------------------------------- 5

TrialSet cue_set(int n, std::uint64_t seed0, double amplitude, const std::string& scenario,
                 std::vector<std::vector<CueEvent>>* truth = nullptr) {
  const SynthConfig sc = preset_config("synth_cue").synth;
  TrialSet set;
  for (int k = 0; k < n; ++k) {
    CueScenario s;
    s.duration_s = sc.duration_s;
    s.cue_times = sc.cue_times;
    s.response_delay_s = sc.response_delay_s;
    s.amplitude = amplitude;
    s.noise_sigma = sc.noise_sigma;
    s.dt = sc.dt;
    s.ramp_s = sc.ramp_s;
    s.omega = sc.omega;
    s.seed = seed0 + static_cast<std::uint64_t>(k);
    const CueTrial trial = gen_cue_scenario(s);
    if (truth) truth->push_back(trial.truth);
    set.trials.push_back({scenario + "_" + std::to_string(k), scenario, merge_agents(trial), {}});
  }
  return set;
}

Outcome cue_detection() {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig cfg = preset_config("synth_cue").pipeline;
  const SynthConfig sc = preset_config("synth_cue").synth;

  std::vector<std::vector<CueEvent>> truth;
  const RunResult cued = run(cue_set(kCueSeeds, 1, sc.amplitude, "cue", &truth), cfg, {1, {}});
  int hits = 0;
  for (std::size_t i = 0; i < cued.trials.size(); ++i) {
    bool all = true;
    for (const auto& tr : truth[i]) {
      bool hit = false;
      for (const auto& e : cued.trials[i].directions[0].trace.events) {
        hit |= std::abs(e.start_t - tr.start_t) <= kCueOnsetTol + 1e-9;
      }
      all = all && hit;
    }
    hits += all;
  }
  const double rate = static_cast<double>(hits) / kCueSeeds;

  const RunResult null = run(cue_set(kCueSeeds, 1001, 0.0, "null"), cfg, {1, {}});
  std::size_t false_events = 0;
  double minutes = 0.0;
  for (const auto& t : null.trials) {
    false_events += t.directions[0].trace.events.size();
    minutes += t.info.duration_s / 60.0;
  }
  const double per_min = static_cast<double>(false_events) / minutes;
  const double secs = seconds_since(t0);
  return {rate >= kCueHitRate && per_min <= kFalsePerMinute && secs < kCueBudgetS,
          fmt("SNR %.1f, detected %d/%d (min %.0f%%), null false events %.2f per 60 s (max %.0f), %.1f s",
              sc.amplitude / sc.noise_sigma, hits, kCueSeeds, 100.0 * kCueHitRate, per_min, kFalsePerMinute,
              secs)};
}

// ---------------------------------------------------------------- 6

double study_p(const std::vector<PeakStudyRow>& rows, Direction d) {
  for (const auto& r : rows) {
    if (r.direction == d) return r.p_value;
  }
  return NAN;
}

TrialSet coupled_group(double c, int n, std::uint64_t seed0, const std::string& scenario) {
  TrialSet set;
  for (int k = 0; k < n; ++k) {
    Var1Spec s;
    s.A << 0.5, c, 0.0, 0.0;
    s.n = kStudySamples;
    s.seed = seed0 + static_cast<std::uint64_t>(k);
    s.dt = 0.01;
    auto [x, y] = gen_var1(s);
    TimeSeries ts = x;
    ts.channels = {"x", "y"};
    ts.data.conservativeResize(Eigen::NoChange, 2);
    ts.data.col(1) = y.data.col(0);
    set.trials.push_back({scenario + "_" + std::to_string(k), scenario, std::move(ts), {}});
  }
  return set;
}

Outcome peak_study() {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineConfig cfg = preset_config("synth_var").pipeline;
  cfg.te_mode = TeMode::loglik_ratio;

  const RunResult a = run(coupled_group(kStrongCoupling, kStudyTrials, 5001, "strong"), cfg, {1, {}});
  const RunResult b = run(coupled_group(kWeakCoupling, kStudyTrials, 6001, "weak"), cfg, {1, {}});
  const auto rows = peak_te_study(a, b, cfg);
  const double p_drv = study_p(rows, Direction::src2tgt);
  const double p_rev = study_p(rows, Direction::tgt2src);

  int significant = 0;
  for (int rep = 0; rep < kNullReps; ++rep) {
    const auto base = 10000 + static_cast<std::uint64_t>(rep) * 100;
    const RunResult na = run(coupled_group(kNullCoupling, kNullTrials, base, "a"), cfg, {1, {}});
    const RunResult nb = run(coupled_group(kNullCoupling, kNullTrials, base + 50, "b"), cfg, {1, {}});
    significant += study_p(peak_te_study(na, nb, cfg), Direction::src2tgt) < kDrivenP;
  }
  const double secs = seconds_since(t0);
  return {p_drv < kDrivenP && p_rev > kReverseP && significant <= kNullMaxSignificant && secs < kStudyBudgetS,
          fmt("driven p %.3g (< %.2f), reverse p %.3g (> %.1f), null significant %d/%d (max %d), %.1f s", p_drv,
              kDrivenP, p_rev, kReverseP, significant, kNullReps, kNullMaxSignificant, secs)};
}

// ---------------------------------------------------------------- 7

EmbeddedDataset ar_dataset(double a, double b, double s, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm;
  TimeSeries x, y;
  x.channels = {"x"};
  y.channels = {"y"};
  x.data.resize(n, 1);
  y.data.resize(n, 1);
  double xp = 0.0, yp = 0.0;
  for (int i = 0; i < n; ++i) {
    const double yi = norm(rng);
    const double xi = a * xp + b * yp + s * norm(rng);
    x.data(i, 0) = xi;
    y.data(i, 0) = yi;
    xp = xi;
    yp = yi;
  }
  return embed(x, y, {1, 1.0, 1.0});
}

Outcome model_checks() {
  double grad = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GradientProbe probe;
    probe.seed = seed;
    grad = std::max(grad, gradient_check(MlpArch{{6, 5}}, probe));
  }

  const auto shared = ar_dataset(0.6, 0.3, 0.5, 4000, 5);
  const auto var = fit_var(shared, Conditioning::augmented);
  TrainConfig tc;
  tc.epochs = 150;
  tc.learning_rate = 1e-2;
  tc.batch_size = 256;
  const auto mlp = fit_mlp(shared, Conditioning::augmented, MlpArch{{}}, tc);
  const auto in = model_inputs(shared, Conditioning::augmented);
  const double nll_var = mean_nll(var, in, shared.targets);
  const double nll_mlp = mean_nll(mlp, in, shared.targets);
  const double nll_rel = std::abs(nll_mlp - nll_var) / std::abs(nll_var);

  const auto big = ar_dataset(0.5, 0.5, 1.0, 10000, 8);
  const auto fit = fit_var(big, Conditioning::augmented);
  const double coef_err = std::max(std::abs(fit.var().coef(0, 0) - 0.5), std::abs(fit.var().coef(1, 0) - 0.5));

  return {grad < kGradTol && nll_rel <= kNllRelTol && coef_err <= kCoefTol,
          fmt("gradient rel err %.2e (< %.0e), linear-net NLL %.5f vs VAR %.5f (rel %.2e, tol %.0e), "
              "coef err %.4f (tol %.2f)",
              grad, kGradTol, nll_mlp, nll_var, nll_rel, kNllRelTol, coef_err, kCoefTol)};
}

// ---------------------------------------------------------------- 8

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i]) && std::isnan(b[i])) continue;
    m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  }
  return m;
}

bool same_outputs(const RunResult& a, const RunResult& b) {
  if (a.trials.size() != b.trials.size()) return false;
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    for (std::size_t d = 0; d < a.trials[i].directions.size(); ++d) {
      const auto& x = a.trials[i].directions[d];
      const auto& y = b.trials[i].directions[d];
      if (x.trace.raw.te_raw != y.trace.raw.te_raw || x.trace.filtered != y.trace.filtered ||
          x.trace.cue != y.trace.cue || x.trace.events.size() != y.trace.events.size() ||
          x.peak.value != y.peak.value) {
        return false;
      }
    }
  }
  for (std::size_t k = 0; k < a.aggregates.per_scenario.size(); ++k) {
    const auto& x = a.aggregates.per_scenario[k];
    const auto& y = b.aggregates.per_scenario[k];
    if (x.histogram.counts != y.histogram.counts) return false;
    if (x.grid.has_value() != y.grid.has_value()) return false;
    if (x.grid && x.grid->counts != y.grid->counts) return false;
  }
  return true;
}

Outcome determinism_roundtrip() {
  PipelineConfig cfg = preset_config("synth_cue").pipeline;
  const TrialSet set = cue_set(4, 77, 1.0, "cue");
  const RunResult r1 = run(set, cfg, {1, {}});
  const RunResult r2 = run(set, cfg, {0, {}});
  const bool det_var = same_outputs(r1, r2);

  cfg.kind = ModelKind::mlp_gaussian;
  cfg.arch = MlpArch{{8}};
  cfg.train.epochs = 5;
  const RunResult m1 = run(set, cfg, {1, {}});
  const RunResult m2 = run(set, cfg, {0, {}});
  const bool det_mlp = same_outputs(m1, m2);

  const fs::path dir = fs::temp_directory_path() / ("tecue_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  double worst = 0.0;
  const auto& tr = r1.trials[0];

  const TeTable te = te_table(tr.directions[0].trace);
  write_te_csv(te, dir / "te.csv");
  const TeTable te2 = read_te_csv(dir / "te.csv");
  worst = std::max({worst, max_diff(te.t, te2.t), max_diff(te.te_raw, te2.te_raw),
                    max_diff(te.te_filtered, te2.te_filtered), max_diff(te.threshold, te2.threshold)});
  bool exact = te.cue == te2.cue;

  std::vector<EventRecord> events;
  std::vector<PeakRecord> peaks;
  std::vector<TrialInfo> infos;
  for (const auto& t : r1.trials) {
    for (const auto& d : t.directions) {
      for (const auto& e : d.trace.events) events.push_back({t.id, e});
      peaks.push_back({t.id, t.scenario, d.trace.raw.direction, d.peak.t, d.peak.value});
    }
    infos.push_back(t.info);
  }
  write_events_csv(events, dir / "events.csv");
  const auto events2 = read_events_csv(dir / "events.csv");
  exact = exact && events2.size() == events.size();
  for (std::size_t i = 0; exact && i < events.size(); ++i) {
    exact = events[i].trial == events2[i].trial && events[i].event.direction == events2[i].event.direction;
    worst = std::max(worst, max_diff({events[i].event.start_t, events[i].event.end_t, events[i].event.peak_te},
                                     {events2[i].event.start_t, events2[i].event.end_t, events2[i].event.peak_te}));
  }

  write_peaks_csv(peaks, dir / "peaks.csv");
  const auto peaks2 = read_peaks_csv(dir / "peaks.csv");
  exact = exact && peaks2.size() == peaks.size();
  for (std::size_t i = 0; exact && i < peaks.size(); ++i) {
    exact = peaks[i].trial == peaks2[i].trial && peaks[i].scenario == peaks2[i].scenario;
    worst = std::max(worst, max_diff({peaks[i].t_peak, peaks[i].peak_te}, {peaks2[i].t_peak, peaks2[i].peak_te}));
  }

  write_trials_csv(infos, dir / "trials.csv");
  const auto infos2 = read_trials_csv(dir / "trials.csv");
  exact = exact && infos2.size() == infos.size();
  for (std::size_t i = 0; exact && i < infos.size(); ++i) {
    worst = std::max(worst, max_diff({infos[i].origin_t, infos[i].duration_s, infos[i].dt},
                                     {infos2[i].origin_t, infos2[i].duration_s, infos2[i].dt}));
  }

  const auto& agg = r1.aggregates.per_scenario[0];
  write_histogram(agg.histogram, dir / "hist.csv");
  const auto h2 = read_histogram(dir / "hist.csv");
  exact = exact && h2.counts == agg.histogram.counts && h2.n_trials == agg.histogram.n_trials;
  worst = std::max(worst, max_diff({agg.histogram.bin_dt}, {h2.bin_dt}));
  if (agg.grid) {
    write_grid(*agg.grid, dir / "grid.csv");
    const auto g2 = read_grid(dir / "grid.csv");
    exact = exact && g2.counts == agg.grid->counts && g2.nx == agg.grid->nx && g2.ny == agg.grid->ny;
    worst = std::max(worst, max_diff({agg.grid->origin_x, agg.grid->origin_y, agg.grid->cell_size_m},
                                     {g2.origin_x, g2.origin_y, g2.cell_size_m}));
  } else {
    exact = false;
  }

  const std::vector<PeakStudyRow> study{{Direction::src2tgt, 12, 14, -2.25, 0.0345},
                                        {Direction::tgt2src, 12, 14, 0.3141592653589793, 0.7571}};
  write_report_csv(study, dir / "report.csv");
  const auto study2 = read_report_csv(dir / "report.csv");
  exact = exact && study2.size() == study.size();
  for (std::size_t i = 0; exact && i < study.size(); ++i) {
    exact = study[i].n_a == study2[i].n_a && study[i].n_b == study2[i].n_b;
    worst = std::max(worst, max_diff({study[i].t_stat, study[i].p_value}, {study2[i].t_stat, study2[i].p_value}));
  }

  const TimeSeries& series = set.trials[0].series;
  write_trial_csv(series, dir / "trial.csv");
  const TimeSeries back = load_csv(dir / "trial.csv");
  exact = exact && back.channels == series.channels && back.rows() == series.rows();
  if (exact) {
    const Eigen::MatrixXd diff = (back.data - series.data).cwiseAbs();
    worst = std::max({worst, diff.maxCoeff(), std::abs(back.dt - series.dt)});
  }
  fs::remove_all(dir);

  return {det_var && det_mlp && exact && worst <= kRoundTripTol,
          fmt("repeat runs identical: VAR %s, MLP %s; CSV round-trip max err %.2e (tol %.0e), structure %s",
              det_var ? "yes" : "no", det_mlp ? "yes" : "no", worst, kRoundTripTol, exact ? "ok" : "mismatch")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 gaussian entropy", entropy},
      {"2 oracle TE equivalence", oracle},
      {"3 time constants", time_constant_check},
      {"4 detector properties", detector_props},
      {"5 synthetic cue detection", cue_detection},
      {"6 peak-TE study", peak_study},
      {"7 model correctness", model_checks},
      {"8 determinism and round-trips", determinism_roundtrip},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
