#include "tecue/pipeline.hpp"

#include "tecue/error.hpp"
#include "tecue/transfer_entropy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <thread>

namespace tecue {

namespace {

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  unsigned workers = jobs ? jobs : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  // Report the failure a sequential run would have hit first.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <class F>
decltype(auto) in_stage(const std::string& what, const std::string& stage, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), what + ", stage " + stage + ": " + e.what(), e.row());
  }
}

void log(const RunOptions& opts, LogLevel level, const std::string& msg) {
  if (opts.log) opts.log(level, msg);
}

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), s >= 0.05 ? "%.1f" : "%.2g", s);
  return buf;
}

std::string hz_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

TimeSeries feature_series(const TimeSeries& ts, const std::vector<std::string>& channels, Feature f) {
  switch (f) {
    case Feature::raw: return ts.select(channels);
    case Feature::magnitude: return magnitude(ts, channels);
    case Feature::xy_direction: return project_normalize_xy(ts, channels);
  }
  return ts.select(channels);
}

EmbeddedDataset embed_direction(const PreparedTrial& t, Direction d, const EmbeddingSpec& spec) {
  return d == Direction::src2tgt ? embed(t.target, t.source, spec) : embed(t.source, t.target, spec);
}

std::string trial_label(const std::string& id) { return "trial '" + id + "'"; }

}  // namespace

const char* to_string(Severity s) noexcept {
  switch (s) {
    case Severity::note: return "note";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "?";
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::vector<Diagnostic> validate_config(const PipelineConfig& cfg, std::optional<double> sample_rate_hz) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string m) { out.push_back({Severity::error, std::move(m)}); };
  auto warn = [&](std::string m) { out.push_back({Severity::warning, std::move(m)}); };
  auto note = [&](std::string m) { out.push_back({Severity::note, std::move(m)}); };

  if (cfg.target_channels.empty()) error("io.target_channels is empty");
  if (cfg.source_channels.empty()) error("io.source_channels is empty");
  if (cfg.feature != Feature::raw) {
    if (cfg.target_channels.size() != 3 || cfg.source_channels.size() != 3) {
      error(std::string("feature ") + to_string(cfg.feature) + " needs exactly 3 target and 3 source channels");
    }
  }
  if (!cfg.position_channels.empty() && cfg.position_channels.size() != 2) {
    error("io.position_channels must name exactly an x and a y channel");
  }
  if (cfg.resample_hz < 0.0) error("io.resample_hz must be positive, or 0 for the native rate");
  if (cfg.d < 1) error("embedding.d must be at least 1");
  if (!(cfg.delta_s > 0.0)) error("embedding.delta_s must be positive");
  if (cfg.kind == ModelKind::mlp_gaussian) {
    if (std::any_of(cfg.arch.hidden.begin(), cfg.arch.hidden.end(), [](int h) { return h < 1; })) {
      error("model.hidden sizes must be positive");
    }
    if (cfg.train.epochs < 1) error("model.epochs must be at least 1");
    if (!(cfg.train.learning_rate > 0.0)) error("model.learning_rate must be positive");
    if (cfg.train.batch_size < 1) error("model.batch_size must be at least 1");
  }
  try {
    DetectorConfig det = cfg.detector;
    det.dt = 1.0;
    det.validate();
  } catch (const Error& e) {
    error(e.what());
  }
  if (!(cfg.bin_dt > 0.0)) error("aggregate.bin_dt must be positive");
  if (!(cfg.cell_size_m > 0.0)) error("aggregate.cell_size_m must be positive");
  if (cfg.grid_extent && (cfg.grid_extent->nx < 1 || cfg.grid_extent->ny < 1)) {
    error("aggregate.grid_nx and grid_ny must both be positive when a fixed grid is set");
  }
  if (cfg.peak_smoothing < 1 || cfg.peak_smoothing % 2 == 0) error("aggregate.peak_smoothing must be odd and positive");

  const std::optional<double> rate = cfg.resample_hz > 0.0 ? std::optional(cfg.resample_hz) : sample_rate_hz;
  if (!rate) {
    note("analysis rate follows the data; rate-dependent checks run when trials are loaded");
    return out;
  }
  const double dt = 1.0 / *rate;
  const double nyquist = 0.5 * *rate;
  if (cfg.detector.hp_cutoff_hz >= nyquist) {
    error("high-pass cutoff " + hz_text(cfg.detector.hp_cutoff_hz) + " Hz is not below the Nyquist frequency " +
          hz_text(nyquist) + " Hz at " + hz_text(*rate) + " Hz sampling");
  }
  if (cfg.delta_s > 0.0) {
    const double ratio = cfg.delta_s / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
      const double lag = std::max(1.0, std::round(ratio));
      if (cfg.snap_delta) {
        note("embedding delta " + hz_text(cfg.delta_s) + " s is " + hz_text(ratio) + " samples; using " +
             hz_text(lag) + " samples (" + hz_text(lag * dt) + " s)");
      } else {
        error("embedding delta " + hz_text(cfg.delta_s) + " s is not a whole number of samples at " +
              hz_text(*rate) + " Hz");
      }
    }
  }
  try {
    const auto tc = time_constants(cfg.detector.alpha, cfg.detector.beta, dt);
    note("time constants: tau_alpha = " + seconds_text(tc.tau_alpha_s) + " s, tau_beta = " +
         seconds_text(tc.tau_beta_s) + " s");
    if (tc.tau_beta_s > tc.tau_alpha_s) {
      warn("tau_beta (" + seconds_text(tc.tau_beta_s) + " s) is longer than tau_alpha (" +
           seconds_text(tc.tau_alpha_s) + " s); the trend should adapt faster than the level");
    }
  } catch (const Error&) {
    // Already reported by the detector check above.
  }
  return out;
}

const ModelPair& ModelSet::find(const std::string& scenario, Direction direction) const {
  for (const auto& p : pairs) {
    if (p.scenario == scenario && p.direction == direction) return p;
  }
  const bool single = !pairs.empty() && std::all_of(pairs.begin(), pairs.end(), [&](const ModelPair& p) {
    return p.scenario == pairs.front().scenario;
  });
  if (single) {
    for (const auto& p : pairs) {
      if (p.direction == direction) return p;
    }
  }
  throw_data(std::string("no ") + to_string(direction) + " models for scenario '" + scenario + "'");
}

double analysis_rate(const TrialSet& trials, const PipelineConfig& cfg) {
  if (cfg.resample_hz > 0.0) return cfg.resample_hz;
  if (trials.trials.empty()) throw_data("no trials");
  return 1.0 / trials.trials.front().series.dt;
}

EmbeddingSpec embedding_spec(const PipelineConfig& cfg, double dt) {
  EmbeddingSpec spec{cfg.d, cfg.delta_s, dt};
  if (cfg.snap_delta) {
    const double lag = std::max(1.0, std::round(cfg.delta_s / dt));
    spec.delta_s = lag * dt;
  }
  return spec;
}

std::vector<PreparedTrial> prepare_trials(const TrialSet& trials, const PipelineConfig& cfg,
                                          const RunOptions& opts) {
  if (trials.trials.empty()) throw_data("no trials to analyse");
  const double rate = analysis_rate(trials, cfg);
  std::vector<PreparedTrial> out(trials.trials.size());
  parallel_for(trials.trials.size(), opts.jobs, [&](std::size_t i) {
    const Trial& tr = trials.trials[i];
    out[i] = in_stage(trial_label(tr.id), "prepare", [&] {
      TimeSeries ts = resample(tr.series, rate);
      double origin = ts.t0;
      if (tr.start_t) {
        const auto first = static_cast<Eigen::Index>(std::ceil((*tr.start_t - ts.t0) / ts.dt - 1e-9));
        if (first >= ts.rows()) throw_data("start_t " + std::to_string(*tr.start_t) + " is past the end of the trial");
        if (first > 0) ts = ts.slice(first, ts.rows());
        origin = std::max(*tr.start_t, ts.t0);
      }
      PreparedTrial p;
      p.id = tr.id;
      p.scenario = tr.scenario;
      p.target = feature_series(ts, cfg.target_channels, cfg.feature);
      p.source = feature_series(ts, cfg.source_channels, cfg.feature);
      if (!cfg.position_channels.empty()) p.positions = ts.select(cfg.position_channels);
      p.info = {tr.id, tr.scenario, origin, ts.duration(), ts.dt};
      return p;
    });
  });
  return out;
}

ModelSet fit_models(const std::vector<PreparedTrial>& trials, const PipelineConfig& cfg, const RunOptions& opts) {
  if (trials.empty()) throw_data("no trials to fit");
  std::vector<std::string> scenarios;
  for (const auto& t : trials) {
    if (std::find(scenarios.begin(), scenarios.end(), t.scenario) == scenarios.end()) scenarios.push_back(t.scenario);
  }
  const auto dirs = directions_of(cfg.directions);
  const EmbeddingSpec spec = embedding_spec(cfg, trials.front().target.dt);

  struct Task {
    std::string scenario;
    Direction direction;
  };
  std::vector<Task> tasks;
  for (const auto& s : scenarios) {
    for (auto d : dirs) tasks.push_back({s, d});
  }
  std::vector<std::optional<ModelPair>> fitted(tasks.size());
  parallel_for(tasks.size(), opts.jobs, [&](std::size_t k) {
    const auto& task = tasks[k];
    std::vector<EmbeddedDataset> parts;
    for (const auto& t : trials) {
      if (t.scenario != task.scenario) continue;
      parts.push_back(in_stage(trial_label(t.id), "embed", [&] { return embed_direction(t, task.direction, spec); }));
    }
    const std::string what = "scenario '" + task.scenario + "', direction " + to_string(task.direction);
    const EmbeddedDataset pooled = concat(parts);
    fitted[k] = in_stage(what, "fit", [&] {
      auto fit = [&](Conditioning c) {
        return cfg.kind == ModelKind::var_linear ? fit_var(pooled, c) : fit_mlp(pooled, c, cfg.arch, cfg.train);
      };
      ModelPair p{task.scenario, task.direction, fit(Conditioning::baseline), fit(Conditioning::augmented)};
      return p;
    });
    log(opts, LogLevel::info,
        "fitted " + std::string(to_string(cfg.kind)) + " models for " + what + " on " +
            std::to_string(pooled.size()) + " rows");
    for (const FittedModel* m : {&fitted[k]->base, &fitted[k]->full}) {
      if (m->report().rank_deficient) {
        log(opts, LogLevel::info, what + ": " + to_string(m->conditioning()) +
                                      " design matrix is rank deficient; ridge term applied");
      }
    }
  });
  ModelSet set;
  for (auto& f : fitted) set.pairs.push_back(std::move(*f));
  return set;
}

std::vector<TrialOutput> evaluate(const std::vector<PreparedTrial>& trials, const ModelSet& models,
                                  const PipelineConfig& cfg, const RunOptions& opts) {
  const auto dirs = directions_of(cfg.directions);
  std::vector<TrialOutput> out(trials.size());
  parallel_for(trials.size(), opts.jobs, [&](std::size_t i) {
    const PreparedTrial& t = trials[i];
    const std::string label = trial_label(t.id);
    const EmbeddingSpec spec = embedding_spec(cfg, t.target.dt);
    DetectorConfig det = cfg.detector;
    det.dt = t.target.dt;

    TrialOutput o;
    o.id = t.id;
    o.scenario = t.scenario;
    o.info = t.info;
    o.positions = t.positions;
    for (auto d : dirs) {
      const ModelPair& pair = in_stage(label, "models", [&]() -> const ModelPair& { return models.find(t.scenario, d); });
      const EmbeddedDataset ds = in_stage(label, "embed", [&] { return embed_direction(t, d, spec); });
      const TeSeries te = in_stage(label, "te", [&] {
        const auto base = predict(pair.base, model_inputs(ds, Conditioning::baseline), ds.times);
        const auto full = predict(pair.full, model_inputs(ds, Conditioning::augmented), ds.times);
        return local_te(base, full, ds.targets, cfg.te_mode, d);
      });
      DirectionOutput dout;
      dout.trace = in_stage(label, "detect", [&] { return detect_trace(te, det); });
      dout.peak = in_stage(label, "peak", [&] {
        return peak_te(cfg.peak_smoothing > 1 ? smooth_te(te, cfg.peak_smoothing) : te);
      });
      log(opts, LogLevel::debug,
          label + " " + to_string(d) + ": " + std::to_string(dout.trace.events.size()) + " cue events");
      o.directions.push_back(std::move(dout));
    }
    out[i] = std::move(o);
  });
  return out;
}

Aggregates build_aggregates(const std::vector<TrialOutput>& trials, const PipelineConfig& cfg) {
  std::vector<std::string> scenarios;
  for (const auto& t : trials) {
    if (std::find(scenarios.begin(), scenarios.end(), t.scenario) == scenarios.end()) scenarios.push_back(t.scenario);
  }
  const auto dirs = directions_of(cfg.directions);
  auto output_for = [](const TrialOutput& t, Direction d) -> const DirectionOutput& {
    for (const auto& o : t.directions) {
      if (o.trace.raw.direction == d) return o;
    }
    throw_data("trial '" + t.id + "' has no " + to_string(d) + " output");
  };

  Aggregates agg;
  for (const auto& s : scenarios) {
    for (auto d : dirs) {
      std::vector<HistogramTrial> ht;
      std::vector<GridTrial> gt;
      for (const auto& t : trials) {
        if (t.scenario != s) continue;
        const auto& o = output_for(t, d);
        ht.push_back({o.trace.events, t.info.origin_t, t.info.duration_s, t.info.dt});
        if (!cfg.position_channels.empty()) {
          if (!t.positions) throw_data(trial_label(t.id) + " has no position stream");
          gt.push_back({o.trace.events, *t.positions});
        }
      }
      ScenarioAggregate a;
      a.scenario = s;
      a.direction = d;
      a.histogram = in_stage("scenario '" + s + "'", "histogram",
                             [&] { return temporal_histogram(ht, cfg.bin_dt, d, cfg.counting); });
      if (!cfg.position_channels.empty()) {
        a.grid = in_stage("scenario '" + s + "'", "grid",
                          [&] { return spatial_grid(gt, cfg.cell_size_m, d, cfg.grid_extent); });
      }
      agg.per_scenario.push_back(std::move(a));
    }
  }

  if (scenarios.size() == 2) {
    std::map<std::string, std::size_t> counts;
    for (const auto& t : trials) ++counts[t.scenario];
    if (counts[scenarios[0]] >= 2 && counts[scenarios[1]] >= 2) {
      std::vector<PeakStudyRow> rows;
      for (auto d : dirs) {
        std::vector<double> pa;
        std::vector<double> pb;
        for (const auto& t : trials) {
          (t.scenario == scenarios[0] ? pa : pb).push_back(output_for(t, d).peak.value);
        }
        rows.push_back(in_stage("peak study", to_string(d), [&] { return compare_peaks(pa, pb, d); }));
      }
      agg.peak_study = std::move(rows);
    }
  }
  return agg;
}

namespace {

RunResult run_impl(const TrialSet& trials, const ModelSet* models, const PipelineConfig& cfg,
                   const RunOptions& opts) {
  RunResult r;
  const double rate = analysis_rate(trials, cfg);
  r.analysis_dt = 1.0 / rate;
  r.diagnostics = validate_config(cfg, rate);
  for (const auto& d : r.diagnostics) {
    if (d.severity == Severity::error) throw_config(d.message);
  }
  const auto prepared = prepare_trials(trials, cfg, opts);
  r.models = models ? *models : fit_models(prepared, cfg, opts);
  r.trials = evaluate(prepared, r.models, cfg, opts);
  r.aggregates = build_aggregates(r.trials, cfg);
  return r;
}

}  // namespace

RunResult run(const TrialSet& trials, const PipelineConfig& cfg, const RunOptions& opts) {
  return run_impl(trials, nullptr, cfg, opts);
}

RunResult run_frozen(const TrialSet& trials, const ModelSet& models, const PipelineConfig& cfg,
                     const RunOptions& opts) {
  return run_impl(trials, &models, cfg, opts);
}

std::vector<PeakStudyRow> peak_te_study(const RunResult& a, const RunResult& b, const PipelineConfig& cfg) {
  std::vector<PeakStudyRow> rows;
  for (auto d : directions_of(cfg.directions)) {
    auto peaks = [d](const RunResult& r) {
      std::vector<double> v;
      for (const auto& t : r.trials) {
        for (const auto& o : t.directions) {
          if (o.trace.raw.direction == d) v.push_back(o.peak.value);
        }
      }
      return v;
    };
    rows.push_back(compare_peaks(peaks(a), peaks(b), d));
  }
  return rows;
}

}  // namespace tecue
