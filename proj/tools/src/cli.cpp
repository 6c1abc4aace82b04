#include "tecue_cli/cli.hpp"

#include "tecue/config.hpp"
#include "tecue/error.hpp"
#include "tecue/io.hpp"
#include "tecue/pipeline.hpp"
#include "tecue/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace tecue::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::string preset;
  std::vector<std::string> overrides;
  bool verbose = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  auto* c = sub->add_option("--config,-c", o.config, "Configuration file");
  auto* p = sub->add_option("--preset", o.preset, "Built-in configuration preset");
  c->excludes(p);
  sub->add_option("--set", o.overrides, "Override a config value as section.key=value (repeatable)");
  sub->add_flag("--verbose,-v", o.verbose, "Log debug messages");
}

Config load(const CommonOptions& o) {
  Config cfg;
  if (!o.config.empty()) cfg = load_config(o.config);
  else if (!o.preset.empty()) cfg = preset_config(o.preset);
  else throw_config("one of --config or --preset is required");
  for (const auto& s : o.overrides) apply_override(cfg, s);
  return cfg;
}

Logger make_logger(std::ostream& err, bool verbose) {
  auto mutex = std::make_shared<std::mutex>();
  return [&err, verbose, mutex](LogLevel level, const std::string& msg) {
    if (level == LogLevel::debug && !verbose) return;
    static const char* names[] = {"error", "info", "debug"};
    std::lock_guard lock(*mutex);
    err << "[" << names[static_cast<int>(level)] << "] " << msg << '\n';
  };
}

std::string dir_file(const std::string& stem, Direction d) { return stem + "_" + to_string(d) + ".csv"; }

void write_aggregates(const fs::path& out, const Aggregates& agg) {
  for (const auto& a : agg.per_scenario) {
    write_histogram(a.histogram, out / dir_file("histogram_" + a.scenario, a.direction));
    if (a.grid) write_grid(*a.grid, out / dir_file("grid_" + a.scenario, a.direction));
  }
  if (agg.peak_study) write_report_csv(*agg.peak_study, out / "peak_study.csv");
}

void write_models(const fs::path& dir, const ModelSet& models) {
  std::string index = "scenario,direction,baseline,augmented\n";
  for (const auto& p : models.pairs) {
    const std::string stem = p.scenario + "_" + to_string(p.direction);
    save_model(p.base, dir / (stem + "_baseline.model"));
    save_model(p.full, dir / (stem + "_augmented.model"));
    index += p.scenario + "," + to_string(p.direction) + "," + stem + "_baseline.model," + stem +
             "_augmented.model\n";
  }
  write_text_file(dir / "index.csv", index);
}

ModelSet read_models(const fs::path& dir) {
  const std::string text = read_text_file(dir / "index.csv");
  ModelSet set;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (header || line.empty()) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t c; (c = line.find(',', start)) != std::string::npos; start = c + 1) {
      cells.push_back(line.substr(start, c - start));
    }
    cells.push_back(line.substr(start));
    if (cells.size() != 4) throw_data((dir / "index.csv").string() + ": malformed row '" + line + "'");
    set.pairs.push_back({cells[0], parse_direction(cells[1]), load_model(dir / cells[2]), load_model(dir / cells[3])});
  }
  if (set.pairs.empty()) throw_data("no models listed in " + (dir / "index.csv").string());
  return set;
}

void write_run(const fs::path& out, const Config& cfg, const RunResult& r) {
  write_text_file(out / "run.cfg", config_to_text(cfg));
  write_models(out / "models", r.models);

  std::vector<EventRecord> events;
  std::vector<PeakRecord> peaks;
  std::vector<TrialInfo> infos;
  for (const auto& t : r.trials) {
    infos.push_back(t.info);
    for (const auto& d : t.directions) {
      const Direction dir = d.trace.raw.direction;
      write_te_csv(te_table(d.trace), out / "te" / dir_file(t.id, dir));
      for (const auto& e : d.trace.events) events.push_back({t.id, e});
      peaks.push_back({t.id, t.scenario, dir, d.peak.t, d.peak.value});
    }
    if (t.positions) write_trial_csv(*t.positions, out / "positions" / (t.id + ".csv"));
  }
  write_events_csv(events, out / "events.csv");
  write_peaks_csv(peaks, out / "peaks.csv");
  write_trials_csv(infos, out / "trials.csv");
  write_aggregates(out, r.aggregates);
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& os) {
  for (const auto& d : diags) os << to_string(d.severity) << ": " << d.message << '\n';
}

int cmd_run(const CommonOptions& o, const std::string& trials_dir, const std::string& out_dir,
            const std::string& models_dir, unsigned jobs, std::ostream& err) {
  const Config cfg = load(o);
  RunOptions opts{jobs, make_logger(err, o.verbose)};
  const TrialSet trials = load_trial_dir(trials_dir);
  opts.log(LogLevel::info, "loaded " + std::to_string(trials.trials.size()) + " trials from " + trials_dir);
  const RunResult r = models_dir.empty() ? run(trials, cfg.pipeline, opts)
                                         : run_frozen(trials, read_models(models_dir), cfg.pipeline, opts);
  for (const auto& d : r.diagnostics) {
    if (d.severity != Severity::note || o.verbose) {
      opts.log(d.severity == Severity::note ? LogLevel::debug : LogLevel::info,
               std::string(to_string(d.severity)) + ": " + d.message);
    }
  }
  write_run(out_dir, cfg, r);
  std::size_t n_events = 0;
  for (const auto& t : r.trials) {
    for (const auto& d : t.directions) n_events += d.trace.events.size();
  }
  opts.log(LogLevel::info, "wrote " + std::to_string(n_events) + " cue events to " + out_dir);
  return 0;
}

int cmd_synth(const CommonOptions& o, const std::string& out_dir, std::ostream& err) {
  const Config cfg = load(o);
  const SynthConfig& s = cfg.synth;
  if (s.n_trials < 1) throw_config("synth.n_trials must be at least 1");
  const fs::path out = out_dir;
  std::string manifest = "trial,scenario\n";
  std::vector<EventRecord> truth;
  for (int k = 0; k < s.n_trials; ++k) {
    char id[256];
    std::snprintf(id, sizeof(id), "%s_%03d", s.scenario.c_str(), k);
    const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(k);
    TimeSeries series;
    if (s.kind == SynthKind::var1) {
      Var1Spec spec;
      spec.A << s.a_xx, s.a_xy, s.a_yx, s.a_yy;
      spec.Q << s.q_xx, s.q_xy, s.q_xy, s.q_yy;
      spec.n = s.n;
      spec.seed = seed;
      spec.dt = s.dt;
      auto [x, y] = gen_var1(spec);
      series = x;
      series.channels = {"x", "y"};
      series.data.conservativeResize(Eigen::NoChange, 2);
      series.data.col(1) = y.data.col(0);
    } else {
      CueScenario spec;
      spec.duration_s = s.duration_s;
      spec.cue_times = s.cue_times;
      spec.response_delay_s = s.response_delay_s;
      spec.amplitude = s.amplitude;
      spec.noise_sigma = s.noise_sigma;
      spec.seed = seed;
      spec.dt = s.dt;
      spec.ramp_s = s.ramp_s;
      spec.omega = s.omega;
      const CueTrial trial = gen_cue_scenario(spec);
      series = merge_agents(trial);
      for (const auto& e : trial.truth) truth.push_back({id, e});
    }
    write_trial_csv(series, out / (std::string(id) + ".csv"));
    manifest += std::string(id) + "," + s.scenario + "\n";
  }
  write_text_file(out / "manifest.csv", manifest);
  if (s.kind == SynthKind::cue) write_events_csv(truth, out / "truth.csv");
  make_logger(err, o.verbose)(LogLevel::info,
                              "wrote " + std::to_string(s.n_trials) + " synthetic trials to " + out_dir);
  return 0;
}

int cmd_oracle(const CommonOptions& o, std::ostream& out) {
  const Config cfg = load(o);
  const SynthConfig& s = cfg.synth;
  Var1Spec spec;
  spec.A << s.a_xx, s.a_xy, s.a_yx, s.a_yy;
  spec.Q << s.q_xx, s.q_xy, s.q_xy, s.q_yy;
  char buf[128];
  for (auto d : {Direction::src2tgt, Direction::tgt2src}) {
    std::snprintf(buf, sizeof(buf), "te_%s = %.10g nats\n", to_string(d), te_oracle_var1(spec, d));
    out << buf;
  }
  return 0;
}

int cmd_validate(const CommonOptions& o, double rate, std::ostream& out) {
  const Config cfg = load(o);
  const auto diags = validate_config(cfg.pipeline, rate > 0.0 ? std::optional(rate) : std::nullopt);
  print_diagnostics(diags, out);
  return has_errors(diags) ? 1 : 0;
}

int cmd_report(const std::string& events_dir, const std::string& out_dir, const std::vector<std::string>& overrides,
               bool verbose, std::ostream& err) {
  const fs::path in = events_dir;
  Config cfg = load_config(in / "run.cfg");
  for (const auto& o : overrides) apply_override(cfg, o);
  const auto dirs = directions_of(cfg.pipeline.directions);
  const auto infos = read_trials_csv(in / "trials.csv");
  const auto events = read_events_csv(in / "events.csv");
  const auto peaks = read_peaks_csv(in / "peaks.csv");

  std::vector<TrialOutput> trials;
  std::map<std::string, std::size_t> index;
  for (const auto& info : infos) {
    TrialOutput t;
    t.id = info.trial;
    t.scenario = info.scenario;
    t.info = info;
    for (auto d : dirs) {
      DirectionOutput o;
      o.trace.raw.direction = d;
      t.directions.push_back(o);
    }
    if (!cfg.pipeline.position_channels.empty()) {
      TimeSeries pos = load_csv(in / "positions" / (info.trial + ".csv"));
      pos.dt = info.dt;
      t.positions = std::move(pos);
    }
    index[t.id] = trials.size();
    trials.push_back(std::move(t));
  }
  auto slot = [&](const std::string& trial, Direction d) -> DirectionOutput& {
    auto it = index.find(trial);
    if (it == index.end()) throw_data("trial '" + trial + "' is not listed in trials.csv");
    for (auto& o : trials[it->second].directions) {
      if (o.trace.raw.direction == d) return o;
    }
    throw_data("trial '" + trial + "' has no " + to_string(d) + " output in this run");
  };
  for (const auto& e : events) slot(e.trial, e.event.direction).trace.events.push_back(e.event);
  for (const auto& p : peaks) slot(p.trial, p.direction).peak = {p.t_peak, p.peak_te};

  write_aggregates(out_dir, build_aggregates(trials, cfg.pipeline));
  make_logger(err, verbose)(LogLevel::info, "rebuilt aggregates for " + std::to_string(trials.size()) +
                                                " trials in " + out_dir);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transfer-entropy cue detection between two agents' time series", "tecue"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string trials_dir;
  std::string out_dir;
  std::string models_dir;
  std::string events_dir;
  unsigned jobs = 0;
  double rate = 0.0;

  auto* run_cmd = app.add_subcommand("run", "Fit models, compute TE, detect cues and aggregate");
  add_common(run_cmd, common);
  run_cmd->add_option("--trials", trials_dir, "Directory of trial CSV files")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->required();
  run_cmd->add_option("--models", models_dir, "Use previously saved models instead of fitting");
  run_cmd->add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)");

  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic trials with ground truth");
  add_common(synth_cmd, common);
  synth_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Print closed-form TE of the configured VAR(1) process");
  add_common(oracle_cmd, common);

  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration and report time constants");
  add_common(validate_cmd, common);
  validate_cmd->add_option("--rate", rate, "Sample rate to assume when the config keeps the native rate");

  auto* report_cmd = app.add_subcommand("report", "Rebuild aggregates from a previous run's outputs");
  report_cmd->add_option("--events", events_dir, "Output directory of a previous run")->required();
  report_cmd->add_option("--out", out_dir, "Output directory")->required();
  report_cmd->add_option("--set", common.overrides, "Override an aggregate setting as section.key=value (repeatable)");
  report_cmd->add_flag("--verbose,-v", common.verbose, "Log debug messages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(common, trials_dir, out_dir, models_dir, jobs, err);
    if (synth_cmd->parsed()) return cmd_synth(common, out_dir, err);
    if (oracle_cmd->parsed()) return cmd_oracle(common, out);
    if (validate_cmd->parsed()) return cmd_validate(common, rate, out);
    if (report_cmd->parsed()) return cmd_report(events_dir, out_dir, common.overrides, common.verbose, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == Error::Kind::config ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace tecue::cli
