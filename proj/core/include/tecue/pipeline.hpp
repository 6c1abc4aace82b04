#pragma once

#include "tecue/aggregate.hpp"
#include "tecue/config.hpp"
#include "tecue/detector.hpp"
#include "tecue/io.hpp"
#include "tecue/models.hpp"
#include "tecue/time_series.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tecue {

enum class Severity { note, warning, error };
const char* to_string(Severity s) noexcept;

struct Diagnostic {
  Severity severity = Severity::note;
  std::string message;
};

/// Checks a config before any data is touched. `sample_rate_hz` stands in
/// for the analysis rate when the config keeps the native rate.
std::vector<Diagnostic> validate_config(const PipelineConfig& cfg,
                                        std::optional<double> sample_rate_hz = std::nullopt);
bool has_errors(const std::vector<Diagnostic>& diags);

/// A trial reduced to the analysis inputs: target and source features on
/// the analysis grid plus the optional position stream.
struct PreparedTrial {
  std::string id;
  std::string scenario;
  TimeSeries target;
  TimeSeries source;
  std::optional<TimeSeries> positions;
  TrialInfo info;
};

struct ModelPair {
  std::string scenario;
  Direction direction = Direction::src2tgt;
  FittedModel base;
  FittedModel full;
};

struct ModelSet {
  std::vector<ModelPair> pairs;
  /// Pair for a scenario; a set fit on a single scenario serves any label.
  const ModelPair& find(const std::string& scenario, Direction direction) const;
};

struct DirectionOutput {
  DetectionTrace trace;
  TePeak peak;
};

struct TrialOutput {
  std::string id;
  std::string scenario;
  TrialInfo info;
  std::vector<DirectionOutput> directions;
  std::optional<TimeSeries> positions;
};

struct ScenarioAggregate {
  std::string scenario;
  Direction direction = Direction::src2tgt;
  CueHistogram histogram;
  std::optional<CueGrid> grid;
};

struct Aggregates {
  std::vector<ScenarioAggregate> per_scenario;
  /// Present when the trials form exactly two scenarios with at least two
  /// trials each; the first-seen scenario is group a.
  std::optional<std::vector<PeakStudyRow>> peak_study;
};

struct RunResult {
  std::vector<Diagnostic> diagnostics;
  ModelSet models;
  std::vector<TrialOutput> trials;
  Aggregates aggregates;
  double analysis_dt = 0.0;
};

enum class LogLevel { error, info, debug };
using Logger = std::function<void(LogLevel, const std::string&)>;

struct RunOptions {
  /// Upper bound on worker threads; 0 uses the hardware concurrency.
  unsigned jobs = 0;
  Logger log;
};

/// Analysis rate for a trial set under `cfg`.
double analysis_rate(const TrialSet& trials, const PipelineConfig& cfg);
/// Embedding on the analysis grid; delta is snapped when allowed.
EmbeddingSpec embedding_spec(const PipelineConfig& cfg, double dt);

std::vector<PreparedTrial> prepare_trials(const TrialSet& trials, const PipelineConfig& cfg,
                                          const RunOptions& opts = {});

/// Baseline and augmented model per scenario and direction, fit on the
/// pooled trials of each scenario.
ModelSet fit_models(const std::vector<PreparedTrial>& trials, const PipelineConfig& cfg,
                    const RunOptions& opts = {});

/// Local TE, detection and peaks per trial with fixed models.
std::vector<TrialOutput> evaluate(const std::vector<PreparedTrial>& trials, const ModelSet& models,
                                  const PipelineConfig& cfg, const RunOptions& opts = {});

/// Aggregates from per-trial outputs; the report step feeds it the same
/// values re-read from disk.
Aggregates build_aggregates(const std::vector<TrialOutput>& trials, const PipelineConfig& cfg);

/// prepare, fit, evaluate, aggregate.
RunResult run(const TrialSet& trials, const PipelineConfig& cfg, const RunOptions& opts = {});

/// Same as `run` but with models supplied by the caller.
RunResult run_frozen(const TrialSet& trials, const ModelSet& models, const PipelineConfig& cfg,
                     const RunOptions& opts = {});

/// Welch test of per-trial peak TE between two analysed groups.
std::vector<PeakStudyRow> peak_te_study(const RunResult& a, const RunResult& b,
                                        const PipelineConfig& cfg);

}  // namespace tecue
