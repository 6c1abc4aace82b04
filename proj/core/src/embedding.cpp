#include "tecue/embedding.hpp"

#include "tecue/error.hpp"

#include <cmath>

namespace tecue {

Eigen::Index EmbeddingSpec::lag_samples() const {
  if (!(dt > 0.0)) throw_config("embedding dt must be positive");
  if (!(delta_s > 0.0)) throw_config("embedding delta_s must be positive");
  const double ratio = delta_s / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw_config("delta_s = " + std::to_string(delta_s) +
                 " is not an integer multiple of dt = " + std::to_string(dt));
  }
  return static_cast<Eigen::Index>(rounded);
}

void EmbeddingSpec::validate() const {
  if (d < 1) throw_config("embedding history length d must be >= 1");
  (void)lag_samples();
}

Eigen::MatrixXd EmbeddedDataset::joint_hist() const {
  Eigen::MatrixXd out(size(), target_hist.cols() + source_hist.cols());
  out << target_hist, source_hist;
  return out;
}

EmbeddedDataset embed(const TimeSeries& target, const TimeSeries& source,
                      const EmbeddingSpec& spec) {
  spec.validate();
  if (target.rows() != source.rows()) throw_data("target and source lengths differ");
  if (std::abs(target.dt - source.dt) > 1e-12 * target.dt ||
      std::abs(target.dt - spec.dt) > 1e-12 * target.dt) {
    throw_data("target, source and embedding dt differ");
  }
  const Eigen::Index lag = spec.lag_samples();
  const Eigen::Index span = lag * spec.d;
  const Eigen::Index n = target.rows();
  if (n < span + 1) {
    throw_data("series of " + std::to_string(n) + " samples is shorter than the " +
               std::to_string(span + 1) + " needed for the embedding");
  }
  const Eigen::Index rows = n - span;
  const Eigen::Index dx = target.data.cols();
  const Eigen::Index dy = source.data.cols();

  EmbeddedDataset ds;
  ds.targets = target.data.bottomRows(rows);
  ds.target_hist.resize(rows, spec.d * dx);
  ds.source_hist.resize(rows, spec.d * dy);
  for (int k = 1; k <= spec.d; ++k) {
    const Eigen::Index first = span - k * lag;
    ds.target_hist.middleCols((k - 1) * dx, dx) = target.data.middleRows(first, rows);
    ds.source_hist.middleCols((k - 1) * dy, dy) = source.data.middleRows(first, rows);
  }
  ds.times.resize(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) {
    ds.times[static_cast<std::size_t>(i)] = target.time(span + i);
  }
  return ds;
}

EmbeddedDataset concat(const std::vector<EmbeddedDataset>& parts) {
  if (parts.empty()) throw_data("no datasets to concatenate");
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.targets.cols() != parts.front().targets.cols() ||
        p.target_hist.cols() != parts.front().target_hist.cols() ||
        p.source_hist.cols() != parts.front().source_hist.cols()) {
      throw_data("datasets have different widths");
    }
    rows += p.size();
  }
  EmbeddedDataset out;
  out.targets.resize(rows, parts.front().targets.cols());
  out.target_hist.resize(rows, parts.front().target_hist.cols());
  out.source_hist.resize(rows, parts.front().source_hist.cols());
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.targets.middleRows(at, p.size()) = p.targets;
    out.target_hist.middleRows(at, p.size()) = p.target_hist;
    out.source_hist.middleRows(at, p.size()) = p.source_hist;
    out.times.insert(out.times.end(), p.times.begin(), p.times.end());
    at += p.size();
  }
  return out;
}

}  // namespace tecue
