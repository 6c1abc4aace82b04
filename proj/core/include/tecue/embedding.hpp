#pragma once

#include "tecue/time_series.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tecue {

/// Delay-embedding parameters: `d` lags spaced `delta_s` apart.
struct EmbeddingSpec {
  int d = 1;
  double delta_s = 0.0;
  double dt = 0.0;

  /// Lag spacing in samples. Throws unless delta_s is an integer
  /// multiple of dt to 1e-9 relative.
  Eigen::Index lag_samples() const;
  void validate() const;
};

/// Per-row (target, target history, source history). History blocks hold
/// lags delta, 2*delta, ..., d*delta, channel-major within each lag:
/// `[x0(t-δ), x1(t-δ), x0(t-2δ), x1(t-2δ), ...]`.
struct EmbeddedDataset {
  Eigen::MatrixXd targets;
  Eigen::MatrixXd target_hist;
  Eigen::MatrixXd source_hist;
  std::vector<double> times;

  Eigen::Index size() const noexcept { return targets.rows(); }
  /// `[target_hist | source_hist]`, the augmented model's input.
  Eigen::MatrixXd joint_hist() const;
};

EmbeddedDataset embed(const TimeSeries& target, const TimeSeries& source,
                      const EmbeddingSpec& spec);

/// Stacks datasets row-wise (pooled fitting across trials).
EmbeddedDataset concat(const std::vector<EmbeddedDataset>& parts);

}  // namespace tecue
