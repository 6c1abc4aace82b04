#pragma once

#include "tecue/detector.hpp"
#include "tecue/time_series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace tecue {

/// Joint VAR(1) of z = (X, Y): z_t = A z_{t-1} + w_t, w ~ N(0, Q).
struct Var1Spec {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
  std::int64_t n = 10000;
  std::uint64_t seed = 1;
  double dt = 1.0;

  void validate() const;
};

/// Returns one-channel series named "x" and "y"; 1000 burn-in samples
/// are discarded.
std::pair<TimeSeries, TimeSeries> gen_var1(const Var1Spec& spec);

/// Stationary covariance solving Σ = A Σ Aᵀ + Q.
Eigen::Matrix2d var1_stationary_cov(const Var1Spec& spec);

/// Closed-form TE with one lag. src2tgt is Y -> X, tgt2src is X -> Y.
double te_oracle_var1(const Var1Spec& spec, Direction direction);

/// Leader moves at 1 m/s along x and performs a lateral velocity step of
/// ±amplitude (alternating sign) at each cue time, ramped with a raised
/// cosine. The follower tracks the leader's velocity delayed by
/// `response_delay_s` through a critically damped second-order response.
/// Noise is added to both recorded velocities.
struct CueScenario {
  double duration_s = 20.0;
  std::vector<double> cue_times;
  double response_delay_s = 0.05;
  double amplitude = 1.0;
  double noise_sigma = 0.2;
  std::uint64_t seed = 1;
  double dt = 0.05;
  double ramp_s = 0.15;
  double omega = 25.0;

  void validate() const;
  /// Length of a truth interval: delay + ramp + 6 / omega.
  double response_span() const noexcept;
};

struct CueTrial {
  /// Channels x, y, vx, vy.
  TimeSeries leader;
  TimeSeries follower;
  /// [cue, cue + response_span()) per cue, direction leader -> follower.
  std::vector<CueEvent> truth;
};

CueTrial gen_cue_scenario(const CueScenario& spec);

/// One series with `leader_*` and `follower_*` channels.
TimeSeries merge_agents(const CueTrial& trial);

}  // namespace tecue
