#include "tecue/synth.hpp"

#include "tecue/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace tecue {

namespace {

constexpr std::int64_t kBurnIn = 1000;

double spectral_radius(const Eigen::Matrix2d& a) {
  return Eigen::EigenSolver<Eigen::Matrix2d>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

void Var1Spec::validate() const {
  if (!A.allFinite() || !Q.allFinite()) throw_config("VAR(1) matrices must be finite");
  if (spectral_radius(A) >= 1.0) throw_config("VAR(1) matrix A is not stable (spectral radius >= 1)");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw_config("noise covariance Q is not symmetric");
  if (Eigen::LLT<Eigen::Matrix2d>(Q).info() != Eigen::Success) {
    throw_config("noise covariance Q is not positive definite");
  }
  if (n < 1) throw_config("VAR(1) sample count must be positive");
  if (!(dt > 0.0)) throw_config("VAR(1) dt must be positive");
}

std::pair<TimeSeries, TimeSeries> gen_var1(const Var1Spec& spec) {
  spec.validate();
  const Eigen::Matrix2d L = Eigen::LLT<Eigen::Matrix2d>(spec.Q).matrixL();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  TimeSeries x;
  TimeSeries y;
  x.channels = {"x"};
  y.channels = {"y"};
  x.dt = y.dt = spec.dt;
  x.data.resize(spec.n, 1);
  y.data.resize(spec.n, 1);

  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  for (std::int64_t i = -kBurnIn; i < spec.n; ++i) {
    Eigen::Vector2d e;
    e(0) = normal(rng);
    e(1) = normal(rng);
    z = spec.A * z + L * e;
    if (i >= 0) {
      x.data(i, 0) = z(0);
      y.data(i, 0) = z(1);
    }
  }
  return {std::move(x), std::move(y)};
}

Eigen::Matrix2d var1_stationary_cov(const Var1Spec& spec) {
  spec.validate();
  // vec(Σ) = (I - A ⊗ A)^{-1} vec(Q), column-major vec.
  Eigen::Matrix4d k;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = spec.A(i, j) * spec.A;
  }
  const Eigen::Vector4d q = Eigen::Map<const Eigen::Vector4d>(spec.Q.data());
  const Eigen::Vector4d s = (Eigen::Matrix4d::Identity() - k).partialPivLu().solve(q);
  Eigen::Matrix2d sigma = Eigen::Map<const Eigen::Matrix2d>(s.data());
  return 0.5 * (sigma + sigma.transpose());
}

double te_oracle_var1(const Var1Spec& spec, Direction direction) {
  const Eigen::Matrix2d sigma = var1_stationary_cov(spec);
  const int tgt = direction == Direction::src2tgt ? 0 : 1;
  const Eigen::Matrix2d lag_cov = spec.A * sigma;  // Cov(z_t, z_{t-1})
  const double reduced = sigma(tgt, tgt) - lag_cov(tgt, tgt) * lag_cov(tgt, tgt) / sigma(tgt, tgt);
  const double full = spec.Q(tgt, tgt);
  return 0.5 * std::log(reduced / full);
}

void CueScenario::validate() const {
  if (!(duration_s > 0.0)) throw_config("scenario duration must be positive");
  if (!(dt > 0.0)) throw_config("scenario dt must be positive");
  if (!(response_delay_s >= 0.0)) throw_config("response delay must be non-negative");
  if (!(noise_sigma >= 0.0)) throw_config("noise sigma must be non-negative");
  if (!(ramp_s > 0.0) || !(omega > 0.0)) throw_config("ramp and omega must be positive");
  for (double c : cue_times) {
    if (c < 0.0 || c > duration_s) throw_config("cue time " + std::to_string(c) + " outside the scenario");
  }
}

double CueScenario::response_span() const noexcept {
  return response_delay_s + ramp_s + 6.0 / omega;
}

CueTrial gen_cue_scenario(const CueScenario& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(std::llround(spec.duration_s / spec.dt)) + 1;

  auto leader_v = [&](double t) {
    Eigen::Vector2d v(1.0, 0.0);
    for (std::size_t k = 0; k < spec.cue_times.size(); ++k) {
      const double s = std::clamp((t - spec.cue_times[k]) / spec.ramp_s, 0.0, 1.0);
      const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * s);
      v(1) += spec.amplitude * (k % 2 == 0 ? 1.0 : -1.0) * w;
    }
    return v;
  };

  Eigen::MatrixX2d vl(n, 2);
  Eigen::MatrixX2d vf(n, 2);
  constexpr int kSub = 20;
  const double h = spec.dt / kSub;
  const double w2 = spec.omega * spec.omega;
  Eigen::Vector2d v(1.0, 0.0);
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * spec.dt;
    vl.row(i) = leader_v(t).transpose();
    vf.row(i) = v.transpose();
    for (int s = 0; s < kSub; ++s) {
      const Eigen::Vector2d target = leader_v(t + s * h - spec.response_delay_s);
      acc += h * (w2 * (target - v) - 2.0 * spec.omega * acc);
      v += h * acc;
    }
  }

  auto agent = [&](const Eigen::MatrixX2d& vel, double x0) {
    TimeSeries ts;
    ts.channels = {"x", "y", "vx", "vy"};
    ts.dt = spec.dt;
    ts.data.resize(n, 4);
    Eigen::Vector2d p(x0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i > 0) p += 0.5 * spec.dt * (vel.row(i - 1) + vel.row(i)).transpose();
      ts.data(i, 0) = p(0);
      ts.data(i, 1) = p(1);
    }
    ts.data.rightCols(2) = vel;
    return ts;
  };

  CueTrial out;
  out.leader = agent(vl, 0.0);
  out.follower = agent(vf, -1.0);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  if (spec.noise_sigma > 0.0) {
    for (TimeSeries* ts : {&out.leader, &out.follower}) {
      for (Eigen::Index i = 0; i < n; ++i) {
        ts->data(i, 2) += normal(rng);
        ts->data(i, 3) += normal(rng);
      }
    }
  }

  for (double c : spec.cue_times) {
    out.truth.push_back({c, c + spec.response_span(), 0.0, Direction::src2tgt});
  }
  return out;
}

TimeSeries merge_agents(const CueTrial& trial) {
  TimeSeries ts;
  ts.dt = trial.leader.dt;
  ts.t0 = trial.leader.t0;
  const Eigen::Index n = trial.leader.rows();
  ts.data.resize(n, trial.leader.data.cols() + trial.follower.data.cols());
  ts.data << trial.leader.data, trial.follower.data;
  for (const auto& c : trial.leader.channels) ts.channels.push_back("leader_" + c);
  for (const auto& c : trial.follower.channels) ts.channels.push_back("follower_" + c);
  return ts;
}

}  // namespace tecue
