#include "tecue/gaussian_mlp.hpp"

#include "tecue/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace tecue {

namespace {
using MatMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
}  // namespace

GaussianMlp::GaussianMlp(int input_dim, int output_dim, MlpArch arch)
    : input_dim_(input_dim), output_dim_(output_dim), arch_(std::move(arch)) {
  if (input_dim < 1 || output_dim < 1) throw_config("network dimensions must be positive");
  std::vector<int> widths{input_dim};
  for (int h : arch_.hidden) {
    if (h < 1) throw_config("hidden layer width must be positive");
    widths.push_back(h);
  }
  widths.push_back(2 * output_dim);

  Eigen::Index offset = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer{offset, offset + widths[l] * widths[l + 1], widths[l], widths[l + 1]};
    offset = layer.b_offset + widths[l + 1];
    layers_.push_back(layer);
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

void GaussianMlp::set_params(const Eigen::VectorXd& p) {
  if (p.size() != params_.size()) throw_config("parameter vector has the wrong length");
  params_ = p;
}

void GaussianMlp::init_glorot(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  params_.setZero();
  for (const auto& layer : layers_) {
    const double limit = std::sqrt(6.0 / (layer.fan_in + layer.fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < layer.fan_in * layer.fan_out; ++i) {
      params_[layer.w_offset + i] = dist(rng);
    }
  }
}

void GaussianMlp::init_zero() { params_.setZero(); }

void GaussianMlp::forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& mean,
                          Eigen::MatrixXd& log_var) const {
  if (x.cols() != input_dim_) throw_data("network input width mismatch");
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    ConstMatMap w(params_.data() + layer.w_offset, layer.fan_in, layer.fan_out);
    ConstVecMap b(params_.data() + layer.b_offset, layer.fan_out);
    Eigen::MatrixXd z = h * w;
    z.rowwise() += b.transpose();
    if (l + 1 < layers_.size()) {
      h = z.array().tanh().matrix();
    } else {
      h = std::move(z);
    }
  }
  mean = h.leftCols(output_dim_);
  log_var = h.rightCols(output_dim_);
}

double GaussianMlp::loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                         const Eigen::VectorXd& var_floor, Eigen::VectorXd* grad) const {
  if (x.cols() != input_dim_ || y.cols() != output_dim_ || x.rows() != y.rows()) {
    throw_data("network batch shape mismatch");
  }
  const double rows = static_cast<double>(x.rows());

  // Keep every activation for the backward pass.
  std::vector<Eigen::MatrixXd> acts{x};
  acts.reserve(layers_.size() + 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    ConstMatMap w(params_.data() + layer.w_offset, layer.fan_in, layer.fan_out);
    ConstVecMap b(params_.data() + layer.b_offset, layer.fan_out);
    Eigen::MatrixXd z = acts.back() * w;
    z.rowwise() += b.transpose();
    if (l + 1 < layers_.size()) z = z.array().tanh().matrix();
    acts.push_back(std::move(z));
  }
  const Eigen::MatrixXd& out = acts.back();
  const Eigen::ArrayXXd mean = out.leftCols(output_dim_).array();
  const Eigen::ArrayXXd ev = out.rightCols(output_dim_).array().exp();
  const Eigen::ArrayXXd var = ev.rowwise() + var_floor.transpose().array();
  const Eigen::ArrayXXd resid = y.array() - mean;
  const Eigen::ArrayXXd r2v = resid.square() / var;

  const double log2pi = std::log(2.0 * std::numbers::pi);
  const double total =
      0.5 * (var.log() + r2v).sum() + 0.5 * log2pi * rows * static_cast<double>(output_dim_);
  const double nll = total / rows;
  if (grad == nullptr) return nll;

  grad->setZero(params_.size());
  Eigen::MatrixXd delta(x.rows(), 2 * output_dim_);
  delta.leftCols(output_dim_) = (-resid / var / rows).matrix();
  delta.rightCols(output_dim_) = (0.5 * (1.0 - r2v) / var * ev / rows).matrix();

  for (std::size_t l = layers_.size(); l-- > 0;) {
    const auto& layer = layers_[l];
    MatMap gw(grad->data() + layer.w_offset, layer.fan_in, layer.fan_out);
    Eigen::Map<Eigen::VectorXd> gb(grad->data() + layer.b_offset, layer.fan_out);
    gw.noalias() = acts[l].transpose() * delta;
    gb = delta.colwise().sum().transpose();
    if (l == 0) break;
    ConstMatMap w(params_.data() + layer.w_offset, layer.fan_in, layer.fan_out);
    Eigen::MatrixXd back = delta * w.transpose();
    delta = (back.array() * (1.0 - acts[l].array().square())).matrix();
  }
  return nll;
}

void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state,
                 double learning_rate, double beta1, double beta2, double eps) {
  if (state.m.size() != params.size()) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  state.m = beta1 * state.m + (1.0 - beta1) * grad;
  state.v = beta2 * state.v + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  params.array() -= learning_rate * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + eps);
}

}  // namespace tecue
