#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace tecue {

/// Hidden layer widths; an empty list is a linear-Gaussian model.
struct MlpArch {
  std::vector<int> hidden{64, 64};
};

/// Feed-forward network emitting, per row, a mean and a log-variance for
/// each output dimension. Hidden layers use tanh. All weights live in one
/// flat vector so optimizers and finite-difference checks can treat the
/// network as a point in parameter space.
///
/// Layout per layer: weight matrix (fan_in x fan_out, column-major), then
/// bias vector. The last layer has 2 * output_dim units: means first.
class GaussianMlp {
 public:
  GaussianMlp(int input_dim, int output_dim, MlpArch arch);

  int input_dim() const noexcept { return input_dim_; }
  int output_dim() const noexcept { return output_dim_; }
  const MlpArch& arch() const noexcept { return arch_; }
  Eigen::Index param_count() const noexcept { return params_.size(); }

  const Eigen::VectorXd& params() const noexcept { return params_; }
  void set_params(const Eigen::VectorXd& p);

  /// Glorot-uniform weights and zero biases.
  void init_glorot(std::uint64_t seed);
  void init_zero();

  void forward(const Eigen::MatrixXd& x, Eigen::MatrixXd& mean, Eigen::MatrixXd& log_var) const;

  /// Mean Gaussian NLL over rows with variance `exp(log_var) + floor`.
  /// When `grad` is non-null it receives dNLL/dparams (same layout).
  double loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
              const Eigen::VectorXd& var_floor, Eigen::VectorXd* grad = nullptr) const;

 private:
  struct Layer {
    Eigen::Index w_offset;
    Eigen::Index b_offset;
    int fan_in;
    int fan_out;
  };

  int input_dim_;
  int output_dim_;
  MlpArch arch_;
  std::vector<Layer> layers_;
  Eigen::VectorXd params_;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
};

void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state,
                 double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8);

}  // namespace tecue
