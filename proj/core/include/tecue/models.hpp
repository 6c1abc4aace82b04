#pragma once

#include "tecue/embedding.hpp"
#include "tecue/gaussian_mlp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tecue {

/// Lower bound added to every predicted variance.
inline constexpr double kVarianceFloor = 1e-8;

enum class ModelKind { var_linear, mlp_gaussian };
/// baseline conditions on the target history only, augmented adds the
/// source history.
enum class Conditioning { baseline, augmented };

const char* to_string(ModelKind kind) noexcept;
const char* to_string(Conditioning c) noexcept;
ModelKind parse_model_kind(const std::string& s);

/// Diagonal or full covariance of a Gaussian prediction.
class Covariance {
 public:
  Covariance() = default;
  static Covariance diagonal(Eigen::VectorXd variances);
  static Covariance full(Eigen::MatrixXd matrix);

  bool is_diagonal() const noexcept { return diagonal_; }
  Eigen::Index dim() const noexcept { return diagonal_ ? diag_.size() : full_.rows(); }
  const Eigen::VectorXd& variances() const noexcept { return diag_; }
  const Eigen::MatrixXd& matrix() const noexcept { return full_; }

  /// ln|Σ|. Throws a numeric error unless Σ is positive definite.
  double log_det() const;
  /// rᵀ Σ⁻¹ r.
  double mahalanobis(const Eigen::VectorXd& r) const;
  Covariance scaled(double k) const;

 private:
  bool diagonal_ = true;
  Eigen::VectorXd diag_;
  Eigen::MatrixXd full_;
};

struct GaussianPrediction {
  Eigen::VectorXd mean;
  Covariance cov;
  double t = 0.0;
};

/// ln N(x; mean, cov).
double log_density(const GaussianPrediction& p, const Eigen::VectorXd& x);

/// Affine predictor `mean = intercept + coefᵀ h` with constant covariance.
struct VarParams {
  Eigen::VectorXd intercept;  // D
  Eigen::MatrixXd coef;       // input_dim x D
  Eigen::MatrixXd cov;        // D x D
};

/// Network weights plus the input/output standardization it was trained in.
struct MlpParams {
  MlpArch arch;
  Eigen::VectorXd weights;
  Eigen::VectorXd in_mean, in_scale;
  Eigen::VectorXd out_mean, out_scale;
};

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  int batch_size = 256;
  std::uint64_t seed = 42;
};

struct TrainReport {
  double final_nll = 0.0;
  long iterations = 0;
  bool rank_deficient = false;
};

class FittedModel {
 public:
  static FittedModel make_var(Conditioning conditioning, VarParams params,
                              TrainReport report = {});
  static FittedModel make_mlp(Conditioning conditioning, MlpParams params,
                              std::uint64_t seed, TrainReport report = {});

  ModelKind kind() const noexcept {
    return std::holds_alternative<VarParams>(params_) ? ModelKind::var_linear
                                                      : ModelKind::mlp_gaussian;
  }
  Conditioning conditioning() const noexcept { return conditioning_; }
  int input_dim() const noexcept { return input_dim_; }
  int output_dim() const noexcept { return output_dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const TrainReport& report() const noexcept { return report_; }
  const VarParams& var() const { return std::get<VarParams>(params_); }
  const MlpParams& mlp() const { return std::get<MlpParams>(params_); }

 private:
  FittedModel() = default;

  Conditioning conditioning_ = Conditioning::baseline;
  int input_dim_ = 0;
  int output_dim_ = 0;
  std::uint64_t seed_ = 0;
  TrainReport report_;
  std::variant<VarParams, MlpParams> params_;
};

/// Model inputs for a conditioning: target history, or target history
/// followed by source history.
Eigen::MatrixXd model_inputs(const EmbeddedDataset& ds, Conditioning conditioning);

/// Least squares with an unpenalized intercept and ridge
/// λ = 1e-6 · trace(XᵀX) / p on the slopes. Covariance is the residual
/// (maximum likelihood) covariance plus the variance floor.
FittedModel fit_var(const EmbeddedDataset& ds, Conditioning conditioning);

/// Heteroscedastic network trained by mini-batch Adam on the Gaussian NLL.
/// Inputs and targets are standardized internally. Deterministic per seed.
FittedModel fit_mlp(const EmbeddedDataset& ds, Conditioning conditioning, const MlpArch& arch,
                    const TrainConfig& train);

/// One prediction per row. `times` may be empty (row index is used).
std::vector<GaussianPrediction> predict(const FittedModel& model, const Eigen::MatrixXd& rows,
                                        std::span<const double> times = {});

/// Mean negative log-likelihood of `targets` under the model's predictions.
double mean_nll(const FittedModel& model, const Eigen::MatrixXd& inputs,
                const Eigen::MatrixXd& targets);

struct GradientProbe {
  int input_dim = 3;
  int output_dim = 2;
  int rows = 16;
  std::uint64_t seed = 1;
  bool zero_init = false;
};

/// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-7) over all
/// network parameters; numeric gradients use central differences, h = 1e-5.
double gradient_check(const MlpArch& arch, const GradientProbe& probe = {});

std::string model_to_text(const FittedModel& model);
FittedModel model_from_text(const std::string& text);
void save_model(const FittedModel& model, const std::filesystem::path& path);
FittedModel load_model(const std::filesystem::path& path);

}  // namespace tecue
