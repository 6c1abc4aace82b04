#pragma once

#include "tecue/models.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tecue {

/// src2tgt is source -> target (Y -> X); tgt2src swaps the roles.
enum class Direction { src2tgt, tgt2src };

/// entropy_diff: H(base) - H(full) from the predicted covariances.
/// loglik_ratio: ln p_full(x_t) - ln p_base(x_t) at the observed target.
enum class TeMode { entropy_diff, loglik_ratio };

const char* to_string(Direction d) noexcept;
const char* to_string(TeMode m) noexcept;
Direction parse_direction(const std::string& s);
TeMode parse_te_mode(const std::string& s);

/// Local transfer entropy in nats, one value per evaluation row.
struct TeSeries {
  Direction direction = Direction::src2tgt;
  TeMode mode = TeMode::entropy_diff;
  std::vector<double> t;
  std::vector<double> te_raw;

  std::size_t size() const noexcept { return te_raw.size(); }
  bool empty() const noexcept { return te_raw.empty(); }
};

/// Differential entropy of a Gaussian: D/2 (1 + ln 2π) + ½ ln|Σ|.
double gaussian_entropy(const Covariance& cov);

TeSeries local_te(const std::vector<GaussianPrediction>& base,
                  const std::vector<GaussianPrediction>& full, const Eigen::MatrixXd& targets,
                  TeMode mode, Direction direction = Direction::src2tgt);

/// Arithmetic mean over samples with t in [window.first, window.second].
double mean_te(const TeSeries& series,
               std::optional<std::pair<double, double>> window = std::nullopt);

struct TePeak {
  double t = 0.0;
  double value = 0.0;
};

/// Maximum value; ties go to the earliest timestamp.
TePeak peak_te(const TeSeries& series);

/// Centered moving average over `width` samples (odd, truncated at edges).
TeSeries smooth_te(const TeSeries& series, int width);

}  // namespace tecue
