#include "tecue/transfer_entropy.hpp"

#include "tecue/error.hpp"

#include <cmath>
#include <numbers>

namespace tecue {

const char* to_string(Direction d) noexcept {
  return d == Direction::src2tgt ? "src2tgt" : "tgt2src";
}

const char* to_string(TeMode m) noexcept {
  return m == TeMode::entropy_diff ? "entropy_diff" : "loglik_ratio";
}

Direction parse_direction(const std::string& s) {
  if (s == "src2tgt") return Direction::src2tgt;
  if (s == "tgt2src") return Direction::tgt2src;
  throw_data("unknown direction '" + s + "'");
}

TeMode parse_te_mode(const std::string& s) {
  if (s == "entropy_diff") return TeMode::entropy_diff;
  if (s == "loglik_ratio") return TeMode::loglik_ratio;
  throw_config("unknown TE mode '" + s + "'");
}

double gaussian_entropy(const Covariance& cov) {
  const double d = static_cast<double>(cov.dim());
  return 0.5 * d * (1.0 + std::log(2.0 * std::numbers::pi)) + 0.5 * cov.log_det();
}

TeSeries local_te(const std::vector<GaussianPrediction>& base,
                  const std::vector<GaussianPrediction>& full, const Eigen::MatrixXd& targets,
                  TeMode mode, Direction direction) {
  if (base.size() != full.size()) throw_data("baseline and augmented prediction counts differ");
  if (mode == TeMode::loglik_ratio && targets.rows() != static_cast<Eigen::Index>(base.size())) {
    throw_data("target rows do not match prediction count");
  }
  TeSeries out;
  out.direction = direction;
  out.mode = mode;
  out.t.resize(base.size());
  out.te_raw.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double tol = 1e-9 * std::max(1.0, std::abs(base[i].t));
    if (std::abs(base[i].t - full[i].t) > tol) {
      throw_data("prediction timestamps are not aligned at index " + std::to_string(i));
    }
    out.t[i] = base[i].t;
    if (mode == TeMode::entropy_diff) {
      // The constant terms cancel when the dimensions agree.
      out.te_raw[i] = 0.5 * (base[i].cov.log_det() - full[i].cov.log_det());
    } else {
      const Eigen::VectorXd x = targets.row(static_cast<Eigen::Index>(i)).transpose();
      out.te_raw[i] = log_density(full[i], x) - log_density(base[i], x);
    }
  }
  return out;
}

double mean_te(const TeSeries& series, std::optional<std::pair<double, double>> window) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (window && (series.t[i] < window->first || series.t[i] > window->second)) continue;
    sum += series.te_raw[i];
    ++count;
  }
  if (count == 0) throw_data("mean TE over an empty window");
  return sum / static_cast<double>(count);
}

TePeak peak_te(const TeSeries& series) {
  if (series.empty()) throw_data("peak TE of an empty series");
  TePeak best{series.t[0], series.te_raw[0]};
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series.te_raw[i] > best.value) best = {series.t[i], series.te_raw[i]};
  }
  return best;
}

TeSeries smooth_te(const TeSeries& series, int width) {
  if (width < 1 || width % 2 == 0) throw_config("smoothing width must be a positive odd number");
  TeSeries out = series;
  const auto half = static_cast<std::ptrdiff_t>(width / 2);
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - half);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double sum = 0.0;
    for (auto k = lo; k <= hi; ++k) sum += series.te_raw[static_cast<std::size_t>(k)];
    out.te_raw[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace tecue
