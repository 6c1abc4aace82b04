#include "tecue/models.hpp"

#include "tecue/error.hpp"
#include "tecue/io.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace tecue {

const char* to_string(ModelKind kind) noexcept {
  return kind == ModelKind::var_linear ? "var_linear" : "mlp_gaussian";
}

const char* to_string(Conditioning c) noexcept {
  return c == Conditioning::baseline ? "baseline" : "augmented";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "var_linear" || s == "var") return ModelKind::var_linear;
  if (s == "mlp_gaussian" || s == "mlp") return ModelKind::mlp_gaussian;
  throw_config("unknown model kind '" + s + "'");
}

// ---------------------------------------------------------------- Covariance

Covariance Covariance::diagonal(Eigen::VectorXd variances) {
  Covariance c;
  c.diagonal_ = true;
  c.diag_ = std::move(variances);
  return c;
}

Covariance Covariance::full(Eigen::MatrixXd matrix) {
  if (matrix.rows() != matrix.cols()) throw_numeric("covariance must be square");
  if (!matrix.isApprox(matrix.transpose(), 1e-12)) throw_numeric("covariance must be symmetric");
  Covariance c;
  c.diagonal_ = false;
  c.full_ = std::move(matrix);
  return c;
}

double Covariance::log_det() const {
  if (diagonal_) {
    if (!(diag_.array() > 0.0).all()) throw_numeric("diagonal covariance has a non-positive entry");
    return diag_.array().log().sum();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(full_);
  if (llt.info() != Eigen::Success) throw_numeric("covariance is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double Covariance::mahalanobis(const Eigen::VectorXd& r) const {
  if (diagonal_) return (r.array().square() / diag_.array()).sum();
  Eigen::LLT<Eigen::MatrixXd> llt(full_);
  if (llt.info() != Eigen::Success) throw_numeric("covariance is not positive definite");
  return r.dot(llt.solve(r));
}

Covariance Covariance::scaled(double k) const {
  return diagonal_ ? diagonal(diag_ * k) : full(full_ * k);
}

double log_density(const GaussianPrediction& p, const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = x - p.mean;
  const double d = static_cast<double>(r.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + p.cov.log_det() + p.cov.mahalanobis(r));
}

// ------------------------------------------------------------------ FittedModel

FittedModel FittedModel::make_var(Conditioning conditioning, VarParams params,
                                  TrainReport report) {
  const auto d = params.intercept.size();
  if (d < 1 || params.coef.cols() != d || params.cov.rows() != d || params.cov.cols() != d) {
    throw_config("inconsistent VAR parameter shapes");
  }
  FittedModel m;
  m.conditioning_ = conditioning;
  m.input_dim_ = static_cast<int>(params.coef.rows());
  m.output_dim_ = static_cast<int>(d);
  m.report_ = report;
  m.params_ = std::move(params);
  return m;
}

FittedModel FittedModel::make_mlp(Conditioning conditioning, MlpParams params,
                                  std::uint64_t seed, TrainReport report) {
  const auto in = params.in_mean.size();
  const auto out = params.out_mean.size();
  GaussianMlp probe(static_cast<int>(in), static_cast<int>(out), params.arch);
  if (probe.param_count() != params.weights.size() || params.in_scale.size() != in ||
      params.out_scale.size() != out) {
    throw_config("inconsistent network parameter shapes");
  }
  FittedModel m;
  m.conditioning_ = conditioning;
  m.input_dim_ = static_cast<int>(in);
  m.output_dim_ = static_cast<int>(out);
  m.seed_ = seed;
  m.report_ = report;
  m.params_ = std::move(params);
  return m;
}

Eigen::MatrixXd model_inputs(const EmbeddedDataset& ds, Conditioning conditioning) {
  return conditioning == Conditioning::baseline ? ds.target_hist : ds.joint_hist();
}

// ------------------------------------------------------------------------- VAR

FittedModel fit_var(const EmbeddedDataset& ds, Conditioning conditioning) {
  const Eigen::MatrixXd x = model_inputs(ds, conditioning);
  const Eigen::MatrixXd& y = ds.targets;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n <= p + 1) {
    throw_data("VAR fit needs more than " + std::to_string(p + 1) + " rows, got " +
               std::to_string(n));
  }
  if (!x.allFinite() || !y.allFinite()) throw_data("VAR fit input contains non-finite values");

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::MatrixXd yc = y.rowwise() - y_mean;

  Eigen::MatrixXd gram = xc.transpose() * xc;
  TrainReport report;
  report.iterations = 1;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    report.rank_deficient = !(hi > 0.0) || lo <= 1e-12 * hi;
  }
  const double lambda = std::max(1e-6 * x.squaredNorm() / static_cast<double>(p), 1e-12);
  gram.diagonal().array() += lambda;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw_numeric("VAR normal equations could not be factored");
  VarParams params;
  params.coef = ldlt.solve(xc.transpose() * yc);
  params.intercept = (y_mean - x_mean * params.coef).transpose();

  const Eigen::MatrixXd resid = yc - xc * params.coef;
  params.cov = resid.transpose() * resid / static_cast<double>(n);
  params.cov = 0.5 * (params.cov + params.cov.transpose());
  params.cov.diagonal().array() += kVarianceFloor;

  auto model = FittedModel::make_var(conditioning, std::move(params), report);
  report.final_nll = mean_nll(model, x, y);
  return FittedModel::make_var(conditioning, model.var(), report);
}

// ------------------------------------------------------------------------- MLP

namespace {

struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  std::vector<bool> constant;
};

Scaler fit_scaler(const Eigen::MatrixXd& m) {
  Scaler s;
  s.mean = m.colwise().mean().transpose();
  s.scale.resize(m.cols());
  s.constant.assign(static_cast<std::size_t>(m.cols()), false);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double var = (m.col(j).array() - s.mean[j]).square().mean();
    const double sd = std::sqrt(var);
    s.constant[static_cast<std::size_t>(j)] = !(sd > 1e-12 * std::max(1.0, std::abs(s.mean[j])));
    s.scale[j] = s.constant[static_cast<std::size_t>(j)] ? 1.0 : sd;
  }
  return s;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& m, const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& scale) {
  return ((m.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array())
      .matrix();
}

Eigen::VectorXd z_floor(const Eigen::VectorXd& out_scale) {
  return (kVarianceFloor / out_scale.array().square()).matrix();
}

}  // namespace

FittedModel fit_mlp(const EmbeddedDataset& ds, Conditioning conditioning, const MlpArch& arch,
                    const TrainConfig& train) {
  if (train.epochs < 0 || train.batch_size < 1 || !(train.learning_rate > 0.0)) {
    throw_config("invalid training configuration");
  }
  const Eigen::MatrixXd x = model_inputs(ds, conditioning);
  const Eigen::MatrixXd& y = ds.targets;
  if (x.rows() < 2) throw_data("network fit needs at least 2 rows");
  if (!x.allFinite() || !y.allFinite()) throw_data("network fit input contains non-finite values");

  const Scaler in = fit_scaler(x);
  const Scaler out = fit_scaler(y);
  const Eigen::MatrixXd xz = standardize(x, in.mean, in.scale);
  const Eigen::MatrixXd yz = standardize(y, out.mean, out.scale);
  const Eigen::VectorXd floor = z_floor(out.scale);

  GaussianMlp net(static_cast<int>(x.cols()), static_cast<int>(y.cols()), arch);
  net.init_glorot(train.seed);

  std::mt19937_64 rng(train.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  Eigen::VectorXd params = net.params();
  Eigen::VectorXd grad;
  AdamState adam;
  long iterations = 0;
  const auto batch = static_cast<std::size_t>(train.batch_size);
  Eigen::MatrixXd xb, yb;
  for (int epoch = 0; epoch < train.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const auto len = static_cast<Eigen::Index>(std::min(batch, order.size() - start));
      xb.resize(len, xz.cols());
      yb.resize(len, yz.cols());
      for (Eigen::Index i = 0; i < len; ++i) {
        const auto row = order[start + static_cast<std::size_t>(i)];
        xb.row(i) = xz.row(row);
        yb.row(i) = yz.row(row);
      }
      net.set_params(params);
      const double nll = net.loss(xb, yb, floor, &grad);
      if (!std::isfinite(nll) || !grad.allFinite()) {
        throw_numeric("network training diverged at epoch " + std::to_string(epoch) +
                      ", iteration " + std::to_string(iterations) + " (batch NLL " +
                      std::to_string(nll) + ")");
      }
      adam_update(params, grad, adam, train.learning_rate);
      ++iterations;
    }
  }
  net.set_params(params);

  TrainReport report;
  report.iterations = iterations;
  report.final_nll = net.loss(xz, yz, floor) + out.scale.array().log().sum();
  if (!std::isfinite(report.final_nll)) throw_numeric("network training produced a non-finite NLL");

  // A zero output scale pins that dimension to its mean at the variance floor.
  Eigen::VectorXd out_scale = out.scale;
  for (Eigen::Index j = 0; j < out_scale.size(); ++j) {
    if (out.constant[static_cast<std::size_t>(j)]) out_scale[j] = 0.0;
  }
  MlpParams mp{arch, params, in.mean, in.scale, out.mean, out_scale};
  return FittedModel::make_mlp(conditioning, std::move(mp), train.seed, report);
}

// -------------------------------------------------------------------- predict

std::vector<GaussianPrediction> predict(const FittedModel& model, const Eigen::MatrixXd& rows,
                                        std::span<const double> times) {
  if (rows.cols() != model.input_dim()) {
    throw_data("prediction input has " + std::to_string(rows.cols()) + " columns, model expects " +
               std::to_string(model.input_dim()));
  }
  if (!times.empty() && times.size() != static_cast<std::size_t>(rows.rows())) {
    throw_data("timestamp count does not match prediction rows");
  }
  std::vector<GaussianPrediction> out(static_cast<std::size_t>(rows.rows()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].t = times.empty() ? static_cast<double>(i) : times[i];
  }

  if (model.kind() == ModelKind::var_linear) {
    const auto& p = model.var();
    const Eigen::MatrixXd means = (rows * p.coef).rowwise() + p.intercept.transpose();
    const Covariance cov = Covariance::full(p.cov);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].mean = means.row(static_cast<Eigen::Index>(i)).transpose();
      out[i].cov = cov;
    }
    return out;
  }

  const auto& p = model.mlp();
  GaussianMlp net(model.input_dim(), model.output_dim(), p.arch);
  net.set_params(p.weights);
  Eigen::MatrixXd mean_z, log_var;
  net.forward(standardize(rows, p.in_mean, p.in_scale), mean_z, log_var);
  const Eigen::ArrayXd s2 = p.out_scale.array().square();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i].mean = p.out_mean.array() + p.out_scale.array() * mean_z.row(r).transpose().array();
    out[i].cov = Covariance::diagonal(
        (s2 * log_var.row(r).transpose().array().exp() + kVarianceFloor).matrix());
  }
  return out;
}

double mean_nll(const FittedModel& model, const Eigen::MatrixXd& inputs,
                const Eigen::MatrixXd& targets) {
  const auto preds = predict(model, inputs);
  if (targets.rows() != inputs.rows()) throw_data("target and input row counts differ");
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    total -= log_density(preds[i], targets.row(static_cast<Eigen::Index>(i)).transpose());
  }
  return total / static_cast<double>(preds.size());
}

// ------------------------------------------------------------- gradient check

double gradient_check(const MlpArch& arch, const GradientProbe& probe) {
  GaussianMlp net(probe.input_dim, probe.output_dim, arch);
  if (probe.zero_init) {
    net.init_zero();
  } else {
    net.init_glorot(probe.seed);
  }
  std::mt19937_64 rng(probe.seed + 17);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(probe.rows, probe.input_dim);
  Eigen::MatrixXd y(probe.rows, probe.output_dim);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = normal(rng);
  const Eigen::VectorXd floor = Eigen::VectorXd::Constant(probe.output_dim, kVarianceFloor);

  Eigen::VectorXd analytic;
  net.loss(x, y, floor, &analytic);

  const double h = 1e-5;
  Eigen::VectorXd params = net.params();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + h;
    net.set_params(params);
    const double up = net.loss(x, y, floor);
    params[k] = saved - h;
    net.set_params(params);
    const double down = net.loss(x, y, floor);
    params[k] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-7});
    const double err = std::abs(analytic[k] - numeric) / denom;
    if (!std::isfinite(err)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, err);
  }
  return worst;
}

// ---------------------------------------------------------------- persistence

namespace {

void write_array(std::ostream& os, const std::string& name, const Eigen::MatrixXd& m) {
  os << "array " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (i > 0) os << ' ';
    os << detail::format_double(m.data()[i]);
  }
  os << '\n';
}

}  // namespace

std::string model_to_text(const FittedModel& model) {
  std::ostringstream os;
  os << "tecue-model 1\n";
  os << "kind " << to_string(model.kind()) << '\n';
  os << "conditioning " << to_string(model.conditioning()) << '\n';
  os << "input_dim " << model.input_dim() << '\n';
  os << "output_dim " << model.output_dim() << '\n';
  os << "seed " << model.seed() << '\n';
  os << "final_nll " << detail::format_double(model.report().final_nll) << '\n';
  os << "iterations " << model.report().iterations << '\n';
  os << "rank_deficient " << (model.report().rank_deficient ? 1 : 0) << '\n';
  if (model.kind() == ModelKind::var_linear) {
    const auto& p = model.var();
    write_array(os, "intercept", p.intercept);
    write_array(os, "coef", p.coef);
    write_array(os, "cov", p.cov);
  } else {
    const auto& p = model.mlp();
    os << "hidden";
    for (int h : p.arch.hidden) os << ' ' << h;
    os << '\n';
    write_array(os, "weights", p.weights);
    write_array(os, "in_mean", p.in_mean);
    write_array(os, "in_scale", p.in_scale);
    write_array(os, "out_mean", p.out_mean);
    write_array(os, "out_scale", p.out_scale);
  }
  return os.str();
}

FittedModel model_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!detail::next_line(in, line) || line != "tecue-model 1") {
    throw_data("not a tecue model file");
  }
  std::map<std::string, std::string> fields;
  std::map<std::string, Eigen::MatrixXd> arrays;
  while (detail::next_line(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "array") {
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      ls >> name >> rows >> cols;
      if (!ls || rows < 0 || cols < 0) throw_data("bad array header in model file");
      std::string values;
      detail::next_line(in, values);
      Eigen::MatrixXd m(rows, cols);
      auto cells = detail::split_csv(values, ' ');
      if (rows * cols == 0) cells.clear();
      if (static_cast<Eigen::Index>(cells.size()) != rows * cols) {
        throw_data("array '" + name + "' has the wrong number of values");
      }
      for (Eigen::Index i = 0; i < rows * cols; ++i) {
        auto v = detail::parse_double(cells[static_cast<std::size_t>(i)]);
        if (!v) throw_data("bad number in array '" + name + "'");
        m.data()[i] = *v;
      }
      arrays[name] = std::move(m);
    } else {
      std::string rest;
      std::getline(ls, rest);
      fields[key] = std::string(detail::trim(rest));
    }
  }
  auto field = [&](const std::string& k) -> const std::string& {
    auto it = fields.find(k);
    if (it == fields.end()) throw_data("model file lacks '" + k + "'");
    return it->second;
  };
  auto array = [&](const std::string& k) -> const Eigen::MatrixXd& {
    auto it = arrays.find(k);
    if (it == arrays.end()) throw_data("model file lacks array '" + k + "'");
    return it->second;
  };

  const std::string& cond_text = field("conditioning");
  Conditioning cond;
  if (cond_text == "baseline") {
    cond = Conditioning::baseline;
  } else if (cond_text == "augmented") {
    cond = Conditioning::augmented;
  } else {
    throw_data("unknown conditioning '" + cond_text + "'");
  }
  TrainReport report;
  report.final_nll = detail::parse_double(field("final_nll")).value_or(0.0);
  report.iterations = std::stol(field("iterations"));
  report.rank_deficient = field("rank_deficient") == "1";
  const std::uint64_t seed = std::stoull(field("seed"));

  FittedModel model = [&] {
    if (parse_model_kind(field("kind")) == ModelKind::var_linear) {
      VarParams p{array("intercept"), array("coef"), array("cov")};
      return FittedModel::make_var(cond, std::move(p), report);
    }
    MlpParams p;
    p.arch.hidden.clear();
    std::istringstream hs(field("hidden"));
    for (int h; hs >> h;) p.arch.hidden.push_back(h);
    p.weights = array("weights");
    p.in_mean = array("in_mean");
    p.in_scale = array("in_scale");
    p.out_mean = array("out_mean");
    p.out_scale = array("out_scale");
    return FittedModel::make_mlp(cond, std::move(p), seed, report);
  }();
  if (model.input_dim() != std::stoi(field("input_dim")) ||
      model.output_dim() != std::stoi(field("output_dim"))) {
    throw_data("model file dimensions disagree with its arrays");
  }
  return model;
}

void save_model(const FittedModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_text(model));
}

FittedModel load_model(const std::filesystem::path& path) {
  return model_from_text(read_text_file(path));
}

}  // namespace tecue
