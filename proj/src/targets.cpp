#include "cmh/targets.hpp"

#include <cmath>
#include <numbers>

#include "cmh/error.hpp"

namespace cmh {

namespace numerics {

double log1p_exp(double u) noexcept { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

double sigmoid(double u) noexcept {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double norm_cdf(double u) noexcept { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

namespace {

constexpr double kTailSwitch = -8.0;

// Asymptotic series Σ_k (−1)^k (2k−1)!! / u^{2k} for Φ(u)·(−u)/φ(u), u < −8.
// Terms shrink until k ≈ u²/2, so truncating at the smallest term gives full
// double precision for |u| ≥ 8.
double tail_series(double u) noexcept {
  const double inv_u2 = 1.0 / (u * u);
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = -term * (2.0 * k - 1.0) * inv_u2;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

double log_norm_cdf(double u) noexcept {
  if (std::isnan(u)) return u;
  if (u > 5.0) return std::log1p(-0.5 * std::erfc(u / std::numbers::sqrt2));
  if (u >= kTailSwitch) return std::log(0.5 * std::erfc(-u / std::numbers::sqrt2));
  return -0.5 * u * u - std::log(-u) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(tail_series(u));
}

double inv_mills(double u) noexcept {
  if (std::isnan(u)) return u;
  if (u >= kTailSwitch) {
    const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    return pdf / norm_cdf(u);
  }
  return -u / tail_series(u);
}

}  // namespace numerics

std::string_view model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::GaussianSynthetic: return "gaussian-synthetic";
    case ModelKind::RwmExample: return "rwm-example";
    case ModelKind::Logistic: return "logistic";
    case ModelKind::Probit: return "probit";
    case ModelKind::Poisson: return "poisson";
    case ModelKind::NegBinom: return "negbinom";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto kind : {ModelKind::GaussianSynthetic, ModelKind::RwmExample, ModelKind::Logistic,
                    ModelKind::Probit, ModelKind::Poisson, ModelKind::NegBinom}) {
    if (model_kind_name(kind) == name) return kind;
  }
  throw Error(ErrorKind::UnknownKind, "unknown model kind '" + std::string(name) + "'");
}

bool is_glm(ModelKind kind) noexcept {
  return kind == ModelKind::Logistic || kind == ModelKind::Probit || kind == ModelKind::Poisson ||
         kind == ModelKind::NegBinom;
}

bool is_binary(ModelKind kind) noexcept { return kind == ModelKind::Logistic || kind == ModelKind::Probit; }

void Dataset::validate(ModelKind kind) const {
  if (y.size() != x.rows()) throw Error(ErrorKind::DimensionMismatch, "response length differs from row count");
  if (!x.allFinite()) throw Error(ErrorKind::InvalidData, "design matrix has non-finite entries");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y[i];
    if (is_binary(kind)) {
      if (v != 0.0 && v != 1.0) throw Error(ErrorKind::InvalidData, "binary response must be 0 or 1");
    } else if (!(v >= 0.0) || v != std::floor(v) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidData, "count response must be a non-negative integer");
    }
  }
}

TargetModel::TargetModel(ModelKind kind, Eigen::Index dim, double prior_alpha, SpdMatrix prior_cov)
    : kind_(kind), dim_(dim), prior_alpha_(prior_alpha), prior_cov_(std::move(prior_cov)) {
  if (!(prior_alpha_ > 0.0) || !std::isfinite(prior_alpha_)) {
    throw Error(ErrorKind::InvalidArgument, "prior alpha must be positive and finite");
  }
  if (prior_cov_.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "prior covariance dimension");
}

TargetModel TargetModel::glm(ModelKind kind, Dataset data, double prior_alpha, SpdMatrix prior_cov,
                             double nb_xi) {
  if (!is_glm(kind)) throw Error(ErrorKind::UnknownKind, "not a GLM kind");
  data.validate(kind);
  if (data.d() != prior_cov.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "feature dimension differs from prior dimension");
  }
  if (kind == ModelKind::NegBinom && !(nb_xi > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "negative-binomial xi must be positive");
  }
  const auto dim = data.d();
  TargetModel model(kind, dim, prior_alpha, std::move(prior_cov));
  model.data_ = std::make_shared<const Dataset>(std::move(data));
  model.nb_xi_ = nb_xi;
  return model;
}

TargetModel TargetModel::gaussian(SpdMatrix sigma, double prior_alpha, SpdMatrix prior_cov) {
  const auto dim = sigma.dim();
  TargetModel model(ModelKind::GaussianSynthetic, dim, prior_alpha, std::move(prior_cov));
  model.sigma_ = std::move(sigma);
  return model;
}

TargetModel TargetModel::gaussian(SpdMatrix sigma) {
  const auto dim = sigma.dim();
  return gaussian(std::move(sigma), 1.0, SpdMatrix::identity(dim));
}

TargetModel TargetModel::rwm_example() {
  return TargetModel(ModelKind::RwmExample, 2, 1.0, SpdMatrix::identity(2));
}

const Dataset& TargetModel::data() const {
  if (!data_) throw Error(ErrorKind::ModelHasNoData, std::string(model_kind_name(kind_)) + " has no data");
  return *data_;
}

const SpdMatrix& TargetModel::sigma() const {
  if (!sigma_) throw Error(ErrorKind::UnsupportedModel, "model has no Gaussian covariance");
  return *sigma_;
}

namespace {

void check_dim(const TargetModel& model, const Vector& beta) {
  if (model.kind() == ModelKind::RwmExample && beta.size() != 2) {
    throw Error(ErrorKind::RwmDimension, "rwm example is two-dimensional");
  }
  if (beta.size() != model.dim()) throw Error(ErrorKind::DimensionMismatch, "parameter dimension mismatch");
}

// Per-observation negative log-likelihood as a function of the linear
// predictor u, constants dropped.
double obs_loss(ModelKind kind, double u, double y, double xi) {
  switch (kind) {
    case ModelKind::Logistic: return numerics::log1p_exp(u) - y * u;
    case ModelKind::Probit:
      return y == 1.0 ? -numerics::log_norm_cdf(u) : -numerics::log_norm_cdf(-u);
    case ModelKind::Poisson: return std::exp(u) - y * u;
    case ModelKind::NegBinom: return (y + xi) * numerics::log1p_exp(u) - y * u;
    default: break;
  }
  throw Error(ErrorKind::ModelHasNoData, "model has no likelihood");
}

// d obs_loss / du
double obs_slope(ModelKind kind, double u, double y, double xi) {
  switch (kind) {
    case ModelKind::Logistic: return numerics::sigmoid(u) - y;
    case ModelKind::Probit:
      return y == 1.0 ? -numerics::inv_mills(u) : numerics::inv_mills(-u);
    case ModelKind::Poisson: return std::exp(u) - y;
    case ModelKind::NegBinom: return (y + xi) * numerics::sigmoid(u) - y;
    default: break;
  }
  throw Error(ErrorKind::ModelHasNoData, "model has no likelihood");
}

}  // namespace

double neg_log_lik(const TargetModel& model, const Vector& beta) {
  const Dataset& data = model.data();
  check_dim(model, beta);
  const Vector u = data.x * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) total += obs_loss(model.kind(), u[i], data.y[i], model.nb_xi());
  return total;
}

Vector grad_neg_log_lik(const TargetModel& model, const Vector& beta) {
  const Dataset& data = model.data();
  check_dim(model, beta);
  const Vector u = data.x * beta;
  Vector slope(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) slope[i] = obs_slope(model.kind(), u[i], data.y[i], model.nb_xi());
  return data.x.transpose() * slope;
}

double neg_log_post(const TargetModel& model, const Vector& beta) {
  check_dim(model, beta);
  switch (model.kind()) {
    case ModelKind::GaussianSynthetic: return 0.5 * model.sigma().inv_quad(beta);
    case ModelKind::RwmExample: {
      const double x2 = beta[0] * beta[0];
      const double z2 = beta[1] * beta[1];
      return x2 + x2 * z2 + z2;
    }
    default:
      return neg_log_lik(model, beta) + 0.5 * model.prior_alpha() * model.prior_cov().inv_quad(beta);
  }
}

Vector grad_neg_log_post(const TargetModel& model, const Vector& beta) {
  check_dim(model, beta);
  switch (model.kind()) {
    case ModelKind::GaussianSynthetic: return model.sigma().solve(beta);
    case ModelKind::RwmExample: {
      const double x = beta[0];
      const double z = beta[1];
      Vector g(2);
      g << 2.0 * x * (1.0 + z * z), 2.0 * z * (1.0 + x * x);
      return g;
    }
    default:
      return grad_neg_log_lik(model, beta) + model.prior_alpha() * model.prior_cov().solve(beta);
  }
}

double curvature_probe(const TargetModel& model, const Vector& beta, const Vector& v) {
  constexpr double h = 1e-4;
  const Dataset& data = model.data();
  check_dim(model, beta);
  if (v.size() != beta.size()) throw Error(ErrorKind::DimensionMismatch, "probe direction dimension");
  if (std::abs(v.norm() - 1.0) > 1e-10) throw Error(ErrorKind::InvalidArgument, "probe direction must be a unit vector");
  const Vector u = data.x * beta;
  const Vector s = data.x * v;
  // Accumulate the second difference observation by observation so rounding
  // stays proportional to each term rather than to the full sum.
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const auto loss = [&](double ui) { return obs_loss(model.kind(), ui, data.y[i], model.nb_xi()); };
    total += loss(u[i] + h * s[i]) - 2.0 * loss(u[i]) + loss(u[i] - h * s[i]);
  }
  return total / (h * h);
}

}  // namespace cmh
