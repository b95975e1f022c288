#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cmh/spd_gaussian.hpp"

namespace cmh {

enum class ModelKind { GaussianSynthetic, RwmExample, Logistic, Probit, Poisson, NegBinom };

std::string_view model_kind_name(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view name);
bool is_glm(ModelKind kind) noexcept;
bool is_binary(ModelKind kind) noexcept;

// Design matrix (n×d) and responses. n == 0 is the prior-only convention.
struct Dataset {
  Matrix x;
  Vector y;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index d() const { return x.cols(); }

  // Throws InvalidData if responses are inconsistent with the model kind.
  void validate(ModelKind kind) const;
};

// Unnormalized target exp(-f). For the GLM kinds f is the negative
// log-likelihood (β-independent constants dropped) plus the Gaussian prior
// quadratic (α/2)βᵀC⁻¹β. The prior parameters also define the default
// centered proposal N(β*, α⁻¹C).
class TargetModel {
 public:
  static TargetModel glm(ModelKind kind, Dataset data, double prior_alpha, SpdMatrix prior_cov,
                         double nb_xi = 1.0);
  // f(β) = ½βᵀΣ⁻¹β. prior_alpha/prior_cov are the proposal parameters used by
  // centered_mhi.
  static TargetModel gaussian(SpdMatrix sigma, double prior_alpha, SpdMatrix prior_cov);
  static TargetModel gaussian(SpdMatrix sigma);
  // f(x, z) = x² + x²z² + z²
  static TargetModel rwm_example();

  ModelKind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }
  bool has_data() const { return data_ != nullptr; }
  const Dataset& data() const;
  double prior_alpha() const { return prior_alpha_; }
  const SpdMatrix& prior_cov() const { return prior_cov_; }
  double nb_xi() const { return nb_xi_; }
  const SpdMatrix& sigma() const;

 private:
  TargetModel(ModelKind kind, Eigen::Index dim, double prior_alpha, SpdMatrix prior_cov);

  ModelKind kind_;
  Eigen::Index dim_;
  std::shared_ptr<const Dataset> data_;
  double prior_alpha_;
  SpdMatrix prior_cov_;
  double nb_xi_ = 1.0;
  std::optional<SpdMatrix> sigma_;
};

double neg_log_lik(const TargetModel& model, const Vector& beta);
Vector grad_neg_log_lik(const TargetModel& model, const Vector& beta);

// f(β); the negative log of the unnormalized target density.
double neg_log_post(const TargetModel& model, const Vector& beta);
Vector grad_neg_log_post(const TargetModel& model, const Vector& beta);

// vᵀ H_ℓ(β) v by central second differences of the negative log-likelihood
// along unit vector v, step 1e-4.
double curvature_probe(const TargetModel& model, const Vector& beta, const Vector& v);

namespace numerics {

// log(1 + exp(u)) without overflow.
double log1p_exp(double u) noexcept;
// (1 + exp(-u))⁻¹
double sigmoid(double u) noexcept;
// log Φ(u), accurate in the far left tail.
double log_norm_cdf(double u) noexcept;
// φ(u) / Φ(u)
double inv_mills(double u) noexcept;
double norm_cdf(double u) noexcept;

}  // namespace numerics

}  // namespace cmh
