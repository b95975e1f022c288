#pragma once

#include <Eigen/Core>

#include "cmh/rng.hpp"

namespace cmh {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPivotFloor = 1e-14;

// Symmetric positive-definite matrix with its lower Cholesky factor computed
// once at construction. Immutable.
class SpdMatrix {
 public:
  // Throws NotSymmetric / NotSpd.
  static SpdMatrix factor(const Matrix& m);
  static SpdMatrix identity(Eigen::Index dim);
  static SpdMatrix scaled_identity(Eigen::Index dim, double scale);
  static SpdMatrix diagonal(const Vector& diag);

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  const Matrix& lower() const { return lower_; }

  double log_det() const { return log_det_; }
  double trace() const { return entries_.trace(); }

  // entries⁻¹ · v
  Vector solve(const Vector& v) const;
  // lower⁻¹ · v
  Vector solve_lower(const Vector& v) const;
  // vᵀ · entries⁻¹ · v
  double inv_quad(const Vector& v) const;
  // (v − shift)ᵀ · entries⁻¹ · (v − shift), without temporaries.
  double inv_quad(const Vector& v, const Vector& shift) const;

 private:
  SpdMatrix(Matrix entries, Matrix lower);

  Matrix entries_;
  Matrix lower_;
  Matrix inv_lower_;
  double log_det_ = 0.0;
};

// N(mean, cov / precision_scale).
class GaussianSpec {
 public:
  GaussianSpec(Vector mean, SpdMatrix cov, double precision_scale);

  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const SpdMatrix& cov() const { return cov_; }
  double precision_scale() const { return precision_scale_; }

  // log det(cov / precision_scale)
  double log_det_cov() const;

 private:
  Vector mean_;
  SpdMatrix cov_;
  double precision_scale_;
};

// Full log-density including the normalizing constant.
double gauss_logpdf(const Vector& x, const GaussianSpec& spec);
// −(α/2)(x−mean)ᵀC⁻¹(x−mean); the log-density without its normalizer. Ratios
// of proposal densities are formed from this so the constant cancels exactly.
double gauss_log_kernel(const Vector& x, const GaussianSpec& spec);

// mean + precision_scale^{-1/2} · lower · z with z drawn coordinate by
// coordinate from rng.
Vector gauss_sample(const GaussianSpec& spec, Rng& rng);

}  // namespace cmh
