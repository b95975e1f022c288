#include "cmh/spd_gaussian.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "cmh/error.hpp"

namespace cmh {

SpdMatrix::SpdMatrix(Matrix entries, Matrix lower)
    : entries_(std::move(entries)), lower_(std::move(lower)) {
  log_det_ = 2.0 * lower_.diagonal().array().log().sum();
  inv_lower_ = lower_.triangularView<Eigen::Lower>().solve(Matrix::Identity(dim(), dim()));
}

SpdMatrix SpdMatrix::factor(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "SPD matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw Error(ErrorKind::NotSymmetric, "matrix is not symmetric");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotSpd, "Cholesky factorization failed: matrix is not positive definite");
  }
  Matrix lower = llt.matrixL();
  for (Eigen::Index i = 0; i < lower.rows(); ++i) {
    const double pivot = lower(i, i) * lower(i, i);
    if (!(pivot >= kPivotFloor)) {
      throw Error(ErrorKind::NotSpd, "Cholesky pivot below 1e-14");
    }
  }
  return SpdMatrix(sym, std::move(lower));
}

SpdMatrix SpdMatrix::identity(Eigen::Index dim) { return scaled_identity(dim, 1.0); }

SpdMatrix SpdMatrix::scaled_identity(Eigen::Index dim, double scale) {
  return factor(Matrix::Identity(dim, dim) * scale);
}

SpdMatrix SpdMatrix::diagonal(const Vector& diag) { return factor(diag.asDiagonal().toDenseMatrix()); }

Vector SpdMatrix::solve_lower(const Vector& v) const {
  if (v.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "solve: dimension mismatch");
  return lower_.triangularView<Eigen::Lower>().solve(v);
}

Vector SpdMatrix::solve(const Vector& v) const {
  return lower_.transpose().triangularView<Eigen::Upper>().solve(solve_lower(v));
}

double SpdMatrix::inv_quad(const Vector& v) const {
  if (v.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "inv_quad: dimension mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j <= i; ++j) row += inv_lower_(i, j) * v[j];
    total += row * row;
  }
  return total;
}

double SpdMatrix::inv_quad(const Vector& v, const Vector& shift) const {
  if (v.size() != dim() || shift.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "inv_quad: dimension mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j <= i; ++j) row += inv_lower_(i, j) * (v[j] - shift[j]);
    total += row * row;
  }
  return total;
}

GaussianSpec::GaussianSpec(Vector mean, SpdMatrix cov, double precision_scale)
    : mean_(std::move(mean)), cov_(std::move(cov)), precision_scale_(precision_scale) {
  if (mean_.size() != cov_.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "Gaussian mean and covariance dimensions differ");
  }
  if (!(precision_scale_ > 0.0) || !std::isfinite(precision_scale_)) {
    throw Error(ErrorKind::InvalidArgument, "precision scale must be positive and finite");
  }
}

double GaussianSpec::log_det_cov() const {
  return cov_.log_det() - static_cast<double>(dim()) * std::log(precision_scale_);
}

double gauss_log_kernel(const Vector& x, const GaussianSpec& spec) {
  if (x.size() != spec.dim()) throw Error(ErrorKind::DimensionMismatch, "Gaussian density: dimension mismatch");
  return -0.5 * spec.precision_scale() * spec.cov().inv_quad(x, spec.mean());
}

double gauss_logpdf(const Vector& x, const GaussianSpec& spec) {
  const double d = static_cast<double>(spec.dim());
  const double kernel = gauss_log_kernel(x, spec);
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * spec.log_det_cov() + kernel;
}

Vector gauss_sample(const GaussianSpec& spec, Rng& rng) {
  Vector out = rng.normal_vector(spec.dim());
  const Matrix& lower = spec.cov().lower();
  const double scale = 1.0 / std::sqrt(spec.precision_scale());
  // out_i = Σ_{j≤i} L_ij z_j only reads entries at or above row i, so the
  // product can overwrite z from the bottom up.
  for (Eigen::Index i = out.size() - 1; i >= 0; --i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j <= i; ++j) row += lower(i, j) * out[j];
    out[i] = spec.mean()[i] + scale * row;
  }
  return out;
}

}  // namespace cmh
