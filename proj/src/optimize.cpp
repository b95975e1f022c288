#include "cmh/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "cmh/error.hpp"

namespace cmh {

namespace {

double objective(const TargetModel& model, const Vector& beta) {
  const double f = neg_log_post(model, beta);
  if (std::isnan(f)) throw Error(ErrorKind::NonFiniteObjective, "objective evaluated to NaN");
  return f;
}

// f(b) − f(a) as the integral of ∇f·(b − a) along the segment, by 3-point
// Gauss-Legendre. Near the optimum the direct difference is below the rounding
// of f while the gradients are still accurate.
double objective_change(const TargetModel& model, const Vector& a, const Vector& b) {
  const Vector delta = b - a;
  const double half_spread = 0.5 * std::sqrt(0.6);
  const double nodes[3] = {0.5 - half_spread, 0.5, 0.5 + half_spread};
  const double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  double change = 0.0;
  for (int i = 0; i < 3; ++i) change += weights[i] * grad_neg_log_post(model, a + nodes[i] * delta).dot(delta);
  return change;
}

}  // namespace

ModeResult find_mode(const TargetModel& model, const Vector& init, double tol, int max_iter) {
  if (model.kind() == ModelKind::RwmExample) {
    throw Error(ErrorKind::UnsupportedModel, "mode finding requires a convex target");
  }
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  if (init.size() != model.dim()) throw Error(ErrorKind::DimensionMismatch, "initial point dimension");

  ModeResult result;
  Vector x = init;
  double f_direct = objective(model, x);
  if (!std::isfinite(f_direct)) {
    throw Error(ErrorKind::NonFiniteObjective, "objective is not finite at the initial point");
  }
  double f = f_direct;
  Vector g = grad_neg_log_post(model, x);
  double gnorm = g.norm();
  result.objective_history.push_back(f);

  double trial = 1.0 / std::max(1.0, gnorm);
  int iter = 0;
  while (gnorm > tol && iter < max_iter) {
    double step = trial;
    bool accepted = false;
    Vector x_new;
    double f_new_direct = f_direct;
    double change = 0.0;
    while (step > 1e-300) {
      x_new = x - step * g;
      f_new_direct = objective(model, x_new);
      if (std::isfinite(f_new_direct)) {
        change = f_new_direct - f_direct;
        if (std::abs(change) <= 1e-10 * (1.0 + std::abs(f_direct))) change = objective_change(model, x, x_new);
        if (change <= -kArmijoConstant * step * gnorm * gnorm) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Vector g_new = grad_neg_log_post(model, x_new);
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    trial = sy > 0.0 ? std::min(s.squaredNorm() / sy, 1e6) : 2.0 * step;

    x = std::move(x_new);
    g = std::move(g_new);
    f_direct = f_new_direct;
    f += change;
    gnorm = g.norm();
    ++iter;
    result.objective_history.push_back(f);
  }

  result.beta_star = std::move(x);
  result.f_star = f_direct;
  result.grad_norm = gnorm;
  result.iterations = iter;
  result.converged = gnorm <= tol;
  return result;
}

DominanceReport verify_dominance(const TargetModel& model, const ModeResult& mode,
                                 const GaussianSpec& proposal, int probes, Rng& rng) {
  const Vector& center = mode.beta_star;
  if (proposal.dim() != center.size() || model.dim() != center.size()) {
    throw Error(ErrorKind::DimensionMismatch, "proposal, model and mode dimensions differ");
  }
  const double scale = 1e-12 * (1.0 + center.cwiseAbs().maxCoeff());
  if ((proposal.mean() - center).cwiseAbs().maxCoeff() > scale) {
    throw Error(ErrorKind::MeanMismatch, "proposal is not centered at the mode");
  }
  if (probes < 0) throw Error(ErrorKind::InvalidArgument, "probe count must be non-negative");

  const double alpha = proposal.precision_scale();
  const SpdMatrix& cov = proposal.cov();
  const double f_star = neg_log_post(model, center);

  DominanceReport report;
  const auto probe = [&](Vector theta) {
    const double bound = f_star + 0.5 * alpha * cov.inv_quad(theta, center);
    const double f = neg_log_post(model, theta);
    if (std::isnan(f)) throw Error(ErrorKind::NanFault, "objective is NaN at a dominance probe");
    const double violation = bound - f;
    report.max_violation = std::max(report.max_violation, violation);
    report.probes.push_back({std::move(theta), violation});
  };

  const GaussianSpec inflated(center, cov, alpha / 9.0);
  for (int i = 0; i < probes; ++i) probe(gauss_sample(inflated, rng));
  for (double radius : {1.0, 10.0, 100.0}) {
    for (Eigen::Index i = 0; i < center.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector theta = center;
        theta[i] += sign * radius;
        probe(std::move(theta));
      }
    }
  }
  report.pass = report.max_violation <= kDominanceTolerance;
  return report;
}

}  // namespace cmh
