#include "cmh/rates.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "cmh/error.hpp"
#include "cmh/parallel.hpp"
#include "running_stats.hpp"

namespace cmh {

std::string_view metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::L1: return "l1";
    case Metric::L2: return "l2";
    case Metric::Linf: return "linf";
    case Metric::Tv: return "tv";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (auto m : {Metric::L1, Metric::L2, Metric::Linf, Metric::Tv}) {
    if (metric_name(m) == name) return m;
  }
  throw Error(ErrorKind::UnknownKind, "unknown metric '" + std::string(name) + "'");
}

Norm parse_norm(std::string_view name) {
  if (name == "l1") return Norm::L1;
  if (name == "l2") return Norm::L2;
  if (name == "linf") return Norm::Linf;
  throw Error(ErrorKind::UnknownKind, "unknown norm '" + std::string(name) + "'");
}

double distance(Metric metric, const Vector& a, const Vector& b) {
  switch (metric) {
    case Metric::L1: return (a - b).lpNorm<1>();
    case Metric::L2: return (a - b).norm();
    case Metric::Linf: return (a - b).lpNorm<Eigen::Infinity>();
    case Metric::Tv: return a == b ? 0.0 : 1.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

CertifiedKernel CertifiedKernel::certify(const MhKernel& kernel, const ModeResult& mode, int probes, Rng& rng) {
  const GaussianSpec& spec = kernel.independence_spec();
  DominanceReport report = verify_dominance(kernel.target(), mode, spec, probes, rng);
  if (!report.pass) {
    throw Error(ErrorKind::DominanceNotVerified,
                "dominance condition violated (max violation " + std::to_string(report.max_violation) +
                    "); refusing to certify a rate");
  }
  return CertifiedKernel(kernel, mode, std::move(report));
}

Estimate estimate_epsilon_mc(const CertifiedKernel& certified, int m, Rng& rng) {
  if (m < 1000) throw Error(ErrorKind::InvalidArgument, "epsilon estimate needs at least 1000 draws");
  const MhKernel& kernel = certified.kernel();
  const GaussianSpec& spec = kernel.independence_spec();
  const TargetModel& target = kernel.target();
  const Vector& center = spec.mean();
  const double log_w_star = -neg_log_post(target, center) - gauss_log_kernel(center, spec);
  detail::RunningStats stats;
  for (int i = 0; i < m; ++i) {
    const Vector theta = gauss_sample(spec, rng);
    const double log_w = -neg_log_post(target, theta) - gauss_log_kernel(theta, spec);
    stats.push(std::exp(log_w - log_w_star));
  }
  return stats.estimate();
}

namespace {

// Tensor-product trapezoid rule on [center−h, center+h]^d for d ∈ {1, 2}.
// fn receives the node and returns the integrand value (a double or a
// fixed-size Eigen array for several integrands at once).
template <class Fn>
auto trapezoid(const Vector& center, GridSpec grid, Fn&& fn) {
  using Value = decltype(fn(center));
  const auto d = center.size();
  if (d > 2) throw Error(ErrorKind::DimensionTooLarge, "quadrature supports d <= 2");
  if (grid.points < 3 || !(grid.half_width > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "quadrature grid needs >= 3 points and positive half width");
  }
  const double step = 2.0 * grid.half_width / (grid.points - 1);
  const auto node = [&](int k, Eigen::Index axis) { return center[axis] - grid.half_width + k * step; };
  const auto weight = [&](int k) { return (k == 0 || k == grid.points - 1) ? 0.5 : 1.0; };
  const auto zero = [] {
    if constexpr (std::is_arithmetic_v<Value>) return Value(0);
    else return Value(Value::Zero());
  };
  Vector theta = center;
  Value total = zero();
  if (d == 1) {
    for (int i = 0; i < grid.points; ++i) {
      theta[0] = node(i, 0);
      total += weight(i) * fn(theta);
    }
    return Value(total * step);
  }
  for (int i = 0; i < grid.points; ++i) {
    theta[0] = node(i, 0);
    Value row = zero();
    for (int j = 0; j < grid.points; ++j) {
      theta[1] = node(j, 1);
      row += weight(j) * fn(theta);
    }
    total += weight(i) * row;
  }
  return Value(total * (step * step));
}

GridSpec doubled(GridSpec grid) { return {grid.half_width, 2 * grid.points - 1}; }

void check_refinement(double coarse, double fine, const char* what) {
  if (std::abs(fine - coarse) > 1e-6 * std::abs(fine)) {
    throw Error(ErrorKind::GridTooCoarse, std::string(what) + ": doubling the grid changed the result by more than 1e-6");
  }
}

// Z_Π·exp(f(center)) = ∫ exp(−(f(θ) − f(center))) dθ
double scaled_normalizer(const TargetModel& model, const Vector& center, GridSpec grid) {
  const double f_center = neg_log_post(model, center);
  return trapezoid(center, grid, [&](const Vector& theta) { return std::exp(f_center - neg_log_post(model, theta)); });
}

}  // namespace

double epsilon_quadrature(const TargetModel& model, const MhKernel& kernel, GridSpec grid) {
  if (model.dim() > 2) throw Error(ErrorKind::DimensionTooLarge, "epsilon quadrature supports d <= 2");
  const GaussianSpec& spec = kernel.independence_spec();
  const Vector& center = spec.mean();
  const double log_q_center = gauss_logpdf(center, spec);
  const double coarse = std::exp(log_q_center) * scaled_normalizer(model, center, grid);
  const double fine = std::exp(log_q_center) * scaled_normalizer(model, center, doubled(grid));
  check_refinement(coarse, fine, "epsilon quadrature");
  return coarse;
}

double lambda_max_gram(const Matrix& x) {
  constexpr int kMaxIter = 100'000;
  constexpr double kTol = 1e-10;
  const auto d = x.cols();
  if (d == 0 || x.rows() == 0) return 0.0;

  // Form the Gram matrix only while it is small; otherwise apply X then Xᵀ.
  const bool form_gram = static_cast<double>(x.rows()) * static_cast<double>(d) <= 1e6;
  Matrix gram;
  if (form_gram) {
    gram = Matrix::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  }
  const auto apply = [&](const Vector& v) -> Vector {
    if (form_gram) return gram * v;
    return x.transpose() * (x * v);
  };

  Rng rng(0x5eed'cafe'f00dULL);
  Vector v = rng.normal_vector(d).normalized();
  double rayleigh = 0.0;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Vector w = apply(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (iter > 0 && std::abs(next - rayleigh) <= kTol * std::abs(next)) return next;
    rayleigh = next;
  }
  throw Error(ErrorKind::PowerIterationStalled, "power iteration did not converge in 1e5 iterations");
}

GlmEpsilonBound epsilon_lower_bound_glm(const Dataset& data, double alpha, const SpdMatrix& cov, double r0) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  if (!(r0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "r0 must be positive");
  if (cov.dim() != data.d()) throw Error(ErrorKind::DimensionMismatch, "prior covariance dimension");
  GlmEpsilonBound bound;
  bound.lambda_max = lambda_max_gram(data.x);
  bound.trace_cov = cov.trace();
  bound.a_dn = r0 / (2.0 * alpha) * bound.lambda_max * bound.trace_cov;
  bound.epsilon_lb = std::exp(-bound.a_dn);
  return bound;
}

std::vector<RatePoint> exact_rate_series(double epsilon, double mean_rho, int t_max, Metric metric) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1]");
  if (!(mean_rho >= 0.0)) throw Error(ErrorKind::InvalidArgument, "mean_rho must be non-negative");
  if (t_max < 0) throw Error(ErrorKind::InvalidArgument, "t_max must be non-negative");
  if (metric == Metric::Tv) mean_rho = 1.0;
  std::vector<RatePoint> series;
  series.reserve(static_cast<std::size_t>(t_max) + 1);
  for (int t = 0; t <= t_max; ++t) series.push_back({t, std::pow(1.0 - epsilon, t) * mean_rho, {}, {}});
  return series;
}

Estimate mean_rho_quadrature(const TargetModel& model, const ModeResult& mode, Metric metric, GridSpec grid) {
  if (metric == Metric::Tv) return {1.0, 0.0};
  if (model.dim() > 2) throw Error(ErrorKind::DimensionTooLarge, "mean_rho quadrature supports d <= 2");
  const Vector& center = mode.beta_star;
  const double f_center = neg_log_post(model, center);
  const auto evaluate = [&](GridSpec g) {
    const Eigen::Array2d sums = trapezoid(center, g, [&](const Vector& theta) {
      const double density = std::exp(f_center - neg_log_post(model, theta));
      return Eigen::Array2d(distance(metric, theta, center) * density, density);
    });
    return sums[0] / sums[1];
  };
  // The distance has a kink at the center node, so the trapezoid error is
  // O(h²) rather than spectral; one Richardson step removes that term.
  const double coarse = evaluate(grid);
  const double fine = evaluate(doubled(grid));
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

Estimate mean_rho_long_chain(const CertifiedKernel& certified, Metric metric, const LongChainSpec& spec) {
  if (metric == Metric::Tv) return {1.0, 0.0};
  if (spec.t < 2 || spec.replicas < 2) throw Error(ErrorKind::InvalidArgument, "long chain needs t >= 2 and >= 2 replicas");
  const MhKernel& kernel = certified.kernel();
  const Vector& center = certified.mode().beta_star;
  const std::int64_t keep_from = spec.t / 2 + 1;
  std::vector<double> per_replica(static_cast<std::size_t>(spec.replicas));
  parallel_for(per_replica.size(), spec.threads, [&](std::size_t k) {
    Rng rng = Rng::for_stream(spec.seed, k);
    ChainState state = ChainState::at(kernel.target(), center);
    double sum = 0.0;
    for (std::int64_t step = 1; step <= spec.t; ++step) {
      mh_step_inplace(kernel, state, rng);
      if (step >= keep_from) sum += distance(metric, state.position, center);
    }
    per_replica[k] = sum / static_cast<double>(spec.t - keep_from + 1);
  });
  detail::RunningStats stats;
  for (double v : per_replica) stats.push(v);
  return stats.estimate();
}

double density_sup_quadrature(const TargetModel& model, const Vector& center, GridSpec grid) {
  if (model.dim() > 2) throw Error(ErrorKind::DimensionTooLarge, "density sup check supports d <= 2");
  const double f_center = neg_log_post(model, center);
  double best = 0.0;
  const double mass = trapezoid(center, grid, [&](const Vector& theta) {
    const double v = std::exp(f_center - neg_log_post(model, theta));
    best = std::max(best, v);
    return v;
  });
  return best / mass;
}

double wasserstein_lower_bound(double density_bound, int d, double acceptance, int t, Norm norm) {
  if (!(density_bound > 0.0) || !std::isfinite(density_bound)) {
    throw Error(ErrorKind::InvalidBound, "density bound M must be positive and finite");
  }
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  if (!(acceptance >= 0.0 && acceptance <= 1.0)) throw Error(ErrorKind::InvalidArgument, "acceptance must lie in [0, 1]");
  if (t < 0) throw Error(ErrorKind::InvalidArgument, "t must be non-negative");
  const double dd = static_cast<double>(d);
  double norm_constant = 1.0;
  switch (norm) {
    case Norm::L1: norm_constant = 1.0; break;
    case Norm::L2: norm_constant = 1.0 / std::sqrt(dd); break;
    case Norm::Linf: norm_constant = 1.0 / dd; break;
  }
  const double c0 = norm_constant * (1.0 - 1.0 / (1.0 + dd)) /
                    (2.0 * std::pow(density_bound, 1.0 / dd) * std::pow(1.0 + dd, 1.0 / dd));
  return c0 * std::pow(1.0 - acceptance, t * (1.0 + 1.0 / dd));
}

AsymptoticCurve asymptotic_curve(double gamma, double sigma2, double s0, double alpha, double r0, int t_max) {
  for (double v : {gamma, sigma2, s0, alpha, r0}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "curve parameters must be positive");
  }
  if (t_max < 0) throw Error(ErrorKind::InvalidArgument, "t_max must be non-negative");
  AsymptoticCurve curve;
  const double root = 1.0 + std::sqrt(gamma);
  curve.a0 = r0 * root * root * sigma2 * s0 / (2.0 * alpha);
  curve.rate = -std::expm1(-curve.a0);
  curve.series.reserve(static_cast<std::size_t>(t_max) + 1);
  for (int t = 0; t <= t_max; ++t) curve.series.push_back(std::pow(curve.rate, t));
  return curve;
}

}  // namespace cmh
