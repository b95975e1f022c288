#include <doctest.h>

#include "cmh/datagen.hpp"
#include "cmh/error.hpp"
#include "cmh/optimize.hpp"
#include "cmh/rng.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace cmh;

namespace {

TargetModel desk(ModelKind kind, std::uint64_t seed, Eigen::Index n = 100, Eigen::Index d = 5) {
  GenConfig cfg;
  cfg.kind = kind;
  cfg.n = n;
  cfg.d = d;
  cfg.cov = parse_cov_spec("scaled:1");
  cfg.seed = seed;
  return TargetModel::glm(kind, generate(cfg).data, cfg.alpha, cfg.cov.build(d));
}

}  // namespace

TEST_CASE("quadratic mode") {
  const auto m = TargetModel::gaussian(SpdMatrix::identity(3));
  const ModeResult r = find_mode(m, Vector::Constant(3, 5.0));
  CHECK(r.converged);
  CHECK(r.beta_star.norm() < 1e-8);
  CHECK(r.grad_norm <= 1e-8);
}

TEST_CASE("logistic all-zero responses push the mode negative") {
  for (Eigen::Index d : {2, 4}) {
    const Dataset ds{Matrix::Identity(d, d), Vector::Zero(d)};
    const auto m = TargetModel::glm(ModelKind::Logistic, ds, 1.0, SpdMatrix::identity(d));
    const ModeResult r = find_mode(m, Vector::Zero(d));
    REQUIRE(r.converged);
    CHECK((r.beta_star.array() < 0).all());
    const Vector newton = oracle::logistic_mode_newton(ds.x, ds.y, 1.0, Matrix::Identity(d, d));
    CHECK((r.beta_star - newton).norm() < 1e-7);
  }
}

TEST_CASE("logistic desk mode agrees with Newton") {
  GenConfig cfg;
  cfg.n = 200;
  cfg.d = 2;
  cfg.sigma2 = 200;
  cfg.seed = 31;
  const Dataset ds = generate(cfg).data;
  Matrix c(2, 2);
  c << 1, 0.4, 0.4, 2;
  const auto m = TargetModel::glm(ModelKind::Logistic, ds, 0.5, SpdMatrix::factor(c));
  const ModeResult r = find_mode(m, Vector::Zero(2));
  REQUIRE(r.converged);
  CHECK((r.beta_star - oracle::logistic_mode_newton(ds.x, ds.y, 0.5, c)).norm() < 1e-7);
}

TEST_CASE("restarts agree and descent is monotone") {
  Rng rng(41);
  for (ModelKind kind : {ModelKind::Logistic, ModelKind::Probit, ModelKind::Poisson, ModelKind::NegBinom}) {
    CAPTURE(model_kind_name(kind));
    const auto m = desk(kind, 50 + static_cast<int>(kind));
    std::vector<double> fs;
    for (int i = 0; i < 10; ++i) {
      const Vector init = rng.normal_vector(5) * 2.0;
      const ModeResult r = find_mode(m, init);
      CHECK(r.converged);
      CHECK(r.f_star <= neg_log_post(m, init));
      CHECK(r.objective_history.front() == neg_log_post(m, init));
      for (std::size_t k = 1; k < r.objective_history.size(); ++k)
        CHECK(r.objective_history[k] <= r.objective_history[k - 1]);
      fs.push_back(r.f_star);
    }
    for (double f : fs) CHECK(std::abs(f - fs.front()) < 1e-6);
  }
}

TEST_CASE("mode optimality under small perturbations") {
  const auto m = desk(ModelKind::Probit, 61);
  const ModeResult r = find_mode(m, Vector::Zero(5));
  Rng rng(62);
  for (int i = 0; i < 100; ++i) {
    Vector delta = rng.normal_vector(5);
    delta *= 0.1 * rng.uniform() / delta.norm();
    CHECK(neg_log_post(m, r.beta_star + delta) >= r.f_star - 1e-9);
  }
}

TEST_CASE("non-convergence is reported, rwm is refused") {
  const auto m = desk(ModelKind::Logistic, 70);
  const ModeResult r = find_mode(m, Vector::Constant(5, 3.0), 1e-8, 2);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 2);
  CHECK_THROWS_AS(find_mode(TargetModel::rwm_example(), Vector::Zero(2)), Error);
}

TEST_CASE("dominance on the equality case and the over-concentrated case") {
  const auto m = TargetModel::gaussian(SpdMatrix::identity(2));
  const ModeResult r = find_mode(m, Vector::Ones(2));
  Rng rng(80);
  const GaussianSpec exact(r.beta_star, SpdMatrix::identity(2), 1.0);
  const DominanceReport ok = verify_dominance(m, r, exact, 200, rng);
  CHECK(ok.pass);
  CHECK(ok.max_violation < 1e-12);
  CHECK(ok.probes.size() == 200 + 2 * 2 * 3);

  const GaussianSpec tight(r.beta_star, SpdMatrix::identity(2), 2.0);
  const DominanceReport bad = verify_dominance(m, r, tight, 200, rng);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_violation > 1.0);

  const GaussianSpec off(r.beta_star + Vector::Constant(2, 1e-3), SpdMatrix::identity(2), 1.0);
  try {
    verify_dominance(m, r, off, 10, rng);
    FAIL("expected MeanMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MeanMismatch);
  }
}

TEST_CASE("dominance on desk GLMs and its weight formulation") {
  for (ModelKind kind : {ModelKind::Logistic, ModelKind::Probit, ModelKind::Poisson}) {
    CAPTURE(model_kind_name(kind));
    const auto m = desk(kind, 90 + static_cast<int>(kind));
    const ModeResult r = find_mode(m, Vector::Zero(5));
    const GaussianSpec q(r.beta_star, m.prior_cov(), m.prior_alpha());
    Rng rng(91);
    const DominanceReport rep = verify_dominance(m, r, q, 500, rng);
    CHECK(rep.pass);
    // log q(θ) − log π̃(θ) ≥ log q(β*) − log π̃(β*) iff the probe does not violate.
    const double base = gauss_logpdf(r.beta_star, q) + r.f_star;
    for (const auto& p : rep.probes) {
      const double w = gauss_logpdf(p.theta, q) + neg_log_post(m, p.theta);
      const double gap = w - base;
      CHECK(gap == doctest::Approx(-p.violation).epsilon(1e-9).scale(std::abs(r.f_star) + 1));
      CHECK((gap >= -1e-8) == (p.violation <= 1e-8));
    }
  }
}
