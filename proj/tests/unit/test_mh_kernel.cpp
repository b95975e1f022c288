#include <doctest.h>

#include "cmh/error.hpp"
#include "cmh/mh_kernel.hpp"
#include "cmh/optimize.hpp"
#include "cmh/rng.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace cmh;

namespace {

// d=1 target N(0,1) with centered proposal N(0, 1/alpha).
MhKernel gauss1d(double alpha) {
  const auto m = TargetModel::gaussian(SpdMatrix::identity(1), alpha, SpdMatrix::identity(1));
  return centered_mhi(m, find_mode(m, Vector::Constant(1, 1.0)));
}

}  // namespace

TEST_CASE("centered proposal construction") {
  const MhKernel k = gauss1d(0.25);
  const GaussianSpec& q = k.independence_spec();
  CHECK(q.mean()[0] == 0.0);
  CHECK(q.cov().entries()(0, 0) / q.precision_scale() == doctest::Approx(4.0));

  const auto m = TargetModel::gaussian(SpdMatrix::identity(2));
  ModeResult bad = find_mode(m, Vector::Ones(2));
  bad.converged = false;
  CHECK_THROWS_AS(centered_mhi(m, bad), Error);

  const MhKernel rw = MhKernel::random_walk(TargetModel::rwm_example(), SpdMatrix::identity(2));
  CHECK_FALSE(rw.is_independence());
  CHECK_THROWS_AS(rw.independence_spec(), Error);
}

TEST_CASE("proposal equal to target always accepts") {
  const MhKernel k = gauss1d(1.0);
  Rng rng(1);
  const ChainRun run = run_chain(k, Vector::Zero(1), 100'000, rng);
  CHECK(run.acceptance_rate == 1.0);
  Rng rng2(2);
  const Estimate a = estimate_acceptance(k, Vector::Constant(1, 0.3), 1000, rng2);
  CHECK(a.value == 1.0);
  CHECK(a.std_error == 0.0);
}

TEST_CASE("long-run acceptance equals the stationary average of A") {
  // A(θ*) = 1/2 governs the first step only; over a long chain the rate is
  // ∫∫ π(x) q(y) min(1, w(y)/w(x)) with w = π/q, here w(x) ∝ exp(−3x²/8).
  const MhKernel k = gauss1d(0.25);
  const double q_sd = 2.0;
  const double want = oracle::simpson2(
      [&](double x, double y) {
        return oracle::std_normal_pdf(x) * oracle::std_normal_pdf(y / q_sd) / q_sd *
               std::min(1.0, std::exp(-0.375 * (y * y - x * x)));
      },
      -14, 14, 2800);
  Rng rng(3);
  const ChainRun run = run_chain(k, Vector::Zero(1), 100'000, rng);
  CHECK(std::abs(run.acceptance_rate - want) < 0.01);
  CHECK(run.final.accepts <= run.final.steps);
  CHECK(run.final.log_post == doctest::Approx(-neg_log_post(k.target(), run.final.position)).epsilon(1e-12));
}

TEST_CASE("rejection leaves the state untouched") {
  const MhKernel k = gauss1d(0.25);
  Rng rng(4);
  ChainState s = ChainState::at(k.target(), Vector::Zero(1));
  int rejections = 0;
  for (int i = 0; i < 200 && rejections < 20; ++i) {
    const ChainState before = s;
    const bool accepted = mh_step_inplace(k, s, rng);
    CHECK(s.steps == before.steps + 1);
    if (!accepted) {
      ++rejections;
      CHECK(s.position == before.position);
      CHECK(s.accepts == before.accepts);
      CHECK(s.log_post == before.log_post);
    } else {
      CHECK(s.accepts == before.accepts + 1);
    }
  }
  CHECK(rejections == 20);
}

TEST_CASE("run_chain edge cases and determinism") {
  const MhKernel k = gauss1d(0.25);
  Rng rng(5);
  const ChainRun empty = run_chain(k, Vector::Constant(1, 0.7), 0, rng);
  CHECK(empty.final.position[0] == 0.7);
  CHECK(std::isnan(empty.acceptance_rate));

  Rng a(6), b(6);
  const ChainRun ra = run_chain(k, Vector::Zero(1), 500, a, Record::Trace);
  const ChainRun rb = run_chain(k, Vector::Zero(1), 500, b, Record::Trace);
  REQUIRE(ra.trace.size() == 500);
  for (std::size_t i = 0; i < ra.trace.size(); ++i) {
    CHECK(ra.trace[i].position == rb.trace[i].position);
    CHECK(ra.trace[i].accepted == rb.trace[i].accepted);
  }
}

TEST_CASE("mh_step matches the explicit proposal-then-uniform order") {
  const MhKernel k = gauss1d(0.25);
  Rng a(7), b(7);
  ChainState s = ChainState::at(k.target(), Vector::Constant(1, 1.5));
  for (int i = 0; i < 100; ++i) {
    const Vector prop = k.draw_proposal(s.position, b);
    const double u = b.uniform();
    const bool want = std::log(u) <= log_acceptance(k, s.position, prop);
    const ChainState next = mh_step(k, s, a);
    CHECK((next.accepts == s.accepts + 1) == want);
    CHECK(next.position == (want ? prop : s.position));
    s = next;
  }
}

TEST_CASE("atom mass at the mode is geometric") {
  const MhKernel k = gauss1d(0.25);
  int never = 0;
  const int reps = 10'000;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::for_stream(8, static_cast<std::uint64_t>(r));
    never += !run_chain(k, Vector::Zero(1), 3, rng).ever_accepted;
  }
  CHECK(static_cast<double>(never) / reps == doctest::Approx(0.125).epsilon(0.08));
}

TEST_CASE("detailed balance identity in log space") {
  Rng rng(9);
  const auto target = TargetModel::rwm_example();
  const GaussianSpec q(Vector::Zero(2), SpdMatrix::scaled_identity(2, 2.0), 1.0);
  const MhKernel ind = MhKernel::independence(target, q);
  const MhKernel rw = MhKernel::random_walk(target, SpdMatrix::identity(2));
  for (const MhKernel* k : {&ind, &rw}) {
    for (int i = 0; i < 200; ++i) {
      const Vector x = rng.normal_vector(2) * 2.0;
      const Vector y = rng.normal_vector(2) * 2.0;
      // log q(x→y) for the independence kernel is log q(y); the random walk is symmetric.
      const double lq_xy = k->is_independence() ? gauss_logpdf(y, q) : 0.0;
      const double lq_yx = k->is_independence() ? gauss_logpdf(x, q) : 0.0;
      const double lhs = -neg_log_post(target, x) + lq_xy + log_acceptance(*k, x, y);
      const double rhs = -neg_log_post(target, y) + lq_yx + log_acceptance(*k, y, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
      CHECK(log_acceptance(*k, x, y) <= 0.0);
    }
  }
}

TEST_CASE("acceptance from the mode equals the weight ratio") {
  const auto m = TargetModel::gaussian(SpdMatrix::identity(2), 0.5, SpdMatrix::identity(2));
  const ModeResult mode = find_mode(m, Vector::Ones(2));
  const MhKernel k = centered_mhi(m, mode);
  const GaussianSpec& q = k.independence_spec();
  auto log_w = [&](const Vector& x) { return -neg_log_post(m, x) - gauss_logpdf(x, q); };
  Rng rng(10);
  double worst = -1.0;
  for (int i = 0; i < 10'000; ++i) {
    const Vector p = k.draw_proposal(mode.beta_star, rng);
    const double ratio = log_w(p) - log_w(mode.beta_star);
    worst = std::max(worst, ratio);
    CHECK(log_acceptance(k, mode.beta_star, p) == doctest::Approx(ratio).epsilon(1e-12).scale(1.0));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("degenerate and faulty acceptance branches") {
  const MhKernel k = gauss1d(0.25);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(log_acceptance(k, Vector::Zero(1), -inf, Vector::Ones(1), -1.0) == 0.0);
  CHECK(log_acceptance(k, Vector::Zero(1), 0.0, Vector::Ones(1), -inf) == -inf);
  CHECK_THROWS_AS(log_acceptance(k, Vector::Zero(1), 0.0, Vector::Ones(1), std::nan("")), Error);
}

TEST_CASE("MHI acceptance vanishes along the left tail") {
  const auto target = TargetModel::gaussian(SpdMatrix::identity(1));
  const MhKernel k = MhKernel::independence(
      target, GaussianSpec(Vector::Constant(1, 1.0), SpdMatrix::identity(1), 1.0));
  Rng rng(11);
  double prev = 2.0;
  for (int j = 1; j <= 8; ++j) {
    const Estimate a = estimate_acceptance(k, Vector::Constant(1, -j), 20'000, rng);
    CHECK(a.value < prev);
    prev = a.value;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("stationarity of the centered kernel") {
  const MhKernel k = gauss1d(0.25);
  const int reps = 10'000;
  double s1 = 0, s2 = 0;
  Rng init(12);
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::for_stream(13, static_cast<std::uint64_t>(r));
    const double x = run_chain(k, Vector::Constant(1, init.normal()), 50, rng).final.position[0];
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / reps;
  const double second = s2 / reps;
  // Under N(0,1): sd of x is 1, sd of x² is √2.
  CHECK(std::abs(mean) < 3.0 / std::sqrt(reps));
  CHECK(std::abs(second - 1.0) < 3.0 * std::sqrt(2.0 / reps));
}
