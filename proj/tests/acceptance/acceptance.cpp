// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cmh/cli.hpp"
#include "cmh/coupling.hpp"
#include "cmh/datagen.hpp"
#include "cmh/io.hpp"
#include "cmh/mh_kernel.hpp"
#include "cmh/optimize.hpp"
#include "cmh/rates.hpp"
#include "cmh/rng.hpp"
#include "support/oracles.hpp"

using namespace cmh;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct GaussCase {
  TargetModel model;
  ModeResult mode;
  MhKernel kernel;
};

// d=1 target N(0,1) with centered proposal N(0,4).
GaussCase gauss_case() {
  auto model = TargetModel::gaussian(SpdMatrix::identity(1), 0.25, SpdMatrix::identity(1));
  auto mode = find_mode(model, Vector::Constant(1, 1.0));
  auto kernel = centered_mhi(model, mode);
  return {std::move(model), std::move(mode), std::move(kernel)};
}

TargetModel desk_glm(ModelKind kind, std::uint64_t seed) {
  GenConfig cfg;
  cfg.kind = kind;
  cfg.n = 100;
  cfg.d = 5;
  cfg.sigma2 = 1.0;
  cfg.alpha = 1.0;
  cfg.cov = parse_cov_spec("scaled:1");
  cfg.seed = seed;
  return TargetModel::glm(kind, generate(cfg).data, cfg.alpha, cfg.cov.build(cfg.d));
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("cmh_acceptance_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

// ---------------------------------------------------------------------------

Outcome exact_rate() {
  Outcome o;
  const GaussCase g = gauss_case();
  const double quad = epsilon_quadrature(g.model, g.kernel, {});
  o.require(std::abs(quad - 0.5) <= 1e-6, "quadrature epsilon " + fmt(quad, 12));

  Rng rng(101);
  const auto cert = CertifiedKernel::certify(g.kernel, g.mode, 1000, rng);
  const Estimate mc = estimate_epsilon_mc(cert, 100'000, rng);
  o.require(std::abs(mc.value - 0.5) <= 3 * mc.std_error, "MC epsilon " + fmt(mc.value));

  const double rho = mean_rho_quadrature(g.model, g.mode, Metric::L1, {}).value;
  const double exact = exact_rate_series(quad, rho, 3, Metric::L1)[3].exact_w;
  const double closed = 0.125 * std::sqrt(2 / std::numbers::pi);
  o.require(std::abs(exact - closed) <= 1e-6, "exact W(3) " + fmt(exact));

  CouplingSpec spec;
  spec.t_max = 3;
  spec.replicas = 10'000;
  spec.metric = Metric::L1;
  spec.seed = 102;
  const Estimate c = estimate_wasserstein_coupling(g.kernel, g.mode, 3, spec);
  const bool in_band = c.value >= closed - 3 * c.std_error && c.value <= closed + 3 * c.std_error + 0.02;
  o.require(in_band, "coupling " + fmt(c.value));
  o.note("eps_quad=" + fmt(quad, 12) + " eps_mc=" + fmt(mc.value) + "±" + fmt(mc.std_error, 2) +
         " W3=" + fmt(exact) + " coupling=" + fmt(c.value) + "±" + fmt(c.std_error, 2));
  return o;
}

Outcome atom_law() {
  Outcome o;
  const GaussCase g = gauss_case();
  const int replicas = 100'000;
  for (int t : {1, 2, 5, 10}) {
    const Estimate a = atom_mass(g.kernel, g.mode, t, replicas, 200 + t);
    const double p = std::pow(0.5, t);
    const double se = std::sqrt(p * (1 - p) / replicas);
    o.require(std::abs(a.value - p) <= 3 * se, "atom t=" + std::to_string(t) + " " + fmt(a.value));
    o.note("atom(" + std::to_string(t) + ")=" + fmt(a.value, 4));

    // Chains that left the mode are distributed as the target N(0,1).
    double n = 0, s1 = 0, s2 = 0;
    for (int r = 0; r < replicas; ++r) {
      Rng rng = Rng::for_stream(300 + t, static_cast<std::uint64_t>(r));
      const ChainRun run = run_chain(g.kernel, g.mode.beta_star, t, rng);
      if (!run.ever_accepted) continue;
      const double x = run.final.position[0];
      n += 1;
      s1 += x;
      s2 += x * x;
    }
    const double mean = s1 / n, second = s2 / n;
    o.require(std::abs(mean) <= 3 / std::sqrt(n), "conditional mean t=" + std::to_string(t));
    o.require(std::abs(second - 1) <= 3 * std::sqrt(2 / n), "conditional second moment t=" + std::to_string(t));
  }
  return o;
}

Outcome acceptance_identity() {
  Outcome o;
  Rng rng(401);
  const GaussCase g = gauss_case();
  const TargetModel logistic = desk_glm(ModelKind::Logistic, 7);
  const ModeResult lmode = find_mode(logistic, Vector::Zero(5));
  const MhKernel lkernel = centered_mhi(logistic, lmode);
  const std::pair<const MhKernel*, const ModeResult*> cases[] = {{&g.kernel, &g.mode}, {&lkernel, &lmode}};
  const char* names[] = {"gaussian", "logistic"};
  for (int i = 0; i < 2; ++i) {
    const auto cert = CertifiedKernel::certify(*cases[i].first, *cases[i].second, 1000, rng);
    const Estimate eps = estimate_epsilon_mc(cert, 100'000, rng);
    const Estimate acc = estimate_acceptance(*cases[i].first, cases[i].second->beta_star, 100'000, rng);
    const double se = std::hypot(eps.std_error, acc.std_error);
    o.require(std::abs(eps.value - acc.value) <= 3 * se, names[i]);
    o.note(std::string(names[i]) + ": eps=" + fmt(eps.value) + " A=" + fmt(acc.value) + " se=" + fmt(se, 2));
  }
  return o;
}

Outcome lower_bound_sandwich() {
  Outcome o;
  const GaussCase g = gauss_case();
  const double eps = epsilon_quadrature(g.model, g.kernel, {});
  const double rho = mean_rho_quadrature(g.model, g.mode, Metric::L1, {}).value;
  const auto exact = exact_rate_series(eps, rho, 50, Metric::L1);
  const double m = 1 / std::sqrt(2 * std::numbers::pi);
  for (int t = 0; t <= 50; ++t) {
    const double lb = wasserstein_lower_bound(m, 1, eps, t, Norm::L1);
    if (lb > exact[t].exact_w) o.require(false, "t=" + std::to_string(t));
  }
  const double at0 = wasserstein_lower_bound(m, 1, eps, 0, Norm::L1);
  o.require(std::abs(at0 - std::sqrt(2 * std::numbers::pi) / 8) <= 1e-6, "t=0 value " + fmt(at0, 10));
  o.note("bound(0)=" + fmt(at0, 10) + " exact(0)=" + fmt(exact[0].exact_w));
  return o;
}

Outcome falsification() {
  Outcome o;
  const int m = 100'000;
  const auto gauss = TargetModel::gaussian(SpdMatrix::identity(1));
  const MhKernel mhi = MhKernel::independence(gauss, GaussianSpec(Vector::Constant(1, 1.0), SpdMatrix::identity(1), 1.0));
  Rng rng(501);
  double prev = 2.0;
  bool decreasing = true;
  for (int k = 1; k <= 8; ++k) {
    const double a = estimate_acceptance(mhi, Vector::Constant(1, -k), m, rng).value;
    decreasing = decreasing && a < prev;
    prev = a;
  }
  o.require(decreasing, "MHI sequence not strictly decreasing");
  o.require(prev < 0.01, "MHI A(-8)=" + fmt(prev));
  o.note("MHI A(-8)=" + fmt(prev, 3));

  // Random-walk step sd 2 (the default of `falsify --case rwm`).
  const MhKernel rwm = MhKernel::random_walk(TargetModel::rwm_example(), SpdMatrix::scaled_identity(2, 4.0));
  prev = 2.0;
  decreasing = true;
  for (double x = 2; x <= 64; x *= 2) {
    Vector theta(2);
    theta << x, 0;
    const double a = estimate_acceptance(rwm, theta, m, rng).value;
    decreasing = decreasing && a < prev;
    prev = a;
  }
  o.require(decreasing, "RWM sequence not decreasing");
  o.require(prev < 0.05, "RWM A(64,0)=" + fmt(prev));
  o.note("RWM A(64,0)=" + fmt(prev, 3));
  return o;
}

Outcome glm_certificate() {
  Outcome o;
  int dominance = 0, bound = 0;
  double worst_gap = 1.0;
  for (ModelKind kind : {ModelKind::Logistic, ModelKind::Probit}) {
    for (int i = 0; i < 20; ++i) {
      const TargetModel model = desk_glm(kind, 600 + 100 * static_cast<int>(kind) + i);
      const ModeResult mode = find_mode(model, Vector::Zero(5));
      const MhKernel kernel = centered_mhi(model, mode);
      Rng rng(700 + i);
      const GaussianSpec& q = kernel.independence_spec();
      const DominanceReport rep = verify_dominance(model, mode, q, 1000, rng);
      if (!rep.pass) continue;
      ++dominance;
      const auto cert = CertifiedKernel::certify(kernel, mode, 1000, rng);
      const Estimate eps = estimate_epsilon_mc(cert, 20'000, rng);
      const double r0 = kind == ModelKind::Logistic ? kLogisticR0 : kProbitR0;
      const auto b = epsilon_lower_bound_glm(model.data(), model.prior_alpha(), model.prior_cov(), r0);
      if (b.epsilon_lb <= eps.value + 3 * eps.std_error) ++bound;
      worst_gap = std::min(worst_gap, eps.value - b.epsilon_lb);
    }
  }
  o.require(dominance == 40, "dominance passed on " + std::to_string(dominance) + "/40");
  o.require(bound == 40, "bound held on " + std::to_string(bound) + "/40");
  o.note("dominance " + std::to_string(dominance) + "/40, bound " + std::to_string(bound) +
         "/40, min(eps - eps_lb)=" + fmt(worst_gap, 3));
  return o;
}

Outcome eigenvalue_limit() {
  Outcome o;
  int inside = 0;
  double lo = 1e9, hi = 0;
  for (int trial = 0; trial < 100; ++trial) {
    GenConfig cfg;
    cfg.n = 1000;
    cfg.d = 1000;
    cfg.sigma2 = 1.0;
    Rng rng = Rng::for_stream(800, static_cast<std::uint64_t>(trial));
    const double lam = lambda_max_gram(gen_design(cfg, rng));
    inside += lam >= 3.6 && lam <= 4.4;
    lo = std::min(lo, lam);
    hi = std::max(hi, lam);
  }
  o.require(inside >= 95, std::to_string(inside) + "/100 inside");
  o.note(std::to_string(inside) + "/100 in [3.6,4.4], range [" + fmt(lo, 4) + ", " + fmt(hi, 4) + "]");
  return o;
}

Outcome figure_curve() {
  Outcome o;
  TempDir dir;
  double prev = 0.0;
  double at_one = 0.0;
  for (const char* gamma : {"0.25", "0.5", "1", "2", "4"}) {
    const std::string out = dir.file(std::string("curve_") + gamma + ".csv");
    if (run_cli({"curve", "--gamma", gamma, "--sigma2", "1", "--s0", "1", "--alpha", "1", "--r0", "0.25",
                 "--tmax", "10", "--out", out}) != 0) {
      o.require(false, std::string("curve failed for gamma=") + gamma);
      return o;
    }
    std::istringstream csv(slurp(out));
    std::string line;
    std::getline(csv, line);  // header
    std::getline(csv, line);  // t = 0
    std::getline(csv, line);  // t = 1
    const double rate = io::parse_double(line.substr(line.rfind(',') + 1));
    o.require(rate > prev, std::string("not increasing at gamma=") + gamma);
    prev = rate;
    if (std::string(gamma) == "1") at_one = rate;
  }
  o.require(std::abs(at_one - (1 - std::exp(-0.5))) <= 1e-9, "gamma=1 rate " + fmt(at_one, 17));
  o.note("rate(gamma=1)=" + fmt(at_one, 12) + ", rate(gamma=4)=" + fmt(prev, 6));
  return o;
}

Outcome gradients() {
  Outcome o;
  Rng rng(901);
  for (ModelKind kind : {ModelKind::Logistic, ModelKind::Probit, ModelKind::Poisson, ModelKind::NegBinom}) {
    GenConfig cfg;
    cfg.kind = kind;
    cfg.n = 50;
    cfg.d = 3;
    cfg.sigma2 = 50.0;
    cfg.nb_xi = 2.0;
    cfg.seed = 910 + static_cast<int>(kind);
    const auto model = TargetModel::glm(kind, generate(cfg).data, 1.0, SpdMatrix::identity(3), 2.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Vector b = rng.normal_vector(3);
      const Vector lik = oracle::central_diff([&](const Vector& v) { return neg_log_lik(model, v); }, b);
      const Vector post = oracle::central_diff([&](const Vector& v) { return neg_log_post(model, v); }, b);
      worst = std::max({worst, oracle::max_rel_error(grad_neg_log_lik(model, b), lik),
                        oracle::max_rel_error(grad_neg_log_post(model, b), post)});
    }
    o.require(worst < 1e-4, std::string(model_kind_name(kind)) + " rel err " + fmt(worst, 3));
    o.note(std::string(model_kind_name(kind)) + "=" + fmt(worst, 2));
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  TempDir dir;
  const std::string data = dir.file("data.csv");
  if (run_cli({"datagen", "--model", "logistic", "--n", "100", "--d", "5", "--cov", "scaled:1", "--seed", "7",
               "--out", data}) != 0) {
    o.require(false, "datagen");
    return o;
  }
  const std::vector<std::vector<std::string>> commands{
      {"datagen", "--model", "negbinom", "--n", "50", "--d", "3", "--nb-xi", "2"},
      {"mode", "--target", "logistic", "--data", data},
      {"sample", "--target", "logistic", "--data", data, "--t", "500"},
      {"rate", "--target", "logistic", "--data", data, "--m", "5000", "--rho-t", "200", "--rho-replicas", "16",
       "--tmax", "10"},
      {"rate", "--target", "gauss1d", "--proposal-alpha", "0.25", "--method", "quadrature", "--metric", "l1"},
      {"lower-bound", "--target", "gauss1d", "--proposal-alpha", "0.25", "--m", "5000", "--tmax", "10",
       "--density-bound", "0.3989422804014327"},
      {"couple", "--target", "gauss1d", "--proposal-alpha", "0.25", "--replicas", "1000", "--burnin", "500",
       "--tmax", "6"},
      {"curve", "--gamma", "1", "--tmax", "20"},
      {"falsify", "--case", "mhi", "--m", "2000"},
      {"falsify", "--case", "rwm", "--m", "2000"},
  };
  int identical = 0;
  int idx = 0;
  for (const auto& base : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4", "4"}) {
      const std::string out = dir.file("c" + std::to_string(idx) + "_" + std::to_string(outputs.size()) + ".csv");
      auto args = base;
      args.insert(args.end(), {"--seed", "2024", "--threads", threads, "--out", out});
      if (run_cli(args) != 0) {
        o.require(false, base[0] + " exited non-zero");
        break;
      }
      outputs.push_back(slurp(out));
    }
    bool same = outputs.size() == 4 && !outputs[0].empty();
    for (const auto& s : outputs) same = same && s == outputs[0];
    if (same) {
      const std::string replayed = dir.file("replay" + std::to_string(idx) + ".csv");
      same = run_cli({"replay", dir.file("c" + std::to_string(idx) + "_0.csv.manifest"), "--out", replayed}) == 0 &&
             slurp(replayed) == outputs[0];
    }
    o.require(same, base[0] + " (" + std::to_string(idx) + ") outputs differ");
    identical += same;
    ++idx;
  }
  o.note(std::to_string(identical) + "/" + std::to_string(commands.size()) +
         " invocations byte-identical over threads {1,4} and manifest replay");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0: no runtime requirement
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "exact rate, closed-form Gaussian case", 30, exact_rate},
      {2, "convex-combination atom law", 0, atom_law},
      {3, "acceptance identity A(mode) = epsilon", 0, acceptance_identity},
      {4, "lower bound below the exact rate", 0, lower_bound_sandwich},
      {5, "falsification probes (MHI and RWM)", 60, falsification},
      {6, "GLM certificate on 40 desk datasets", 300, glm_certificate},
      {7, "largest eigenvalue of the square design", 120, eigenvalue_limit},
      {8, "asymptotic curve over gamma", 0, figure_curve},
      {9, "GLM gradients vs central differences", 0, gradients},
      {10, "byte-identical outputs across runs and thread counts", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0) o.require(seconds <= c.budget_seconds, "runtime over " + fmt(c.budget_seconds) + " s");
    failures += !o.pass;
    std::printf("%s criterion %d: %s [%.1f s] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
