#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cmh/cli.hpp"
#include "cmh/coupling.hpp"
#include "cmh/datagen.hpp"
#include "cmh/error.hpp"
#include "cmh/mh_kernel.hpp"
#include "cmh/optimize.hpp"
#include "cmh/rates.hpp"
#include "cmh/targets.hpp"

namespace py = pybind11;
using namespace cmh;

namespace {

SpdMatrix to_spd(const Matrix& m) { return SpdMatrix::factor(m); }

py::tuple estimate_tuple(const Estimate& e) { return py::make_tuple(e.value, e.std_error); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Centered Metropolis-Hastings independence sampler with rate certificates";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::object(py::exception<Error>(m, "Error", PyExc_RuntimeError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& cls = error_type.get_stored();
      py::object exc = cls(std::string(e.name()) + ": " + e.what());
      exc.attr("kind") = std::string(e.name());
      PyErr_SetObject(cls.ptr(), exc.ptr());
    }
  });

  py::class_<TargetModel>(m, "Model")
      .def_static(
          "glm",
          [](const std::string& kind, const Matrix& x, const Vector& y, double alpha, const Matrix& cov,
             double nb_xi) {
            return TargetModel::glm(parse_model_kind(kind), Dataset{x, y}, alpha, to_spd(cov), nb_xi);
          },
          py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("alpha"), py::arg("cov"), py::arg("nb_xi") = 1.0)
      .def_static(
          "gaussian",
          [](const Matrix& sigma, double alpha, const Matrix& cov) {
            return TargetModel::gaussian(to_spd(sigma), alpha, to_spd(cov));
          },
          py::arg("sigma"), py::arg("alpha"), py::arg("cov"))
      .def_static("rwm_example", &TargetModel::rwm_example)
      .def_property_readonly("kind", [](const TargetModel& t) { return std::string(model_kind_name(t.kind())); })
      .def_property_readonly("dim", &TargetModel::dim)
      .def("neg_log_post", &neg_log_post)
      .def("grad_neg_log_post", &grad_neg_log_post)
      .def("neg_log_lik", &neg_log_lik)
      .def("grad_neg_log_lik", &grad_neg_log_lik)
      .def("curvature_probe", &curvature_probe);

  py::class_<ModeResult>(m, "ModeResult")
      .def_readonly("beta_star", &ModeResult::beta_star)
      .def_readonly("f_star", &ModeResult::f_star)
      .def_readonly("grad_norm", &ModeResult::grad_norm)
      .def_readonly("iterations", &ModeResult::iterations)
      .def_readonly("converged", &ModeResult::converged)
      .def_readonly("objective_history", &ModeResult::objective_history);

  m.def("find_mode", &find_mode, py::arg("model"), py::arg("init"), py::arg("tol") = kDefaultModeTol,
        py::arg("max_iter") = kDefaultModeMaxIter);

  m.def(
      "verify_dominance",
      [](const TargetModel& model, const ModeResult& mode, double alpha, const Matrix& cov, int probes,
         std::uint64_t seed) {
        Rng rng(seed);
        const DominanceReport r =
            verify_dominance(model, mode, GaussianSpec(mode.beta_star, to_spd(cov), alpha), probes, rng);
        return py::make_tuple(r.pass, r.max_violation);
      },
      py::arg("model"), py::arg("mode"), py::arg("alpha"), py::arg("cov"), py::arg("probes") = 1000,
      py::arg("seed") = 1);

  py::class_<MhKernel>(m, "Kernel")
      .def_property_readonly("is_independence", &MhKernel::is_independence)
      .def_property_readonly("dim", &MhKernel::dim)
      .def_static(
          "independence",
          [](const TargetModel& t, const Vector& mean, double alpha, const Matrix& cov) {
            return MhKernel::independence(t, GaussianSpec(mean, to_spd(cov), alpha));
          },
          py::arg("target"), py::arg("mean"), py::arg("alpha"), py::arg("cov"))
      .def_static(
          "random_walk", [](const TargetModel& t, const Matrix& step_cov) {
            return MhKernel::random_walk(t, to_spd(step_cov));
          },
          py::arg("target"), py::arg("step_cov"));

  m.def("centered_mhi", py::overload_cast<const TargetModel&, const ModeResult&>(&centered_mhi));

  m.def(
      "run_chain",
      [](const MhKernel& k, const Vector& init, std::int64_t t, std::uint64_t seed) {
        Rng rng(seed);
        const ChainRun run = run_chain(k, init, t, rng, Record::Trace);
        Matrix positions(static_cast<Eigen::Index>(run.trace.size()), k.dim());
        std::vector<bool> accepted;
        for (std::size_t i = 0; i < run.trace.size(); ++i) {
          positions.row(static_cast<Eigen::Index>(i)) = run.trace[i].position.transpose();
          accepted.push_back(run.trace[i].accepted);
        }
        return py::make_tuple(positions, accepted, run.acceptance_rate);
      },
      py::arg("kernel"), py::arg("init"), py::arg("t"), py::arg("seed"),
      "Returns (positions, accepted, acceptance_rate).");

  m.def(
      "estimate_acceptance",
      [](const MhKernel& k, const Vector& theta, int draws, std::uint64_t seed) {
        Rng rng(seed);
        return estimate_tuple(estimate_acceptance(k, theta, draws, rng));
      },
      py::arg("kernel"), py::arg("theta"), py::arg("m"), py::arg("seed"));

  m.def(
      "estimate_epsilon_mc",
      [](const MhKernel& k, const ModeResult& mode, int draws, std::uint64_t seed, int probes) {
        Rng rng(seed);
        const CertifiedKernel cert = CertifiedKernel::certify(k, mode, probes, rng);
        return estimate_tuple(estimate_epsilon_mc(cert, draws, rng));
      },
      py::arg("kernel"), py::arg("mode"), py::arg("m"), py::arg("seed"), py::arg("probes") = 1000,
      "Certifies the kernel (dominance probes) and returns (epsilon, stderr).");

  m.def(
      "epsilon_quadrature",
      [](const TargetModel& model, const MhKernel& k, double half_width, int points) {
        return epsilon_quadrature(model, k, {half_width, points});
      },
      py::arg("model"), py::arg("kernel"), py::arg("half_width") = 12.0, py::arg("points") = 20'001);

  m.def(
      "mean_rho_quadrature",
      [](const TargetModel& model, const ModeResult& mode, const std::string& metric, double half_width,
         int points) {
        return estimate_tuple(mean_rho_quadrature(model, mode, parse_metric(metric), {half_width, points}));
      },
      py::arg("model"), py::arg("mode"), py::arg("metric") = "l2", py::arg("half_width") = 12.0,
      py::arg("points") = 20'001);

  m.def("lambda_max_gram", &lambda_max_gram);

  m.def(
      "epsilon_lower_bound_glm",
      [](const Matrix& x, double alpha, const Matrix& cov, double r0) {
        const auto b = epsilon_lower_bound_glm(Dataset{x, Vector::Zero(x.rows())}, alpha, to_spd(cov), r0);
        return py::dict(py::arg("lambda_max") = b.lambda_max, py::arg("trace_cov") = b.trace_cov,
                        py::arg("a_dn") = b.a_dn, py::arg("epsilon_lb") = b.epsilon_lb);
      },
      py::arg("x"), py::arg("alpha"), py::arg("cov"), py::arg("r0"));

  m.def(
      "exact_rate_series",
      [](double eps, double mean_rho, int t_max, const std::string& metric) {
        std::vector<double> out;
        for (const auto& p : exact_rate_series(eps, mean_rho, t_max, parse_metric(metric))) out.push_back(p.exact_w);
        return out;
      },
      py::arg("epsilon"), py::arg("mean_rho"), py::arg("t_max"), py::arg("metric") = "l2");

  m.def(
      "wasserstein_lower_bound",
      [](double density_bound, int d, double acceptance, int t, const std::string& norm) {
        return wasserstein_lower_bound(density_bound, d, acceptance, t, parse_norm(norm));
      },
      py::arg("density_bound"), py::arg("d"), py::arg("acceptance"), py::arg("t"), py::arg("norm") = "l1");

  m.def(
      "asymptotic_curve",
      [](double gamma, double sigma2, double s0, double alpha, double r0, int t_max) {
        const AsymptoticCurve c = asymptotic_curve(gamma, sigma2, s0, alpha, r0, t_max);
        return py::make_tuple(c.a0, c.rate, c.series);
      },
      py::arg("gamma"), py::arg("sigma2") = 1.0, py::arg("s0") = 1.0, py::arg("alpha") = 1.0,
      py::arg("r0") = kLogisticR0, py::arg("t_max") = 0, "Returns (a0, rate, series).");

  m.def(
      "coupling_profile",
      [](const MhKernel& k, const ModeResult& mode, int t_max, int replicas, const std::string& metric,
         std::int64_t burnin, std::uint64_t seed, int threads) {
        CouplingSpec spec{t_max, replicas, parse_metric(metric), burnin, seed, threads};
        py::list rows;
        for (const auto& r : coupling_profile(k, mode, spec)) {
          rows.append(py::dict(py::arg("t") = r.t, py::arg("mean_distance") = r.mean_distance,
                               py::arg("stderr") = r.std_error, py::arg("fraction_coalesced") = r.fraction_coalesced,
                               py::arg("fraction_at_mode") = r.fraction_at_mode));
        }
        return rows;
      },
      py::arg("kernel"), py::arg("mode"), py::arg("t_max") = 10, py::arg("replicas") = 10'000,
      py::arg("metric") = "l2", py::arg("burnin") = kDefaultStationaryBurnin, py::arg("seed") = 1,
      py::arg("threads") = 1);

  m.def(
      "atom_mass",
      [](const MhKernel& k, const ModeResult& mode, int t, int replicas, std::uint64_t seed, int threads) {
        return estimate_tuple(atom_mass(k, mode, t, replicas, seed, threads));
      },
      py::arg("kernel"), py::arg("mode"), py::arg("t"), py::arg("replicas"), py::arg("seed"),
      py::arg("threads") = 1);

  m.def(
      "generate",
      [](const std::string& kind, Eigen::Index n, Eigen::Index d, double sigma2, double alpha,
         const std::string& cov, double nb_xi, std::uint64_t seed) {
        GenConfig cfg{parse_model_kind(kind), n, d, sigma2, alpha, parse_cov_spec(cov), nb_xi, seed};
        GeneratedData g = generate(cfg);
        return py::make_tuple(g.data.x, g.data.y, g.beta_true);
      },
      py::arg("kind"), py::arg("n"), py::arg("d"), py::arg("sigma2") = 1.0, py::arg("alpha") = 1.0,
      py::arg("cov") = "identity", py::arg("nb_xi") = 1.0, py::arg("seed") = 1, "Returns (x, y, beta_true).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one cmh subcommand; returns (exit_code, stdout, stderr).");
}
