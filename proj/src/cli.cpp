#include "cmh/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cmh/coupling.hpp"
#include "cmh/datagen.hpp"
#include "cmh/error.hpp"
#include "cmh/io.hpp"
#include "cmh/mh_kernel.hpp"
#include "cmh/optimize.hpp"
#include "cmh/rates.hpp"
#include "cmh/targets.hpp"

namespace cmh::cli {

namespace {

using io::format_double;
using io::KeyValues;

struct TargetOptions {
  std::string target = "gauss1d";
  std::string data;
  double alpha = 1.0;
  std::string cov = "identity";
  double nb_xi = 1.0;
  std::optional<double> proposal_alpha;
  double tol = kDefaultModeTol;
  int max_iter = kDefaultModeMaxIter;
};

struct CommonOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  std::string manifest;
};

void add_target_options(CLI::App* sub, TargetOptions& o) {
  sub->add_option("--target", o.target, "gauss1d|gauss2d|rwm|logistic|probit|poisson|negbinom")
      ->check(CLI::IsMember({"gauss1d", "gauss2d", "rwm", "logistic", "probit", "poisson", "negbinom"}));
  sub->add_option("--data", o.data, "dataset CSV (GLM targets)");
  sub->add_option("--alpha", o.alpha, "prior precision scale")->check(CLI::PositiveNumber);
  sub->add_option("--cov", o.cov, "identity | scaled:<s0> | diag:<v1;v2;...> | file:<path>");
  sub->add_option("--nb-xi", o.nb_xi, "negative-binomial xi")->check(CLI::PositiveNumber);
  sub->add_option("--proposal-alpha", o.proposal_alpha, "proposal precision scale (default: --alpha)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "gradient-norm tolerance for the mode")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o.max_iter, "mode iteration cap")->check(CLI::PositiveNumber);
}

void add_common_options(CLI::App* sub, CommonOptions& o, bool needs_out = false) {
  sub->add_option("--seed", o.seed, "64-bit seed");
  sub->add_option("--threads", o.threads, "replica-level worker threads")->check(CLI::PositiveNumber);
  auto* out = sub->add_option("--out", o.out, "output file");
  if (needs_out) out->required();
  sub->add_option("--manifest", o.manifest, "manifest path (default: <out>.manifest)");
}

struct Resolved {
  TargetModel model;
  ModeResult mode;
  double proposal_alpha;
};

TargetModel build_model(const TargetOptions& o, double proposal_alpha) {
  if (o.target == "gauss1d" || o.target == "gauss2d") {
    const Eigen::Index d = o.target == "gauss1d" ? 1 : 2;
    return TargetModel::gaussian(SpdMatrix::identity(d), proposal_alpha, parse_cov_spec(o.cov).build(d));
  }
  if (o.target == "rwm") return TargetModel::rwm_example();
  if (o.data.empty()) throw Error(ErrorKind::ModelHasNoData, "--data is required for target " + o.target);
  Dataset data = io::read_dataset_csv(o.data);
  const auto d = data.d();
  return TargetModel::glm(parse_model_kind(o.target), std::move(data), o.alpha, parse_cov_spec(o.cov).build(d),
                          o.nb_xi);
}

Resolved resolve(const TargetOptions& o) {
  const double proposal_alpha = o.proposal_alpha.value_or(o.alpha);
  TargetModel model = build_model(o, proposal_alpha);
  ModeResult mode;
  if (model.kind() == ModelKind::RwmExample) {
    mode.beta_star = Vector::Zero(2);
    mode.f_star = 0.0;
    mode.converged = true;
  } else {
    mode = find_mode(model, Vector::Zero(model.dim()), o.tol, o.max_iter);
  }
  return {std::move(model), std::move(mode), proposal_alpha};
}

MhKernel centered_kernel(const Resolved& r) {
  if (r.model.kind() == ModelKind::RwmExample) {
    throw Error(ErrorKind::UnsupportedModel, "the rwm target has no centered independence kernel");
  }
  return centered_mhi(r.model, r.mode, r.proposal_alpha, r.model.prior_cov());
}

// Flags as given (or defaulted), so a manifest can be replayed verbatim.
KeyValues flag_values(const CLI::App* sub) {
  KeyValues kv;
  kv.emplace_back("subcommand", sub->get_name());
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "manifest") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto results = opt->reduced_results();
      for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    kv.emplace_back(name, value);
  }
  return kv;
}

void emit_manifest(const CLI::App* sub, const CommonOptions& common, const KeyValues& resolved,
                   std::ostream& err) {
  KeyValues kv = flag_values(sub);
  for (const auto& [k, v] : resolved) kv.emplace_back("resolved." + k, v);
  std::ostringstream ss;
  io::write_key_values(ss, kv);
  std::string path = common.manifest;
  if (path.empty() && !common.out.empty()) path = common.out + ".manifest";
  if (path.empty()) {
    err << "# manifest\n" << ss.str();
    return;
  }
  io::write_text_file(path, ss.str());
}

void print(std::ostream& out, const KeyValues& kv) { io::write_key_values(out, kv); }

void write_output(const CommonOptions& common, const std::string& content) {
  if (!common.out.empty()) io::write_text_file(common.out, content);
}

KeyValues mode_resolved(const Resolved& r) {
  return {{"target_kind", std::string(model_kind_name(r.model.kind()))},
          {"dim", std::to_string(r.model.dim())},
          {"proposal_alpha", format_double(r.proposal_alpha)},
          {"beta_star", io::format_vector(r.mode.beta_star)},
          {"mode_grad_norm", format_double(r.mode.grad_norm)}};
}

GridSpec default_grid(Eigen::Index d, std::optional<int> points, double half_width) {
  return {half_width, points.value_or(d == 1 ? 20'001 : 801)};
}

std::optional<Norm> norm_of(Metric m) {
  switch (m) {
    case Metric::L1: return Norm::L1;
    case Metric::L2: return Norm::L2;
    case Metric::Linf: return Norm::Linf;
    case Metric::Tv: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> default_r0(ModelKind kind) {
  if (kind == ModelKind::Logistic) return kLogisticR0;
  if (kind == ModelKind::Probit) return kProbitR0;
  return std::nullopt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Centered Metropolis-Hastings independence sampler with rate certificates", "cmh"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  // datagen
  auto* datagen = app.add_subcommand("datagen", "generate a synthetic GLM dataset");
  std::string dg_model = "logistic";
  GenConfig dg;
  std::string dg_cov = "identity";
  CommonOptions dg_common;
  datagen->add_option("--model", dg_model)->check(CLI::IsMember({"logistic", "probit", "poisson", "negbinom"}));
  datagen->add_option("--n", dg.n)->check(CLI::PositiveNumber);
  datagen->add_option("--d", dg.d)->check(CLI::PositiveNumber);
  datagen->add_option("--sigma2", dg.sigma2)->check(CLI::PositiveNumber);
  datagen->add_option("--alpha", dg.alpha)->check(CLI::PositiveNumber);
  datagen->add_option("--cov", dg_cov);
  datagen->add_option("--nb-xi", dg.nb_xi)->check(CLI::PositiveNumber);
  add_common_options(datagen, dg_common, true);

  // mode
  auto* mode_cmd = app.add_subcommand("mode", "find the posterior mode");
  TargetOptions mode_target;
  CommonOptions mode_common;
  add_target_options(mode_cmd, mode_target);
  add_common_options(mode_cmd, mode_common);

  // sample
  auto* sample = app.add_subcommand("sample", "run one Metropolis-Hastings chain");
  TargetOptions sample_target;
  CommonOptions sample_common;
  std::int64_t sample_t = 1000;
  std::string sample_kernel = "centered";
  std::string sample_init = "mode";
  std::string sample_prop_mean;
  double step_scale = 1.0;
  add_target_options(sample, sample_target);
  add_common_options(sample, sample_common);
  sample->add_option("--t", sample_t)->check(CLI::NonNegativeNumber);
  sample->add_option("--kernel", sample_kernel)->check(CLI::IsMember({"centered", "independent", "rwm"}));
  sample->add_option("--proposal-mean", sample_prop_mean, "independent kernel mean (comma-separated)");
  sample->add_option("--step-scale", step_scale, "random-walk step standard deviation")->check(CLI::PositiveNumber);
  sample->add_option("--init", sample_init, "mode | zero | comma-separated point");

  // rate
  auto* rate = app.add_subcommand("rate", "certify the exact convergence rate from the mode");
  TargetOptions rate_target;
  CommonOptions rate_common;
  std::string rate_method = "mc";
  std::string rate_metric = "l2";
  std::string rho_method;
  int rate_m = 100'000;
  int probes = 1000;
  int rate_tmax = 50;
  std::optional<double> rate_r0;
  std::optional<double> density_bound;
  std::optional<int> grid_points;
  double half_width = 12.0;
  std::int64_t rho_t = 2000;
  int rho_replicas = 200;
  add_target_options(rate, rate_target);
  add_common_options(rate, rate_common);
  rate->add_option("--method", rate_method)->check(CLI::IsMember({"mc", "quadrature", "glm_bound"}));
  rate->add_option("--metric", rate_metric)->check(CLI::IsMember({"l1", "l2", "linf", "tv"}));
  rate->add_option("--rho-method", rho_method, "quadrature | long_chain (default by dimension)")
      ->check(CLI::IsMember({"quadrature", "long_chain"}));
  rate->add_option("--m", rate_m)->check(CLI::Range(1000, 1'000'000'000));
  rate->add_option("--probes", probes)->check(CLI::NonNegativeNumber);
  rate->add_option("--tmax", rate_tmax)->check(CLI::NonNegativeNumber);
  rate->add_option("--r0", rate_r0)->check(CLI::PositiveNumber);
  rate->add_option("--density-bound", density_bound)->check(CLI::PositiveNumber);
  rate->add_option("--grid-points", grid_points)->check(CLI::Range(3, 100'000'000));
  rate->add_option("--half-width", half_width)->check(CLI::PositiveNumber);
  rate->add_option("--rho-t", rho_t)->check(CLI::Range(2, 1'000'000'000));
  rate->add_option("--rho-replicas", rho_replicas)->check(CLI::Range(2, 100'000'000));

  // lower-bound
  auto* lower = app.add_subcommand("lower-bound", "Wasserstein lower bound from an acceptance estimate");
  TargetOptions lb_target;
  CommonOptions lb_common;
  std::string lb_kernel = "centered";
  std::string lb_theta;
  std::string lb_prop_mean;
  double lb_step_scale = 1.0;
  int lb_m = 100'000;
  int lb_tmax = 50;
  std::string lb_norm = "l1";
  std::optional<double> lb_density_bound;
  add_target_options(lower, lb_target);
  add_common_options(lower, lb_common);
  lower->add_option("--kernel", lb_kernel)->check(CLI::IsMember({"centered", "independent", "rwm"}));
  lower->add_option("--theta", lb_theta, "starting point (default: the mode)");
  lower->add_option("--proposal-mean", lb_prop_mean);
  lower->add_option("--step-scale", lb_step_scale)->check(CLI::PositiveNumber);
  lower->add_option("--m", lb_m)->check(CLI::Range(2, 1'000'000'000));
  lower->add_option("--tmax", lb_tmax)->check(CLI::NonNegativeNumber);
  lower->add_option("--norm", lb_norm)->check(CLI::IsMember({"l1", "l2", "linf"}));
  lower->add_option("--density-bound", lb_density_bound)->check(CLI::PositiveNumber);

  // couple
  auto* couple = app.add_subcommand("couple", "synchronous coupling estimate of the Wasserstein distance");
  TargetOptions couple_target;
  CommonOptions couple_common;
  CouplingSpec cs;
  std::string couple_metric = "l2";
  add_target_options(couple, couple_target);
  add_common_options(couple, couple_common);
  couple->add_option("--tmax", cs.t_max)->check(CLI::NonNegativeNumber);
  couple->add_option("--replicas", cs.replicas)->check(CLI::Range(100, 100'000'000));
  couple->add_option("--metric", couple_metric)->check(CLI::IsMember({"l1", "l2", "linf", "tv"}));
  couple->add_option("--burnin", cs.stationary_burnin)->check(CLI::NonNegativeNumber);

  // curve
  auto* curve = app.add_subcommand("curve", "limiting high-dimensional rate curve");
  double gamma = 1.0, sigma2 = 1.0, s0 = 1.0, curve_alpha = 1.0, r0 = kLogisticR0;
  int curve_tmax = 100;
  CommonOptions curve_common;
  curve->add_option("--gamma", gamma)->check(CLI::PositiveNumber);
  curve->add_option("--sigma2", sigma2)->check(CLI::PositiveNumber);
  curve->add_option("--s0", s0)->check(CLI::PositiveNumber);
  curve->add_option("--alpha", curve_alpha)->check(CLI::PositiveNumber);
  curve->add_option("--r0", r0)->check(CLI::PositiveNumber);
  curve->add_option("--tmax", curve_tmax)->check(CLI::NonNegativeNumber);
  add_common_options(curve, curve_common);

  // falsify
  auto* falsify = app.add_subcommand("falsify", "acceptance scan along a probe sequence");
  std::string fcase = "mhi";
  int f_m = 100'000;
  double f_step_scale = 2.0;
  CommonOptions f_common;
  falsify->add_option("--case", fcase)->check(CLI::IsMember({"mhi", "rwm"}));
  falsify->add_option("--m", f_m)->check(CLI::Range(2, 1'000'000'000));
  falsify->add_option("--step-scale", f_step_scale)->check(CLI::PositiveNumber);
  add_common_options(falsify, f_common);

  // replay
  auto* replay = app.add_subcommand("replay", "re-run the subcommand recorded in a manifest");
  std::string replay_path;
  std::string replay_out;
  std::string replay_manifest;
  replay->add_option("manifest_file", replay_path, "manifest to replay")->required();
  replay->add_option("--out", replay_out, "override the recorded output path");
  replay->add_option("--manifest", replay_manifest, "override the recorded manifest path");

  std::vector<const char*> argv{"cmh"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (datagen->parsed()) {
      dg.kind = parse_model_kind(dg_model);
      dg.cov = parse_cov_spec(dg_cov);
      dg.seed = dg_common.seed;
      const GeneratedData gen = generate(dg);
      std::ostringstream csv;
      io::write_dataset_csv(csv, gen.data);
      write_output(dg_common, csv.str());
      KeyValues config{{"model", dg_model},
                       {"n", std::to_string(dg.n)},
                       {"d", std::to_string(dg.d)},
                       {"sigma2", format_double(dg.sigma2)},
                       {"alpha", format_double(dg.alpha)},
                       {"cov", dg.cov.describe()},
                       {"nb_xi", format_double(dg.nb_xi)},
                       {"seed", std::to_string(dg.seed)},
                       {"beta_true", io::format_vector(gen.beta_true)}};
      std::ostringstream sidecar;
      io::write_key_values(sidecar, config);
      io::write_text_file(dg_common.out + ".config", sidecar.str());
      print(out, {{"rows", std::to_string(gen.data.n())}, {"out", dg_common.out}});
      emit_manifest(datagen, dg_common, config, err);
    } else if (mode_cmd->parsed()) {
      const Resolved r = resolve(mode_target);
      std::ostringstream rec;
      io::write_key_values(rec, io::mode_record(r.mode));
      out << rec.str();
      write_output(mode_common, rec.str());
      emit_manifest(mode_cmd, mode_common, mode_resolved(r), err);
      if (!r.mode.converged) err << "warning: mode did not converge\n";
    } else if (sample->parsed()) {
      const Resolved r = resolve(sample_target);
      std::optional<MhKernel> kernel;
      if (sample_kernel == "centered") {
        kernel = centered_kernel(r);
      } else if (sample_kernel == "independent") {
        const Vector mean = sample_prop_mean.empty() ? Vector(r.mode.beta_star) : io::parse_vector(sample_prop_mean);
        kernel = MhKernel::independence(r.model, GaussianSpec(mean, r.model.prior_cov(), r.proposal_alpha));
      } else {
        kernel = MhKernel::random_walk(r.model, SpdMatrix::scaled_identity(r.model.dim(), step_scale * step_scale));
      }
      Vector init;
      if (sample_init == "mode") init = r.mode.beta_star;
      else if (sample_init == "zero") init = Vector::Zero(r.model.dim());
      else init = io::parse_vector(sample_init);
      Rng rng(sample_common.seed);
      const ChainRun run = run_chain(*kernel, init, sample_t, rng, Record::Trace);
      std::ostringstream csv;
      io::write_trace_csv(csv, run.trace, r.model.dim());
      write_output(sample_common, csv.str());
      print(out, {{"steps", std::to_string(run.final.steps)},
                  {"accepts", std::to_string(run.final.accepts)},
                  {"acceptance_rate", format_double(run.acceptance_rate)},
                  {"ever_accepted", run.ever_accepted ? "true" : "false"}});
      emit_manifest(sample, sample_common, mode_resolved(r), err);
    } else if (rate->parsed()) {
      const Resolved r = resolve(rate_target);
      const MhKernel kernel = centered_kernel(r);
      const Metric metric = parse_metric(rate_metric);
      const auto d = r.model.dim();
      Rng rng(rate_common.seed);
      const CertifiedKernel certified = CertifiedKernel::certify(kernel, r.mode, probes, rng);
      const GridSpec grid = default_grid(d, grid_points, half_width);

      KeyValues report{{"dominance_max_violation", format_double(certified.report().max_violation)}};
      std::optional<GlmEpsilonBound> glm;
      if (is_glm(r.model.kind())) {
        const auto r0 = rate_r0 ? rate_r0 : default_r0(r.model.kind());
        if (r0) {
          glm = epsilon_lower_bound_glm(r.model.data(), r.model.prior_alpha(), r.model.prior_cov(), *r0);
          report.emplace_back("r0", format_double(*r0));
          report.emplace_back("lambda_max", format_double(glm->lambda_max));
          report.emplace_back("a_dn", format_double(glm->a_dn));
          report.emplace_back("epsilon_lb", format_double(glm->epsilon_lb));
        }
      }

      double epsilon = 0.0;
      double epsilon_stderr = 0.0;
      if (rate_method == "mc") {
        const Estimate e = estimate_epsilon_mc(certified, rate_m, rng);
        epsilon = e.value;
        epsilon_stderr = e.std_error;
      } else if (rate_method == "quadrature") {
        epsilon = epsilon_quadrature(r.model, kernel, grid);
      } else {
        if (!glm) throw Error(ErrorKind::UnsupportedModel, "glm_bound needs a GLM target and r0");
        if (std::abs(r.proposal_alpha - r.model.prior_alpha()) > 0.0) {
          throw Error(ErrorKind::InvalidArgument, "glm_bound assumes the proposal uses the prior alpha");
        }
        epsilon = glm->epsilon_lb;
      }

      const std::string rho_choice = !rho_method.empty() ? rho_method : (d <= 2 ? "quadrature" : "long_chain");
      Estimate rho;
      if (rho_choice == "quadrature") {
        rho = mean_rho_quadrature(r.model, r.mode, metric, grid);
      } else {
        rho = mean_rho_long_chain(certified, metric,
                                  {rho_t, rho_replicas, rate_common.seed ^ 0x6d65616e72686fULL, rate_common.threads});
      }

      std::vector<RatePoint> series = exact_rate_series(epsilon, rho.value, rate_tmax, metric);
      const double mean_rho = metric == Metric::Tv ? 1.0 : rho.value;
      if (rate_method == "glm_bound") {
        for (auto& p : series) p.exact_w = std::nan("");
      }
      std::optional<double> m_bound = density_bound;
      if (!m_bound && d <= 2) m_bound = density_sup_quadrature(r.model, r.mode.beta_star, grid);
      const auto norm = norm_of(metric);
      for (auto& p : series) {
        if (m_bound && norm && rate_method != "glm_bound") {
          p.lower_bound = wasserstein_lower_bound(*m_bound, static_cast<int>(d), epsilon, p.t, *norm);
        }
        if (glm) p.asymptotic_bound = std::pow(-std::expm1(-glm->a_dn), p.t) * mean_rho;
      }

      std::ostringstream csv;
      io::write_rate_csv(csv, series);
      write_output(rate_common, csv.str());
      KeyValues lines{{"epsilon", format_double(epsilon)},
                      {"epsilon_stderr", format_double(epsilon_stderr)},
                      {"method", rate_method},
                      {"metric", rate_metric},
                      {"mean_rho", format_double(mean_rho)},
                      {"mean_rho_stderr", format_double(rho.std_error)},
                      {"mean_rho_method", rho_choice}};
      if (m_bound) lines.emplace_back("density_bound", format_double(*m_bound));
      lines.insert(lines.end(), report.begin(), report.end());
      print(out, lines);
      KeyValues resolved = mode_resolved(r);
      resolved.insert(resolved.end(), lines.begin(), lines.end());
      emit_manifest(rate, rate_common, resolved, err);
    } else if (lower->parsed()) {
      const Resolved r = resolve(lb_target);
      const auto d = r.model.dim();
      std::optional<MhKernel> kernel;
      if (lb_kernel == "centered") {
        kernel = centered_kernel(r);
      } else if (lb_kernel == "independent") {
        const Vector mean = lb_prop_mean.empty() ? Vector(r.mode.beta_star) : io::parse_vector(lb_prop_mean);
        kernel = MhKernel::independence(r.model, GaussianSpec(mean, r.model.prior_cov(), r.proposal_alpha));
      } else {
        kernel = MhKernel::random_walk(r.model, SpdMatrix::scaled_identity(d, lb_step_scale * lb_step_scale));
      }
      const Vector theta = lb_theta.empty() ? Vector(r.mode.beta_star) : io::parse_vector(lb_theta);
      if (theta.size() != d) throw Error(ErrorKind::DimensionMismatch, "--theta dimension");
      std::optional<double> m_bound = lb_density_bound;
      if (!m_bound && d <= 2) m_bound = density_sup_quadrature(r.model, r.mode.beta_star, default_grid(d, {}, 12.0));
      if (!m_bound) throw Error(ErrorKind::InvalidBound, "--density-bound is required for d > 2");
      Rng rng(lb_common.seed);
      const Estimate a = estimate_acceptance(*kernel, theta, lb_m, rng);
      const Norm norm = parse_norm(lb_norm);
      std::vector<RatePoint> series;
      for (int t = 0; t <= lb_tmax; ++t) {
        series.push_back({t, std::nan(""), wasserstein_lower_bound(*m_bound, static_cast<int>(d), a.value, t, norm), {}});
      }
      std::ostringstream csv;
      io::write_rate_csv(csv, series);
      write_output(lb_common, csv.str());
      const KeyValues lines{{"acceptance", format_double(a.value)},
                            {"acceptance_stderr", format_double(a.std_error)},
                            {"density_bound", format_double(*m_bound)},
                            {"c0", format_double(wasserstein_lower_bound(*m_bound, static_cast<int>(d), 0.0, 0, norm))}};
      print(out, lines);
      KeyValues resolved = mode_resolved(r);
      resolved.insert(resolved.end(), lines.begin(), lines.end());
      emit_manifest(lower, lb_common, resolved, err);
    } else if (couple->parsed()) {
      const Resolved r = resolve(couple_target);
      const MhKernel kernel = centered_kernel(r);
      cs.metric = parse_metric(couple_metric);
      cs.seed = couple_common.seed;
      cs.threads = couple_common.threads;
      const auto rows = coupling_profile(kernel, r.mode, cs);
      std::ostringstream csv;
      io::write_coupling_csv(csv, rows);
      write_output(couple_common, csv.str());
      const KeyValues lines{{"stationary_burnin", std::to_string(cs.stationary_burnin)},
                            {"final_mean_distance", format_double(rows.back().mean_distance)},
                            {"final_stderr", format_double(rows.back().std_error)}};
      print(out, lines);
      err << "note: chain_b starts after a burn-in of " << cs.stationary_burnin
          << " steps from the mode, not an exact stationary draw\n";
      KeyValues resolved = mode_resolved(r);
      resolved.insert(resolved.end(), lines.begin(), lines.end());
      emit_manifest(couple, couple_common, resolved, err);
    } else if (curve->parsed()) {
      const AsymptoticCurve c = asymptotic_curve(gamma, sigma2, s0, curve_alpha, r0, curve_tmax);
      std::vector<RatePoint> series;
      for (int t = 0; t <= curve_tmax; ++t) series.push_back({t, std::nan(""), {}, c.series[static_cast<std::size_t>(t)]});
      std::ostringstream csv;
      io::write_rate_csv(csv, series);
      write_output(curve_common, csv.str());
      const KeyValues lines{{"a0", format_double(c.a0)}, {"rate", format_double(c.rate)}};
      print(out, lines);
      emit_manifest(curve, curve_common, lines, err);
    } else if (falsify->parsed()) {
      std::optional<MhKernel> kernel;
      std::vector<Vector> probes_seq;
      if (fcase == "mhi") {
        kernel = MhKernel::independence(TargetModel::gaussian(SpdMatrix::identity(1)),
                                        GaussianSpec(Vector::Ones(1), SpdMatrix::identity(1), 1.0));
        for (int k = 1; k <= 8; ++k) probes_seq.push_back(Vector::Constant(1, -k));
      } else {
        kernel = MhKernel::random_walk(TargetModel::rwm_example(), SpdMatrix::scaled_identity(2, f_step_scale * f_step_scale));
        for (int x = 2; x <= 64; x *= 2) probes_seq.push_back((Vector(2) << x, 0.0).finished());
      }
      Rng rng(f_common.seed);
      std::ostringstream csv;
      const auto dim = kernel->dim();
      csv << 'k';
      for (Eigen::Index j = 0; j < dim; ++j) csv << ",theta_" << (j + 1);
      csv << ",acceptance,stderr\n";
      bool decreasing = true;
      double previous = 2.0;
      Estimate last;
      for (std::size_t k = 0; k < probes_seq.size(); ++k) {
        last = estimate_acceptance(*kernel, probes_seq[k], f_m, rng);
        decreasing = decreasing && last.value < previous;
        previous = last.value;
        csv << (k + 1) << ',' << io::format_vector(probes_seq[k]) << ',' << format_double(last.value) << ','
            << format_double(last.std_error) << '\n';
      }
      write_output(f_common, csv.str());
      const KeyValues lines{{"case", fcase},
                            {"strictly_decreasing", decreasing ? "true" : "false"},
                            {"final_acceptance", format_double(last.value)}};
      print(out, lines);
      emit_manifest(falsify, f_common, lines, err);
    } else if (replay->parsed()) {
      std::ifstream in(replay_path);
      if (!in) throw Error(ErrorKind::IoError, "cannot open " + replay_path);
      const KeyValues kv = io::read_key_values(in);
      std::vector<std::string> replay_args;
      for (const auto& [k, v] : kv) {
        if (k == "subcommand") {
          replay_args.insert(replay_args.begin(), v);
        } else if (k.rfind("resolved.", 0) != 0) {
          if (k == "out" && !replay_out.empty()) continue;
          replay_args.push_back("--" + k);
          replay_args.push_back(v);
        }
      }
      if (replay_args.empty() || replay_args.front().rfind("--", 0) == 0) {
        throw Error(ErrorKind::ParseError, "manifest has no subcommand");
      }
      if (!replay_out.empty()) {
        replay_args.push_back("--out");
        replay_args.push_back(replay_out);
      }
      if (!replay_manifest.empty()) {
        replay_args.push_back("--manifest");
        replay_args.push_back(replay_manifest);
      }
      return run(replay_args, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace cmh::cli
