#include "cmh/mh_kernel.hpp"

#include <cmath>
#include <limits>

#include "cmh/error.hpp"
#include "running_stats.hpp"

namespace cmh {

MhKernel::MhKernel(TargetModel target, Proposal proposal)
    : target_(std::move(target)), proposal_(std::move(proposal)) {}

MhKernel MhKernel::independence(TargetModel target, GaussianSpec proposal) {
  if (proposal.dim() != target.dim()) throw Error(ErrorKind::DimensionMismatch, "proposal and target dimensions differ");
  return MhKernel(std::move(target), IndependenceProposal{std::move(proposal)});
}

MhKernel MhKernel::random_walk(TargetModel target, SpdMatrix step_cov) {
  if (step_cov.dim() != target.dim()) throw Error(ErrorKind::DimensionMismatch, "step covariance and target dimensions differ");
  return MhKernel(std::move(target), RandomWalkProposal{std::move(step_cov)});
}

const GaussianSpec& MhKernel::independence_spec() const {
  if (const auto* ind = std::get_if<IndependenceProposal>(&proposal_)) return ind->spec;
  throw Error(ErrorKind::NotIndependenceKernel, "kernel does not use an independence proposal");
}

Vector MhKernel::draw_proposal(const Vector& current, Rng& rng) const {
  if (const auto* ind = std::get_if<IndependenceProposal>(&proposal_)) return gauss_sample(ind->spec, rng);
  const auto& rw = std::get<RandomWalkProposal>(proposal_);
  const Vector z = rng.normal_vector(current.size());
  return current + rw.step_cov.lower().triangularView<Eigen::Lower>() * z;
}

double MhKernel::log_q_correction(const Vector& from, const Vector& to) const {
  if (const auto* ind = std::get_if<IndependenceProposal>(&proposal_)) {
    return gauss_log_kernel(from, ind->spec) - gauss_log_kernel(to, ind->spec);
  }
  return 0.0;
}

MhKernel centered_mhi(const TargetModel& model, const ModeResult& mode) {
  return centered_mhi(model, mode, model.prior_alpha(), model.prior_cov());
}

MhKernel centered_mhi(const TargetModel& model, const ModeResult& mode, double alpha, const SpdMatrix& cov) {
  if (!mode.converged) throw Error(ErrorKind::ModeNotConverged, "centered proposal requires a converged mode");
  return MhKernel::independence(model, GaussianSpec(mode.beta_star, cov, alpha));
}

ChainState ChainState::at(const TargetModel& target, Vector position) {
  ChainState state;
  state.log_post = -neg_log_post(target, position);
  state.position = std::move(position);
  return state;
}

double log_acceptance(const MhKernel& kernel, const Vector& from, double from_log_post, const Vector& to,
                      double to_log_post) {
  if (std::isnan(from_log_post) || std::isnan(to_log_post)) {
    throw Error(ErrorKind::NanFault, "target log-density is NaN");
  }
  if (from_log_post == -std::numeric_limits<double>::infinity()) return 0.0;
  const double ratio = (to_log_post - from_log_post) + kernel.log_q_correction(from, to);
  if (std::isnan(ratio)) throw Error(ErrorKind::NanFault, "log acceptance ratio is NaN");
  return std::min(0.0, ratio);
}

double log_acceptance(const MhKernel& kernel, const Vector& from, const Vector& to) {
  const TargetModel& target = kernel.target();
  return log_acceptance(kernel, from, -neg_log_post(target, from), to, -neg_log_post(target, to));
}

bool mh_step_inplace(const MhKernel& kernel, ChainState& state, Rng& rng) {
  Vector proposal = kernel.draw_proposal(state.position, rng);
  const double log_u = std::log(rng.uniform());
  const double proposal_log_post = -neg_log_post(kernel.target(), proposal);
  const double log_a = log_acceptance(kernel, state.position, state.log_post, proposal, proposal_log_post);
  ++state.steps;
  if (log_u <= log_a) {
    state.position = std::move(proposal);
    state.log_post = proposal_log_post;
    ++state.accepts;
    state.ever_accepted = true;
    return true;
  }
  return false;
}

ChainState mh_step(const MhKernel& kernel, const ChainState& state, Rng& rng) {
  ChainState next = state;
  mh_step_inplace(kernel, next, rng);
  return next;
}

ChainRun run_chain(const MhKernel& kernel, const Vector& init, std::int64_t t, Rng& rng, Record record) {
  if (t < 0) throw Error(ErrorKind::InvalidArgument, "chain length must be non-negative");
  if (init.size() != kernel.dim()) throw Error(ErrorKind::DimensionMismatch, "initial point dimension");
  ChainRun run;
  run.final = ChainState::at(kernel.target(), init);
  if (record == Record::Trace) run.trace.reserve(static_cast<std::size_t>(t));
  for (std::int64_t step = 1; step <= t; ++step) {
    const bool accepted = mh_step_inplace(kernel, run.final, rng);
    if (record == Record::Trace) run.trace.push_back({step, run.final.position, accepted});
  }
  run.acceptance_rate = t == 0 ? std::numeric_limits<double>::quiet_NaN()
                               : static_cast<double>(run.final.accepts) / static_cast<double>(t);
  run.ever_accepted = run.final.ever_accepted;
  return run;
}

Estimate estimate_acceptance(const MhKernel& kernel, const Vector& theta, int m, Rng& rng) {
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "acceptance estimate needs at least two draws");
  const TargetModel& target = kernel.target();
  const double from_log_post = -neg_log_post(target, theta);
  detail::RunningStats stats;
  for (int i = 0; i < m; ++i) {
    const Vector proposal = kernel.draw_proposal(theta, rng);
    stats.push(std::exp(log_acceptance(kernel, theta, from_log_post, proposal, -neg_log_post(target, proposal))));
  }
  return stats.estimate();
}

}  // namespace cmh
