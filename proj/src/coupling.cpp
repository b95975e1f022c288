#include "cmh/coupling.hpp"

#include <cmath>

#include "cmh/error.hpp"
#include "cmh/parallel.hpp"
#include "running_stats.hpp"

namespace cmh {

namespace {

void apply_decision(ChainState& state, bool accepted, const Vector& proposal, double proposal_log_post) {
  ++state.steps;
  if (!accepted) return;
  state.position = proposal;
  state.log_post = proposal_log_post;
  ++state.accepts;
  state.ever_accepted = true;
}

}  // namespace

void couple_step(const MhKernel& kernel, CoupledPair& pair, Rng& rng) {
  if (!kernel.is_independence()) {
    throw Error(ErrorKind::NotIndependenceKernel, "synchronous coupling needs an independence proposal");
  }
  const Vector proposal = kernel.draw_proposal(pair.chain_a.position, rng);
  const double log_u = std::log(rng.uniform());
  const double proposal_log_post = -neg_log_post(kernel.target(), proposal);

  const bool accept_a =
      log_u <= log_acceptance(kernel, pair.chain_a.position, pair.chain_a.log_post, proposal, proposal_log_post);
  if (pair.coalesced) {
    apply_decision(pair.chain_a, accept_a, proposal, proposal_log_post);
    apply_decision(pair.chain_b, accept_a, proposal, proposal_log_post);
    return;
  }
  const bool accept_b =
      log_u <= log_acceptance(kernel, pair.chain_b.position, pair.chain_b.log_post, proposal, proposal_log_post);
  apply_decision(pair.chain_a, accept_a, proposal, proposal_log_post);
  apply_decision(pair.chain_b, accept_b, proposal, proposal_log_post);
  if (accept_a && accept_b) {
    pair.coalesced = true;
    pair.coalesce_step = pair.chain_a.steps;
  }
}

std::vector<CouplingRow> coupling_profile(const MhKernel& kernel, const ModeResult& mode, const CouplingSpec& spec) {
  if (!kernel.is_independence()) {
    throw Error(ErrorKind::NotIndependenceKernel, "synchronous coupling needs an independence proposal");
  }
  if (spec.replicas < 100) throw Error(ErrorKind::InvalidArgument, "coupling needs at least 100 replicas");
  if (spec.t_max < 0 || spec.stationary_burnin < 0) {
    throw Error(ErrorKind::InvalidArgument, "t_max and burn-in must be non-negative");
  }
  const auto replicas = static_cast<std::size_t>(spec.replicas);
  const auto steps = static_cast<std::size_t>(spec.t_max) + 1;
  std::vector<double> dist(replicas * steps);
  std::vector<unsigned char> coalesced(replicas * steps);
  std::vector<unsigned char> at_mode(replicas * steps);

  const Vector& center = mode.beta_star;
  parallel_for(replicas, spec.threads, [&](std::size_t k) {
    Rng rng = Rng::for_stream(spec.seed, k);
    CoupledPair pair;
    pair.chain_b = ChainState::at(kernel.target(), center);
    for (std::int64_t s = 0; s < spec.stationary_burnin; ++s) mh_step_inplace(kernel, pair.chain_b, rng);
    pair.chain_a = ChainState::at(kernel.target(), center);
    for (std::size_t t = 0; t < steps; ++t) {
      if (t > 0) couple_step(kernel, pair, rng);
      const std::size_t slot = t * replicas + k;
      dist[slot] = distance(spec.metric, pair.chain_a.position, pair.chain_b.position);
      coalesced[slot] = pair.coalesced ? 1 : 0;
      at_mode[slot] = pair.chain_a.ever_accepted ? 0 : 1;
    }
  });

  std::vector<CouplingRow> rows;
  rows.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    detail::RunningStats d;
    double n_coalesced = 0.0;
    double n_at_mode = 0.0;
    for (std::size_t k = 0; k < replicas; ++k) {
      const std::size_t slot = t * replicas + k;
      d.push(dist[slot]);
      n_coalesced += coalesced[slot];
      n_at_mode += at_mode[slot];
    }
    const double n = static_cast<double>(replicas);
    rows.push_back({static_cast<int>(t), d.mean(), d.std_error(), n_coalesced / n, n_at_mode / n});
  }
  return rows;
}

Estimate estimate_wasserstein_coupling(const MhKernel& kernel, const ModeResult& mode, int t, const CouplingSpec& spec) {
  CouplingSpec local = spec;
  local.t_max = t;
  const auto rows = coupling_profile(kernel, mode, local);
  return {rows.back().mean_distance, rows.back().std_error};
}

Estimate atom_mass(const MhKernel& kernel, const ModeResult& mode, int t, int replicas, std::uint64_t seed,
                   int threads) {
  if (replicas < 100) throw Error(ErrorKind::InvalidArgument, "atom mass needs at least 100 replicas");
  if (t < 0) throw Error(ErrorKind::InvalidArgument, "t must be non-negative");
  std::vector<unsigned char> never(static_cast<std::size_t>(replicas));
  parallel_for(never.size(), threads, [&](std::size_t k) {
    Rng rng = Rng::for_stream(seed, k);
    ChainState state = ChainState::at(kernel.target(), mode.beta_star);
    for (int s = 0; s < t; ++s) mh_step_inplace(kernel, state, rng);
    never[k] = state.ever_accepted ? 0 : 1;
  });
  detail::RunningStats stats;
  for (auto v : never) stats.push(v);
  return stats.estimate();
}

}  // namespace cmh
