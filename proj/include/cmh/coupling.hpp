#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmh/mh_kernel.hpp"
#include "cmh/rates.hpp"

namespace cmh {

inline constexpr std::int64_t kDefaultStationaryBurnin = 10'000;

struct CoupledPair {
  ChainState chain_a;  // started at θ*
  ChainState chain_b;  // started from an approximate stationary draw
  bool coalesced = false;
  std::optional<std::int64_t> coalesce_step;
};

// One shared proposal then one shared uniform; each chain accepts against its
// own acceptance probability. Throws NotIndependenceKernel.
void couple_step(const MhKernel& kernel, CoupledPair& pair, Rng& rng);

struct CouplingSpec {
  int t_max = 10;
  int replicas = 10'000;
  Metric metric = Metric::L2;
  std::int64_t stationary_burnin = kDefaultStationaryBurnin;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct CouplingRow {
  int t = 0;
  double mean_distance = 0.0;
  double std_error = 0.0;
  double fraction_coalesced = 0.0;
  double fraction_at_mode = 0.0;
};

// Synchronous coupling of P^t(θ*,·) with a burned-in chain for t = 0..t_max.
// Replica k uses Rng::for_stream(seed, k): burn-in of chain_b first, then the
// coupled steps.
std::vector<CouplingRow> coupling_profile(const MhKernel& kernel, const ModeResult& mode,
                                          const CouplingSpec& spec);

Estimate estimate_wasserstein_coupling(const MhKernel& kernel, const ModeResult& mode, int t,
                                       const CouplingSpec& spec);

// Fraction of chains started at θ* that have never accepted after t steps.
Estimate atom_mass(const MhKernel& kernel, const ModeResult& mode, int t, int replicas,
                   std::uint64_t seed, int threads = 1);

}  // namespace cmh
