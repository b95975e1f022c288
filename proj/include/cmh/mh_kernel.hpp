#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "cmh/optimize.hpp"
#include "cmh/spd_gaussian.hpp"
#include "cmh/targets.hpp"

namespace cmh {

struct IndependenceProposal {
  GaussianSpec spec;
};

// θ′ = θ + step_lower · z
struct RandomWalkProposal {
  SpdMatrix step_cov;
};

using Proposal = std::variant<IndependenceProposal, RandomWalkProposal>;

class MhKernel {
 public:
  static MhKernel independence(TargetModel target, GaussianSpec proposal);
  static MhKernel random_walk(TargetModel target, SpdMatrix step_cov);

  const TargetModel& target() const { return target_; }
  const Proposal& proposal() const { return proposal_; }
  bool is_independence() const { return std::holds_alternative<IndependenceProposal>(proposal_); }
  // Throws NotIndependenceKernel for random-walk kernels.
  const GaussianSpec& independence_spec() const;
  Eigen::Index dim() const { return target_.dim(); }

  Vector draw_proposal(const Vector& current, Rng& rng) const;

  // log of the proposal density ratio correction log q(θ′,θ) − log q(θ,θ′).
  double log_q_correction(const Vector& from, const Vector& to) const;

 private:
  MhKernel(TargetModel target, Proposal proposal);

  TargetModel target_;
  Proposal proposal_;
};

// Independence kernel with proposal N(β*, α⁻¹C), α and C taken from the
// model's prior (or the explicit overrides). Throws ModeNotConverged.
MhKernel centered_mhi(const TargetModel& model, const ModeResult& mode);
MhKernel centered_mhi(const TargetModel& model, const ModeResult& mode, double alpha,
                      const SpdMatrix& cov);

struct ChainState {
  Vector position;
  double log_post = 0.0;  // −f(position)
  std::int64_t steps = 0;
  std::int64_t accepts = 0;
  bool ever_accepted = false;

  static ChainState at(const TargetModel& target, Vector position);
};

// min(0, log π̃(θ′) − log π̃(θ) + log q(θ′,θ) − log q(θ,θ′)); 0 when
// log π̃(θ) = −∞. Throws NanFault on NaN.
double log_acceptance(const MhKernel& kernel, const Vector& from, double from_log_post,
                      const Vector& to, double to_log_post);
double log_acceptance(const MhKernel& kernel, const Vector& from, const Vector& to);

// Draws the proposal first and the uniform second, both from rng.
ChainState mh_step(const MhKernel& kernel, const ChainState& state, Rng& rng);
// In-place variant; returns whether the proposal was accepted.
bool mh_step_inplace(const MhKernel& kernel, ChainState& state, Rng& rng);

enum class Record { Trace, Summary };

struct TraceRow {
  std::int64_t step = 0;
  Vector position;
  bool accepted = false;
};

struct ChainRun {
  ChainState final;
  double acceptance_rate = 0.0;  // NaN when no steps were taken
  bool ever_accepted = false;
  std::vector<TraceRow> trace;  // filled in Record::Trace mode
};

ChainRun run_chain(const MhKernel& kernel, const Vector& init, std::int64_t t, Rng& rng,
                   Record record = Record::Summary);

// Monte Carlo mean with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of A(θ) = E_{θ′∼q(θ,·)} a(θ,θ′). m ≥ 2.
Estimate estimate_acceptance(const MhKernel& kernel, const Vector& theta, int m, Rng& rng);

}  // namespace cmh
