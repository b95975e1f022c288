#pragma once

#include <vector>

#include "cmh/spd_gaussian.hpp"
#include "cmh/targets.hpp"

namespace cmh {

inline constexpr double kDefaultModeTol = 1e-8;
inline constexpr int kDefaultModeMaxIter = 50'000;
inline constexpr double kArmijoConstant = 1e-4;
inline constexpr double kDominanceTolerance = 1e-8;

struct ModeResult {
  Vector beta_star;
  double f_star = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective value at the start, then updated by the measured decrease of
  // every accepted step. Steps whose decrease is below the rounding of f are
  // measured by integrating the gradient along the step.
  std::vector<double> objective_history;
};

// Gradient descent with a Barzilai-Borwein trial step and Armijo backtracking
// (halve until sufficient decrease). Stops when ‖∇f‖₂ ≤ tol or after
// max_iter steps; failure to converge is reported through `converged`.
// Throws UnsupportedModel for the non-convex rwm example and
// NonFiniteObjective if f is not finite at an evaluated point.
ModeResult find_mode(const TargetModel& model, const Vector& init, double tol = kDefaultModeTol,
                     int max_iter = kDefaultModeMaxIter);

struct DominanceProbe {
  Vector theta;
  // f(θ*) + (α/2)(θ−θ*)ᵀC⁻¹(θ−θ*) − f(θ); positive values violate dominance.
  double violation = 0.0;
};

struct DominanceReport {
  double max_violation = 0.0;
  bool pass = false;
  std::vector<DominanceProbe> probes;
};

// Probes the quadratic lower bound f(θ) ≥ f(θ*) + (α/2)(θ−θ*)ᵀC⁻¹(θ−θ*) at
// `probes` draws from N(θ*, 9α⁻¹C) plus the 2d axis rays θ* ± r·e_i,
// r ∈ {1, 10, 100}. Throws MeanMismatch if the proposal is not centered at the
// mode.
DominanceReport verify_dominance(const TargetModel& model, const ModeResult& mode,
                                 const GaussianSpec& proposal, int probes, Rng& rng);

}  // namespace cmh
