#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmh/spd_gaussian.hpp"
#include "cmh/targets.hpp"

namespace cmh {

enum class CovKind { Identity, ScaledIdentity, Diagonal, File };

struct CovSpec {
  CovKind kind = CovKind::Identity;
  double s0 = 1.0;             // ScaledIdentity: C = (s0/d)·I
  std::vector<double> diag;    // Diagonal
  std::string path;            // File: CSV matrix, no header

  SpdMatrix build(Eigen::Index d) const;
  std::string describe() const;
};

CovSpec parse_cov_spec(const std::string& text);

struct GenConfig {
  ModelKind kind = ModelKind::Logistic;
  Eigen::Index n = 100;
  Eigen::Index d = 5;
  double sigma2 = 1.0;
  double alpha = 1.0;
  CovSpec cov;
  double nb_xi = 1.0;
  std::uint64_t seed = 1;
};

// n×d with i.i.d. N(0, σ²/n) entries, row-major draw order.
Matrix gen_design(const GenConfig& cfg, Rng& rng);
// β ∼ N(0, α⁻¹C)
Vector draw_beta_prior(double alpha, const SpdMatrix& cov, Rng& rng);
// Conditional draws Y_i | X_i, β. Throws UnknownKind for non-GLM kinds.
Vector gen_response(ModelKind kind, const Matrix& x, const Vector& beta, double nb_xi, Rng& rng);

struct GeneratedData {
  Dataset data;
  Vector beta_true;
};

// Design, then β from the prior, then responses, all from one stream seeded
// by cfg.seed.
GeneratedData generate(const GenConfig& cfg);

}  // namespace cmh
