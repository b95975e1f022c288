#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cmh/mh_kernel.hpp"
#include "cmh/optimize.hpp"

namespace cmh {

enum class Metric { L1, L2, Linf, Tv };

std::string_view metric_name(Metric metric) noexcept;
Metric parse_metric(std::string_view name);
double distance(Metric metric, const Vector& a, const Vector& b);

// A centered independence kernel whose dominance condition has been probed
// and passed. Rate certificates can only be issued through this type.
class CertifiedKernel {
 public:
  // Throws DominanceNotVerified, NotIndependenceKernel, MeanMismatch.
  static CertifiedKernel certify(const MhKernel& kernel, const ModeResult& mode, int probes,
                                 Rng& rng);

  const MhKernel& kernel() const { return kernel_; }
  const ModeResult& mode() const { return mode_; }
  const DominanceReport& report() const { return report_; }

 private:
  CertifiedKernel(MhKernel kernel, ModeResult mode, DominanceReport report)
      : kernel_(std::move(kernel)), mode_(std::move(mode)), report_(std::move(report)) {}

  MhKernel kernel_;
  ModeResult mode_;
  DominanceReport report_;
};

// ε = q(θ*)/π(θ*) as the proposal-mean of exp(log w(θ′) − log w(θ*)),
// w = π̃/q. m ≥ 1000.
Estimate estimate_epsilon_mc(const CertifiedKernel& certified, int m, Rng& rng);

struct GridSpec {
  double half_width = 12.0;
  int points = 20'001;
};

// ε = q(θ*)·Z_Π·exp(f(θ*)) with Z_Π by tensor trapezoid on [θ*−h, θ*+h]^d.
// Throws DimensionTooLarge (d > 2) and GridTooCoarse if doubling the point
// count moves the result by more than 1e-6 relative.
double epsilon_quadrature(const TargetModel& model, const MhKernel& kernel, GridSpec grid);

// Power iteration for λ_max(XᵀX); converged when successive Rayleigh quotients
// agree to 1e-10 relative. Throws PowerIterationStalled after 1e5 iterations.
double lambda_max_gram(const Matrix& x);

struct GlmEpsilonBound {
  double lambda_max = 0.0;
  double trace_cov = 0.0;
  double a_dn = 0.0;
  double epsilon_lb = 0.0;
};

inline constexpr double kLogisticR0 = 0.25;
inline constexpr double kProbitR0 = 1.0;

// a_{d,n} = (r0 / 2α)·λ_max(XᵀX)·tr(C), ε ≥ exp(−a_{d,n}).
GlmEpsilonBound epsilon_lower_bound_glm(const Dataset& data, double alpha, const SpdMatrix& cov,
                                        double r0);

struct RatePoint {
  int t = 0;
  double exact_w = 0.0;
  std::optional<double> lower_bound;
  std::optional<double> asymptotic_bound;
};

struct RateCertificate {
  double epsilon = 0.0;
  double epsilon_stderr = 0.0;
  std::string_view method;
  double mean_rho = 0.0;
  Metric metric = Metric::L2;
  std::vector<RatePoint> series;
};

// exact_w(t) = (1−ε)^t · mean_rho for t = 0..t_max. Pass Metric::Tv to force
// mean_rho = 1.
std::vector<RatePoint> exact_rate_series(double epsilon, double mean_rho, int t_max,
                                         Metric metric = Metric::L2);

struct LongChainSpec {
  std::int64_t t = 2'000;
  int replicas = 100;
  std::uint64_t seed = 1;
  int threads = 1;
};

// ∫ρ(θ, θ*) dΠ(θ) by trapezoid quadrature (d ≤ 2) with one Richardson step
// over a nested grid; std_error is the estimated discretization error.
Estimate mean_rho_quadrature(const TargetModel& model, const ModeResult& mode, Metric metric,
                             GridSpec grid);
// Same quantity by averaging ρ over the second half of `replicas` centered MHI
// chains of length t started at θ*.
Estimate mean_rho_long_chain(const CertifiedKernel& certified, Metric metric,
                             const LongChainSpec& spec);

// Sup of the normalized density on the quadrature grid (d ≤ 2); used to check a
// caller-supplied density bound M.
double density_sup_quadrature(const TargetModel& model, const Vector& center, GridSpec grid);

enum class Norm { L1, L2, Linf };
Norm parse_norm(std::string_view name);

// C₀·(1 − A)^{t(1+1/d)} with C₀ = C₀′(1 − 1/(1+d)) / (2 M^{1/d} (1+d)^{1/d}).
// Throws InvalidBound if M ≤ 0.
double wasserstein_lower_bound(double density_bound, int d, double acceptance, int t, Norm norm);

struct AsymptoticCurve {
  double a0 = 0.0;
  double rate = 0.0;
  std::vector<double> series;  // rate^t for t = 0..t_max
};

// a₀ = r₀(1+√γ)²σ²s₀/(2α), rate = 1 − exp(−a₀).
AsymptoticCurve asymptotic_curve(double gamma, double sigma2, double s0, double alpha, double r0,
                                 int t_max);

}  // namespace cmh
