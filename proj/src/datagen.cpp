#include "cmh/datagen.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "cmh/error.hpp"
#include "cmh/io.hpp"

namespace cmh {

SpdMatrix CovSpec::build(Eigen::Index d) const {
  switch (kind) {
    case CovKind::Identity: return SpdMatrix::identity(d);
    case CovKind::ScaledIdentity: return SpdMatrix::scaled_identity(d, s0 / static_cast<double>(d));
    case CovKind::Diagonal: {
      if (static_cast<Eigen::Index>(diag.size()) != d) {
        throw Error(ErrorKind::DimensionMismatch, "diagonal covariance length differs from d");
      }
      return SpdMatrix::diagonal(Eigen::Map<const Vector>(diag.data(), d));
    }
    case CovKind::File: {
      Matrix m = io::read_matrix_csv(path);
      if (m.rows() != d || m.cols() != d) throw Error(ErrorKind::DimensionMismatch, "covariance file is not d×d");
      return SpdMatrix::factor(m);
    }
  }
  throw Error(ErrorKind::UnknownKind, "unknown covariance kind");
}

std::string CovSpec::describe() const {
  switch (kind) {
    case CovKind::Identity: return "identity";
    case CovKind::ScaledIdentity: return "scaled:" + io::format_double(s0);
    case CovKind::Diagonal: return "diag:" + io::format_vector(Eigen::Map<const Vector>(diag.data(), diag.size()), ';');
    case CovKind::File: return "file:" + path;
  }
  return "unknown";
}

// identity | scaled:<s0> | diag:<v1;v2;...> | file:<path>
CovSpec parse_cov_spec(const std::string& text) {
  CovSpec spec;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "identity" && tail.empty()) {
    spec.kind = CovKind::Identity;
  } else if (head == "scaled") {
    spec.kind = CovKind::ScaledIdentity;
    spec.s0 = tail.empty() ? 1.0 : io::parse_double(tail);
    if (!(spec.s0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "s0 must be positive");
  } else if (head == "diag") {
    spec.kind = CovKind::Diagonal;
    const Vector v = io::parse_vector(tail, ';');
    spec.diag.assign(v.data(), v.data() + v.size());
  } else if (head == "file" && !tail.empty()) {
    spec.kind = CovKind::File;
    spec.path = tail;
  } else {
    throw Error(ErrorKind::ParseError, "bad covariance spec '" + text + "'");
  }
  return spec;
}

Matrix gen_design(const GenConfig& cfg, Rng& rng) {
  if (cfg.n < 1 || cfg.d < 1) throw Error(ErrorKind::InvalidArgument, "n and d must be positive");
  if (!(cfg.sigma2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma2 must be positive");
  const double sd = std::sqrt(cfg.sigma2 / static_cast<double>(cfg.n));
  Matrix x(cfg.n, cfg.d);
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    for (Eigen::Index j = 0; j < cfg.d; ++j) x(i, j) = sd * rng.normal();
  }
  return x;
}

Vector draw_beta_prior(double alpha, const SpdMatrix& cov, Rng& rng) {
  return gauss_sample(GaussianSpec(Vector::Zero(cov.dim()), cov, alpha), rng);
}

Vector gen_response(ModelKind kind, const Matrix& x, const Vector& beta, double nb_xi, Rng& rng) {
  if (!is_glm(kind)) throw Error(ErrorKind::UnknownKind, "responses exist only for GLM kinds");
  if (x.cols() != beta.size()) throw Error(ErrorKind::DimensionMismatch, "design and beta dimensions differ");
  const Vector u = x * beta;
  Vector y(u.size());
  auto& engine = rng.engine();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    switch (kind) {
      case ModelKind::Logistic: y[i] = rng.uniform() < numerics::sigmoid(u[i]) ? 1.0 : 0.0; break;
      case ModelKind::Probit: y[i] = rng.uniform() < numerics::norm_cdf(u[i]) ? 1.0 : 0.0; break;
      case ModelKind::Poisson:
        y[i] = static_cast<double>(std::poisson_distribution<std::int64_t>(std::exp(u[i]))(engine));
        break;
      case ModelKind::NegBinom: {
        if (!(nb_xi > 0.0)) throw Error(ErrorKind::InvalidArgument, "negative-binomial xi must be positive");
        // Gamma(ξ, odds) mixing rate with odds = s/(1−s) = exp(u).
        const double rate = std::gamma_distribution<double>(nb_xi, std::exp(u[i]))(engine);
        y[i] = rate > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(rate)(engine)) : 0.0;
        break;
      }
      default: break;
    }
  }
  return y;
}

GeneratedData generate(const GenConfig& cfg) {
  Rng rng(cfg.seed);
  GeneratedData out;
  out.data.x = gen_design(cfg, rng);
  const SpdMatrix cov = cfg.cov.build(cfg.d);
  out.beta_true = draw_beta_prior(cfg.alpha, cov, rng);
  out.data.y = gen_response(cfg.kind, out.data.x, out.beta_true, cfg.nb_xi, rng);
  return out;
}

}  // namespace cmh
