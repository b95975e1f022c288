#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace cmh {

// 64-bit Mersenne Twister stream with fixed draw primitives. A stream is owned
// by exactly one worker; ensembles derive one stream per replica through
// Rng::for_stream so results never depend on the thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Stream splitting rule: seed = splitmix64(base ^ splitmix64(index + 1)).
  static Rng for_stream(std::uint64_t base_seed, std::uint64_t index);

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  Eigen::VectorXd normal_vector(Eigen::Index dim) {
    Eigen::VectorXd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = normal();
    return z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace cmh
