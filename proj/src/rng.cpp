#include "cmh/rng.hpp"

namespace cmh {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::for_stream(std::uint64_t base_seed, std::uint64_t index) {
  return Rng(splitmix64(base_seed ^ splitmix64(index + 1)));
}

}  // namespace cmh
