#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mtdet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent, reproducible stream for (master seed, stream id, index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  return splitmix64(splitmix64(master ^ (stream * 0xd6e8feb86659fd93ULL)) + index);
}

// mt19937_64 wrapper with hand-rolled mappings so sequences do not depend
// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Integer in [0, n). Mapping bias is below 2^-53 per draw.
  int uniform_int(int n) {
    const int v = static_cast<int>(u01() * static_cast<double>(n));
    return v >= n ? n - 1 : v;
  }

  // Box-Muller; consumes exactly two uniforms per call.
  double normal(double mean = 0.0, double sd = 1.0) {
    const double u1 = 1.0 - u01();  // (0, 1], keeps log finite
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mtdet
