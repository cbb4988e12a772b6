#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "roughldp/grid_path.hpp"

namespace testing {

// Small xorshift generator so property inputs do not depend on the library RNG.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : s_(seed * 0x9E3779B97F4A7C15ULL + 1) {}
  double uniform() {
    s_ ^= s_ << 13;
    s_ ^= s_ >> 7;
    s_ ^= s_ << 17;
    return static_cast<double>(s_ >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = uniform() + 0x1.0p-54, u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  std::vector<double> normals(std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * normal();
    return v;
  }
  roughldp::GridFunction walk(std::size_t n, double horizon = 1.0) {
    std::vector<double> v(n + 1, uniform(-1.0, 1.0));
    const double sd = std::sqrt(horizon / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) v[i + 1] = v[i] + sd * normal();
    return roughldp::GridFunction(horizon, v);
  }

 private:
  std::uint64_t s_;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
