#include "sginf/roots.hpp"

#include <cmath>
#include <numeric>

namespace sginf {

double return_distance(double theta, std::int64_t k) {
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  const long double turns = static_cast<long double>(theta) / two_pi * static_cast<long double>(k);
  long double frac = turns - std::floor(turns);
  if (frac > 0.5L) frac -= 1.0L;
  return static_cast<double>(2.0L * std::fabs(std::sin(frac * two_pi / 2.0L)));
}

std::optional<std::int64_t> root_of_unity_order(double theta, std::int64_t k_max, double tol) {
  for (std::int64_t k = 1; k <= k_max; ++k)
    if (return_distance(theta, k) < tol) return k;
  return std::nullopt;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  return std::lcm(a, b);
}

}  // namespace sginf
