#pragma once

// Small helpers for arguments theta of unimodular numbers e^{i theta}.

#include <cstdint>
#include <optional>

namespace sginf {

/// |e^{i k theta} - 1|, evaluated by range-reducing k*theta/(2 pi) in long
/// double so large k does not accumulate rounding.
double return_distance(double theta, std::int64_t k);

/// Smallest k in [1, k_max] with |e^{i k theta} - 1| < tol.
std::optional<std::int64_t> root_of_unity_order(double theta, std::int64_t k_max, double tol);

std::int64_t lcm64(std::int64_t a, std::int64_t b);

}  // namespace sginf
