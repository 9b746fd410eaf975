#pragma once

// Named claim families. Everything except path_max and random_leaf is
// path-independent and therefore runs on a recombining lattice.

#include "gexp/lattice.hpp"

#include <cstdint>
#include <vector>

namespace gexp::claims {

Claim constant(double c);
/// a * B_T + b
Claim linear(double a, double b = 0.0);
/// a * (B_T - K)+
Claim call(double strike, double a = 1.0);
/// a * (K - B_T)+
Claim put(double strike, double a = 1.0);
/// a * 1{B_T > K}
Claim indicator(double strike, double a = 1.0);
/// a * B_T^2
Claim square(double a = 1.0);
/// a * max_k B_k along the path.
Claim path_max(double a = 1.0);
/// Independent seeded uniform value in [-scale, scale] per full path.
Claim random_leaf(std::uint64_t seed, double scale = 1.0);

/// `count` seeded random-leaf claims with derived seeds.
std::vector<Claim> random_family(std::uint64_t seed, int count, double scale = 1.0);

}  // namespace gexp::claims
