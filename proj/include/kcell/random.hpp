#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kcell/complex.hpp"

namespace kcell {

/// Random complex of free modules kG^{ranks[i]} in degrees lo, lo+1, ...
/// Each generator of X_{n+1} is sent to a random combination of a kernel
/// basis of d_n, so d∘d = 0 by construction. Coefficients over Z lie in [−2, 2].
GComplex random_free_complex(std::mt19937_64& rng, const GroupPtr& g, Ring ring, int lo,
                             const std::vector<std::size_t>& ranks);

/// Same with a fresh generator seeded by `seed`.
GComplex random_free_complex(std::uint64_t seed, const GroupPtr& g, Ring ring, int lo,
                             const std::vector<std::size_t>& ranks);

/// Random module of the given rank over a cyclic group with F_p coefficients: a sum of
/// Jordan blocks of p-power order tensored with regular representations of p'-order
/// quotients, conjugated by a random invertible matrix.
GModule random_cyclic_module(std::mt19937_64& rng, const GroupPtr& g, Ring ring, std::size_t rank);

/// Complex on the given modules (degrees lo, lo+1, ...) whose differentials are random
/// equivariant maps with d_{n−1} d_n = 0. Modules must have no relations.
GComplex random_complex(std::mt19937_64& rng, const std::vector<GModule>& modules, int lo);

}  // namespace kcell
