#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace kcell {

using Integer = mpz_class;

bool is_prime(std::uint64_t n);
std::vector<Integer> prime_factors(Integer n);

/// Coefficient ring: the prime field F_p when p > 0, the integers when p == 0.
/// Z/m coefficients are modelled over the integers with m-torsion relations.
struct Ring {
  std::uint64_t p = 0;

  static Ring integers() { return Ring{0}; }
  static Ring prime_field(std::uint64_t p);

  bool is_field() const { return p != 0; }
  bool operator==(const Ring&) const = default;

  void normalize(Integer& x) const {
    if (p != 0) {
      mpz_fdiv_r_ui(x.get_mpz_t(), x.get_mpz_t(), p);
    }
  }
  Integer reduced(Integer x) const {
    normalize(x);
    return x;
  }
  bool is_unit(const Integer& x) const;
  Integer inverse(const Integer& x) const;

  std::string name() const;
};

}  // namespace kcell
