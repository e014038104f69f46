#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's elimination code.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "kcell/matrix.hpp"

namespace oracle {

using kcell::Integer;
using kcell::Matrix;
using kcell::Ring;

// Every vector of F_p^n, as small integer vectors.
inline std::vector<std::vector<long>> all_vectors(std::size_t n, long p) {
  std::vector<std::vector<long>> out;
  std::vector<long> v(n, 0);
  for (;;) {
    out.push_back(v);
    std::size_t i = 0;
    while (i < n && ++v[i] == p) v[i++] = 0;
    if (i == n) break;
  }
  return out;
}

inline bool maps_to_zero(const Matrix& m, const std::vector<long>& v) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer s = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    m.ring().normalize(s);
    if (s != 0) return false;
  }
  return true;
}

// Number of vectors in the kernel of m over F_p, by enumeration.
inline std::size_t kernel_size(const Matrix& m) {
  std::size_t count = 0;
  for (const auto& v : all_vectors(m.cols(), static_cast<long>(m.ring().p)))
    if (maps_to_zero(m, v)) ++count;
  return count;
}

inline Integer det_cofactor(const std::vector<std::vector<Integer>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  Integer d = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j] == 0) continue;
    std::vector<std::vector<Integer>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Integer> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(a[i][k]);
      minor.push_back(row);
    }
    Integer c = a[0][j] * det_cofactor(minor);
    d += (j % 2 ? -c : c);
  }
  return d;
}

inline void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                    const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (cur.size() == k) {
    f(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, f);
    cur.pop_back();
  }
}

// Determinantal divisors D_k = gcd of all k×k minors; invariant factors are D_k / D_{k−1}.
inline std::vector<Integer> invariant_factors_by_minors(const Matrix& m) {
  std::vector<Integer> out;
  const std::size_t kmax = std::min(m.rows(), m.cols());
  Integer prev = 1;
  for (std::size_t k = 1; k <= kmax; ++k) {
    Integer g = 0;
    std::vector<std::size_t> rs, cs;
    subsets(m.rows(), k, 0, rs, [&](const std::vector<std::size_t>& r) {
      std::vector<std::size_t> c0;
      subsets(m.cols(), k, 0, c0, [&](const std::vector<std::size_t>& c) {
        std::vector<std::vector<Integer>> a(k, std::vector<Integer>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) a[i][j] = m(r[i], c[j]);
        Integer d = det_cofactor(a);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      });
    });
    if (g == 0) {
      for (std::size_t t = k; t <= kmax; ++t) out.push_back(0);
      break;
    }
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, Ring ring, long lo, long hi) {
  std::uniform_int_distribution<long> dist(lo, hi);
  Matrix m(r, c, ring);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, dist(rng));
  return m;
}

// Product of random elementary matrices: unimodular by construction.
inline Matrix random_unimodular(std::mt19937_64& rng, std::size_t n, int steps = 12) {
  Matrix u = Matrix::identity(n);
  if (n < 2) return u;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<long> mult(-2, 2);
  for (int s = 0; s < steps; ++s) {
    std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    Matrix e = Matrix::identity(n);
    e(i, j) = mult(rng);
    u = e * u;
  }
  return u;
}


// Exact log_p of a power of p.
inline std::size_t log_p(std::size_t n, std::size_t p) {
  std::size_t e = 0;
  while (n > 1) {
    n /= p;
    ++e;
  }
  return e;
}

// Every d×d matrix over F_p with A^m = I (d, p small).
inline std::vector<Matrix> all_actions(std::size_t d, long p, int m) {
  Ring ring = Ring::prime_field(static_cast<std::uint64_t>(p));
  std::vector<Matrix> out;
  for (const auto& v : all_vectors(d * d, p)) {
    Matrix a(d, d, ring);
    for (std::size_t i = 0; i < d * d; ++i) a.set(i / d, i % d, v[i]);
    Matrix pw = Matrix::identity(d, ring);
    for (int j = 0; j < m; ++j) pw = pw * a;
    if (pw == Matrix::identity(d, ring)) out.push_back(a);
  }
  return out;
}

// dim H^i(C_m; M) over F_p for M = F_p^d with generator acting by a, from the
// periodic resolution: H^0 = ker(1−g), H^odd = ker N / im(1−g),
// H^even = ker(1−g) / im N. Sizes by enumeration.
inline std::size_t cyclic_cohomology_dim(const Matrix& a, int m, int i) {
  const Ring ring = a.ring();
  const std::size_t d = a.rows();
  const std::size_t p = static_cast<std::size_t>(ring.p);
  Matrix one_minus = Matrix::identity(d, ring) - a;
  Matrix norm(d, d, ring);
  Matrix pw = Matrix::identity(d, ring);
  for (int j = 0; j < m; ++j) {
    norm = norm + pw;
    pw = pw * a;
  }
  const std::size_t ker_z = log_p(kernel_size(one_minus), p);
  const std::size_t ker_n = log_p(kernel_size(norm), p);
  if (i == 0) return ker_z;
  if (i % 2) return ker_n - (d - ker_z);
  return ker_z - (d - ker_n);
}

inline long smallest_prime_factor(long n) {
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return d;
  return n;
}

// Rank over F_2 of a 0/1 matrix given by rows.
inline std::size_t f2_rank(std::vector<std::vector<int>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && !(rows[piv][c] & 1)) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && (rows[r][c] & 1))
        for (std::size_t k = 0; k < cols; ++k) rows[r][k] ^= rows[rank][k] & 1;
    ++rank;
  }
  return rank;
}

// Mod-2 Betti numbers of a simplicial complex listed by dimension (sorted vertex lists).
inline std::vector<std::size_t> f2_betti(const std::vector<std::vector<std::vector<int>>>& by_dim) {
  std::vector<std::size_t> ranks(by_dim.size() + 1, 0);  // ranks[n] = rank of boundary C_n -> C_{n-1}
  for (std::size_t n = 1; n < by_dim.size(); ++n) {
    std::vector<std::vector<int>> rows;
    for (const auto& s : by_dim[n]) {
      std::vector<int> row(by_dim[n - 1].size(), 0);
      for (std::size_t j = 0; j < s.size(); ++j) {
        auto f = s;
        f.erase(f.begin() + static_cast<long>(j));
        for (std::size_t i = 0; i < by_dim[n - 1].size(); ++i)
          if (by_dim[n - 1][i] == f) row[i] = 1;
      }
      rows.push_back(row);
    }
    ranks[n] = f2_rank(rows);
  }
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < by_dim.size(); ++n) out.push_back(by_dim[n].size() - ranks[n] - ranks[n + 1]);
  return out;
}

// Tor over a polynomial algebra of k: one entry per subset of generators.
inline std::map<std::pair<int, int>, std::size_t> koszul_tor(const std::vector<int>& degrees, int s_max, int t_max) {
  std::map<std::pair<int, int>, std::size_t> out;
  for (std::uint32_t mask = 0; mask < (1u << degrees.size()); ++mask) {
    int s = 0, t = 0;
    for (std::size_t i = 0; i < degrees.size(); ++i)
      if (mask & (1u << i)) {
        ++s;
        t += degrees[i];
      }
    if (s <= s_max && t <= t_max) ++out[{s, t}];
  }
  return out;
}

// Tor over an exterior algebra of k: one entry per multiset of generators.
inline std::map<std::pair<int, int>, std::size_t> divided_power_tor(const std::vector<int>& degrees, int s_max,
                                                                    int t_max) {
  std::map<std::pair<int, int>, std::size_t> out;
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t i, int s, int t) {
    if (s > s_max || t > t_max) return;
    if (i == degrees.size()) {
      ++out[{s, t}];
      return;
    }
    for (int k = 0; s + k <= s_max && t + k * degrees[i] <= t_max; ++k) rec(i + 1, s + k, t + k * degrees[i]);
  };
  rec(0, 0, 0);
  return out;
}

// Orbits of the group generated by one permutation.
inline std::size_t orbit_count(const std::vector<int>& perm) {
  std::vector<int> seen(perm.size(), 0);
  std::size_t n = 0;
  for (std::size_t v = 0; v < perm.size(); ++v) {
    if (seen[v]) continue;
    ++n;
    for (std::size_t w = v; !seen[w]; w = static_cast<std::size_t>(perm[w])) seen[w] = 1;
  }
  return n;
}

// Mod-2 Betti numbers of the orbit complex of an involution acting freely on simplices.
inline std::vector<std::size_t> quotient_betti_f2(const std::vector<std::vector<std::vector<int>>>& by_dim,
                                                  const std::vector<int>& vertex_perm) {
  std::vector<std::vector<std::vector<int>>> orbits(by_dim.size());
  std::vector<std::map<std::vector<int>, std::size_t>> orbit_of(by_dim.size());
  for (std::size_t n = 0; n < by_dim.size(); ++n)
    for (const auto& s : by_dim[n]) {
      if (orbit_of[n].count(s)) continue;
      std::vector<int> t;
      for (int v : s) t.push_back(vertex_perm[static_cast<std::size_t>(v)]);
      std::sort(t.begin(), t.end());
      orbit_of[n][s] = orbits[n].size();
      orbit_of[n][t] = orbits[n].size();
      orbits[n].push_back(s);
    }
  std::vector<std::size_t> ranks(by_dim.size() + 1, 0);
  for (std::size_t n = 1; n < by_dim.size(); ++n) {
    std::vector<std::vector<int>> rows;
    for (const auto& s : orbits[n]) {
      std::vector<int> row(orbits[n - 1].size(), 0);
      for (std::size_t j = 0; j < s.size(); ++j) {
        auto f = s;
        f.erase(f.begin() + static_cast<long>(j));
        row[orbit_of[n - 1].at(f)] ^= 1;
      }
      rows.push_back(row);
    }
    ranks[n] = f2_rank(rows);
  }
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < by_dim.size(); ++n) out.push_back(orbits[n].size() - ranks[n] - ranks[n + 1]);
  return out;
}

}  // namespace oracle
