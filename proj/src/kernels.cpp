#include "kcell/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <utility>

namespace kcell::kernels {

namespace {
std::atomic<Exec> g_exec{Exec::Parallel};

// Below this many word operations per elimination step the thread fork costs
// more than it saves.
constexpr std::size_t kParallelGrain = 1 << 14;

inline Word mulsub(Word x, Word f, Word y, Word p) { return (x + p - (f * y) % p) % p; }

void swap_rows(Word* a, std::size_t n, std::size_t r1, std::size_t r2) {
  if (r1 == r2) return;
  std::swap_ranges(a + r1 * n, a + r1 * n + n, a + r2 * n);
}

void scale_row(Word* row, std::size_t from, std::size_t n, Word s, Word p) {
  for (std::size_t j = from; j < n; ++j) row[j] = (row[j] * s) % p;
}

template <bool Parallel>
std::vector<std::size_t> rref_impl(Word* a, std::size_t m, std::size_t n, Word p, Word* u) {
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < m; ++c) {
    std::size_t piv = m;
    for (std::size_t r = rank; r < m; ++r) {
      if (a[r * n + c] != 0) {
        piv = r;
        break;
      }
    }
    if (piv == m) continue;
    swap_rows(a, n, rank, piv);
    if (u) swap_rows(u, m, rank, piv);
    const Word inv = inverse_mod(a[rank * n + c], p);
    scale_row(a + rank * n, c, n, inv, p);
    if (u) scale_row(u + rank * m, 0, m, inv, p);

    const Word* prow = a + rank * n;
    const Word* urow = u ? u + rank * m : nullptr;
    const auto r_piv = static_cast<long long>(rank);
    const auto m_ll = static_cast<long long>(m);
    const bool go_parallel = Parallel && (m * (n - c + (u ? m : 0)) >= kParallelGrain);
#pragma omp parallel for schedule(static) if (go_parallel)
    for (long long i = 0; i < m_ll; ++i) {
      if (i == r_piv) continue;
      Word* row = a + static_cast<std::size_t>(i) * n;
      const Word f = row[c];
      if (f == 0) continue;
      for (std::size_t j = c; j < n; ++j) row[j] = mulsub(row[j], f, prow[j], p);
      if (u) {
        Word* ur = u + static_cast<std::size_t>(i) * m;
        for (std::size_t j = 0; j < m; ++j) ur[j] = mulsub(ur[j], f, urow[j], p);
      }
    }
    pivots.push_back(c);
    ++rank;
  }
  return pivots;
}

template <bool Parallel>
void matmul_impl(const Word* a, const Word* b, Word* c, std::size_t m, std::size_t k, std::size_t n, Word p) {
  const auto m_ll = static_cast<long long>(m);
  const bool go_parallel = Parallel && m * k * n >= kParallelGrain;
#pragma omp parallel for schedule(static) if (go_parallel)
  for (long long ii = 0; ii < m_ll; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    Word* crow = c + i * n;
    std::fill(crow, crow + n, Word{0});
    for (std::size_t t = 0; t < k; ++t) {
      const Word f = a[i * k + t];
      if (f == 0) continue;
      const Word* brow = b + t * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = (crow[j] + f * brow[j]) % p;
    }
  }
}
}  // namespace

Exec default_exec() { return g_exec.load(std::memory_order_relaxed); }
void set_default_exec(Exec e) { g_exec.store(e, std::memory_order_relaxed); }

Word inverse_mod(Word a, Word p) {
  // Extended Euclid on signed values; p < 2^31 keeps everything in range.
  long long t = 0, new_t = 1;
  long long r = static_cast<long long>(p), new_r = static_cast<long long>(a % p);
  while (new_r != 0) {
    const long long q = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
  }
  if (t < 0) t += static_cast<long long>(p);
  return static_cast<Word>(t);
}

std::vector<std::size_t> fp_rref_serial(Word* a, std::size_t m, std::size_t n, Word p, Word* u) {
  return rref_impl<false>(a, m, n, p, u);
}
std::vector<std::size_t> fp_rref_parallel(Word* a, std::size_t m, std::size_t n, Word p, Word* u) {
  return rref_impl<true>(a, m, n, p, u);
}
void fp_matmul_serial(const Word* a, const Word* b, Word* c, std::size_t m, std::size_t k, std::size_t n, Word p) {
  matmul_impl<false>(a, b, c, m, k, n, p);
}
void fp_matmul_parallel(const Word* a, const Word* b, Word* c, std::size_t m, std::size_t k, std::size_t n, Word p) {
  matmul_impl<true>(a, b, c, m, k, n, p);
}

}  // namespace kcell::kernels
