#pragma once

// Dense F_p kernels on word-sized residues (p < 2^31). Each kernel comes in a
// serial reference form and an OpenMP form; the two must agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace kcell::kernels {

using Word = std::uint64_t;

enum class Exec { Serial, Parallel };

/// Global default used by the library; tests and the benchmark flip it.
Exec default_exec();
void set_default_exec(Exec e);

constexpr Word kMaxFastPrime = (Word{1} << 31);

/// c = a * b (m×k times k×n), all row-major, residues mod p.
void fp_matmul_serial(const Word* a, const Word* b, Word* c, std::size_t m, std::size_t k, std::size_t n, Word p);
void fp_matmul_parallel(const Word* a, const Word* b, Word* c, std::size_t m, std::size_t k, std::size_t n, Word p);

/// In-place reduced row echelon form of the m×n matrix `a`. Pivots are chosen
/// leftmost column first, smallest row index first. When `u` is non-null it is
/// an m×m matrix that receives the same row operations (pass the identity to
/// obtain the transform U with U·A = RREF). Returns the pivot columns.
std::vector<std::size_t> fp_rref_serial(Word* a, std::size_t m, std::size_t n, Word p, Word* u);
std::vector<std::size_t> fp_rref_parallel(Word* a, std::size_t m, std::size_t n, Word p, Word* u);

inline std::vector<std::size_t> fp_rref(Word* a, std::size_t m, std::size_t n, Word p, Word* u, Exec e) {
  return e == Exec::Serial ? fp_rref_serial(a, m, n, p, u) : fp_rref_parallel(a, m, n, p, u);
}
inline void fp_matmul(const Word* a, const Word* b, Word* c, std::size_t m, std::size_t k, std::size_t n, Word p,
                      Exec e) {
  if (e == Exec::Serial)
    fp_matmul_serial(a, b, c, m, k, n, p);
  else
    fp_matmul_parallel(a, b, c, m, k, n, p);
}

Word inverse_mod(Word a, Word p);

}  // namespace kcell::kernels
