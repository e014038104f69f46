#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "kcell/kernels.hpp"
#include "kcell/matrix.hpp"

namespace kcell {

// Matrices act on column vectors: an r×c matrix is a map R^c -> R^r. Bases of
// kernels, images and lattices are returned as the columns of a matrix.

struct RowReduction {
  Matrix echelon;    // U·M
  Matrix transform;  // U, invertible over the ring
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
};

/// Reduced row echelon form over F_p, Hermite normal form over Z (positive
/// pivots, entries above a pivot reduced into [0, pivot)). Pivots are taken in
/// the leftmost column, from the smallest row index (over Z the Euclid step
/// repeatedly promotes the smallest nonzero absolute value, ties by row).
RowReduction row_reduce(const Matrix& m, kernels::Exec exec = kernels::default_exec());

struct EchelonResult {
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
  Matrix kernel;  // cols × (cols − rank)
  Matrix image;   // rows × rank
};

EchelonResult echelonize(const Matrix& m, kernels::Exec exec = kernels::default_exec());

Matrix kernel_basis(const Matrix& m);
Matrix image_basis(const Matrix& m);
std::size_t rank_of(const Matrix& m);
Integer determinant(const Matrix& m);

struct SmithForm {
  Matrix U, S, V;
  Matrix U_inv, V_inv;
  std::vector<Integer> invariant_factors;  // length min(rows, cols), trailing zeros allowed
};

/// U·A·V = S with S diagonal and d_i | d_{i+1}. Over F_p the factors are 0/1.
SmithForm smith_normal_form(const Matrix& a);

/// Finitely generated abelian group (or F_p vector space when ring.p > 0).
struct FgAbelianGroup {
  Ring ring{};
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;  // invariant factors > 1, divisibility chain

  static FgAbelianGroup zero(Ring r = Ring::integers()) { return FgAbelianGroup{r, 0, {}}; }
  static FgAbelianGroup free(std::size_t n, Ring r = Ring::integers()) { return FgAbelianGroup{r, n, {}}; }
  static FgAbelianGroup cyclic(const Integer& order);
  /// Canonical form of ⊕ R/(d) over the given list (0 = free summand).
  static FgAbelianGroup from_orders(Ring r, const std::vector<Integer>& orders);

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  bool is_finite() const { return free_rank == 0; }
  /// Order of the torsion part (1 when torsion-free).
  Integer torsion_order() const;
  /// Vector-space dimension over a field ring; free rank + torsion count over Z.
  std::size_t num_generators() const { return free_rank + torsion.size(); }
  FgAbelianGroup direct_sum(const FgAbelianGroup& other) const;
  bool operator==(const FgAbelianGroup&) const = default;
  std::string to_string() const;
};

/// A group of the form (f.g. abelian) ⊕ ⊕_ℓ (Z[1/ℓ]/Z)^{s_ℓ}; the second part
/// records non-finitely-generated divisible summands such as Z[1/2]/Z.
struct LocalGroup {
  FgAbelianGroup fg;
  std::map<Integer, std::size_t> prufer;  // prime ℓ -> multiplicity

  bool is_zero() const;
  bool operator==(const LocalGroup& o) const { return fg == o.fg && prufer == o.prufer; }
  std::string to_string() const;
};

/// Submodule of R^n, stored by an echelon basis (rows of `rows_`).
class Lattice {
 public:
  Lattice() = default;
  Lattice(std::size_t ambient, Ring ring);
  static Lattice span(const Matrix& columns);
  static Lattice whole(std::size_t n, Ring ring);

  std::size_t ambient() const { return n_; }
  Ring ring() const { return ring_; }
  std::size_t rank() const { return rows_.rows(); }
  bool is_zero() const { return rank() == 0; }
  /// Basis vectors as columns (n × rank).
  Matrix basis() const { return rows_.transpose(); }

  bool contains(const std::vector<Integer>& v) const;
  bool contains(const Lattice& other) const;
  bool contains_columns(const Matrix& cols) const;
  /// Coordinates of v in basis(); throws InvalidInput when v is not contained.
  std::vector<Integer> coords(const std::vector<Integer>& v) const;
  /// Coordinates of each column of m, as columns of an rank × m.cols() matrix.
  Matrix coords_of(const Matrix& m) const;

  Lattice operator+(const Lattice& other) const;
  Lattice intersect(const Lattice& other) const;
  bool operator==(const Lattice& other) const { return n_ == other.n_ && rows_ == other.rows_; }

  /// {x : A x ∈ L}.
  static Lattice preimage(const Matrix& a, const Lattice& l);
  /// A(L).
  static Lattice image(const Matrix& a, const Lattice& l);

 private:
  bool try_coords(const std::vector<Integer>& v, std::vector<Integer>* out) const;

  std::size_t n_ = 0;
  Ring ring_{};
  Matrix rows_;  // rank × n, echelon
  std::vector<std::size_t> pivots_;
};

/// num/den for lattices den ⊆ num ⊆ R^n, with a reduced generating set.
struct Subquotient {
  Ring ring{};
  Matrix generators;            // n × g; generator j has order orders[j] (0 = infinite)
  std::vector<Integer> orders;  // none equal to 1
  FgAbelianGroup group;

  /// Coordinates of v ∈ num in terms of the generators (torsion coordinates reduced).
  std::vector<Integer> coordinates(const std::vector<Integer>& v) const;
  Matrix coordinates_of(const Matrix& m) const;
  std::size_t size() const { return orders.size(); }

  Lattice num, den;
  Matrix to_gens;  // g × rank(num): num-basis coordinates -> generator coordinates
};

Subquotient subquotient(const Lattice& num, const Lattice& den);

/// H = ker(d_out) / im(d_in); throws NotAComplex when d_out·d_in ≠ 0.
FgAbelianGroup homology_pair(const Matrix& d_out, const Matrix& d_in);

}  // namespace kcell
