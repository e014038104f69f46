#pragma once

#include <map>
#include <string>
#include <vector>

#include "kcell/module.hpp"

namespace kcell {

/// X with A x = b; throws InvalidInput when no solution exists over the ring.
Matrix solve_matrix(const Matrix& a, const Matrix& b);

struct HomologyModule {
  int degree = 0;
  SubquotientModule data;  // data.module is H_n with the induced action
  const GModule& module() const { return data.module; }
  FgAbelianGroup group() const { return data.sq.group; }
};

/// Bounded chain complex of presented kG-modules, homological grading:
/// d_n : X_n -> X_{n-1}. Cochains of a space sit in degrees <= 0.
class GComplex {
 public:
  GComplex() = default;
  /// diffs[i] is d_{lo+i+1} : X_{lo+i+1} -> X_{lo+i}; validated.
  GComplex(GroupPtr g, Ring ring, int lo, std::vector<GModule> modules, std::vector<Matrix> diffs);
  static GComplex trusted(GroupPtr g, Ring ring, int lo, std::vector<GModule> modules, std::vector<Matrix> diffs);

  static GComplex zero(GroupPtr g, Ring ring);
  static GComplex concentrated(const GModule& m, int degree = 0);

  const GroupPtr& group() const { return group_; }
  Ring ring() const { return ring_; }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(modules_.size()) - 1; }
  bool empty() const { return modules_.empty(); }
  const GModule& module(int n) const;
  std::size_t rank(int n) const { return module(n).rank(); }
  /// d_n : X_n -> X_{n-1}, zero outside the stored range.
  Matrix d(int n) const;
  const std::vector<GModule>& modules() const { return modules_; }

  Lattice cycles(int n) const;
  Lattice boundaries(int n) const;  // includes the relations of X_n
  HomologyModule homology_module(int n) const;
  FgAbelianGroup homology(int n) const;
  std::vector<HomologyModule> homology_modules() const;
  bool is_acyclic() const;
  bool is_acyclic_in(int a, int b) const;

  /// (Σ^s X)_n = X_{n-s} with differential (−1)^s d.
  GComplex shift(int s) const;
  GComplex direct_sum(const GComplex& other) const;
  /// Drops zero-rank modules at both ends.
  GComplex trimmed() const;
  /// Same complex on a wider stored range (padding with zero modules).
  GComplex padded(int lo, int hi) const;
  GComplex restrict_along(const GroupHom& along) const;

  std::string describe() const;

 private:
  void validate() const;

  GroupPtr group_;
  Ring ring_{};
  int lo_ = 0;
  std::vector<GModule> modules_;
  std::vector<Matrix> diffs_;
  GModule zero_;
};

/// Chain map given by one matrix per degree (missing degrees are zero).
struct ComplexMap {
  GComplex source, target;
  std::map<int, Matrix> comps;

  ComplexMap() = default;
  ComplexMap(GComplex s, GComplex t, std::map<int, Matrix> c);  // validates
  static ComplexMap trusted(GComplex s, GComplex t, std::map<int, Matrix> c);
  static ComplexMap identity(const GComplex& x);
  static ComplexMap zero(const GComplex& s, const GComplex& t);

  Matrix at(int n) const;
  ComplexMap compose_after(const ComplexMap& first) const;  // this ∘ first
  ComplexMap shift(int s) const;
  /// H_n(source) -> H_n(target) in the generator coordinates of homology_module(n).
  Matrix on_homology(int n) const;
  bool is_quasi_iso() const;
  bool is_quasi_iso_in(int a, int b) const;
  /// f ≡ g degreewise modulo target relations.
  bool same_as(const ComplexMap& g) const;

 private:
  void validate() const;
};

struct Cone {
  GComplex complex;
  ComplexMap inclusion;   // target -> cone, b ↦ (0, b)
  ComplexMap projection;  // cone -> Σ source, (a, b) ↦ a
};
/// cone(f)_n = A_{n−1} ⊕ B_n, d(a, b) = (−d a, f(a) + d b).
Cone cone(const ComplexMap& f);

/// A → B → C with a witness w : cone(u) → C.
struct Triangle {
  GComplex A, B, C;
  ComplexMap u, v, w;

  /// Builds w(a, b) = h(a) + v(b) from a homotopy h_n : A_{n−1} -> C_n with
  /// v∘u = d h + h d (h given by degree of its target).
  static Triangle from_homotopy(const ComplexMap& u, const ComplexMap& v, const std::map<int, Matrix>& h);
  /// The standard triangle A → B → cone(u).
  static Triangle standard(const ComplexMap& u);

  /// Checks w∘(B → cone) = v, w a quasi-isomorphism, and exactness of the long
  /// homology sequence of the cone in every degree. Empty string when valid.
  std::string validate() const;
};

/// Σk → K → k with K = cone(1 − g on kC) for a generator g of a cyclic group.
Triangle cyclic_triangle(const GroupPtr& g, Ring ring, int generator);

/// Exactness of H(X) → H(Y) → H(Z) at Y in degree n.
bool exact_at(const ComplexMap& f, const ComplexMap& g, int n);

struct Truncation {
  GComplex complex;
  ComplexMap map;  // τ≥ : truncation -> X;  τ≤ : X -> truncation
};
/// τ_{≥i}: X_n for n > i, cycles in degree i, zero below.
Truncation truncate_above(const GComplex& x, int i);
/// τ_{≤j}: X_n for n < j, X_j / B_j in degree j, zero above.
Truncation truncate_below(const GComplex& x, int j);

struct Window {
  GComplex complex;   // X⟨i, j⟩
  ComplexMap from;    // τ_{≥i}X -> X
  ComplexMap to;      // τ_{≥i}X -> X⟨i, j⟩
  GComplex upper;     // τ_{≥i}X
};
/// Postnikov window with H_n = H_n(X) for i <= n <= j and zero elsewhere.
Window postnikov_window(const GComplex& x, int i, int j);

/// Action of an element of the group algebra (coefficients per group element).
Matrix algebra_action(const GModule& m, const std::vector<Integer>& z);
ComplexMap algebra_action_map(const GComplex& x, const std::vector<Integer>& z);
/// z = 1 − g.
std::vector<Integer> one_minus(const FiniteGroup& g, int element);

struct Telescope {
  int stage = 0;             // N with im z^N = im z^{N+1} in every degree
  GComplex image;            // E = im z^N, the model of X[1/z]
  GComplex kernel;           // K = ker z^N
  ComplexMap image_inclusion, kernel_inclusion;
  ComplexMap projection;     // X -> E along K
};
/// Fitting decomposition X = im z^N ⊕ ker z^N; throws NotStabilized when the
/// images do not stabilize within the rank/torsion bound.
Telescope telescope_localize(const GComplex& x, const std::vector<Integer>& z);

/// Degreewise fixed points of a normal subgroup, with the inclusion.
struct FixedComplex {
  GComplex complex;
  ComplexMap inclusion;
};
FixedComplex fixed_point_complex(const GComplex& x, const Subgroup& h);

}  // namespace kcell
