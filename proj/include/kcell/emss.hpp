#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kcell/cellular.hpp"

namespace kcell {

/// Finite simplicial complex with a group acting by vertex permutations.
class GSimplicialComplex {
 public:
  GSimplicialComplex() = default;
  /// `simplices` are closed under faces after construction (faces are added);
  /// perms[g][v] is the image of vertex v under g.
  GSimplicialComplex(GroupPtr g, std::size_t vertices, std::vector<std::vector<int>> simplices,
                     std::vector<std::vector<int>> perms);

  static GSimplicialComplex point(GroupPtr g);
  /// Discrete G-set with the given permutation action.
  static GSimplicialComplex discrete(GroupPtr g, std::vector<std::vector<int>> perms);

  const GroupPtr& group() const { return group_; }
  std::size_t vertices() const { return vertices_; }
  int dimension() const { return static_cast<int>(by_dim_.size()) - 1; }
  /// Sorted n-simplices in lexicographic order.
  const std::vector<std::vector<int>>& simplices(int n) const;
  std::size_t count(int n) const { return simplices(n).size(); }
  const std::vector<int>& perm(int g) const { return perms_[static_cast<std::size_t>(g)]; }
  /// No simplex is carried to itself by a non-identity element.
  bool is_free() const;

 private:
  GroupPtr group_;
  std::size_t vertices_ = 0;
  std::vector<std::vector<std::vector<int>>> by_dim_;
  std::vector<std::vector<int>> perms_;
};

/// Vertices ±e_1..±e_{n+1} (2i and 2i+1), simplices without antipodal pairs, antipodal C2-action.
GSimplicialComplex cross_polytope_sphere(int n);

/// Simplicial cochains in degrees −dim..0 with (gφ)(σ) = φ(g^{-1}σ), lexicographic orientation.
GComplex cochains_of(const GSimplicialComplex& x, Ring ring);

/// Graded-commutative algebra over F_p on generators of positive degree, modulo
/// relations. Odd generators square to zero when p is odd.
struct GradedPolynomial {
  std::map<std::vector<int>, Integer> terms;  // exponent vector -> coefficient
};

class GradedAlgebraPresentation {
 public:
  GradedAlgebraPresentation() = default;
  GradedAlgebraPresentation(Ring field, std::vector<int> degrees, std::vector<GradedPolynomial> relations, int cap,
                            std::string name = "");
  /// H^*(BC_p; F_p): F_2[x] with |x| = 1, or Λ(x) ⊗ F_p[y] with |x| = 1, |y| = 2.
  static GradedAlgebraPresentation cyclic_cohomology(std::uint64_t p, int cap);
  static GradedAlgebraPresentation polynomial(Ring field, std::vector<int> degrees, int cap, std::string name = "");

  Ring field() const { return field_; }
  int cap() const { return cap_; }
  const std::string& name() const { return name_; }
  const std::vector<int>& degrees() const { return degrees_; }
  std::size_t dim(int t) const;
  std::vector<std::size_t> dims() const;

  // degree-t pieces: monomials, relation span and quotient
  const std::vector<std::vector<int>>& monomials(int t) const { return mono_[static_cast<std::size_t>(t)]; }
  const Subquotient& quotient(int t) const { return quot_[static_cast<std::size_t>(t)]; }
  int degree_of(const std::vector<int>& e) const;
  /// Product of basis element i of A_s and basis element j of A_t, in A_{s+t} coordinates.
  const std::vector<Integer>& product(int s, std::size_t i, int t, std::size_t j) const;
  /// Product of elements given in A_s and A_t coordinates.
  std::vector<Integer> multiply(int s, const std::vector<Integer>& a, int t, const std::vector<Integer>& b) const;
  /// A polynomial of degree t in A_t coordinates.
  std::vector<Integer> coordinates(const GradedPolynomial& f, int t) const;

 private:
  std::pair<int, std::vector<int>> monomial_product(const std::vector<int>& a, const std::vector<int>& b) const;
  std::vector<Integer> monomial_vector(const GradedPolynomial& f, int t) const;

  Ring field_{};
  std::vector<int> degrees_;
  std::vector<GradedPolynomial> relations_;
  int cap_ = 0;
  std::string name_;
  std::vector<std::vector<std::vector<int>>> mono_;
  std::vector<std::map<std::vector<int>, std::size_t>> index_;
  std::vector<Subquotient> quot_;
  mutable std::map<std::pair<int, int>, std::vector<std::vector<std::vector<Integer>>>> table_;
};

/// Module over an algebra: generators with degrees and relations Σ a_i g_i.
struct GradedModulePresentation {
  const GradedAlgebraPresentation* algebra = nullptr;
  std::vector<int> degrees;
  std::vector<std::vector<GradedPolynomial>> relations;  // one polynomial per generator
  std::vector<std::size_t> dims(int tmax) const;
};
/// A / (x^{n}) for a one-generator algebra, as a cyclic module.
GradedModulePresentation truncated_module(const GradedAlgebraPresentation& a, int generator, int power);
GradedModulePresentation free_module(const GradedAlgebraPresentation& a);
GradedModulePresentation residue_field(const GradedAlgebraPresentation& a);

struct BigradedPage {
  int s_max = 0, t_max = 0;
  std::map<std::pair<int, int>, std::size_t> entries;  // (s, t) -> dimension, nonzero only
  std::string convention = "(s, t) = (homological, internal); total degree t − s";
  std::size_t at(int s, int t) const;
  /// Sum over t − s = n.
  std::size_t total(int n) const;
  /// At most one nonzero entry on every total-degree line.
  bool sparse() const;
};

struct TorCaps {
  int s_max = 3, t_max = 6;
};
/// Tor^A_{s}(M, k)_t through a minimal graded resolution (generators chosen by lowest internal degree).
BigradedPage bigraded_tor(const GradedModulePresentation& m, TorCaps caps);

struct PresentationVerdict {
  bool match = false;
  int first_mismatch = -1;
  std::vector<std::size_t> algebra_dims, ext_dims;
};
PresentationVerdict validate_presentation(const GradedAlgebraPresentation& a, const GroupPtr& g, int cap);

struct TargetReport {
  int lo = 0, hi = 0;                  // cohomological degrees
  std::vector<LocalGroup> target;      // π_{−n} of the cellular approximation
  std::vector<LocalGroup> prediction;  // theorem prediction when one applies
  std::string theorem;                 // "p-group", "nilpotent", "cyclic" or "none"
  bool matches = false;
  CellResult cell;
  std::vector<std::string> notes;
  std::vector<std::size_t> dims() const;
};
TargetReport emss_target(const GComplex& cochains, int lo, int hi, const std::string& strategy = "auto");
TargetReport emss_target(const GSimplicialComplex& f, Ring ring, const std::string& strategy = "auto");

struct E2Report {
  PresentationVerdict algebra;
  bool module_matches = false;
  std::vector<std::size_t> borel_dims, module_dims;
  BigradedPage e2;
  TargetReport target;
  std::vector<std::size_t> totals;  // E² sums for cohomological degree 0..hi
  bool collapse_forced = false;
  bool totals_match = false;
  long euler_target = 0, euler_e2 = 0;  // alternating sums
  bool e2_finite = false;               // no entries on the row s = s_max
  std::string verdict;
};
E2Report emss_e2_vs_target(const GSimplicialComplex& f, Ring ring, const GradedAlgebraPresentation& a,
                           const GradedModulePresentation& m, TorCaps caps);

struct SSPage {
  int r = 1;
  std::map<std::pair<int, int>, LocalGroup> entries;  // (p, n): filtration p, homological degree n
  std::map<std::pair<int, int>, Matrix> differentials;  // source (p, n) -> E_{p−r, n−1}
};
struct SSReport {
  std::string mode;                    // "exact" or "homotopy"
  std::vector<SSPage> pages;
  int stable_page = 1;
  std::map<int, LocalGroup> abutment;  // associated graded summed over p, by homological degree n
  std::map<int, LocalGroup> direct;    // π_n of the cellular approximation of x
  bool e1_matches_formula = false;
  bool abutment_matches = false;
  bool pages_consistent = false;       // d∘d = 0 and E^{r+1} = H(E^r) where checked
  std::vector<std::string> notes;
  /// Display indexing of an entry: (p, q) with q = n − p.
  static std::pair<int, int> display(int p, int n) { return {p, n - p}; }
};
/// Spectral sequence of the Postnikov filtration x⟨−p, 0⟩ of a cochain complex.
SSReport postnikov_ss(const GComplex& x, const std::string& strategy = "auto", CellRange range = {});

/// π_n of a cellular approximation for n in [lo, hi] (homological degrees).
std::map<int, LocalGroup> cell_homotopy(const CellResult& r, int lo, int hi);

}  // namespace kcell
