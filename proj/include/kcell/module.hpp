#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kcell/group.hpp"
#include "kcell/linalg.hpp"

namespace kcell {

/// A finitely presented kG-module: R^d modulo the columns of `relations`, with
/// one d×d action matrix per group element. Free modules have no relations;
/// torsion Z-modules such as Z/3 carry diagonal relations. Action matrices
/// need only respect the relations: A(g)·R ⊆ im R and A(gh) ≡ A(g)A(h).
class GModule {
 public:
  GModule() = default;
  GModule(GroupPtr g, Ring ring, std::size_t rank, Matrix relations, std::vector<Matrix> action);

  static GModule zero(GroupPtr g, Ring ring);
  static GModule trivial(GroupPtr g, Ring ring, std::size_t rank = 1);
  /// kG^r with basis e_{i,g} at index i·|G| + g and h·e_{i,g} = e_{i,hg}.
  static GModule free(GroupPtr g, Ring ring, std::size_t r = 1);
  /// Rank-one module on which g acts by chi[g] ∈ {±1}.
  static GModule character(GroupPtr g, Ring ring, const std::vector<int>& chi);
  /// Z/m (or its reduction) with action through chi; empty chi means trivial.
  static GModule cyclic_torsion(GroupPtr g, Ring ring, const Integer& m, const std::vector<int>& chi = {});
  /// Action given on a generating set; the rest is filled in by closure.
  static GModule from_generators(GroupPtr g, Ring ring, std::size_t rank, Matrix relations,
                                 const std::vector<int>& gens, const std::vector<Matrix>& gen_action);
  /// Permutation module on a G-set given by per-element permutations of 0..n-1.
  static GModule permutation(GroupPtr g, Ring ring, const std::vector<std::vector<int>>& perms);

  const GroupPtr& group() const { return group_; }
  Ring ring() const { return ring_; }
  std::size_t rank() const { return rank_; }
  const Matrix& relations() const { return relations_; }
  const Matrix& action(int g) const { return action_[static_cast<std::size_t>(g)]; }
  const std::vector<Matrix>& actions() const { return action_; }
  const Lattice& relation_lattice() const { return rel_lattice_; }
  bool has_relations() const { return relations_.cols() > 0; }

  FgAbelianGroup underlying() const;
  bool is_zero() const;
  /// Columns of a − b all lie in the relation lattice.
  bool same_elements(const Matrix& a, const Matrix& b) const;
  bool is_zero_element(const std::vector<Integer>& v) const;

  GModule direct_sum(const GModule& other) const;
  /// Same module with the given group-element actions replaced (used by restriction).
  GModule with_group(GroupPtr g, std::vector<Matrix> action) const;

  struct Canonical;
  /// Equivalent presentation with diagonal relations and no unit relations.
  Canonical canonical() const;

  std::string describe() const;

  /// Construction without validation; for callers that built the data from
  /// already validated pieces.
  static GModule trusted(GroupPtr g, Ring ring, std::size_t rank, Matrix relations, std::vector<Matrix> action);

 private:
  void validate() const;

  GroupPtr group_;
  Ring ring_{};
  std::size_t rank_ = 0;
  Matrix relations_;
  std::vector<Matrix> action_;
  Lattice rel_lattice_;
};

struct GModule::Canonical {
  GModule module;
  Matrix proj;  // d' × d: old coordinates -> new
  Matrix lift;  // d × d': new generators in old coordinates
};

/// A kG-linear map given on generators (target.rank × source.rank).
struct GModuleMap {
  GModule source, target;
  Matrix matrix;

  GModuleMap(GModule s, GModule t, Matrix m);  // validates well-definedness and equivariance
  static GModuleMap identity(const GModule& m);
  static GModuleMap zero(const GModule& s, const GModule& t);
  GModuleMap compose_after(const GModuleMap& first) const;  // this ∘ first
  bool is_zero() const;
};

/// Check that a matrix defines an equivariant map between presented modules.
bool is_equivariant(const GModule& s, const GModule& t, const Matrix& m, std::string* why = nullptr);

/// The map F = kG^r -> M sending e_{i,1} to column i of `images`.
Matrix free_map_matrix(const GModule& m, const Matrix& images);

/// num/den inside a module whose ambient coordinates carry `action`, as a
/// presented module. `reps` holds generator representatives in ambient coordinates.
struct SubquotientModule {
  GModule module;
  Subquotient sq;
  Matrix reps;
};
SubquotientModule make_subquotient_module(const GroupPtr& g, Ring ring, const std::vector<Matrix>& action,
                                          const Lattice& num, const Lattice& den);

struct FixedPoints {
  GModule module;
  GModuleMap inclusion;
};
/// M^H for a normal subgroup H, with the residual action of the whole group.
FixedPoints fixed_points(const GModule& m, const Subgroup& h);
/// Lattice of vectors fixed by H modulo relations.
Lattice fixed_lattice(const GModule& m, const Subgroup& h);

struct NilpotenceReport {
  bool nilpotent = false;
  std::size_t nil_class = 0;          // smallest n with I^n M = 0 (0 for the zero module)
  std::vector<Lattice> filtration;    // I^j M + R for j = 0, 1, ...
};
NilpotenceReport is_nilpotent_module(const GModule& m);

/// I·L + R: span of (A(g) − 1)L over the given generators, plus relations.
Lattice augmentation_image(const GModule& m, const Lattice& l);

GModule restrict_module(const GModule& m, const GroupHom& along);
GModule restrict_to_subgroup(const GModule& m, const Subgroup& h);
/// kG ⊗_{kK} M for M over the subgroup K embedded by `inclusion`.
GModule induce_module(const GModule& m, const GroupHom& inclusion);

/// Sum of the action matrices over the elements of h (the norm element).
Matrix norm_matrix(const GModule& m, const Subgroup& h);

}  // namespace kcell
