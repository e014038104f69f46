#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kcell/complex.hpp"

namespace kcell {

/// A submodule given by a lattice L ⊇ R, as a presented module with its inclusion.
struct SubModule {
  Lattice lattice;
  SubquotientModule data;  // L / R
  Matrix inclusion;        // rank(M) × rank(data.module): generators in M coordinates
  int stage = 0;           // chain index at which the union stabilized
  const GModule& module() const { return data.module; }
};

/// Γ_I M = {m : I^n m = 0 for some n}, as the union of the ascending chain
/// K_0 = R, K_{n+1} = {v : (g − 1) v ∈ K_n for every generator g}.
SubModule i_power_torsion(const GModule& m);

/// M[1/z] for z = 1 − g, g a generator of a cyclic group.
/// `lattice` is L = z^N M with N the stage at which ker z^N stabilizes; z is
/// injective on L and M[1/z] = L[1/z]. When z is already bijective on L, c = 1.
struct LocalizedModule {
  Ring base{};
  Integer c = 1;                     // inverted multiplier: ring k[1/c]
  SubModule lattice;                 // L = z^N M with the residual action
  std::size_t rank = 0;              // rank of L / torsion
  std::map<Integer, std::size_t> prufer;  // structure of L[1/z] / L: prime -> multiplicity
  bool exact = true;                 // L[1/z] = L[1/c]
  Matrix relations;                  // presentation of L over k[1/c] (torsion prime to c)
  std::vector<Matrix> action;        // residual action on the generators of L
  std::string describe() const;
};

LocalizedModule localize_module(const GModule& m, int generator);

/// 0 → Γ_I M → M → M[1/z] → M[1/z]/M → 0 with the exactness checks.
struct TorsionReport {
  SubModule gamma;
  LocalizedModule localized;
  LocalGroup quotient;     // M[1/z] / image of M
  bool exact = false;
  std::string witness;
};
TorsionReport torsion_report(const GModule& m, int generator);

/// Product in the group algebra; elements are coefficient vectors indexed by group elements.
std::vector<Integer> algebra_product(const FiniteGroup& g, const std::vector<Integer>& a, const std::vector<Integer>& b);

struct LocalCohomology {
  int a = 0, b = -1;
  std::vector<LocalGroup> groups;  // H_I^q for a <= q <= b
  std::vector<int> generators;
  std::string method;              // "stable-koszul" or "cyclic-structure"
  const LocalGroup& at(int q) const { return groups[static_cast<std::size_t>(q - a)]; }
};

/// H_I^q(kG) for abelian G through the stable Koszul complex on z_i = 1 − g_i.
/// Over Z the localizations must have finite models unless G is cyclic.
LocalCohomology local_cohomology_groupring(const GroupPtr& g, Ring ring, int a, int b,
                                           std::vector<int> generators = {});
/// Same for an arbitrary module.
LocalCohomology local_cohomology(const GModule& m, int a, int b, std::vector<int> generators = {});

/// One degree of the sequence 0 → H^{n−1}[1/z]/H^{n−1} → π_{−n} → Γ_I H^n → 0.
struct PiEntry {
  int n = 0;
  LocalGroup sub;
  LocalGroup quotient;
  bool determined = false;   // one outer term vanishes
  std::optional<LocalGroup> value;
};
struct PiSequence {
  std::vector<PiEntry> entries;
  std::string note;
};
PiSequence cyclic_pi1_sequence(const std::vector<GModule>& cohomology, int generator);

struct C2Verdict {
  bool affirmed = false;
  std::string violated;
  PiSequence sequence;
};
/// H^0 = Z trivial and H^n finite of odd order with action −1 for n > 0.
C2Verdict corollary_c2_checker(const std::vector<GModule>& cohomology);

}  // namespace kcell
