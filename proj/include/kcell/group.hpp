#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace kcell {

using Subgroup = std::vector<int>;  // sorted element indices, contains 0

/// Finite group given by its multiplication table; element 0 is the identity.
class FiniteGroup {
 public:
  FiniteGroup(std::vector<std::vector<int>> table, std::string label = "");

  static FiniteGroup trivial();
  static FiniteGroup cyclic(int m);
  static FiniteGroup product(const std::vector<FiniteGroup>& factors);
  static FiniteGroup symmetric(int n);
  static FiniteGroup dihedral(int n);  // order 2n
  static FiniteGroup quaternion();

  int order() const { return static_cast<int>(table_.size()); }
  int mul(int a, int b) const { return table_[a][b]; }
  int inv(int a) const { return inv_[a]; }
  int power(int g, long e) const;
  int element_order(int g) const;
  int conj(int g, int h) const { return mul(mul(h, g), inv(h)); }  // h g h^{-1}
  const std::string& label() const { return label_; }
  const std::vector<std::vector<int>>& table() const { return table_; }

  bool is_abelian() const;
  bool is_p_group(std::uint64_t p) const;
  /// True when every Sylow subgroup is normal.
  bool is_nilpotent() const;
  /// Greedy generating set: repeatedly adds the smallest element outside the span.
  std::vector<int> generators() const;

  Subgroup closure(const std::vector<int>& gens) const;
  bool is_subgroup(const Subgroup& h) const;
  bool is_normal(const Subgroup& h) const;
  Subgroup normal_closure(const std::vector<int>& gens) const;
  /// All normal subgroups, ordered by size then lexicographically.
  std::vector<Subgroup> normal_subgroups() const;
  /// Elements whose order is a power of p (a subgroup when G is nilpotent).
  Subgroup p_elements(std::uint64_t p) const;
  Subgroup p_prime_elements(std::uint64_t p) const;
  /// Left coset representatives t_i (t_0 = identity) and, for each element g,
  /// the coset index of g.
  std::vector<int> left_coset_reps(const Subgroup& h) const;

 private:
  std::vector<std::vector<int>> table_;
  std::vector<int> inv_;
  std::string label_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

inline GroupPtr make_group(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

struct GroupHom {
  GroupPtr source, target;
  std::vector<int> map;

  GroupHom(GroupPtr s, GroupPtr t, std::vector<int> m);  // validates
  int operator()(int g) const { return map[g]; }
  Subgroup kernel() const;
  Subgroup image() const;
  bool is_injective() const { return kernel().size() == 1; }
  bool is_surjective() const { return static_cast<int>(image().size()) == target->order(); }
};

/// Inclusion of a subgroup as a group in its own right.
struct SubgroupEmbedding {
  GroupPtr sub;
  GroupHom inclusion;
};
SubgroupEmbedding embed_subgroup(const GroupPtr& g, const Subgroup& h);

struct Quotient {
  GroupPtr group;
  GroupHom projection;
};
Quotient quotient_group(const GroupPtr& g, const Subgroup& n);

/// Short exact sequence N → G → Q.
struct GroupExtension {
  GroupHom inclusion;   // N -> G
  GroupHom projection;  // G -> Q

  GroupExtension(GroupHom incl, GroupHom proj);  // validates exactness
  const GroupPtr& N() const { return inclusion.source; }
  const GroupPtr& G() const { return inclusion.target; }
  const GroupPtr& Q() const { return projection.target; }
  Subgroup kernel() const { return projection.kernel(); }
};
GroupExtension extension_from_normal(const GroupPtr& g, const Subgroup& n);

struct SylowSplit {
  GroupPtr group;
  std::uint64_t p = 0;
  Subgroup P, H;
  std::vector<std::pair<int, int>> factor;  // g = factor[g].first * factor[g].second, P-part first
};

/// N ≅ P × H for nilpotent N; throws NotNilpotentGroup otherwise.
SylowSplit sylow_decomposition(const GroupPtr& g, std::uint64_t p);

/// Character G → {±1} with kernel the first index-2 subgroup found; throws when none exists.
std::vector<int> sign_character(const FiniteGroup& g);

std::vector<std::uint64_t> prime_divisors(int n);

}  // namespace kcell
