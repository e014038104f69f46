#include "kcell/group.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "kcell/errors.hpp"
#include "kcell/ring.hpp"

namespace kcell {

FiniteGroup::FiniteGroup(std::vector<std::vector<int>> table, std::string label)
    : table_(std::move(table)), label_(std::move(label)) {
  const int n = order();
  require(n > 0, ErrorCode::NotAGroup, "empty multiplication table");
  for (const auto& row : table_) {
    require(static_cast<int>(row.size()) == n, ErrorCode::NotAGroup, "multiplication table is not square");
    for (int x : row) require(x >= 0 && x < n, ErrorCode::NotAGroup, "table entry out of range");
  }
  for (int a = 0; a < n; ++a)
    require(table_[0][a] == a && table_[a][0] == a, ErrorCode::NotAGroup, "element 0 is not the identity");
  inv_.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    std::vector<bool> seen(n, false);
    for (int b = 0; b < n; ++b) {
      require(!seen[table_[a][b]], ErrorCode::NotAGroup, "row " + std::to_string(a) + " is not a permutation");
      seen[table_[a][b]] = true;
      if (table_[a][b] == 0) inv_[a] = b;
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        require(table_[table_[a][b]][c] == table_[a][table_[b][c]], ErrorCode::NotAGroup,
                "associativity fails at (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) +
                    ")");
  for (int a = 0; a < n; ++a)
    require(table_[inv_[a]][a] == 0, ErrorCode::NotAGroup, "left and right inverses differ");
}

FiniteGroup FiniteGroup::trivial() { return FiniteGroup({{0}}, "1"); }

FiniteGroup FiniteGroup::cyclic(int m) {
  require(m >= 1, ErrorCode::InvalidInput, "cyclic group order must be positive");
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) t[a][b] = (a + b) % m;
  return FiniteGroup(std::move(t), "C" + std::to_string(m));
}

FiniteGroup FiniteGroup::product(const std::vector<FiniteGroup>& factors) {
  require(!factors.empty(), ErrorCode::InvalidInput, "empty product");
  int n = 1;
  std::string label;
  for (const auto& f : factors) {
    n *= f.order();
    label += (label.empty() ? "" : "x") + f.label();
  }
  // Mixed radix with the first factor most significant.
  auto decompose = [&](int x) {
    std::vector<int> d(factors.size());
    for (std::size_t i = factors.size(); i-- > 0;) {
      d[i] = x % factors[i].order();
      x /= factors[i].order();
    }
    return d;
  };
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a) {
    auto da = decompose(a);
    for (int b = 0; b < n; ++b) {
      auto db = decompose(b);
      int x = 0;
      for (std::size_t i = 0; i < factors.size(); ++i) x = x * factors[i].order() + factors[i].mul(da[i], db[i]);
      t[a][b] = x;
    }
  }
  return FiniteGroup(std::move(t), label);
}

FiniteGroup FiniteGroup::symmetric(int n) {
  require(n >= 1 && n <= 5, ErrorCode::InvalidInput, "symmetric group degree out of desk range");
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < perms.size(); ++i) index[perms[i]] = static_cast<int>(i);
  const int m = static_cast<int>(perms.size());
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::vector<int> c(n);
      for (int x = 0; x < n; ++x) c[x] = perms[a][perms[b][x]];
      t[a][b] = index[c];
    }
  return FiniteGroup(std::move(t), n == 3 ? "sigma3" : "S" + std::to_string(n));
}

FiniteGroup FiniteGroup::dihedral(int n) {
  require(n >= 1, ErrorCode::InvalidInput, "dihedral parameter must be positive");
  const int m = 2 * n;
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      const int i = x % n, a = x / n, k = y % n, b = y / n;
      const int r = ((a ? i - k : i + k) % n + n) % n;
      t[x][y] = r + n * ((a + b) % 2);
    }
  return FiniteGroup(std::move(t), "D" + std::to_string(m));
}

FiniteGroup FiniteGroup::quaternion() {
  // units 1,i,j,k as 0..3; element = unit + 4*sign
  static const int unit[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int sgn[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  std::vector<std::vector<int>> t(8, std::vector<int>(8));
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      const int u = x % 4, v = y % 4;
      const int s = (x / 4 + y / 4 + sgn[u][v]) % 2;
      t[x][y] = unit[u][v] + 4 * s;
    }
  return FiniteGroup(std::move(t), "Q8");
}

int FiniteGroup::power(int g, long e) const {
  if (e < 0) {
    g = inv(g);
    e = -e;
  }
  int r = 0;
  for (long i = 0; i < e; ++i) r = mul(r, g);
  return r;
}

int FiniteGroup::element_order(int g) const {
  int k = 1, x = g;
  while (x != 0) {
    x = mul(x, g);
    ++k;
  }
  return k;
}

bool FiniteGroup::is_abelian() const {
  for (int a = 0; a < order(); ++a)
    for (int b = 0; b < a; ++b)
      if (mul(a, b) != mul(b, a)) return false;
  return true;
}

bool FiniteGroup::is_p_group(std::uint64_t p) const {
  std::uint64_t n = static_cast<std::uint64_t>(order());
  while (n % p == 0) n /= p;
  return n == 1;
}

std::vector<std::uint64_t> prime_divisors(int n) {
  std::vector<std::uint64_t> out;
  for (int d = 2; d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(static_cast<std::uint64_t>(d));
      while (n % d == 0) n /= d;
    }
  }
  return out;
}

Subgroup FiniteGroup::p_elements(std::uint64_t p) const {
  Subgroup out;
  for (int g = 0; g < order(); ++g) {
    std::uint64_t o = static_cast<std::uint64_t>(element_order(g));
    while (o % p == 0) o /= p;
    if (o == 1) out.push_back(g);
  }
  return out;
}

Subgroup FiniteGroup::p_prime_elements(std::uint64_t p) const {
  Subgroup out;
  for (int g = 0; g < order(); ++g)
    if (static_cast<std::uint64_t>(element_order(g)) % p != 0) out.push_back(g);
  return out;
}

bool FiniteGroup::is_nilpotent() const {
  for (auto q : prime_divisors(order())) {
    Subgroup s = p_elements(q);
    int qpart = 1, n = order();
    while (n % static_cast<int>(q) == 0) {
      n /= static_cast<int>(q);
      qpart *= static_cast<int>(q);
    }
    if (static_cast<int>(s.size()) != qpart || !is_subgroup(s)) return false;
  }
  return true;
}

Subgroup FiniteGroup::closure(const std::vector<int>& gens) const {
  std::vector<bool> in(order(), false);
  std::vector<int> elems{0};
  in[0] = true;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (int g : gens) {
      int x = mul(elems[i], g);
      if (!in[x]) {
        in[x] = true;
        elems.push_back(x);
      }
    }
  }
  std::sort(elems.begin(), elems.end());
  return elems;
}

std::vector<int> FiniteGroup::generators() const {
  std::vector<int> gens;
  Subgroup span{0};
  for (int g = 1; g < order() && static_cast<int>(span.size()) < order(); ++g) {
    if (std::binary_search(span.begin(), span.end(), g)) continue;
    gens.push_back(g);
    span = closure(gens);
  }
  return gens;
}

bool FiniteGroup::is_subgroup(const Subgroup& h) const {
  if (h.empty() || !std::is_sorted(h.begin(), h.end()) || h[0] != 0) return false;
  for (int x : h)
    if (x < 0 || x >= order()) return false;
  for (int a : h)
    for (int b : h)
      if (!std::binary_search(h.begin(), h.end(), mul(a, b))) return false;
  return true;
}

bool FiniteGroup::is_normal(const Subgroup& h) const {
  if (!is_subgroup(h)) return false;
  for (int g = 0; g < order(); ++g)
    for (int x : h)
      if (!std::binary_search(h.begin(), h.end(), conj(x, g))) return false;
  return true;
}

Subgroup FiniteGroup::normal_closure(const std::vector<int>& gens) const {
  std::vector<int> conjugates;
  for (int x : gens)
    for (int g = 0; g < order(); ++g) conjugates.push_back(conj(x, g));
  return closure(conjugates);
}

std::vector<Subgroup> FiniteGroup::normal_subgroups() const {
  std::set<Subgroup> found;
  found.insert(Subgroup{0});
  for (int g = 0; g < order(); ++g) found.insert(normal_closure({g}));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Subgroup> cur(found.begin(), found.end());
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = i + 1; j < cur.size(); ++j) {
        std::vector<int> gens(cur[i]);
        gens.insert(gens.end(), cur[j].begin(), cur[j].end());
        if (found.insert(closure(gens)).second) grew = true;
      }
  }
  std::vector<Subgroup> out(found.begin(), found.end());
  std::stable_sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<int> FiniteGroup::left_coset_reps(const Subgroup& h) const {
  require(is_subgroup(h), ErrorCode::BadSubgroup, "coset representatives of a non-subgroup");
  std::vector<bool> covered(order(), false);
  std::vector<int> reps;
  for (int g = 0; g < order(); ++g) {
    if (covered[g]) continue;
    reps.push_back(g);
    for (int x : h) covered[mul(g, x)] = true;
  }
  return reps;
}

// ---------------------------------------------------------------------------

GroupHom::GroupHom(GroupPtr s, GroupPtr t, std::vector<int> m)
    : source(std::move(s)), target(std::move(t)), map(std::move(m)) {
  require(static_cast<int>(map.size()) == source->order(), ErrorCode::InvalidInput, "homomorphism: wrong map length");
  for (int x : map) require(x >= 0 && x < target->order(), ErrorCode::InvalidInput, "homomorphism: value out of range");
  for (int a = 0; a < source->order(); ++a)
    for (int b = 0; b < source->order(); ++b)
      require(map[source->mul(a, b)] == target->mul(map[a], map[b]), ErrorCode::InvalidInput,
              "map does not preserve multiplication");
}

Subgroup GroupHom::kernel() const {
  Subgroup k;
  for (int g = 0; g < source->order(); ++g)
    if (map[g] == 0) k.push_back(g);
  return k;
}

Subgroup GroupHom::image() const {
  std::set<int> s(map.begin(), map.end());
  return Subgroup(s.begin(), s.end());
}

SubgroupEmbedding embed_subgroup(const GroupPtr& g, const Subgroup& h) {
  require(g->is_subgroup(h), ErrorCode::BadSubgroup, "not a subgroup");
  const int m = static_cast<int>(h.size());
  std::map<int, int> pos;
  for (int i = 0; i < m; ++i) pos[h[i]] = i;
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) t[a][b] = pos[g->mul(h[a], h[b])];
  auto sub = make_group(FiniteGroup(std::move(t), g->label() + "|sub" + std::to_string(m)));
  return SubgroupEmbedding{sub, GroupHom(sub, g, h)};
}

Quotient quotient_group(const GroupPtr& g, const Subgroup& n) {
  require(g->is_normal(n), ErrorCode::BadSubgroup, "quotient by a non-normal subgroup");
  auto reps = g->left_coset_reps(n);
  std::vector<int> coset(g->order());
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (int x : n) coset[g->mul(reps[i], x)] = static_cast<int>(i);
  const int m = static_cast<int>(reps.size());
  std::vector<std::vector<int>> t(m, std::vector<int>(m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) t[a][b] = coset[g->mul(reps[a], reps[b])];
  auto q = make_group(FiniteGroup(std::move(t), g->label() + "/" + std::to_string(n.size())));
  return Quotient{q, GroupHom(g, q, coset)};
}

GroupExtension::GroupExtension(GroupHom incl, GroupHom proj) : inclusion(std::move(incl)), projection(std::move(proj)) {
  require(inclusion.target->table() == projection.source->table(), ErrorCode::InvalidInput,
          "extension maps do not share the middle group");
  require(inclusion.is_injective(), ErrorCode::InvalidInput, "extension: N -> G not injective");
  require(projection.is_surjective(), ErrorCode::InvalidInput, "extension: G -> Q not surjective");
  require(inclusion.image() == projection.kernel(), ErrorCode::InvalidInput, "extension not exact at G");
}

GroupExtension extension_from_normal(const GroupPtr& g, const Subgroup& n) {
  auto e = embed_subgroup(g, n);
  auto q = quotient_group(g, n);
  return GroupExtension(e.inclusion, q.projection);
}

SylowSplit sylow_decomposition(const GroupPtr& g, std::uint64_t p) {
  require(is_prime(p), ErrorCode::InvalidInput, "sylow_decomposition: p must be prime");
  if (!g->is_nilpotent())
    fail(ErrorCode::NotNilpotentGroup, g->label() + " is not nilpotent: some Sylow subgroup is not normal");
  SylowSplit s;
  s.group = g;
  s.p = p;
  s.P = g->p_elements(p);
  s.H = g->p_prime_elements(p);
  require(g->is_subgroup(s.P) && g->is_subgroup(s.H), ErrorCode::NotNilpotentGroup, "Sylow parts are not subgroups");
  for (int x : s.P)
    for (int y : s.H)
      require(g->mul(x, y) == g->mul(y, x), ErrorCode::NotNilpotentGroup, "Sylow parts do not commute");
  s.factor.assign(g->order(), {-1, -1});
  for (int x : s.P)
    for (int y : s.H) {
      auto& f = s.factor[g->mul(x, y)];
      require(f.first == -1, ErrorCode::NotNilpotentGroup, "P x H -> N is not injective");
      f = {x, y};
    }
  for (const auto& f : s.factor) require(f.first != -1, ErrorCode::NotNilpotentGroup, "P x H -> N is not onto");
  return s;
}

std::vector<int> sign_character(const FiniteGroup& g) {
  std::vector<int> gens;
  for (int a = 0; a < g.order(); ++a) {
    gens.push_back(g.mul(a, a));
    for (int b = 0; b < g.order(); ++b) gens.push_back(g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
  }
  Subgroup s = g.closure(gens);
  require(static_cast<int>(s.size()) < g.order(), ErrorCode::InvalidInput,
          g.label() + " has no index-2 subgroup, so no sign character");
  // G/S is an elementary abelian 2-group; drop one greedy basis vector.
  auto reps = g.left_coset_reps(s);
  std::vector<int> coset_of(g.order());
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (int x : s) coset_of[g.mul(reps[i], x)] = static_cast<int>(i);
  std::vector<int> basis;
  Subgroup span = s;
  for (int r : reps) {
    if (std::binary_search(span.begin(), span.end(), r)) continue;
    basis.push_back(r);
    std::vector<int> all(s);
    all.insert(all.end(), basis.begin(), basis.end());
    span = g.closure(all);
  }
  std::vector<int> kgens(s);
  kgens.insert(kgens.end(), basis.begin() + 1, basis.end());
  Subgroup k = g.closure(kgens);
  std::vector<int> chi(g.order());
  for (int a = 0; a < g.order(); ++a) chi[a] = std::binary_search(k.begin(), k.end(), a) ? 1 : -1;
  return chi;
}

}  // namespace kcell
