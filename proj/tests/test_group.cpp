#include "doctest.h"
#include "kcell/errors.hpp"
#include "kcell/module.hpp"

using namespace kcell;

namespace {
const Ring F2 = Ring::prime_field(2);
const Ring F3 = Ring::prime_field(3);
const Ring ZZ = Ring::integers();

// Subgroups by brute force over all subsets closed under multiplication (small groups only).
std::vector<Subgroup> all_subgroups(const FiniteGroup& g) {
  std::vector<Subgroup> out;
  const int n = g.order();
  for (unsigned mask = 1; mask < (1u << n); mask += 2) {
    Subgroup h;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) h.push_back(i);
    bool closed = true;
    for (int a : h)
      for (int b : h)
        if (!(mask & (1u << g.mul(a, b)))) closed = false;
    if (closed) out.push_back(h);
  }
  return out;
}
}  // namespace

TEST_CASE("group constructors") {
  auto c6 = FiniteGroup::cyclic(6);
  CHECK(c6.order() == 6);
  auto p = FiniteGroup::product({FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)});
  CHECK(p.order() == 6);
  CHECK(p.is_abelian());
  // cyclic: some element of order 6
  bool has6 = false;
  for (int g = 0; g < 6; ++g) has6 = has6 || p.element_order(g) == 6;
  CHECK(has6);
  auto s3 = FiniteGroup::symmetric(3);
  CHECK(s3.order() == 6);
  CHECK(!s3.is_abelian());
  CHECK(FiniteGroup::quaternion().order() == 8);
  CHECK(FiniteGroup::dihedral(4).order() == 8);
}

TEST_CASE("bad tables are rejected") {
  CHECK_THROWS_AS(FiniteGroup({{0, 1}, {1, 1}}), Error);
  try {
    FiniteGroup({{0, 1, 2}, {1, 0, 2}, {2, 2, 0}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAGroup);
  }
}

TEST_CASE("sylow decomposition") {
  auto c6 = make_group(FiniteGroup::cyclic(6));
  auto s = sylow_decomposition(c6, 2);
  CHECK(s.P == Subgroup{0, 3});
  CHECK(s.H == Subgroup{0, 2, 4});
  // brute-force: the only subgroup of order 2 is {0,3}
  int order2 = 0;
  for (const auto& h : all_subgroups(*c6))
    if (h.size() == 2) {
      ++order2;
      CHECK(h == s.P);
    }
  CHECK(order2 == 1);
  auto c4 = make_group(FiniteGroup::cyclic(4));
  auto t = sylow_decomposition(c4, 2);
  CHECK(t.P.size() == 4);
  CHECK(t.H == Subgroup{0});
  auto s3 = make_group(FiniteGroup::symmetric(3));
  try {
    sylow_decomposition(s3, 2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNilpotentGroup);
  }
  // brute force: Σ3 has three subgroups of order 2, none normal
  int normal2 = 0, count2 = 0;
  for (const auto& h : all_subgroups(*s3))
    if (h.size() == 2) {
      ++count2;
      if (s3->is_normal(h)) ++normal2;
    }
  CHECK(count2 == 3);
  CHECK(normal2 == 0);
}

TEST_CASE("normal subgroups match brute force") {
  for (auto g : {FiniteGroup::symmetric(3), FiniteGroup::quaternion(), FiniteGroup::dihedral(4), FiniteGroup::cyclic(6)}) {
    std::size_t brute = 0;
    for (const auto& h : all_subgroups(g))
      if (g.is_normal(h)) ++brute;
    CHECK(g.normal_subgroups().size() == brute);
  }
}

TEST_CASE("quotients and extensions") {
  auto c6 = make_group(FiniteGroup::cyclic(6));
  auto ext = extension_from_normal(c6, {0, 2, 4});
  CHECK(ext.Q()->order() == 2);
  CHECK(ext.N()->order() == 3);
  auto s3 = make_group(FiniteGroup::symmetric(3));
  auto normals = s3->normal_subgroups();
  CHECK(normals.size() == 3);
  CHECK(normals[1].size() == 3);
  CHECK_THROWS_AS(quotient_group(s3, {0, 1}), Error);
}

TEST_CASE("module validation") {
  auto c2 = make_group(FiniteGroup::cyclic(2));
  // x acts by [[1,1],[0,1]]: unipotent, fine over F2
  auto u = GModule::from_generators(c2, F2, 2, Matrix(2, 0, F2), {1}, {Matrix(F2, {{1, 1}, {0, 1}})});
  CHECK(u.rank() == 2);
  // same matrix over Z has infinite order: not an action of C2
  CHECK_THROWS_AS(GModule::from_generators(c2, ZZ, 2, Matrix(2, 0, ZZ), {1}, {Matrix(ZZ, {{1, 1}, {0, 1}})}), Error);
  auto sign3 = GModule::cyclic_torsion(c2, ZZ, 3, {1, -1});
  CHECK(sign3.underlying() == FgAbelianGroup::cyclic(3));
}

TEST_CASE("fixed points") {
  auto c3 = make_group(FiniteGroup::cyclic(3));
  auto reg = GModule::free(c3, F2);
  auto fp = fixed_points(reg, {0, 1, 2});
  CHECK(fp.module.rank() == 1);
  // the fixed vector is the norm (1,1,1)
  CHECK(fp.inclusion.matrix == Matrix(F2, {{1}, {1}, {1}}));
  auto id = fixed_points(reg, {0});
  CHECK(id.module.rank() == 3);
  auto c2 = make_group(FiniteGroup::cyclic(2));
  auto sign3 = GModule::cyclic_torsion(c2, ZZ, 3, {1, -1});
  CHECK(fixed_points(sign3, {0, 1}).module.underlying().is_zero());
  auto s3 = make_group(FiniteGroup::symmetric(3));
  CHECK_THROWS_AS(fixed_points(GModule::free(s3, F2), {0, 1}), Error);
}

TEST_CASE("norm is an isomorphism from coinvariants to invariants when |H| is invertible") {
  auto c3 = make_group(FiniteGroup::cyclic(3));
  auto reg = GModule::free(c3, F2);
  Matrix n = norm_matrix(reg, {0, 1, 2});
  // |H|^{-1}·N is idempotent with image the invariants
  Matrix e = n.scaled(Ring::prime_field(2).inverse(3));
  CHECK(e * e == e);
  CHECK(Lattice::span(e) == fixed_lattice(reg, {0, 1, 2}));
}

TEST_CASE("nilpotence") {
  auto c2 = make_group(FiniteGroup::cyclic(2));
  auto triv = is_nilpotent_module(GModule::trivial(c2, ZZ));
  CHECK(triv.nilpotent);
  CHECK(triv.nil_class == 1);
  auto sign3 = is_nilpotent_module(GModule::cyclic_torsion(c2, ZZ, 3, {1, -1}));
  CHECK(!sign3.nilpotent);
  for (int p : {2, 3, 5}) {
    auto cp = make_group(FiniteGroup::cyclic(p));
    auto r = is_nilpotent_module(GModule::free(cp, Ring::prime_field(p)));
    CHECK(r.nilpotent);
    CHECK(r.nil_class == static_cast<std::size_t>(p));
    // (1-g)^p = 0 and (1-g)^(p-1) != 0 directly
    auto m = GModule::free(cp, Ring::prime_field(p));
    Matrix z = Matrix::identity(p, m.ring()) - m.action(1);
    CHECK(z.pow(p).is_zero());
    CHECK(!z.pow(p - 1).is_zero());
  }
  // ZC2 regular: I^j M = 2^{j-1} Z·(1-x), never zero
  CHECK(!is_nilpotent_module(GModule::free(c2, ZZ)).nilpotent);
  // Z/4 with sign action: (1-x) acts as 2, I^2 M = 0
  auto s4 = is_nilpotent_module(GModule::cyclic_torsion(c2, ZZ, 4, {1, -1}));
  CHECK(s4.nilpotent);
  CHECK(s4.nil_class == 2);
}

TEST_CASE("induction and restriction") {
  auto c6 = make_group(FiniteGroup::cyclic(6));
  auto emb = embed_subgroup(c6, {0, 2, 4});
  auto k = GModule::trivial(emb.sub, F2);
  auto ind = induce_module(k, emb.inclusion);
  CHECK(ind.rank() == 2);
  // permutation module on C6/C3: generator swaps the two cosets
  CHECK(ind.action(1) == Matrix(F2, {{0, 1}, {1, 0}}));
  auto reg = GModule::free(c6, F2);
  auto res = restrict_module(reg, emb.inclusion);
  CHECK(res.rank() == 6);
  // restricted regular module is free over C3: fixed points of rank 2 = index
  CHECK(fixed_lattice(res, {0, 1, 2}).rank() == 2);
  auto triv_group = embed_subgroup(make_group(FiniteGroup::cyclic(2)), {0});
  auto ind2 = induce_module(GModule::trivial(triv_group.sub, F2), triv_group.inclusion);
  CHECK(ind2.rank() == 2);
  auto back = restrict_module(ind2, triv_group.inclusion);
  CHECK(back.rank() == 2);
}

TEST_CASE("sign character") {
  auto s3 = FiniteGroup::symmetric(3);
  auto chi = sign_character(s3);
  int minus = 0;
  for (int v : chi) minus += v == -1;
  CHECK(minus == 3);
  CHECK(sign_character(FiniteGroup::cyclic(6)) == std::vector<int>{1, -1, 1, -1, 1, -1});
  CHECK_THROWS_AS(sign_character(FiniteGroup::cyclic(3)), Error);
}

TEST_CASE("canonical presentation") {
  auto c2 = make_group(FiniteGroup::cyclic(2));
  // Z^2 / (2,2),(0,6) with swap action
  auto m = GModule(c2, ZZ, 2, Matrix(ZZ, {{2, 0}, {2, 6}}), {Matrix::identity(2), Matrix(ZZ, {{1, 0}, {0, 1}})});
  auto c = m.canonical();
  CHECK(c.module.underlying() == m.underlying());
  CHECK(c.proj * c.lift == Matrix::identity(c.module.rank()));
}
