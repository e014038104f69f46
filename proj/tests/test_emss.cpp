#include <random>

#include "doctest.h"
#include "kcell/emss.hpp"
#include "kcell/errors.hpp"
#include "oracles.hpp"

using namespace kcell;

namespace {
const Ring F2 = Ring::prime_field(2);
const Ring F3 = Ring::prime_field(3);
const Ring ZZ = Ring::integers();

std::vector<std::vector<std::vector<int>>> by_dim(const GSimplicialComplex& x) {
  std::vector<std::vector<std::vector<int>>> out;
  for (int n = 0; n <= x.dimension(); ++n) out.push_back(x.simplices(n));
  return out;
}

std::vector<std::size_t> cohomology_dims(const GComplex& c, int top) {
  std::vector<std::size_t> out;
  for (int n = 0; n <= top; ++n) out.push_back(c.homology(-n).num_generators());
  return out;
}

std::vector<std::size_t> sphere_dims(int n) {
  std::vector<std::size_t> d(static_cast<std::size_t>(n) + 1, 0);
  d[0] += 1;
  d[static_cast<std::size_t>(n)] += 1;
  return d;
}

GroupPtr c2() { return make_group(FiniteGroup::cyclic(2)); }

// C6 = <g> acting through sigma on n points
GSimplicialComplex c6_set(const std::vector<int>& sigma) {
  auto g = make_group(FiniteGroup::cyclic(6));
  const int gen = 1;
  std::vector<std::vector<int>> perms(6);
  for (int e = 0; e < 6; ++e) {
    int k = 0;
    while (g->power(gen, k) != e) ++k;
    std::vector<int> p(sigma.size());
    for (std::size_t v = 0; v < sigma.size(); ++v) {
      int w = static_cast<int>(v);
      for (int i = 0; i < k; ++i) w = sigma[static_cast<std::size_t>(w)];
      p[v] = w;
    }
    perms[static_cast<std::size_t>(e)] = p;
  }
  return GSimplicialComplex::discrete(g, perms);
}

// random permutation whose cycles have lengths dividing 6
std::vector<int> random_c6_perm(std::mt19937_64& rng, int cycles) {
  const int lengths[] = {1, 2, 3, 6};
  std::vector<int> sigma;
  for (int c = 0; c < cycles; ++c) {
    const int len = lengths[rng() % 4];
    const int base = static_cast<int>(sigma.size());
    for (int i = 0; i < len; ++i) sigma.push_back(base + (i + 1) % len);
  }
  return sigma;
}
}  // namespace

TEST_CASE("G-simplicial complexes and cochains") {
  auto sq = cross_polytope_sphere(1);
  CHECK(sq.vertices() == 4);
  CHECK(sq.count(1) == 4);
  CHECK(sq.is_free());
  CHECK(cross_polytope_sphere(2).count(2) == 8);
  CHECK(cross_polytope_sphere(2).vertices() == 6);
  CHECK(cross_polytope_sphere(3).count(3) == 16);
  for (int n = 1; n <= 3; ++n) {
    auto s = cross_polytope_sphere(n);
    CHECK(oracle::f2_betti(by_dim(s)) == sphere_dims(n));
    for (Ring r : {F2, F3, ZZ}) {
      GComplex c = cochains_of(s, r);
      CHECK(c.lo() == -n);
      CHECK(c.hi() == 0);
      if (r.is_field()) CHECK(cohomology_dims(c, n) == sphere_dims(n));
    }
    // over Z: H^n(S^n) = Z with the antipodal sign (−1)^{n+1}
    GComplex cz = cochains_of(s, ZZ);
    CHECK(cz.homology(-n) == FgAbelianGroup::free(1));
    HomologyModule top = cz.homology_module(-n);
    const Integer expect = n % 2 ? 1 : -1;
    CHECK(top.module().action(1)(0, 0) == expect);
  }
  GComplex sq2 = cochains_of(sq, F2);
  CHECK(sq2.rank(0) == 4);
  CHECK(sq2.rank(-1) == 4);

  auto pt = GSimplicialComplex::point(c2());
  GComplex cp = cochains_of(pt, F2);
  CHECK(cp.lo() == 0);
  CHECK(cp.rank(0) == 1);
  CHECK(!pt.is_free());

  // not simplicial: (0 1) sends the edge {1,2} to {0,2}
  std::vector<int> id{0, 1, 2, 3}, bad{1, 0, 2, 3};
  CHECK_THROWS_WITH_AS(GSimplicialComplex(c2(), 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {id, bad}), doctest::Contains("simplices"),
                       Error);
  try {
    GSimplicialComplex(c2(), 4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, {id, bad});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadAction);
  }
  // not a homomorphism: an involution for a generator of C3
  auto c3 = make_group(FiniteGroup::cyclic(3));
  try {
    GSimplicialComplex::discrete(c3, {{0, 1}, {1, 0}, {1, 0}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadAction);
  }
}

TEST_CASE("graded algebras and bigraded Tor") {
  auto a = GradedAlgebraPresentation::cyclic_cohomology(2, 10);
  CHECK(a.dims() == std::vector<std::size_t>(11, 1));
  for (int n = 1; n <= 4; ++n) {
    auto m = truncated_module(a, 0, n + 1);
    BigradedPage page = bigraded_tor(m, {3, 8});
    CHECK(page.at(0, 0) == 1);
    CHECK(page.at(1, n + 1) == 1);
    CHECK(page.entries.size() == 2);
    CHECK(page.total(0) == 1);
    CHECK(page.total(n) == 1);
    CHECK(page.sparse());
  }
  BigradedPage free = bigraded_tor(free_module(a), {3, 8});
  CHECK(free.entries.size() == 1);
  CHECK(free.at(0, 0) == 1);
  // k over F_2[x] has the two-term Koszul resolution
  BigradedPage kk = bigraded_tor(residue_field(a), {4, 8});
  CHECK(kk.entries == oracle::koszul_tor({1}, 4, 8));
  // k over F_2[x]/x^2: one entry on every diagonal t = s
  GradedPolynomial x2;
  x2.terms[{2}] = 1;
  GradedAlgebraPresentation dual(F2, {1}, {x2}, 8);
  BigradedPage line = bigraded_tor(residue_field(dual), {5, 8});
  for (int s = 0; s <= 5; ++s) CHECK(line.at(s, s) == 1);
  CHECK(line.entries == oracle::divided_power_tor({1}, 5, 8));

  // polynomial and exterior algebras on random degrees
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<int> degs;
    const int ng = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < ng; ++i) degs.push_back(2 + 2 * static_cast<int>(rng() % 2));
    auto poly = GradedAlgebraPresentation::polynomial(F3, degs, 9);
    CHECK(bigraded_tor(residue_field(poly), {4, 9}).entries == oracle::koszul_tor(degs, 4, 9));
    std::vector<int> odd;
    for (int d : degs) odd.push_back(d - 1);
    auto ext = GradedAlgebraPresentation::polynomial(F3, odd, 9);
    CHECK(bigraded_tor(residue_field(ext), {4, 9}).entries == oracle::divided_power_tor(odd, 4, 9));
  }

  // Hilbert series identity H_M = H_A · Σ (−1)^s Tor_{s,t} q^t for cyclic modules over F_2[x, y]
  auto xy = GradedAlgebraPresentation::polynomial(F2, {1, 1}, 8);
  for (int trial = 0; trial < 15; ++trial) {
    GradedModulePresentation m;
    m.algebra = &xy;
    m.degrees = {0};
    const int nrel = 1 + static_cast<int>(rng() % 2);
    for (int r = 0; r < nrel; ++r) {
      const int d = 1 + static_cast<int>(rng() % 3);
      GradedPolynomial f;
      for (int i = 0; i <= d; ++i)
        if (rng() % 2) f.terms[{i, d - i}] = 1;
      if (f.terms.empty()) f.terms[{d, 0}] = 1;
      m.relations.push_back({f});
    }
    const int T = 8;
    BigradedPage page = bigraded_tor(m, {3, T});
    for (const auto& [st, d] : page.entries) CHECK(st.first <= 2);
    auto hm = m.dims(T);
    auto ha = xy.dims();
    for (int t = 0; t <= T; ++t) {
      long rhs = 0;
      for (int u = 0; u <= t; ++u) {
        long chi = 0;
        for (int s = 0; s <= 3; ++s) chi += (s % 2 ? -1 : 1) * static_cast<long>(page.at(s, u));
        rhs += chi * static_cast<long>(ha[static_cast<std::size_t>(t - u)]);
      }
      CHECK(rhs == static_cast<long>(hm[static_cast<std::size_t>(t)]));
    }
  }

  try {
    GradedPolynomial big;
    big.terms[{9}] = 1;
    GradedAlgebraPresentation(F2, {1}, {big}, 6);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }
  try {
    bigraded_tor(free_module(a), {2, 11});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }
}

TEST_CASE("presentations against Ext") {
  auto a = GradedAlgebraPresentation::cyclic_cohomology(2, 6);
  PresentationVerdict v = validate_presentation(a, c2(), 6);
  CHECK(v.match);
  CHECK(v.ext_dims == std::vector<std::size_t>(7, 1));
  for (std::uint64_t p : {3u, 5u}) {
    auto cp = make_group(FiniteGroup::cyclic(static_cast<int>(p)));
    CHECK(validate_presentation(GradedAlgebraPresentation::cyclic_cohomology(p, 6), cp, 6).match);
  }
  auto wrong = GradedAlgebraPresentation::polynomial(F3, {1}, 6, "F_3[x], |x| = 1");
  PresentationVerdict w = validate_presentation(wrong, c2(), 6);
  CHECK(!w.match);
  CHECK(w.first_mismatch == 1);
  CHECK(w.ext_dims[1] == 0);
  auto trivial = GradedAlgebraPresentation::polynomial(F2, {}, 4);
  CHECK(validate_presentation(trivial, make_group(FiniteGroup::trivial()), 4).match);
}

TEST_CASE("targets against the theorem predictions") {
  for (int n = 1; n <= 3; ++n) {
    TargetReport t = emss_target(cross_polytope_sphere(n), F2);
    CHECK(t.theorem == "p-group");
    CHECK(t.matches);
    CHECK(t.dims() == sphere_dims(n));
  }
  TargetReport pt = emss_target(GSimplicialComplex::point(c2()), F2);
  CHECK(pt.dims() == std::vector<std::size_t>{1});
  CHECK(pt.matches);

  TargetReport three = emss_target(c6_set({1, 2, 0}), F2);
  CHECK(three.theorem == "nilpotent");
  CHECK(three.dims() == std::vector<std::size_t>{1});
  CHECK(three.matches);

  // π_0 = (H^0)^{C3}: one class per orbit of g^2
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto sigma = random_c6_perm(rng, 1 + static_cast<int>(rng() % 3));
    std::vector<int> sq(sigma.size());
    for (std::size_t v = 0; v < sigma.size(); ++v) sq[v] = sigma[static_cast<std::size_t>(sigma[v])];
    TargetReport t = emss_target(c6_set(sigma), F2);
    CHECK(t.matches);
    CHECK(t.dims()[0] == oracle::orbit_count(sq));
  }

  // over Z, two free points: Γ_I(ZC2) = Z spanned by the norm
  TargetReport z = emss_target(cochains_of(GSimplicialComplex::discrete(c2(), {{0, 1}, {1, 0}}), ZZ), 0, 1);
  CHECK(z.theorem == "cyclic");
  CHECK(z.matches);
  CHECK(z.target[0].fg == FgAbelianGroup::free(1));
}

TEST_CASE("E2 against the target") {
  auto a = GradedAlgebraPresentation::cyclic_cohomology(2, 8);
  for (int n = 1; n <= 3; ++n) {
    auto m = truncated_module(a, 0, n + 1);
    E2Report r = emss_e2_vs_target(cross_polytope_sphere(n), F2, a, m, {2, n + 3});
    CHECK(r.algebra.match);
    CHECK(r.module_matches);
    std::vector<std::size_t> rp(static_cast<std::size_t>(n) + 4, 0);
    for (int i = 0; i <= n; ++i) rp[static_cast<std::size_t>(i)] = 1;
    CHECK(r.borel_dims == rp);
    CHECK(r.collapse_forced);
    CHECK(r.totals_match);
    CHECK(r.e2_finite);
    CHECK(r.euler_e2 == r.euler_target);
    CHECK(std::vector<std::size_t>(r.totals.begin(), r.totals.begin() + n + 1) == sphere_dims(n));
  }
  E2Report pt = emss_e2_vs_target(GSimplicialComplex::point(c2()), F2, a, free_module(a), {2, 6});
  CHECK(pt.module_matches);
  CHECK(pt.e2.entries.size() == 1);
  CHECK(pt.totals_match);

  // two free points: E = EC2, H^*(E) = k, Tor^{F2[x]}(k, k) has (0,0) and (1,1) on the line t − s = 0
  auto two = GSimplicialComplex::discrete(c2(), {{0, 1}, {1, 0}});
  E2Report fr = emss_e2_vs_target(two, F2, a, residue_field(a), {3, 6});
  CHECK(fr.module_matches);
  CHECK(fr.e2.at(0, 0) == 1);
  CHECK(fr.e2.at(1, 1) == 1);
  CHECK(!fr.collapse_forced);
  CHECK(fr.target.dims() == std::vector<std::size_t>{2});
  CHECK(fr.totals[0] == 2);
  CHECK(fr.totals_match);
  CHECK(fr.verdict.find("not forced") != std::string::npos);

  // wrong module guess is reported, the computation continues
  E2Report bad = emss_e2_vs_target(cross_polytope_sphere(1), F2, a, free_module(a), {2, 5});
  CHECK(!bad.module_matches);
  CHECK(bad.verdict.find("module presentation") != std::string::npos);

  auto wrong = GradedAlgebraPresentation::polynomial(F2, {2}, 8);
  E2Report dims_only = emss_e2_vs_target(cross_polytope_sphere(1), F2, wrong, truncated_module(wrong, 0, 1), {2, 5});
  CHECK(!dims_only.algebra.match);
  CHECK(dims_only.verdict.find("dims-only") != std::string::npos);
}

TEST_CASE("Postnikov spectral sequence") {
  // p-group over F_2: E¹ on the line n = −p, collapse at E¹, abutment H^*
  for (int n = 1; n <= 2; ++n) {
    GComplex x = cochains_of(cross_polytope_sphere(n), F2);
    SSReport ss = postnikov_ss(x);
    CHECK(ss.mode == "exact");
    CHECK(ss.e1_matches_formula);
    CHECK(ss.pages_consistent);
    CHECK(ss.abutment_matches);
    CHECK(ss.stable_page == 1);
    for (const auto& [k, g] : ss.pages.front().entries) {
      CHECK(k.second == -k.first);
      auto d = SSReport::display(k.first, k.second);
      CHECK(2 * d.first + d.second == 0);
    }
    CHECK(ss.abutment.at(0).fg.num_generators() == 1);
    CHECK(ss.abutment.at(-n).fg.num_generators() == 1);
  }
  // ZC2 with H^0 = Z trivial and H^1 = Z/3 sign
  auto g = c2();
  GModule triv = GModule::trivial(g, ZZ);
  GModule sign = GModule::character(g, ZZ, {1, -1});
  GComplex x(g, ZZ, -1, {sign, triv.direct_sum(sign)}, {Matrix(ZZ, {{0, 3}})});
  CHECK(x.homology(0) == FgAbelianGroup::free(1));
  CHECK(x.homology(-1) == FgAbelianGroup::cyclic(3));
  SSReport z = postnikov_ss(x);
  CHECK(z.e1_matches_formula);
  CHECK(z.pages_consistent);
  CHECK(z.stable_page <= 2);
  CHECK(z.abutment_matches);
  CHECK(z.abutment.at(0).fg == FgAbelianGroup::free(1));
  CellResult direct = cell_cyclic(x);
  auto pi = cell_homotopy(direct, -3, 1);
  for (const auto& [n, grp] : pi) {
    const LocalGroup ab = z.abutment.count(n) ? z.abutment.at(n) : LocalGroup{FgAbelianGroup::zero(ZZ), {}};
    CHECK(ab.fg.free_rank == grp.fg.free_rank);
    CHECK(ab.fg.torsion == grp.fg.torsion);
    CHECK(ab.prufer == grp.prufer);
  }
  // single module: degenerate
  SSReport one = postnikov_ss(GComplex::concentrated(GModule::free(g, F2)));
  CHECK(one.pages.front().entries.size() == 1);
  CHECK(one.abutment_matches);
  // nilpotent group: C6 over F2 on the cochains of a 6-cycle with the rotation action
  auto c6 = make_group(FiniteGroup::cyclic(6));
  std::vector<std::vector<int>> perms;
  for (int e = 0; e < 6; ++e) {
    std::vector<int> p(6);
    for (int v = 0; v < 6; ++v) p[static_cast<std::size_t>(v)] = (v + e) % 6;
    perms.push_back(p);
  }
  GSimplicialComplex hex(c6, 6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}}, perms);
  SSReport nil = postnikov_ss(cochains_of(hex, F2), "nilpotent");
  CHECK(nil.mode == "exact");
  CHECK(nil.e1_matches_formula);
  CHECK(nil.pages_consistent);
  CHECK(nil.abutment_matches);
}
