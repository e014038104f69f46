#include <random>

#include "doctest.h"
#include "kcell/cellular.hpp"
#include "kcell/errors.hpp"
#include "kcell/random.hpp"
#include "oracles.hpp"

using namespace kcell;

namespace {
const Ring F2 = Ring::prime_field(2);
const Ring F3 = Ring::prime_field(3);
const Ring ZZ = Ring::integers();

GModule cyclic_module(const GroupPtr& g, const Matrix& a) {
  return GModule::from_generators(g, a.ring(), a.rows(), Matrix(a.rows(), 0, a.ring()), {1}, {a});
}

GModule pulled_back(const GModule& m, const GroupPtr& big) {
  std::vector<int> map;
  for (int e = 0; e < big->order(); ++e) map.push_back(e % m.group()->order());
  return restrict_module(m, GroupHom(big, m.group(), map));
}

// the two approximations have the same homology groups
bool same_homology(const GComplex& a, const GComplex& b) {
  const int lo = std::min(a.empty() ? 0 : a.lo(), b.empty() ? 0 : b.lo());
  const int hi = std::max(a.empty() ? 0 : a.hi(), b.empty() ? 0 : b.hi());
  for (int n = lo; n <= hi; ++n)
    if (!(a.homology(n) == b.homology(n))) return false;
  return true;
}

Subgroup normal_of_order(const GroupPtr& g, std::size_t n) {
  for (const auto& h : g->normal_subgroups())
    if (h.size() == n) return h;
  FAIL("no normal subgroup");
  return {};
}
}  // namespace

TEST_CASE("p-groups: identity with a certificate from k") {
  auto c4 = make_group(FiniteGroup::cyclic(4));
  auto actions = oracle::all_actions(3, 2, 4);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 4; ++t) {
    auto m = cyclic_module(c4, actions[rng() % actions.size()]);
    auto r = cell_p_group(GComplex::concentrated(m), CellRange{-4, 4});
    CHECK(r.map.same_as(ComplexMap::identity(r.input)));
    CHECK_MESSAGE(r.verification.passed, r.verification.describe());
  }
  auto c2 = make_group(FiniteGroup::cyclic(2));
  auto reg = cell_p_group(GComplex::concentrated(GModule::free(c2, F2)));
  CHECK(reg.verification.passed);
  CHECK(reg.certificate.size() <= 5);
  auto zero = cell_p_group(GComplex::zero(c2, F2));
  CHECK(zero.certificate.empty());
  CHECK(zero.verification.passed);

  auto c3 = make_group(FiniteGroup::cyclic(3));
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto x = random_free_complex(seed, c3, F3, -1, {1, 2, 1});
    auto r = cell_p_group(x, CellRange{-2, 2});
    CHECK_MESSAGE(r.verification.passed, r.verification.describe());
  }
  auto c22 = make_group(FiniteGroup::product({FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)}));
  auto k22 = cell_p_group(GComplex::concentrated(GModule::free(c22, F2)), CellRange{-2, 2});
  CHECK(k22.verification.passed);

  try {
    cell_p_group(GComplex::concentrated(GModule::trivial(c3, F2)));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongCharacteristic);
  }
  try {
    cell_p_group(GComplex::concentrated(GModule::trivial(make_group(FiniteGroup::symmetric(3)), F2)));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongGroupClass);
  }
  CHECK_THROWS_AS(cell_p_group(GComplex::concentrated(GModule::trivial(c2, ZZ))), Error);
}

TEST_CASE("Koszul filtration of kP") {
  auto c2 = make_group(FiniteGroup::cyclic(2));
  auto k2 = kp_koszul_filtration(c2, F2);
  CHECK(k2.power_zero);
  CHECK(k2.top_homology == std::vector<std::size_t>{2, 2});
  CHECK(k2.splits);
  CHECK(k2.triangles.size() == 1);
  CHECK(k2.resolution_ok);
  auto c3 = make_group(FiniteGroup::cyclic(3));
  auto k3 = kp_koszul_filtration(c3, F3);
  CHECK(k3.top_homology == std::vector<std::size_t>{3, 3});
  CHECK(k3.triangles.size() == 2);
  for (const auto& t : k3.triangles) CHECK(t.validate() == "");
  auto c4 = make_group(FiniteGroup::cyclic(4));
  CHECK(kp_koszul_filtration(c4, F2).top_homology == std::vector<std::size_t>{4, 4});
  try {
    kp_koszul_filtration(c2, F3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongCharacteristic);
  }
  auto c22 = make_group(FiniteGroup::product({FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)}));
  try {
    kp_koszul_filtration(c22, F2);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongGroupClass);
  }
}

TEST_CASE("nilpotent groups: fixed points of the p'-part") {
  auto c6 = make_group(FiniteGroup::cyclic(6));
  auto c3 = make_group(FiniteGroup::cyclic(3));
  auto x = GComplex::concentrated(pulled_back(GModule::free(c3, F2), c6));
  auto r = cell_nilpotent(x);
  CHECK(r.approximation.rank(0) == 1);
  CHECK(r.approximation.homology(0) == FgAbelianGroup::free(1, F2));
  CHECK_MESSAGE(r.verification.passed, r.verification.describe());

  auto k = GComplex::concentrated(GModule::trivial(c6, F2));
  auto rk = cell_nilpotent(k);
  CHECK(same_complex(rk.approximation, k));
  CHECK(rk.verification.passed);

  // the rank-2 summand of F2C3: no fixed points and k-null
  Matrix w = Matrix::from_rows(F2, {{0, 1}, {1, 1}});
  auto omega = GComplex::concentrated(pulled_back(cyclic_module(c3, w), c6));
  auto ro = cell_nilpotent(omega);
  CHECK(ro.approximation.trimmed().empty());
  CHECK(ro.verification.passed);
  CHECK(is_k_null_in_range(omega, -4, 4).null);

  CHECK_THROWS_AS(cell_nilpotent(GComplex::concentrated(GModule::trivial(c6, ZZ))), Error);
  try {
    cell_nilpotent(GComplex::concentrated(GModule::trivial(make_group(FiniteGroup::symmetric(3)), F2)));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNilpotentGroup);
  }
}

TEST_CASE("cyclic groups: fiber of the localization") {
  auto c2 = make_group(FiniteGroup::cyclic(2));
  auto zt = cell_cyclic(GComplex::concentrated(GModule::trivial(c2, ZZ)));
  CHECK(zt.verification.passed);
  CHECK(zt.approximation.homology(0) == FgAbelianGroup::free(1));
  CHECK(*zt.homotopy[1].value == LocalGroup{FgAbelianGroup::free(1), {}});
  CHECK(zt.homotopy[0].value->is_zero());

  auto s3 = cell_cyclic(GComplex::concentrated(GModule::cyclic_torsion(c2, ZZ, 3, {1, -1})));
  CHECK(s3.approximation.trimmed().empty());
  CHECK(s3.verification.passed);

  auto reg = cell_cyclic(GComplex::concentrated(GModule::free(c2, ZZ)));
  CHECK(reg.certificate.colimit());
  CHECK_MESSAGE(reg.verification.passed, reg.verification.describe());
  CHECK(reg.verification.method == "colimit");
  REQUIRE(reg.homotopy.size() == 2);
  CHECK(reg.homotopy[0].n == -1);
  CHECK(reg.homotopy[0].value->prufer == std::map<Integer, std::size_t>{{2, 1}});
  CHECK(*reg.homotopy[1].value == LocalGroup{FgAbelianGroup::free(1), {}});
  CHECK(verify_cell_result(reg).passed);

  auto f3 = cell_cyclic(GComplex::concentrated(GModule::character(c2, F3, {1, -1})));
  CHECK(f3.approximation.trimmed().empty());
  CHECK(f3.verification.passed);

  // agreement with local cohomology of the group ring
  for (auto [n, ring] : std::vector<std::pair<int, Ring>>{{2, ZZ}, {2, F2}, {3, F2}, {4, F2}, {3, ZZ}}) {
    auto g = make_group(FiniteGroup::cyclic(n));
    auto c = cell_cyclic(GComplex::concentrated(GModule::free(g, ring)));
    auto lc = local_cohomology_groupring(g, ring, 0, 1);
    for (const auto& e : c.homotopy) {
      REQUIRE(e.value);
      CHECK(*e.value == lc.at(-e.n));
    }
    CHECK(c.verification.passed);
  }
  CHECK_THROWS_AS(cell_cyclic(GComplex::concentrated(GModule::trivial(make_group(FiniteGroup::symmetric(3)), F2))), Error);
}

TEST_CASE("nilpotent actions") {
  auto c2 = make_group(FiniteGroup::cyclic(2));
  auto u = cyclic_module(c2, Matrix::from_rows(F2, {{1, 1}, {0, 1}}));
  auto r = cell_nilpotent_action(GComplex::concentrated(u));
  CHECK(r.verification.passed);
  CHECK(is_nilpotent_module(u).nil_class == 2);
  bool has_triangle = false;
  for (const auto& s : r.certificate.steps()) has_triangle |= s.kind == StepKind::Triangle;
  CHECK(has_triangle);
  try {
    cell_nilpotent_action(GComplex::concentrated(GModule::character(c2, F3, {1, -1})));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNilpotentAction);
  }
  auto t = cell_nilpotent_action(GComplex::concentrated(GModule::trivial(c2, ZZ)));
  CHECK(t.verification.passed);
  CHECK(is_nilpotent_module(GModule::trivial(c2, ZZ)).nil_class == 1);
}

TEST_CASE("group extensions") {
  auto c6 = make_group(FiniteGroup::cyclic(6));
  auto c3 = make_group(FiniteGroup::cyclic(3));
  auto x = GComplex::concentrated(pulled_back(GModule::free(c3, F2), c6));
  auto ext = extension_from_normal(c6, normal_of_order(c6, 3));
  auto re = cell_extension(ext, x);
  auto rn = cell_nilpotent(x);
  CHECK(re.strategy == "extension-b");
  CHECK(re.verification.passed);
  CHECK(same_homology(re.approximation, rn.approximation));
  CHECK(re.approximation.homology(0) == FgAbelianGroup::free(1, F2));

  auto s3 = make_group(FiniteGroup::symmetric(3));
  auto es3 = extension_from_normal(s3, normal_of_order(s3, 3));
  try {
    cell_extension(es3, GComplex::concentrated(GModule::trivial(s3, ZZ)));
    CHECK(false);
  } catch (const NoStrategyApplies& e) {
    CHECK(e.witness().find("H_1") != std::string::npos);
    CHECK(e.witness().find("Z/3") != std::string::npos);
    CHECK(e.witness().find("not a nilpotent") != std::string::npos);
  }

  auto c4 = make_group(FiniteGroup::cyclic(4));
  auto e4 = extension_from_normal(c4, normal_of_order(c4, 2));
  auto d = extension_diagnostics(e4, GComplex::concentrated(GModule::trivial(c4, ZZ)), 3);
  CHECK(d.item == "c");
  for (bool b : d.nilpotent) CHECK(b);
  CHECK(d.fiber_homology[1].group() == FgAbelianGroup::cyclic(2));
  auto r4 = cell_extension(e4, GComplex::concentrated(GModule::trivial(c4, ZZ)));
  CHECK_MESSAGE(r4.verification.passed, r4.verification.describe());
  CHECK(r4.strategy.rfind("extension-c", 0) == 0);

  // item a: N = C6 inside C6 over F2, Q trivial; H = C3 ⊂ N
  auto ea = extension_from_normal(c6, Subgroup{0, 1, 2, 3, 4, 5});
  auto ra = cell_extension(ea, x);
  CHECK(ra.strategy == "extension-a");
  CHECK(same_homology(ra.approximation, rn.approximation));
}

TEST_CASE("verifying candidates") {
  auto c2 = make_group(FiniteGroup::cyclic(2));
  auto x = random_free_complex(3, c2, F2, 0, {1, 1});
  CHECK(verify_cell_approx(ComplexMap::identity(x), nullptr).passed);
  auto s3 = GComplex::concentrated(GModule::cyclic_torsion(c2, ZZ, 3, {1, -1}));
  CHECK(verify_cell_approx(ComplexMap::zero(GComplex::zero(c2, ZZ), s3), nullptr).passed);
  auto bad = verify_cell_approx(ComplexMap::identity(s3), nullptr);
  CHECK(!bad.passed);
  CHECK(bad.equivalence.null);
  CHECK(bad.certificate.find("Γ_I H_0 = 0") != std::string::npos);
  // a valid certificate for the wrong object
  auto other = cell_p_group(GComplex::concentrated(GModule::trivial(c2, F2)));
  CHECK(!verify_cell_approx(ComplexMap::identity(x), &other.certificate).passed);
}

TEST_CASE("properties: null complement, idempotence, strategy agreement") {
  auto c6 = make_group(FiniteGroup::cyclic(6));
  auto c4 = make_group(FiniteGroup::cyclic(4));
  for (Ring ring : {F2, F3}) {
    const long p = static_cast<long>(ring.p);
    auto acts = oracle::all_actions(2, p, 6);
    for (std::size_t i = 0; i < acts.size(); i += 3) {
      auto x = GComplex::concentrated(cyclic_module(c6, acts[i]));
      auto rn = cell_nilpotent(x, CellRange{-3, 3});
      CHECK(rn.verification.passed);
      CHECK(is_k_null_in_range(cone(rn.map).complex, -3, 3).null);
      auto again = cell_nilpotent(rn.approximation, CellRange{-3, 3});
      CHECK(same_homology(again.approximation, rn.approximation));
      auto rc = cell_cyclic(x, CellRange{-3, 3});
      CHECK(rc.verification.passed);
      CHECK(same_homology(rc.approximation, rn.approximation));
    }
  }
  for (const auto& a : oracle::all_actions(2, 2, 4)) {
    auto x = GComplex::concentrated(cyclic_module(c4, a));
    auto rc = cell_cyclic(x);
    auto ra = cell_nilpotent_action(x);
    CHECK(same_homology(rc.approximation, ra.approximation));
  }
  auto c3 = make_group(FiniteGroup::cyclic(3));
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto x = random_free_complex(seed, c3, ZZ, 0, {1, 1, 1});
    auto r = cellular_approximation(x, "auto", CellRange{-2, 2});
    CHECK_MESSAGE(r.verification.passed, r.strategy << " " << r.verification.describe());
  }
}

TEST_CASE("automatic strategy selection") {
  auto c2 = make_group(FiniteGroup::cyclic(2));
  CHECK(cellular_approximation(GComplex::concentrated(GModule::free(c2, F2))).strategy == "p-group");
  CHECK(cellular_approximation(GComplex::concentrated(GModule::free(c2, ZZ))).strategy == "cyclic");
  auto s3 = make_group(FiniteGroup::symmetric(3));
  CHECK(cellular_approximation(GComplex::concentrated(GModule::free(s3, F2))).strategy.rfind("extension", 0) == 0);
  CHECK(cellular_approximation(GComplex::concentrated(GModule::trivial(s3, ZZ))).strategy == "nilpotent-action");
  auto sign3 = GModule::cyclic_torsion(s3, ZZ, 3, sign_character(*s3));
  CHECK_THROWS_AS(cellular_approximation(GComplex::concentrated(sign3)), NoStrategyApplies);
  CHECK_THROWS_AS(cellular_approximation(GComplex::concentrated(GModule::trivial(c2, F2)), "bogus"), Error);
}
