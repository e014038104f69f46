#include "scenario.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "kcell/random.hpp"

namespace kcell::cli {

namespace {

const std::set<std::string> kKeys = {
    "schema",   "task",   "description", "coefficients", "group", "module",       "target",
    "degree",   "complex", "space",      "strategy",     "range", "caps",         "seed",
    "trials",   "presentation", "module_presentation", "cohomology", "generator", "normal",
    "max_size", "max_rank", "groups",    "resolution",   "cap",   "expect",
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

long to_long(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) fail(ErrorCode::InvalidInput, "bad integer '" + s + "' in " + what);
  return v;
}

std::string str(const LocalGroup& g) { return g.to_string(); }
std::string str(const FgAbelianGroup& g) { return g.to_string(); }

json graded(const GradedGroups& gg) {
  json out = json::object();
  for (int i = gg.a; i <= gg.b; ++i) out[std::to_string(i)] = str(gg.at(i));
  return out;
}

json range_json(const RangeReport& r) {
  return {{"a", r.a},
          {"b", r.b},
          {"required_stage", r.required},
          {"available_stage", r.available},
          {"resolution", r.resolution},
          {"certified", r.certified()}};
}

bool not_applicable(ErrorCode c) {
  switch (c) {
    case ErrorCode::WrongGroupClass:
    case ErrorCode::WrongCharacteristic:
    case ErrorCode::NotNilpotentGroup:
    case ErrorCode::NotNilpotentAction:
    case ErrorCode::NoStrategyApplies:
    case ErrorCode::UnsupportedGroup:
    case ErrorCode::NotStabilized:
      return true;
    default:
      return false;
  }
}

// Full permutation action from generator permutations, by closure over the group.
std::vector<std::vector<int>> close_action(const GroupPtr& g, const std::vector<int>& gens,
                                           const std::vector<std::vector<int>>& gen_perms, std::size_t points) {
  require(gens.size() == gen_perms.size(), ErrorCode::BadAction, "one permutation per generator expected");
  for (int h : gens) require(h >= 0 && h < g->order(), ErrorCode::BadAction, "generator outside the group");
  for (const auto& p : gen_perms) require(p.size() == points, ErrorCode::BadAction, "permutation of the wrong length");
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(g->order()));
  std::vector<int> id(points);
  for (std::size_t v = 0; v < points; ++v) id[v] = static_cast<int>(v);
  perms[0] = id;
  std::vector<int> queue{0};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int h = queue[q];
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const int e = g->mul(gens[i], h);
      if (!perms[static_cast<std::size_t>(e)].empty()) continue;
      std::vector<int> p(points);
      for (std::size_t v = 0; v < points; ++v) {
        const int w = perms[static_cast<std::size_t>(h)][v];
        require(w >= 0 && static_cast<std::size_t>(w) < points, ErrorCode::BadAction, "permutation entry out of range");
        p[v] = gen_perms[i][static_cast<std::size_t>(w)];
      }
      perms[static_cast<std::size_t>(e)] = std::move(p);
      queue.push_back(e);
    }
  }
  for (const auto& p : perms) require(!p.empty(), ErrorCode::BadAction, "generators do not generate the group");
  return perms;
}

Matrix parse_matrix(const json& j, Ring ring, std::size_t rows, std::size_t cols) {
  require(j.is_array(), ErrorCode::InvalidInput, "matrix must be an array of rows");
  std::vector<std::vector<long>> data;
  for (const auto& row : j) {
    require(row.is_array(), ErrorCode::InvalidInput, "matrix rows must be arrays");
    std::vector<long> r;
    for (const auto& e : row) {
      require(e.is_number_integer(), ErrorCode::InvalidInput, "matrix entries must be integers");
      r.push_back(e.get<long>());
    }
    require(r.size() == cols, ErrorCode::InvalidInput,
            "matrix row of length " + std::to_string(r.size()) + ", expected " + std::to_string(cols));
    data.push_back(std::move(r));
  }
  require(data.size() == rows, ErrorCode::InvalidInput,
          "matrix with " + std::to_string(data.size()) + " rows, expected " + std::to_string(rows));
  if (rows == 0) return Matrix(0, cols, ring);
  return Matrix::from_rows(ring, data, cols);
}

std::vector<int> int_list(const json& j, const std::string& what) {
  require(j.is_array(), ErrorCode::InvalidInput, what + " must be an array");
  std::vector<int> out;
  for (const auto& e : j) {
    require(e.is_number_integer(), ErrorCode::InvalidInput, what + " entries must be integers");
    out.push_back(e.get<int>());
  }
  return out;
}

std::vector<std::vector<int>> int_lists(const json& j, const std::string& what) {
  require(j.is_array(), ErrorCode::InvalidInput, what + " must be an array");
  std::vector<std::vector<int>> out;
  for (const auto& e : j) out.push_back(int_list(e, what));
  return out;
}

void only_keys(const json& j, const std::set<std::string>& keys, const std::string& what) {
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) fail(ErrorCode::InvalidInput, "unknown field '" + k + "' in " + what);
}

GModule regular_of_subgroup(const GroupPtr& g, Ring ring, int d) {
  require(d >= 1 && g->order() % d == 0, ErrorCode::BadSubgroup, "index must divide the group order");
  const std::size_t size = static_cast<std::size_t>(g->order() / d);
  std::optional<Subgroup> k;
  for (const auto& n : g->normal_subgroups())
    if (n.size() == size) {
      k = n;
      break;
    }
  require(k.has_value(), ErrorCode::BadSubgroup, "no normal subgroup of index " + std::to_string(d));
  std::map<std::vector<int>, int> index;
  std::vector<int> coset_of(static_cast<std::size_t>(g->order()));
  for (int e = 0; e < g->order(); ++e) {
    std::vector<int> c;
    for (int h : *k) c.push_back(g->mul(e, h));
    std::sort(c.begin(), c.end());
    auto it = index.emplace(c, static_cast<int>(index.size())).first;
    coset_of[static_cast<std::size_t>(e)] = it->second;
  }
  std::vector<int> rep(index.size(), -1);
  for (int e = g->order() - 1; e >= 0; --e) rep[static_cast<std::size_t>(coset_of[static_cast<std::size_t>(e)])] = e;
  std::vector<std::vector<int>> perms;
  for (int h = 0; h < g->order(); ++h) {
    std::vector<int> p(index.size());
    for (std::size_t c = 0; c < index.size(); ++c) p[c] = coset_of[static_cast<std::size_t>(g->mul(h, rep[c]))];
    perms.push_back(std::move(p));
  }
  return GModule::permutation(g, ring, perms);
}

// ---------------------------------------------------------------------------

GradedPolynomial parse_polynomial(const json& j, std::size_t vars) {
  GradedPolynomial f;
  require(j.is_array(), ErrorCode::InvalidInput, "polynomial must be an array of terms");
  for (const auto& t : j) {
    require(t.is_object(), ErrorCode::InvalidInput, "polynomial terms are objects {coef, exp}");
    only_keys(t, {"coef", "exp"}, "polynomial term");
    std::vector<int> e = int_list(t.at("exp"), "exponent vector");
    require(e.size() == vars, ErrorCode::InvalidInput, "exponent vector of the wrong length");
    f.terms[e] += t.value("coef", 1L);
  }
  return f;
}

GradedAlgebraPresentation parse_presentation(const json& j, int cap) {
  if (j.is_string()) {
    const auto parts = split(j.get<std::string>(), ':');
    require(parts.size() == 2 && parts[0] == "cyclic-cohomology", ErrorCode::InvalidInput,
            "unknown presentation " + j.get<std::string>());
    const long p = to_long(parts[1], "presentation");
    require(p > 1 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidInput, "cyclic-cohomology:p needs a prime");
    return GradedAlgebraPresentation::cyclic_cohomology(static_cast<std::uint64_t>(p), cap);
  }
  require(j.is_object(), ErrorCode::InvalidInput, "presentation must be a name or an object");
  only_keys(j, {"field", "degrees", "relations", "cap", "name"}, "presentation");
  const long p = j.at("field").get<long>();
  require(p > 1 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidInput, "presentation field must be prime");
  std::vector<int> degrees = int_list(j.at("degrees"), "degrees");
  std::vector<GradedPolynomial> rels;
  if (j.contains("relations"))
    for (const auto& r : j.at("relations")) rels.push_back(parse_polynomial(r, degrees.size()));
  return GradedAlgebraPresentation(Ring::prime_field(static_cast<std::uint64_t>(p)), degrees, rels,
                                   j.value("cap", cap), j.value("name", std::string()));
}

GradedModulePresentation parse_module_presentation(const json& j, const GradedAlgebraPresentation& a) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "free") return free_module(a);
    if (s == "residue-field") return residue_field(a);
    const auto parts = split(s, ':');
    if (parts[0] == "truncated" && parts.size() == 2)
      return truncated_module(a, 0, static_cast<int>(to_long(parts[1], s)));
    if (parts[0] == "truncated" && parts.size() == 3)
      return truncated_module(a, static_cast<int>(to_long(parts[1], s)), static_cast<int>(to_long(parts[2], s)));
    fail(ErrorCode::InvalidInput, "unknown module presentation " + s);
  }
  require(j.is_object(), ErrorCode::InvalidInput, "module presentation must be a name or an object");
  only_keys(j, {"degrees", "relations"}, "module presentation");
  GradedModulePresentation m;
  m.algebra = &a;
  m.degrees = int_list(j.at("degrees"), "module degrees");
  if (j.contains("relations"))
    for (const auto& r : j.at("relations")) {
      require(r.is_array() && r.size() == m.degrees.size(), ErrorCode::InvalidInput,
              "a module relation has one polynomial per generator");
      std::vector<GradedPolynomial> rel;
      for (const auto& f : r) rel.push_back(parse_polynomial(f, a.degrees().size()));
      m.relations.push_back(std::move(rel));
    }
  return m;
}

// ---------------------------------------------------------------------------

struct Ctx {
  json sc;
  std::string task;
  std::optional<Ring> ring;
  GroupPtr group;
  std::optional<CellRange> range;
  std::string strategy = "auto";
  std::uint64_t seed = 1;
  json range_report;

  bool has(const char* k) const { return sc.contains(k); }
  const json& at(const char* k) const {
    if (!sc.contains(k)) fail(ErrorCode::InvalidInput, std::string("task ") + task + " needs field '" + k + "'");
    return sc.at(k);
  }
  Ring coefficients(std::optional<Ring> fallback = std::nullopt) const {
    if (ring) return *ring;
    if (fallback) return *fallback;
    fail(ErrorCode::InvalidInput, "task " + task + " needs field 'coefficients'");
  }
  GroupPtr grp(const char* fallback = nullptr) const {
    if (group) return group;
    if (fallback) return parse_group(json(fallback));
    fail(ErrorCode::InvalidInput, "task " + task + " needs field 'group'");
  }
  CellRange rng(CellRange fallback) const { return range.value_or(fallback); }
  int integer(const char* k, int fallback) const { return has(k) ? sc.at(k).get<int>() : fallback; }
};

GComplex input_complex(const Ctx& c) {
  if (c.has("complex")) return parse_complex(c.sc.at("complex"), c.grp(), c.coefficients());
  if (c.has("space")) {
    GSimplicialComplex s = parse_space(c.sc.at("space"), c.group);
    return cochains_of(s, c.coefficients());
  }
  if (c.has("module")) return GComplex::concentrated(parse_module(c.sc.at("module"), c.grp(), c.coefficients()), c.integer("degree", 0));
  fail(ErrorCode::InvalidInput, "task " + c.task + " needs one of 'complex', 'space' or 'module'");
}

json pi_json(const std::map<int, LocalGroup>& pi) {
  json out = json::object();
  for (const auto& [n, g] : pi) out[std::to_string(n)] = str(g);
  return out;
}

json pi_dims(const std::map<int, LocalGroup>& pi) {
  json out = json::object();
  for (const auto& [n, g] : pi) out[std::to_string(n)] = g.fg.num_generators();
  return out;
}

json pi_entries(const std::vector<PiEntry>& es) {
  json out = json::array();
  for (const auto& e : es)
    out.push_back({{"n", e.n},
                   {"sub", str(e.sub)},
                   {"quotient", str(e.quotient)},
                   {"determined", e.determined},
                   {"value", e.value ? json(str(*e.value)) : json(nullptr)}});
  return out;
}

struct TaskOut {
  json results = json::object();
  int exit_code = kOk;
};

TaskOut describe_cell(const CellResult& r, const Ctx& c) {
  TaskOut t;
  const GComplex& x = r.input;
  const int lo = x.empty() ? 0 : x.lo() - 1, hi = x.empty() ? 0 : x.hi() + 1;
  auto pi = cell_homotopy(r, lo, hi);
  t.results["strategy"] = r.strategy;
  t.results["verified"] = r.verification.passed;
  t.results["verification"] = r.verification.method;
  t.results["verification_detail"] = r.verification.describe();
  t.results["certificate_valid"] = r.verification.certificate.empty();
  t.results["certificate_steps"] = r.certificate.size();
  t.results["certificate"] = r.certificate.summary();
  t.results["pi"] = pi_json(pi);
  if (x.ring().is_field()) t.results["pi_dims"] = pi_dims(pi);
  if (!r.homotopy.empty()) t.results["homotopy_sequence"] = pi_entries(r.homotopy);
  t.results["notes"] = r.notes;
  (void)c;
  t.exit_code = r.verification.passed ? kOk : kMismatch;
  return t;
}

TaskOut task_cell(Ctx& c) {
  const GComplex x = input_complex(c);
  const CellRange range = c.rng({});
  CellResult r;
  if (c.has("normal")) {
    require(c.strategy == "auto" || c.strategy == "extension", ErrorCode::InvalidInput,
            "'normal' only applies to the extension strategy");
    const GroupPtr& g = x.group();
    Subgroup n = g->closure(int_list(c.sc.at("normal"), "normal"));
    require(g->is_normal(n), ErrorCode::BadSubgroup, "the subgroup generated by 'normal' is not normal");
    r = cell_extension(extension_from_normal(g, n), x, range);
  } else {
    r = cellular_approximation(x, c.strategy, range);
  }
  c.range_report = range_json(r.verification.report);
  return describe_cell(r, c);
}

TaskOut task_triangle_lemma(Ctx& c) {
  const GroupPtr g = c.grp();
  const Ring ring = c.coefficients();
  int gen = c.integer("generator", -1);
  if (gen < 0)
    for (int e = 0; e < g->order() && gen < 0; ++e)
      if (g->element_order(e) == g->order()) gen = e;
  require(gen >= 0, ErrorCode::WrongGroupClass, "the triangle lemma needs a cyclic group");
  const Triangle t = cyclic_triangle(g, ring, gen);
  const FgAbelianGroup k = FgAbelianGroup::free(1, ring);
  bool trivial = true;
  for (int n : {0, 1}) {
    const HomologyModule hm = t.B.homology_module(n);
    const GModule& h = hm.module();
    for (int e = 0; e < g->order(); ++e)
      if (!h.same_elements(h.action(e), Matrix::identity(h.rank(), ring))) trivial = false;
  }
  const std::string why = t.validate();
  TaskOut out;
  out.results["H0"] = str(t.B.homology(0));
  out.results["H1"] = str(t.B.homology(1));
  out.results["homology_is_k"] = t.B.homology(0) == k && t.B.homology(1) == k;
  out.results["trivial_action"] = trivial;
  out.results["triangle_valid"] = why.empty();
  if (!why.empty()) out.results["triangle_error"] = why;
  const bool ok = out.results["homology_is_k"].get<bool>() && trivial && why.empty();
  out.exit_code = ok ? kOk : kMismatch;
  return out;
}

TaskOut task_koszul(Ctx& c) {
  const GroupPtr g = c.grp();
  const Ring ring = c.coefficients();
  KoszulReport k = kp_koszul_filtration(g, ring, c.integer("degree", 3));
  const GModule kp = GModule::free(g, ring);
  const FreeResolution self = free_resolution(kp, 2);
  bool small = self.verify();
  for (std::size_t i = 1; i < self.ranks.size(); ++i) small = small && self.ranks[i] == 0;
  small = small && !self.ranks.empty() && self.ranks[0] == 1;
  const bool fin = k.certificate.validate_against(GComplex::concentrated(kp)).empty();
  TaskOut out;
  out.results["power_zero"] = k.power_zero;
  out.results["top_homology"] = k.top_homology;
  out.results["splits"] = k.splits;
  out.results["triangles"] = k.triangles.size();
  out.results["resolution_ranks"] = k.resolution_ranks;
  out.results["witness"] = {{"small", small}, {"finitely_built_from_k", fin}, {"builds_k", k.resolution_ok}};
  const auto order = static_cast<std::size_t>(g->order());
  const bool ok = k.power_zero && k.splits && small && fin && k.resolution_ok &&
                  k.top_homology == std::vector<std::size_t>{order, order};
  out.exit_code = ok ? kOk : kMismatch;
  return out;
}

std::vector<std::size_t> random_ranks(std::mt19937_64& rng, std::size_t count, std::size_t max_rank) {
  std::uniform_int_distribution<std::size_t> d(0, max_rank);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(d(rng));
  return out;
}

TaskOut task_p_group_suite(Ctx& c) {
  const GroupPtr g = c.grp("cyclic:4");
  const Ring ring = c.coefficients(Ring::prime_field(2));
  const int trials = c.integer("trials", 50);
  const auto max_rank = static_cast<std::size_t>(c.integer("max_rank", 4));
  const CellRange range = c.rng({});
  std::mt19937_64 rng(c.seed);
  int accepted = 0, socle_checks = 0, socle_ok = 0;
  json failures = json::array();
  for (int t = 0; t < trials; ++t) {
    std::vector<GModule> mods;
    for (std::size_t r : random_ranks(rng, 3, max_rank)) mods.push_back(random_cyclic_module(rng, g, ring, r));
    const GComplex x = random_complex(rng, mods, 0);
    const CellResult r = cell_p_group(x, range);
    const Verification v = verify_cell_approx(ComplexMap::identity(x), &r.certificate, range);
    if (r.verification.passed && v.passed)
      ++accepted;
    else
      failures.push_back({{"trial", t}, {"detail", v.describe()}});
    for (const GModule& m : mods) {
      if (m.rank() == 0) continue;
      ++socle_checks;
      if (!ext_range(GModule::trivial(g, ring), m, 0, 0).at(0).is_zero())
        ++socle_ok;
      else
        failures.push_back({{"trial", t}, {"detail", "Ext^0(k, M) = 0 for " + m.describe()}});
    }
  }
  TaskOut out;
  out.results = {{"trials", trials},    {"accepted", accepted}, {"socle_checks", socle_checks},
                 {"socle_ok", socle_ok}, {"failures", failures}};
  out.exit_code = accepted == trials && socle_ok == socle_checks ? kOk : kMismatch;
  return out;
}

TaskOut task_nilpotent_suite(Ctx& c) {
  const GroupPtr g = c.grp("cyclic:6");
  const Ring ring = c.coefficients(Ring::prime_field(2));
  const int trials = c.integer("trials", 25);
  const auto max_rank = static_cast<std::size_t>(c.integer("max_rank", 3));
  const CellRange range = c.rng({-5, 5});
  const Subgroup h = g->p_prime_elements(ring.p);
  const GroupExtension ext = extension_from_normal(g, h);
  std::mt19937_64 rng(c.seed);
  int equivalences = 0, agreements = 0;
  json failures = json::array();
  for (int t = 0; t < trials; ++t) {
    std::vector<GModule> mods;
    for (std::size_t r : random_ranks(rng, 3, max_rank)) mods.push_back(random_cyclic_module(rng, g, ring, r));
    const GComplex x = random_complex(rng, mods, 0);
    const CellResult rn = cell_nilpotent(x, range);
    const bool eq = is_k_equivalence_in_range(rn.map, range.a, range.b).null;
    const CellResult re = cell_extension(ext, x, range);
    bool agree = true;
    for (int n = x.lo() - 1; n <= x.hi() + 1; ++n) {
      const FgAbelianGroup a = rn.approximation.empty() ? FgAbelianGroup::zero(ring) : rn.approximation.homology(n);
      const FgAbelianGroup b = re.approximation.empty() ? FgAbelianGroup::zero(ring) : re.approximation.homology(n);
      if (!(a == b)) agree = false;
    }
    equivalences += eq;
    agreements += agree;
    if (!eq || !agree) failures.push_back({{"trial", t}, {"k_equivalence", eq}, {"agrees_with_extension", agree}});
  }
  TaskOut out;
  out.results = {{"trials", trials},
                 {"k_equivalences", equivalences},
                 {"agreements", agreements},
                 {"normal_subgroup_order", h.size()},
                 {"failures", failures}};
  out.exit_code = equivalences == trials && agreements == trials ? kOk : kMismatch;
  return out;
}

TaskOut task_sigma3(Ctx& c) {
  const GroupPtr g = c.grp("sigma3");
  const Ring ring = c.coefficients(Ring::integers());
  require(ring.p == 0, ErrorCode::InvalidInput, "the Σ3 control runs over Z");
  const Subgroup n = g->p_elements(3);
  require(g->is_normal(n) && n.size() == 3, ErrorCode::WrongGroupClass, "no normal subgroup of order 3");
  const GroupExtension ext = extension_from_normal(g, n);
  const GComplex x = GComplex::concentrated(GModule::trivial(g, ring));
  const ExtensionDiagnostics diag = extension_diagnostics(ext, x, 3);
  const GModule& h1 = diag.fiber_homology.at(1).module();
  std::string action = "other";
  for (int e = 0; e < ext.Q()->order(); ++e)
    if (e != 0) {
      const Matrix& a = h1.action(e);
      if (h1.same_elements(a, -Matrix::identity(h1.rank(), ring)))
        action = "-1";
      else if (h1.same_elements(a, Matrix::identity(h1.rank(), ring)))
        action = "+1";
    }
  const SubModule gamma = i_power_torsion(h1);
  const NullReport null = is_k_null_in_range(GComplex::concentrated(h1), -4, 4);
  bool no_strategy = false;
  std::string witness;
  try {
    cell_extension(ext, x, c.rng({}));
  } catch (const NoStrategyApplies& e) {
    no_strategy = true;
    witness = e.witness();
  }
  const GroupPtr c3 = embed_subgroup(g, n).sub;
  const GradedGroups tor = tor_range(GModule::trivial(c3, ring), GModule::trivial(c3, ring), 0, 3);
  TaskOut out;
  out.results = {{"H1", str(h1.underlying())},
                 {"H1_quotient_action", action},
                 {"gamma_I", str(gamma.module().underlying())},
                 {"k_null", null.null},
                 {"no_strategy", no_strategy},
                 {"witness", witness},
                 {"tor", graded(tor)}};
  const bool ok = gamma.module().is_zero() && null.null && no_strategy && action == "-1";
  out.exit_code = ok ? kOk : kMismatch;
  return out;
}

std::vector<json> group_strings(const std::vector<LocalGroup>& gs) {
  std::vector<json> out;
  for (const auto& g : gs) out.push_back(str(g));
  return out;
}

TaskOut task_emss_target(Ctx& c) {
  TargetReport rep;
  if (c.has("space")) {
    rep = emss_target(parse_space(c.sc.at("space"), c.group), c.coefficients(), c.strategy);
  } else {
    const GComplex x = input_complex(c);
    rep = emss_target(x, 0, std::max(0, -x.lo()), c.strategy);
  }
  TaskOut out;
  out.results = {{"theorem", rep.theorem},
                 {"strategy", rep.cell.strategy},
                 {"degrees", {rep.lo, rep.hi}},
                 {"target", group_strings(rep.target)},
                 {"target_dims", rep.dims()},
                 {"prediction", group_strings(rep.prediction)},
                 {"matches", rep.matches},
                 {"notes", rep.notes}};
  out.exit_code = rep.matches ? kOk : kMismatch;
  return out;
}

TorCaps parse_caps(const Ctx& c) {
  TorCaps caps;
  if (c.has("caps")) {
    const json& j = c.sc.at("caps");
    only_keys(j, {"s", "t"}, "caps");
    caps.s_max = j.value("s", caps.s_max);
    caps.t_max = j.value("t", caps.t_max);
  }
  return caps;
}

json page_json(const BigradedPage& p) {
  json entries = json::array();
  for (const auto& [st, d] : p.entries) entries.push_back({st.first, st.second, d});
  return {{"s_max", p.s_max}, {"t_max", p.t_max}, {"convention", p.convention}, {"entries", entries}};
}

TaskOut task_emss_e2(Ctx& c) {
  const TorCaps caps = parse_caps(c);
  const GSimplicialComplex f = parse_space(c.at("space"), c.group);
  const Ring ring = c.coefficients();
  const GradedAlgebraPresentation a = parse_presentation(c.at("presentation"), c.integer("cap", caps.t_max));
  const GradedModulePresentation m = parse_module_presentation(c.at("module_presentation"), a);
  const E2Report rep = emss_e2_vs_target(f, ring, a, m, caps);
  TaskOut out;
  out.results = {{"algebra_matches", rep.algebra.match},
                 {"algebra_first_mismatch", rep.algebra.first_mismatch},
                 {"borel_dims", rep.borel_dims},
                 {"module_dims", rep.module_dims},
                 {"module_matches", rep.module_matches},
                 {"e2", page_json(rep.e2)},
                 {"totals", rep.totals},
                 {"target_dims", rep.target.dims()},
                 {"totals_match", rep.totals_match},
                 {"collapse_forced", rep.collapse_forced},
                 {"euler_target", rep.euler_target},
                 {"euler_e2", rep.euler_e2},
                 {"e2_finite", rep.e2_finite},
                 {"verdict", rep.verdict}};
  out.exit_code = rep.algebra.match && rep.module_matches && rep.totals_match ? kOk : kMismatch;
  return out;
}

TaskOut task_postnikov_ss(Ctx& c) {
  const GComplex x = input_complex(c);
  const SSReport rep = postnikov_ss(x, c.strategy, c.rng({}));
  json pages = json::array();
  for (const auto& p : rep.pages) {
    json entries = json::array();
    for (const auto& [pn, g] : p.entries) {
      const auto [dp, dq] = SSReport::display(pn.first, pn.second);
      entries.push_back({{"p", pn.first}, {"n", pn.second}, {"q", dq}, {"group", str(g)}});
      (void)dp;
    }
    json diffs = json::array();
    for (const auto& [pn, m] : p.differentials)
      if (!m.is_zero()) diffs.push_back({{"p", pn.first}, {"n", pn.second}, {"matrix", m.to_rows()}});
    pages.push_back({{"r", p.r}, {"entries", entries}, {"nonzero_differentials", diffs}});
  }
  TaskOut out;
  out.results = {{"mode", rep.mode},
                 {"pages", pages},
                 {"stable_page", rep.stable_page},
                 {"abutment", pi_json(rep.abutment)},
                 {"direct", pi_json(rep.direct)},
                 {"e1_matches_formula", rep.e1_matches_formula},
                 {"abutment_matches", rep.abutment_matches},
                 {"pages_consistent", rep.pages_consistent},
                 {"notes", rep.notes}};
  out.exit_code = rep.e1_matches_formula && rep.abutment_matches && rep.pages_consistent ? kOk : kMismatch;
  return out;
}

std::vector<GModule> cohomology_modules(const Ctx& c, const GroupPtr& g, Ring ring) {
  const json& j = c.at("cohomology");
  require(j.is_array(), ErrorCode::InvalidInput, "'cohomology' must be an array of modules (H^0, H^1, ...)");
  std::vector<GModule> out;
  for (const auto& m : j) out.push_back(parse_module(m, g, ring));
  return out;
}

TaskOut task_pi_sequence(Ctx& c) {
  const GroupPtr g = c.grp("cyclic:2");
  const Ring ring = c.coefficients(Ring::integers());
  int gen = c.integer("generator", -1);
  if (gen < 0)
    for (int e = 0; e < g->order() && gen < 0; ++e)
      if (g->element_order(e) == g->order()) gen = e;
  require(gen >= 0, ErrorCode::WrongGroupClass, "the π sequence needs a cyclic group");
  const PiSequence seq = cyclic_pi1_sequence(cohomology_modules(c, g, ring), gen);
  json pi = json::object();
  for (const auto& e : seq.entries)
    pi[std::to_string(-e.n)] = e.value ? str(*e.value) : "ext(" + str(e.quotient) + ", " + str(e.sub) + ")";
  TaskOut out;
  out.results = {{"entries", pi_entries(seq.entries)}, {"pi", pi}, {"note", seq.note}};
  return out;
}

TaskOut task_c2_checker(Ctx& c) {
  const GroupPtr g = c.grp("cyclic:2");
  const Ring ring = c.coefficients(Ring::integers());
  const C2Verdict v = corollary_c2_checker(cohomology_modules(c, g, ring));
  TaskOut out;
  out.results = {{"affirmed", v.affirmed}, {"violated", v.violated}, {"entries", pi_entries(v.sequence.entries)}};
  return out;
}

TaskOut task_local_cohomology(Ctx& c) {
  const GroupPtr g = c.grp();
  const Ring ring = c.coefficients();
  const CellRange q = c.rng({0, 2});
  std::vector<int> gens;
  if (c.has("generator")) gens = {c.sc.at("generator").get<int>()};
  const GModule m = c.has("module") ? parse_module(c.sc.at("module"), g, ring) : GModule::free(g, ring);
  const LocalCohomology lc = c.has("module") ? local_cohomology(m, q.a, q.b, gens)
                                             : local_cohomology_groupring(g, ring, q.a, q.b, gens);
  TaskOut out;
  json groups = json::object();
  for (int i = q.a; i <= q.b; ++i) groups[std::to_string(i)] = str(lc.at(i));
  out.results = {{"groups", groups}, {"method", lc.method}, {"generators", lc.generators}};
  bool cyclic = false;
  for (int e = 0; e < g->order(); ++e) cyclic = cyclic || g->element_order(e) == g->order();
  if (cyclic) {
    const CellResult r = cell_cyclic(GComplex::concentrated(m), c.rng({}), gens.empty() ? std::nullopt : std::optional<int>(gens[0]));
    const auto pi = cell_homotopy(r, -q.b, -q.a);
    bool same = true;
    json cell = json::object();
    for (int i = q.a; i <= q.b; ++i) {
      cell[std::to_string(-i)] = str(pi.at(-i));
      if (!(pi.at(-i) == lc.at(i))) same = false;
    }
    out.results["cell_homotopy"] = cell;
    out.results["matches_cell"] = same;
    if (!same) out.exit_code = kMismatch;
  }
  return out;
}

TaskOut task_snf(Ctx& c) {
  const int trials = c.integer("trials", 200);
  const int max_size = c.integer("max_size", 8);
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<int> dim(1, max_size);
  std::uniform_int_distribution<long> entry(-9, 9);
  int passed = 0;
  json failures = json::array();
  for (int t = 0; t < trials; ++t) {
    const auto r = static_cast<std::size_t>(dim(rng)), k = static_cast<std::size_t>(dim(rng));
    Matrix a(r, k);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < k; ++j) a.set(i, j, entry(rng));
    const SmithForm s = smith_normal_form(a);
    bool ok = s.U * a * s.V == s.S;
    ok = ok && abs(determinant(s.U)) == 1 && abs(determinant(s.V)) == 1;
    ok = ok && (s.U * s.U_inv).is_identity() && (s.V * s.V_inv).is_identity();
    for (std::size_t i = 0; i < r && ok; ++i)
      for (std::size_t j = 0; j < k && ok; ++j)
        if (i != j && s.S(i, j) != 0) ok = false;
    for (std::size_t i = 0; i + 1 < s.invariant_factors.size() && ok; ++i) {
      const Integer& d = s.invariant_factors[i];
      const Integer& e = s.invariant_factors[i + 1];
      if (d == 0 ? e != 0 : e % d != 0) ok = false;
    }
    passed += ok;
    if (!ok) failures.push_back(t);
  }
  TaskOut out;
  out.results = {{"trials", trials}, {"passed", passed}, {"failures", failures}};
  out.exit_code = passed == trials ? kOk : kMismatch;
  return out;
}

// Every module k^r (r ≤ max_rank) with an action of a cyclic group, by enumeration of the generator matrix.
std::vector<GModule> all_cyclic_modules(const GroupPtr& g, Ring ring, std::size_t max_rank) {
  int gen = -1;
  for (int e = 0; e < g->order() && gen < 0; ++e)
    if (g->element_order(e) == g->order()) gen = e;
  require(gen >= 0, ErrorCode::WrongGroupClass, "module enumeration needs a cyclic group");
  require(ring.is_field(), ErrorCode::WrongCharacteristic, "module enumeration needs a finite field");
  std::vector<GModule> out;
  for (std::size_t r = 1; r <= max_rank; ++r) {
    const std::size_t n = r * r;
    std::vector<long> v(n, 0);
    for (;;) {
      Matrix a(r, r, ring);
      for (std::size_t i = 0; i < n; ++i) a.set(i / r, i % r, v[i]);
      if (a.pow(static_cast<unsigned>(g->order())).is_identity())
        out.push_back(GModule::from_generators(g, ring, r, Matrix(r, 0, ring), {gen}, {a}));
      std::size_t i = 0;
      while (i < n && ++v[i] == static_cast<long>(ring.p)) v[i++] = 0;
      if (i == n) break;
    }
  }
  return out;
}

TaskOut task_resolution_independence(Ctx& c) {
  const CellRange range = c.rng({0, 3});
  const auto max_rank = static_cast<std::size_t>(c.integer("max_rank", 2));
  std::vector<std::pair<GroupPtr, Ring>> cases;
  if (c.has("groups")) {
    for (const auto& e : c.sc.at("groups")) {
      only_keys(e, {"group", "coefficients"}, "groups entry");
      cases.emplace_back(parse_group(e.at("group")), parse_ring(e.at("coefficients")));
    }
  } else {
    cases.emplace_back(c.grp(), c.coefficients());
  }
  TaskOut out;
  json per = json::array();
  bool all = true;
  for (const auto& [g, ring] : cases) {
    const auto mods = all_cyclic_modules(g, ring, max_rank);
    std::size_t pairs = 0, agree = 0;
    for (const auto& m : mods)
      for (const auto& n : mods) {
        ++pairs;
        const auto kc = ext_range(m, n, range.a, range.b, ResolutionKind::KernelCover);
        const auto bar = ext_range(m, n, range.a, range.b, ResolutionKind::Bar);
        bool same = kc.report.certified() && bar.report.certified();
        for (int i = range.a; i <= range.b && same; ++i) same = kc.at(i) == bar.at(i);
        agree += same;
      }
    all = all && agree == pairs;
    per.push_back({{"group", g->label()}, {"coefficients", ring.name()}, {"modules", mods.size()},
                   {"pairs", pairs}, {"agree", agree}});
  }
  out.results = {{"cases", per}, {"all_agree", all}, {"degrees", {range.a, range.b}}};
  out.exit_code = all ? kOk : kMismatch;
  return out;
}

ResolutionKind resolution_kind(const Ctx& c) {
  const std::string k = c.has("resolution") ? c.sc.at("resolution").get<std::string>() : "kernel-cover";
  if (k == "kernel-cover") return ResolutionKind::KernelCover;
  if (k == "bar") return ResolutionKind::Bar;
  fail(ErrorCode::InvalidInput, "resolution must be kernel-cover or bar");
}

TaskOut task_ext_tor(Ctx& c, bool ext) {
  const GroupPtr g = c.grp();
  const Ring ring = c.coefficients();
  const GModule m = parse_module(c.at("module"), g, ring);
  const GModule y = c.has("target") ? parse_module(c.sc.at("target"), g, ring) : GModule::trivial(g, ring);
  const CellRange r = c.rng({0, 4});
  const GradedGroups gg = ext ? ext_range(m, y, r.a, r.b, resolution_kind(c)) : tor_range(m, y, r.a, r.b, resolution_kind(c));
  c.range_report = range_json(gg.report);
  TaskOut out;
  out.results = {{"groups", graded(gg)}};
  if (ring.is_field()) out.results["dims"] = gg.dims();
  return out;
}

TaskOut task_homology(Ctx& c) {
  const GComplex x = input_complex(c);
  TaskOut out;
  json h = json::object(), mods = json::object();
  for (int n = x.lo(); n <= x.hi(); ++n) {
    h[std::to_string(n)] = str(x.homology(n));
    mods[std::to_string(n)] = x.homology_module(n).module().describe();
  }
  out.results = {{"homology", h}, {"modules", mods}};
  return out;
}

TaskOut task_borel(Ctx& c) {
  const GComplex x = input_complex(c);
  const CellRange r = c.rng({0, 4});
  const GradedGroups gg = borel_cochains(x, r.a, r.b);
  c.range_report = range_json(gg.report);
  TaskOut out;
  out.results = {{"groups", graded(gg)}};
  if (x.ring().is_field()) out.results["dims"] = gg.dims();
  return out;
}

TaskOut task_validate_presentation(Ctx& c) {
  const int cap = c.integer("cap", 6);
  const GradedAlgebraPresentation a = parse_presentation(c.at("presentation"), cap);
  const PresentationVerdict v = validate_presentation(a, c.grp(), cap);
  TaskOut out;
  out.results = {{"match", v.match},
                 {"first_mismatch", v.first_mismatch},
                 {"algebra_dims", v.algebra_dims},
                 {"ext_dims", v.ext_dims}};
  out.exit_code = v.match ? kOk : kMismatch;
  return out;
}

TaskOut task_bigraded_tor(Ctx& c) {
  const TorCaps caps = parse_caps(c);
  const GradedAlgebraPresentation a = parse_presentation(c.at("presentation"), c.integer("cap", caps.t_max));
  const GradedModulePresentation m = parse_module_presentation(c.at("module_presentation"), a);
  const BigradedPage p = bigraded_tor(m, caps);
  std::vector<std::size_t> totals;
  for (int n = 0; n <= caps.t_max - caps.s_max; ++n) totals.push_back(p.total(n));
  TaskOut out;
  out.results = {{"page", page_json(p)}, {"totals", totals}, {"sparse", p.sparse()}};
  return out;
}

using TaskFn = std::function<TaskOut(Ctx&)>;

const std::map<std::string, TaskFn>& tasks() {
  static const std::map<std::string, TaskFn> t = {
      {"cell", task_cell},
      {"triangle-lemma", task_triangle_lemma},
      {"koszul", task_koszul},
      {"p-group-suite", task_p_group_suite},
      {"nilpotent-suite", task_nilpotent_suite},
      {"sigma3", task_sigma3},
      {"emss-target", task_emss_target},
      {"emss-e2", task_emss_e2},
      {"postnikov-ss", task_postnikov_ss},
      {"pi-sequence", task_pi_sequence},
      {"c2-checker", task_c2_checker},
      {"local-cohomology", task_local_cohomology},
      {"snf", task_snf},
      {"resolution-independence", task_resolution_independence},
      {"ext", [](Ctx& c) { return task_ext_tor(c, true); }},
      {"tor", [](Ctx& c) { return task_ext_tor(c, false); }},
      {"homology", task_homology},
      {"borel", task_borel},
      {"validate-presentation", task_validate_presentation},
      {"bigraded-tor", task_bigraded_tor},
  };
  return t;
}

void collect_mismatches(const json& e, const json& a, const std::string& path, std::vector<std::string>& out) {
  if (e.is_object()) {
    if (!a.is_object()) {
      out.push_back(path + ": expected an object");
      return;
    }
    for (const auto& [k, v] : e.items()) {
      if (!a.contains(k))
        out.push_back(path + "/" + k + ": missing");
      else
        collect_mismatches(v, a.at(k), path + "/" + k, out);
    }
  } else if (e.is_array()) {
    if (!a.is_array() || a.size() != e.size()) {
      out.push_back(path + ": expected " + e.dump() + ", got " + a.dump());
      return;
    }
    for (std::size_t i = 0; i < e.size(); ++i) collect_mismatches(e[i], a[i], path + "/" + std::to_string(i), out);
  } else if (e != a) {
    out.push_back(path + ": expected " + e.dump() + ", got " + a.dump());
  }
}

void flatten(const json& j, const std::string& path, std::ostringstream& os) {
  if (j.is_object() || j.is_array()) {
    if (j.empty()) {
      os << path << '\t' << j.dump() << '\n';
      return;
    }
    if (j.is_object())
      for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, os);
    else
      for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "." + std::to_string(i), os);
    return;
  }
  os << path << '\t' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
}

Outcome error_outcome(json report, int code, const std::string& kind, const std::string& what,
                      const std::string& witness = "") {
  report["status"] = kind;
  report["error"] = {{"message", what}};
  if (!witness.empty()) report["error"]["witness"] = witness;
  return {std::move(report), code};
}

}  // namespace

// ---------------------------------------------------------------------------

Ring parse_ring(const json& j) {
  require(j.is_string(), ErrorCode::InvalidInput, "coefficients must be a string");
  const std::string s = j.get<std::string>();
  if (s == "Z") return Ring::integers();
  const auto parts = split(s, ':');
  if (parts.size() == 2 && (parts[0] == "Fp" || parts[0] == "Zmod")) {
    const long p = to_long(parts[1], "coefficients");
    require(p > 1 && is_prime(static_cast<std::uint64_t>(p)), ErrorCode::InvalidInput,
            s + ": only prime moduli are supported");
    return Ring::prime_field(static_cast<std::uint64_t>(p));
  }
  fail(ErrorCode::InvalidInput, "unknown coefficients " + s);
}

GroupPtr parse_group(const json& j) {
  if (j.is_object()) {
    if (j.contains("table")) {
      only_keys(j, {"table", "label"}, "group");
      return make_group(FiniteGroup(int_lists(j.at("table"), "group table"), j.value("label", std::string("table"))));
    }
    if (j.contains("product")) {
      only_keys(j, {"product"}, "group");
      std::vector<FiniteGroup> fs;
      for (const auto& f : j.at("product")) fs.push_back(*parse_group(f));
      return make_group(FiniteGroup::product(fs));
    }
    fail(ErrorCode::InvalidInput, "group object needs 'table' or 'product'");
  }
  require(j.is_string(), ErrorCode::InvalidInput, "group must be a string or an object");
  const std::string s = j.get<std::string>();
  const auto parts = split(s, ':');
  const std::string& head = parts[0];
  auto arg = [&]() {
    require(parts.size() == 2, ErrorCode::InvalidInput, "group " + s + " needs one parameter");
    return static_cast<int>(to_long(parts[1], s));
  };
  if (head == "trivial") return make_group(FiniteGroup::trivial());
  if (head == "sigma3") return make_group(FiniteGroup::symmetric(3));
  if (head == "quaternion") return make_group(FiniteGroup::quaternion());
  if (head == "cyclic") return make_group(FiniteGroup::cyclic(arg()));
  if (head == "symmetric") {
    const int n = arg();
    require(n >= 1 && n <= 5, ErrorCode::TooLarge, "symmetric groups up to degree 5");
    return make_group(FiniteGroup::symmetric(n));
  }
  if (head == "dihedral") return make_group(FiniteGroup::dihedral(arg()));
  if (head == "product" && parts.size() == 2) {
    std::vector<FiniteGroup> fs;
    for (const auto& m : split(parts[1], ',')) fs.push_back(FiniteGroup::cyclic(static_cast<int>(to_long(m, s))));
    return make_group(FiniteGroup::product(fs));
  }
  fail(ErrorCode::InvalidInput, "unknown group " + s);
}

GModule parse_module(const json& j, const GroupPtr& g, Ring ring) {
  if (j.is_object()) {
    if (j.contains("sum")) {
      only_keys(j, {"sum"}, "module");
      GModule m = GModule::zero(g, ring);
      for (const auto& p : j.at("sum")) m = m.direct_sum(parse_module(p, g, ring));
      return m;
    }
    if (j.contains("permutation")) {
      only_keys(j, {"permutation"}, "module");
      const json& p = j.at("permutation");
      only_keys(p, {"points", "generators", "perms"}, "permutation module");
      const auto points = p.at("points").get<std::size_t>();
      return GModule::permutation(
          g, ring, close_action(g, int_list(p.at("generators"), "generators"), int_lists(p.at("perms"), "perms"), points));
    }
    only_keys(j, {"rank", "relations", "generators", "action"}, "module");
    const auto rank = j.at("rank").get<std::size_t>();
    Matrix rel(rank, 0, ring);
    if (j.contains("relations")) {
      const json& r = j.at("relations");
      require(r.is_array(), ErrorCode::InvalidInput, "relations must be a matrix");
      const std::size_t cols = r.empty() ? 0 : r[0].size();
      rel = parse_matrix(r, ring, rank, cols);
    }
    const std::vector<int> gens = j.contains("generators") ? int_list(j.at("generators"), "generators") : g->generators();
    const json& act = j.at("action");
    require(act.is_array() && act.size() == gens.size(), ErrorCode::BadAction, "one action matrix per generator");
    std::vector<Matrix> mats;
    for (const auto& m : act) mats.push_back(parse_matrix(m, ring, rank, rank));
    for (int h : gens) require(h >= 0 && h < g->order(), ErrorCode::BadAction, "generator outside the group");
    return GModule::from_generators(g, ring, rank, rel, gens, mats);
  }
  require(j.is_string(), ErrorCode::InvalidInput, "module must be a string or an object");
  const std::string s = j.get<std::string>();
  const auto parts = split(s, ':');
  const std::string& head = parts[0];
  auto count = [&](std::size_t fallback) {
    require(parts.size() <= 2, ErrorCode::InvalidInput, "module " + s + " takes at most one parameter");
    if (parts.size() < 2) return fallback;
    const long r = to_long(parts[1], s);
    require(r >= 0, ErrorCode::InvalidInput, "negative rank in " + s);
    return static_cast<std::size_t>(r);
  };
  if (head == "trivial") return GModule::trivial(g, ring, count(1));
  if (head == "regular" || head == "free") return GModule::free(g, ring, count(1));
  if (head == "zero") return GModule::zero(g, ring);
  if (head == "sign") return GModule::character(g, ring, sign_character(*g));
  if (head == "regular-of-subgroup") return regular_of_subgroup(g, ring, static_cast<int>(count(1)));
  if (head == "zmod") {
    require(parts.size() == 2 || (parts.size() == 3 && parts[2] == "sign"), ErrorCode::InvalidInput,
            "zmod:m or zmod:m:sign expected");
    const long m = to_long(parts[1], s);
    require(m > 1, ErrorCode::InvalidInput, "zmod needs m > 1");
    return GModule::cyclic_torsion(g, ring, m, parts.size() == 3 ? sign_character(*g) : std::vector<int>{});
  }
  fail(ErrorCode::InvalidInput, "unknown module " + s);
}

GComplex parse_complex(const json& j, const GroupPtr& g, Ring ring) {
  require(j.is_object(), ErrorCode::InvalidInput, "complex must be an object");
  only_keys(j, {"lo", "modules", "differentials"}, "complex");
  std::vector<GModule> mods;
  for (const auto& m : j.at("modules")) mods.push_back(parse_module(m, g, ring));
  require(!mods.empty(), ErrorCode::InvalidInput, "complex needs at least one module");
  std::vector<Matrix> diffs;
  const json& d = j.contains("differentials") ? j.at("differentials") : json::array();
  require(d.is_array() && d.size() + 1 == mods.size(), ErrorCode::InvalidInput,
          "a complex with n modules needs n - 1 differentials");
  for (std::size_t i = 0; i < d.size(); ++i) diffs.push_back(parse_matrix(d[i], ring, mods[i].rank(), mods[i + 1].rank()));
  return GComplex(g, ring, j.value("lo", 0), std::move(mods), std::move(diffs));
}

GSimplicialComplex parse_space(const json& j, const GroupPtr& g) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto parts = split(s, ':');
    if (parts[0] == "cross-polytope" && parts.size() == 2) {
      require(!g || g->order() == 2, ErrorCode::InvalidInput, "cross-polytope spheres carry the antipodal C2-action");
      return cross_polytope_sphere(static_cast<int>(to_long(parts[1], s)));
    }
    if (s == "point") return GSimplicialComplex::point(g ? g : make_group(FiniteGroup::trivial()));
    fail(ErrorCode::InvalidInput, "unknown space " + s);
  }
  require(j.is_object(), ErrorCode::InvalidInput, "space must be a string or an object");
  require(g != nullptr, ErrorCode::InvalidInput, "a space with an explicit action needs a group");
  if (j.contains("discrete")) {
    only_keys(j, {"discrete"}, "space");
    const json& d = j.at("discrete");
    only_keys(d, {"points", "generators", "perms"}, "discrete space");
    const auto points = d.at("points").get<std::size_t>();
    return GSimplicialComplex::discrete(
        g, close_action(g, int_list(d.at("generators"), "generators"), int_lists(d.at("perms"), "perms"), points));
  }
  only_keys(j, {"vertices", "simplices", "generators", "perms"}, "space");
  const auto n = j.at("vertices").get<std::size_t>();
  return GSimplicialComplex(g, n, int_lists(j.at("simplices"), "simplices"),
                            close_action(g, int_list(j.at("generators"), "generators"), int_lists(j.at("perms"), "perms"), n));
}

CellRange parse_range(const std::string& s) {
  const auto parts = split(s, ':');
  require(parts.size() == 2, ErrorCode::InvalidInput, "range must look like a:b");
  CellRange r{static_cast<int>(to_long(parts[0], "range")), static_cast<int>(to_long(parts[1], "range"))};
  require(r.a <= r.b, ErrorCode::BadWindow, "empty range " + s);
  return r;
}

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : tasks()) out.push_back(k);
    return out;
  }();
  return names;
}

std::vector<std::string> expectation_mismatches(const json& expected, const json& actual) {
  std::vector<std::string> out;
  collect_mismatches(expected, actual, "", out);
  return out;
}

Outcome run_scenario(const json& scenario, const Overrides& o) {
  const auto start = std::chrono::steady_clock::now();
  json report = {{"schema", kReportSchema}, {"version", kVersion}, {"scenario", scenario}};
  auto finish = [&](Outcome out) {
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.report["timing_ms"] = ms;
    return out;
  };
  Ctx c;
  try {
    require(scenario.is_object(), ErrorCode::InvalidInput, "scenario must be a JSON object");
    only_keys(scenario, kKeys, "scenario");
    require(scenario.contains("schema") && scenario.at("schema") == kScenarioSchema, ErrorCode::InvalidInput,
            std::string("scenario 'schema' must be \"") + kScenarioSchema + "\"");
    c.sc = scenario;
    c.task = o.task ? *o.task : scenario.at("task").get<std::string>();
    report["task"] = c.task;
    if (!tasks().count(c.task)) fail(ErrorCode::InvalidInput, "unknown task " + c.task);
    if (scenario.contains("coefficients")) c.ring = parse_ring(scenario.at("coefficients"));
    if (scenario.contains("group")) c.group = parse_group(scenario.at("group"));
    if (o.range) {
      c.range = o.range;
    } else if (scenario.contains("range")) {
      const json& r = scenario.at("range");
      if (r.is_string()) {
        c.range = parse_range(r.get<std::string>());
      } else {
        const auto v = int_list(r, "range");
        require(v.size() == 2 && v[0] <= v[1], ErrorCode::BadWindow, "range must be [a, b] with a <= b");
        c.range = CellRange{v[0], v[1]};
      }
    }
    c.strategy = o.strategy ? *o.strategy : scenario.value("strategy", std::string("auto"));
    const auto& names = strategy_names();
    require(c.strategy == "auto" || std::find(names.begin(), names.end(), c.strategy) != names.end(),
            ErrorCode::InvalidInput, "unknown strategy " + c.strategy);
    c.seed = o.seed ? *o.seed : scenario.value("seed", std::uint64_t{1});
    report["seed"] = c.seed;
    report["strategy"] = c.strategy;
    if (c.range) report["range"] = {{"a", c.range->a}, {"b", c.range->b}};

    TaskOut t = tasks().at(c.task)(c);
    report["results"] = t.results;
    if (!c.range_report.is_null()) report["range"] = c.range_report;
    int code = t.exit_code;
    if (scenario.contains("expect")) {
      const auto miss = expectation_mismatches(scenario.at("expect"), t.results);
      report["expectations"] = {{"checked", true}, {"mismatches", miss}};
      if (!miss.empty()) code = std::max(code, static_cast<int>(kMismatch));
    }
    report["status"] = code == kOk ? "ok" : "mismatch";
    return finish({report, code});
  } catch (const NoStrategyApplies& e) {
    return finish(error_outcome(report, kNoStrategy, "no-strategy", e.what(), e.witness()));
  } catch (const Error& e) {
    if (not_applicable(e.code())) return finish(error_outcome(report, kNoStrategy, "not-applicable", e.what()));
    return finish(error_outcome(report, kInputError, "input-error", e.what()));
  } catch (const json::exception& e) {
    return finish(error_outcome(report, kInputError, "input-error", e.what()));
  } catch (const std::out_of_range& e) {
    return finish(error_outcome(report, kInputError, "input-error", e.what()));
  }
}

Outcome run_file(const std::string& path, const Overrides& o) {
  std::ifstream in(path);
  json report = {{"schema", kReportSchema}, {"version", kVersion}, {"file", path}};
  if (!in) return error_outcome(report, kInputError, "input-error", "cannot open " + path);
  json sc;
  try {
    sc = json::parse(in);
  } catch (const json::parse_error& e) {
    return error_outcome(report, kInputError, "input-error", e.what());
  }
  Outcome out = run_scenario(sc, o);
  out.report["file"] = path;
  return out;
}

json builtin_catalog(bool* all_valid) {
  json cat = {{"schema", kReportSchema}, {"version", kVersion}};
  cat["groups"] = {"trivial",         "cyclic:m",    "product:a,b,...", "sigma3", "symmetric:n",
                   "dihedral:n",      "quaternion",  "{\"table\": [[...]]}", "{\"product\": [...]}"};
  cat["coefficients"] = {"Z", "Fp:p", "Zmod:p"};
  cat["modules"] = {"trivial[:r]",  "regular", "free[:r]", "sign", "zero", "zmod:m", "zmod:m:sign",
                    "regular-of-subgroup:d", "{\"rank\", \"relations\", \"generators\", \"action\"}",
                    "{\"permutation\": {\"points\", \"generators\", \"perms\"}}", "{\"sum\": [...]}"};
  cat["models"] = {"cross-polytope:n", "point", "{\"discrete\": {\"points\", \"generators\", \"perms\"}}",
                   "{\"vertices\", \"simplices\", \"generators\", \"perms\"}"};
  cat["module_presentations"] = {"free", "residue-field", "truncated:n", "truncated:i:n"};
  cat["tasks"] = task_names();
  cat["strategies"] = strategy_names();
  bool ok = true;
  json pres = json::array();
  for (std::uint64_t p : {2, 3, 5}) {
    const int cap = 6;
    const auto a = GradedAlgebraPresentation::cyclic_cohomology(p, cap);
    const auto v = validate_presentation(a, make_group(FiniteGroup::cyclic(static_cast<int>(p))), cap);
    ok = ok && v.match;
    pres.push_back({{"name", "cyclic-cohomology:" + std::to_string(p)},
                    {"algebra", a.name()},
                    {"group", "cyclic:" + std::to_string(p)},
                    {"validated", v.match},
                    {"through_degree", cap},
                    {"dims", v.algebra_dims}});
  }
  cat["presentations"] = pres;
  if (all_valid) *all_valid = ok;
  return cat;
}

std::string to_tsv(const json& j) {
  std::ostringstream os;
  flatten(j, "", os);
  return os.str();
}

}  // namespace kcell::cli
