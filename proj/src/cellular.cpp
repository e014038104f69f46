#include "kcell/cellular.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

#include "kcell/errors.hpp"

namespace kcell {

namespace {

bool is_prime_power(int n, std::uint64_t* prime) {
  if (n == 1) return false;
  auto ps = prime_divisors(n);
  if (ps.size() != 1) return false;
  *prime = ps[0];
  return true;
}

std::optional<int> cyclic_generator(const FiniteGroup& g) {
  for (int e = 0; e < g.order(); ++e)
    if (g.element_order(e) == g.order()) return e;
  return std::nullopt;
}

std::size_t p_group_module(CertificateBuilder& b, const GModule& m, int n, bool cyclic) {
  if (cyclic && m.group()->order() > 1 && is_free_module(m))
    return b.free_module(m.rank() / static_cast<std::size_t>(m.group()->order()), n);
  return b.nilpotent_module(m, n);
}

std::size_t nilpotent_builder(CertificateBuilder& b, const GModule& m, int n) { return b.nilpotent_module(m, n); }

BuildCertificate certify_p_group(const GComplex& x) {
  CertificateBuilder b(x.group(), x.ring());
  if (x.trimmed().empty()) return b.take();
  const bool cyclic = cyclic_generator(*x.group()).has_value();
  b.complex_by_modules(x, [cyclic](CertificateBuilder& cb, const GModule& m, int n) {
    return p_group_module(cb, m, n, cyclic);
  });
  return b.take();
}

BuildCertificate certify_by_homology(const GComplex& x) {
  CertificateBuilder b(x.group(), x.ring());
  if (x.trimmed().empty()) return b.take();
  b.complex_by_homology(x, nilpotent_builder);
  return b.take();
}

void check_p_group(const GComplex& x) {
  const Ring ring = x.ring();
  const FiniteGroup& g = *x.group();
  if (ring.p == 0) fail(ErrorCode::WrongCharacteristic, "the p-group strategy needs F_p coefficients");
  if (g.is_p_group(ring.p)) return;
  std::uint64_t q = 0;
  if (is_prime_power(g.order(), &q))
    fail(ErrorCode::WrongCharacteristic, "the group is a " + std::to_string(q) + "-group but k has characteristic " +
                                             std::to_string(ring.p));
  fail(ErrorCode::WrongGroupClass, "the group is not a " + std::to_string(ring.p) + "-group");
}

CellResult finish(CellResult r) {
  r.verification = verify_cell_approx(r.map, &r.certificate, r.range);
  return r;
}

std::vector<PiEntry> cyclic_homotopy(const GComplex& x, int generator) {
  std::vector<PiEntry> out;
  if (x.empty()) return out;
  const Ring ring = x.ring();
  std::map<int, TorsionReport> reps;
  for (int n = x.lo(); n <= x.hi(); ++n) reps.emplace(n, torsion_report(x.homology_module(n).module(), generator));
  for (int n = x.lo() - 1; n <= x.hi(); ++n) {
    PiEntry e;
    e.n = n;
    e.sub = reps.count(n + 1) ? reps.at(n + 1).quotient : LocalGroup{FgAbelianGroup::zero(ring), {}};
    e.quotient = reps.count(n) ? LocalGroup{reps.at(n).gamma.data.sq.group, {}} : LocalGroup{FgAbelianGroup::zero(ring), {}};
    e.determined = e.sub.is_zero() || e.quotient.is_zero();
    if (e.determined) e.value = e.sub.is_zero() ? e.quotient : e.sub;
    out.push_back(e);
  }
  return out;
}

// Ext(k, X[1/z]) is the colimit of Ext(k, X) along z_*; it vanishes when z_* is nilpotent.
Verification colimit_verification(const GComplex& x, const std::vector<Integer>& z, const BuildCertificate& cert,
                                  const GComplex& approximation, CellRange range) {
  Verification v;
  v.method = "colimit";
  v.certificate = cert.validate_against(approximation);
  const int top = x.empty() ? 0 : range.b + x.hi() + 1;
  FreeResolution res = free_resolution(GModule::trivial(x.group(), x.ring()), std::max(top, 0));
  InducedExt ie = ext_induced(res, algebra_action_map(x, z), range.a, range.b);
  v.equivalence.ext = ext_from_resolution(res, x, range.a, range.b);
  v.report = v.equivalence.ext.report;
  bool all = true;
  std::ostringstream os;
  for (int i = range.a; i <= range.b; ++i)
    if (!ie.nilpotent_at(i)) {
      all = false;
      os << "z acts non-nilpotently on Ext^" << i << "; ";
    }
  v.equivalence.null = all;
  os << "cone of the approximation is X[1/z]; Ext(k, X[1/z]) = colim Ext(k, X) along z_*";
  if (all) os << ", zero since z_* is nilpotent in every degree";
  v.detail = os.str();
  v.passed = all && v.certificate.empty() && v.report.certified();
  return v;
}

// Σ^{-1} cone(z^j : X → X) with its projection to X.
std::pair<GComplex, ComplexMap> fiber_stage(const GComplex& x, const ComplexMap& zmap, int j) {
  std::map<int, Matrix> comps;
  for (int n = x.lo(); n <= x.hi(); ++n) comps[n] = zmap.at(n).pow(static_cast<unsigned>(j));
  Cone c = cone(ComplexMap(x, x, std::move(comps)));
  GComplex f = c.complex.shift(-1);
  ComplexMap p = c.projection.shift(-1);
  return {f, ComplexMap(f, x, p.comps)};
}

}  // namespace

std::string Verification::describe() const {
  std::ostringstream os;
  os << (passed ? "pass" : "fail") << " [" << method << "]";
  if (!certificate.empty()) os << " certificate: " << certificate << ";";
  if (method == "ext-of-cone") os << " Ext(k, cone) " << (equivalence.null ? "vanishes" : "nonzero") << " on [" << report.a << ", " << report.b << "]";
  if (!report.certified()) os << " (range not certified: " << report.describe() << ")";
  if (!detail.empty()) os << "; " << detail;
  return os.str();
}

GComplex descend(const GComplex& x, const Quotient& q) {
  const GroupPtr& qg = q.group;
  const FiniteGroup& g = *x.group();
  std::vector<int> lift(static_cast<std::size_t>(qg->order()), -1);
  for (int e = 0; e < g.order(); ++e)
    if (lift[static_cast<std::size_t>(q.projection(e))] < 0) lift[static_cast<std::size_t>(q.projection(e))] = e;
  const Subgroup ker = q.projection.kernel();
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  for (int n = x.lo(); n <= x.hi(); ++n) {
    const GModule& m = x.module(n);
    const Matrix id = Matrix::identity(m.rank(), x.ring());
    for (int h : ker)
      if (!m.same_elements(m.action(h), id))
        fail(ErrorCode::BadAction, "the kernel acts nontrivially in degree " + std::to_string(n));
    std::vector<Matrix> act;
    for (int e : lift) act.push_back(m.action(e));
    mods.emplace_back(qg, x.ring(), m.rank(), m.relations(), std::move(act));
    if (n > x.lo()) diffs.push_back(x.d(n));
  }
  if (x.empty()) return GComplex::zero(qg, x.ring());
  return GComplex(qg, x.ring(), x.lo(), std::move(mods), std::move(diffs));
}

CellResult cell_p_group(const GComplex& x, CellRange range) {
  check_p_group(x);
  CellResult r;
  r.strategy = "p-group";
  r.range = range;
  r.input = x;
  r.approximation = x;
  r.map = ComplexMap::identity(x);
  r.certificate = certify_p_group(x);
  return finish(std::move(r));
}

KoszulReport kp_koszul_filtration(const GroupPtr& p, Ring ring, int depth) {
  if (ring.p == 0) fail(ErrorCode::WrongCharacteristic, "the Koszul filtration needs F_p coefficients");
  std::uint64_t q = 0;
  if (!is_prime_power(p->order(), &q)) fail(ErrorCode::WrongGroupClass, "not a nontrivial p-group");
  if (q != ring.p)
    fail(ErrorCode::WrongCharacteristic, "a " + std::to_string(q) + "-group over a field of characteristic " +
                                             std::to_string(ring.p));
  if (!cyclic_generator(*p))
    fail(ErrorCode::WrongGroupClass, "the Koszul filtration needs a cyclic group; use the extension induction");
  CertificateBuilder b(p, ring);
  const std::size_t reg = b.regular_from_koszul();
  KoszulReport out;
  out.certificate = b.take();
  out.power_zero = true;
  for (const auto& s : out.certificate.steps())
    if (s.kind == StepKind::Triangle && s.note.rfind("K_", 0) == 0) out.triangles.push_back(*s.triangle);
  const BuildStep& split = out.certificate.step(reg);
  const GComplex top = out.certificate.step(split.refs[0].id).object;
  out.top_homology = {top.homology(0).num_generators(), top.homology(1).num_generators()};
  out.splits = out.certificate.validate().empty();
  FreeResolution res = free_resolution(GModule::trivial(p, ring), depth);
  out.resolution_ranks = res.ranks;
  out.resolution_ok = res.verify();
  return out;
}

CellResult cell_nilpotent(const GComplex& x, CellRange range) {
  const Ring ring = x.ring();
  const GroupPtr& g = x.group();
  if (ring.p == 0) fail(ErrorCode::WrongCharacteristic, "the nilpotent strategy needs F_p coefficients");
  if (!g->is_nilpotent()) fail(ErrorCode::NotNilpotentGroup, "the group is not nilpotent");
  SylowSplit split = sylow_decomposition(g, ring.p);
  FixedComplex fixed = fixed_point_complex(x, split.H);
  Quotient q = quotient_group(g, split.H);
  GComplex xq = descend(fixed.complex, q);
  CellResult r;
  r.strategy = "nilpotent";
  r.range = range;
  r.input = x;
  r.approximation = fixed.complex;
  r.map = fixed.inclusion;
  r.certificate = BuildCertificate(g, ring);
  if (!fixed.complex.trimmed().empty()) {
    auto sub = std::make_shared<const BuildCertificate>(certify_p_group(xq));
    r.certificate.over_quotient(sub, q.projection, "fixed points of the p'-part, a module over the Sylow quotient");
  }
  r.notes.push_back("p'-part of order " + std::to_string(split.H.size()));
  return finish(std::move(r));
}

CellResult cell_cyclic(const GComplex& x, CellRange range, std::optional<int> generator) {
  const GroupPtr& g = x.group();
  auto gen0 = cyclic_generator(*g);
  if (!gen0) fail(ErrorCode::WrongGroupClass, "the cyclic strategy needs a cyclic group");
  const int gen = generator.value_or(*gen0);
  if (g->element_order(gen) != g->order()) fail(ErrorCode::InvalidInput, "the chosen element does not generate the group");
  const auto z = one_minus(*g, gen);
  CellResult r;
  r.strategy = "cyclic";
  r.range = range;
  r.input = x;
  r.homotopy = cyclic_homotopy(x, gen);
  std::optional<Telescope> tel;
  try {
    tel = telescope_localize(x, z);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotStabilized) throw;
  }
  if (tel) {
    r.approximation = tel->kernel;
    r.map = tel->kernel_inclusion;
    r.certificate = certify_by_homology(tel->kernel);
    r.notes.push_back("telescope stable at stage " + std::to_string(tel->stage) + "; cell = ker z^N");
    return finish(std::move(r));
  }
  // X[1/z] has no finite model: record the telescope stages of the fiber.
  const ComplexMap zmap = algebra_action_map(x, z);
  int stages = 1;
  for (int n = x.lo(); n <= x.hi(); ++n)
    stages = std::max(stages, i_power_torsion(x.homology_module(n).module()).stage);
  CertificateBuilder b(g, x.ring());
  std::optional<std::size_t> prev;
  std::optional<std::pair<GComplex, ComplexMap>> last;
  for (int j = 1; j <= stages; ++j) {
    auto stage = fiber_stage(x, zmap, j);
    const std::size_t id = b.complex_by_homology(stage.first, nilpotent_builder);
    ComplexMap step;
    if (last) {
      std::map<int, Matrix> comps;
      for (int n = stage.first.lo(); n <= stage.first.hi(); ++n)
        comps[n] = Matrix::block_diag(Matrix::identity(x.rank(n), x.ring()), zmap.at(n + 1));
      step = ComplexMap(last->first, stage.first, std::move(comps));
    }
    prev = b.certificate().colimit_stage(StepRef{id, 0}, prev, step, j, "fiber of z^" + std::to_string(j));
    last = stage;
  }
  r.certificate = b.take();
  r.certificate.mark_colimit();
  r.approximation = last->first;
  r.map = last->second;
  r.notes.push_back("X[1/z] is not finitely generated; the approximation is stage " + std::to_string(stages) +
                    " of the telescope and the homotopy is computed from the fiber sequence");
  r.verification = colimit_verification(x, z, r.certificate, r.approximation, range);
  return r;
}

CellResult cell_nilpotent_action(const GComplex& x, CellRange range) {
  for (int n = x.lo(); n <= x.hi() && !x.empty(); ++n) {
    HomologyModule h = x.homology_module(n);
    if (!is_nilpotent_module(h.module()).nilpotent)
      fail(ErrorCode::NotNilpotentAction, "H_" + std::to_string(n) + " = " + h.module().describe() + " is not nilpotent");
  }
  CellResult r;
  r.strategy = "nilpotent-action";
  r.range = range;
  r.input = x;
  r.approximation = x;
  r.map = ComplexMap::identity(x);
  r.certificate = certify_by_homology(x);
  return finish(std::move(r));
}

ExtensionDiagnostics extension_diagnostics(const GroupExtension& ext, const GComplex& x, int top) {
  ExtensionDiagnostics out;
  const GroupPtr& g = ext.G();
  const GroupPtr& q = ext.Q();
  const Ring ring = x.ring();
  const Subgroup n = ext.kernel();
  std::vector<char> in_n(static_cast<std::size_t>(g->order()), 0);
  for (int e : n) in_n[static_cast<std::size_t>(e)] = 1;
  if (ring.p != 0 && (q->order() == 1 || q->is_p_group(ring.p))) {
    std::optional<Subgroup> best;
    for (const auto& h : g->normal_subgroups()) {
      if (h.size() % ring.p == 0) continue;
      if (!std::all_of(h.begin(), h.end(), [&](int e) { return in_n[static_cast<std::size_t>(e)] != 0; })) continue;
      const int idx = g->order() / static_cast<int>(h.size());
      std::uint64_t pr = 0;
      if (idx != 1 && (!is_prime_power(idx, &pr) || pr != ring.p)) continue;
      if (!best || h.size() > best->size()) best = h;
    }
    if (best) {
      out.prime_to_p = best;
      out.item = best->size() == n.size() ? "b" : "a";
      return out;
    }
  }
  // H_*(BN; k) with its Q-action: N-coinvariants of a kG-resolution of k
  FreeResolution res = free_resolution(GModule::trivial(g, ring), top + 1);
  const std::size_t og = static_cast<std::size_t>(g->order()), oq = static_cast<std::size_t>(q->order());
  std::vector<int> section(oq, -1);
  for (int e = 0; e < g->order(); ++e)
    if (section[static_cast<std::size_t>(ext.projection(e))] < 0) section[static_cast<std::size_t>(ext.projection(e))] = e;
  auto pi = [&](std::size_t r) {
    Matrix m(r * oq, r * og, ring);
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t e = 0; e < og; ++e) m.set(j * oq + static_cast<std::size_t>(ext.projection(static_cast<int>(e))), j * og + e, 1);
    return m;
  };
  auto sec = [&](std::size_t r) {
    Matrix m(r * og, r * oq, ring);
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t c = 0; c < oq; ++c) m.set(j * og + static_cast<std::size_t>(section[c]), j * oq + c, 1);
    return m;
  };
  const int lo = res.complex.lo(), hi = res.complex.hi();
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  for (int d = lo; d <= hi; ++d) {
    mods.push_back(GModule::free(q, ring, res.rank(d)));
    if (d > lo) diffs.push_back(pi(res.rank(d - 1)) * res.complex.d(d) * sec(res.rank(d)));
  }
  GComplex co(q, ring, lo, std::move(mods), std::move(diffs));
  bool all = true;
  for (int d = 0; d <= top; ++d) {
    HomologyModule h = co.homology_module(d);
    const bool nil = is_nilpotent_module(h.module()).nilpotent;
    if (!nil && all) {
      std::ostringstream os;
      os << "H_" << d << "(BN; k) = " << h.group().to_string() << " with Q acting by";
      for (int e = 0; e < q->order(); ++e) os << " " << h.module().action(e).to_string();
      os << " is not a nilpotent Q-module";
      out.witness = os.str();
    }
    all = all && nil;
    out.fiber_homology.push_back(h);
    out.nilpotent.push_back(nil);
  }
  out.pulled_back = true;
  for (int d = x.lo(); d <= x.hi() && !x.empty(); ++d) {
    const GModule& m = x.module(d);
    const Matrix id = Matrix::identity(m.rank(), ring);
    for (int e : n)
      if (!m.same_elements(m.action(e), id)) out.pulled_back = false;
  }
  out.item = all ? "c" : "d";
  return out;
}

CellResult cell_extension(const GroupExtension& ext, const GComplex& x, CellRange range) {
  require(ext.G()->table() == x.group()->table(), ErrorCode::InvalidInput, "the complex is not over the middle group");
  ExtensionDiagnostics diag = extension_diagnostics(ext, x, std::max(range.b, 1) + 1);
  const GroupPtr& g = x.group();
  const Ring ring = x.ring();
  CellResult r;
  r.range = range;
  r.input = x;
  r.certificate = BuildCertificate(g, ring);
  if (diag.item == "a" || diag.item == "b") {
    FixedComplex fixed = fixed_point_complex(x, *diag.prime_to_p);
    Quotient q = quotient_group(g, *diag.prime_to_p);
    r.strategy = "extension-" + diag.item;
    r.approximation = fixed.complex;
    r.map = fixed.inclusion;
    if (!fixed.complex.trimmed().empty()) {
      auto sub = std::make_shared<const BuildCertificate>(certify_p_group(descend(fixed.complex, q)));
      r.certificate.over_quotient(sub, q.projection, "fixed points of a normal subgroup of order prime to p");
    }
    return finish(std::move(r));
  }
  if (diag.item == "d") throw NoStrategyApplies("no extension item applies", diag.witness);
  if (!diag.pulled_back)
    throw NoStrategyApplies("no extension item applies", "H_*(BN; k) is nilpotent over Q but x is not pulled back from Q");
  Quotient q{ext.Q(), ext.projection};
  CellResult rq = cellular_approximation(descend(x, q), "auto", range);
  r.strategy = "extension-c/" + rq.strategy;
  r.approximation = rq.approximation.restrict_along(ext.projection);
  r.map = ComplexMap(r.approximation, x, rq.map.comps);
  r.certificate.over_quotient(std::make_shared<const BuildCertificate>(rq.certificate), ext.projection,
                              "approximation over Q pulled back");
  r.notes.push_back("H_*(BN; k) is a nilpotent Q-module in degrees 0.." + std::to_string(diag.fiber_homology.size() - 1));
  return finish(std::move(r));
}

std::optional<BuildCertificate> auto_certify(const GComplex& c, std::string* why) {
  if (c.trimmed().empty()) return BuildCertificate(c.group(), c.ring());
  if (c.ring().p != 0 && c.group()->is_p_group(c.ring().p)) return certify_p_group(c);
  for (int n = c.lo(); n <= c.hi(); ++n) {
    HomologyModule h = c.homology_module(n);
    if (!is_nilpotent_module(h.module()).nilpotent) {
      if (why) {
        *why = "H_" + std::to_string(n) + " = " + h.group().to_string() + " is not I-nilpotent";
        SubModule gamma = i_power_torsion(h.module());
        *why += "; Γ_I H_" + std::to_string(n) + " = " + gamma.data.sq.group.to_string();
      }
      return std::nullopt;
    }
  }
  return certify_by_homology(c);
}

Verification verify_cell_approx(const ComplexMap& candidate, const BuildCertificate* certificate, CellRange range) {
  Verification v;
  v.method = "ext-of-cone";
  if (certificate) {
    v.certificate = certificate->validate_against(candidate.source);
  } else {
    std::string why;
    auto c = auto_certify(candidate.source, &why);
    if (!c) v.certificate = "no certificate for the source: " + why;
  }
  v.equivalence = is_k_equivalence_in_range(candidate, range.a, range.b);
  v.report = v.equivalence.ext.report;
  if (!v.equivalence.null) v.detail = "Ext(k, cone) = " + v.equivalence.ext.describe();
  v.passed = v.certificate.empty() && v.equivalence.null && v.report.certified();
  return v;
}

Verification verify_cell_result(const CellResult& r) {
  if (r.certificate.colimit()) {
    const auto gen = cyclic_generator(*r.input.group());
    require(gen.has_value(), ErrorCode::InvalidInput, "colimit certificate over a non-cyclic group");
    return colimit_verification(r.input, one_minus(*r.input.group(), *gen), r.certificate, r.approximation, r.range);
  }
  return verify_cell_approx(r.map, &r.certificate, r.range);
}

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names{"p-group", "nilpotent", "cyclic", "nilpotent-action", "extension"};
  return names;
}

namespace {

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

CellResult extension_auto(const GComplex& x, CellRange range) {
  const GroupPtr& g = x.group();
  auto normals = g->normal_subgroups();
  std::sort(normals.begin(), normals.end(), [](const Subgroup& a, const Subgroup& b) { return a.size() > b.size(); });
  std::vector<std::string> witnesses;
  for (const auto& n : normals) {
    if (n.size() == 1 || static_cast<int>(n.size()) == g->order()) continue;
    try {
      return cell_extension(extension_from_normal(g, n), x, range);
    } catch (const NoStrategyApplies& e) {
      witnesses.push_back("N of order " + std::to_string(n.size()) + ": " + e.witness());
    }
  }
  std::string w;
  for (const auto& s : witnesses) w += (w.empty() ? "" : "; ") + s;
  if (w.empty()) w = "no proper nontrivial normal subgroup";
  throw NoStrategyApplies("no extension item applies", w);
}

}  // namespace

CellResult cellular_approximation(const GComplex& x, const std::string& strategy, CellRange range) {
  if (strategy == "p-group") return cell_p_group(x, range);
  if (strategy == "nilpotent") return cell_nilpotent(x, range);
  if (strategy == "cyclic") return cell_cyclic(x, range);
  if (strategy == "nilpotent-action") return cell_nilpotent_action(x, range);
  if (strategy == "extension") return extension_auto(x, range);
  require(strategy == "auto", ErrorCode::InvalidInput, "unknown strategy " + strategy);
  std::vector<std::string> why;
  std::optional<CellResult> first;
  for (const auto& s : strategy_names()) {
    try {
      CellResult r = cellular_approximation(x, s, range);
      if (r.verification.passed) return r;
      why.push_back(s + ": verification failed");
      if (!first) first = std::move(r);
    } catch (const NoStrategyApplies& e) {
      why.push_back(s + ": " + e.witness());
    } catch (const Error& e) {
      if (!not_applicable(e.code())) throw;
      why.push_back(s + ": " + e.what());
    }
  }
  if (first) return std::move(*first);
  std::string w;
  for (const auto& s : why) w += (w.empty() ? "" : " | ") + s;
  throw NoStrategyApplies("no strategy applies", w);
}

}  // namespace kcell
