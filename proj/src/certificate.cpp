#include "kcell/certificate.hpp"

#include <algorithm>
#include <sstream>

#include "kcell/errors.hpp"

namespace kcell {

bool same_complex(const GComplex& a, const GComplex& b) {
  if (!(a.ring() == b.ring())) return false;
  if (a.group()->table() != b.group()->table()) return false;
  const bool ea = a.empty(), eb = b.empty();
  const int lo = ea ? (eb ? 0 : b.lo()) : (eb ? a.lo() : std::min(a.lo(), b.lo()));
  const int hi = ea ? (eb ? -1 : b.hi()) : (eb ? a.hi() : std::max(a.hi(), b.hi()));
  for (int n = lo; n <= hi; ++n) {
    const GModule& ma = a.module(n);
    const GModule& mb = b.module(n);
    if (ma.rank() != mb.rank()) return false;
    if (ma.rank() == 0) continue;
    if (!(ma.relation_lattice() == mb.relation_lattice())) return false;
    for (int g = 0; g < a.group()->order(); ++g)
      if (!ma.same_elements(ma.action(g), mb.action(g))) return false;
  }
  for (int n = lo + 1; n <= hi; ++n)
    if (!b.module(n - 1).same_elements(a.d(n), b.d(n))) return false;
  return true;
}

const char* step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::Zero: return "zero";
    case StepKind::Base: return "base";
    case StepKind::Sum: return "sum";
    case StepKind::Triangle: return "triangle";
    case StepKind::Retract: return "retract";
    case StepKind::Equivalence: return "equivalence";
    case StepKind::ColimitStage: return "colimit-stage";
    case StepKind::ModuleOverQuotient: return "module-over-quotient";
  }
  return "?";
}

bool is_free_module(const GModule& m) {
  const std::size_t order = static_cast<std::size_t>(m.group()->order());
  if (m.has_relations() || m.rank() % order != 0) return false;
  GModule f = GModule::free(m.group(), m.ring(), m.rank() / order);
  for (int g = 0; g < m.group()->order(); ++g)
    if (!(m.action(g) == f.action(g))) return false;
  return true;
}

// ---------------------------------------------------------------------------

BuildCertificate::BuildCertificate(GroupPtr g, Ring ring) : group_(std::move(g)), ring_(ring) {}

const GComplex& BuildCertificate::result() const {
  require(!steps_.empty(), ErrorCode::InvalidInput, "empty certificate has no result");
  return steps_.back().object;
}

std::size_t BuildCertificate::push(BuildStep s) {
  for (const auto& r : s.refs)
    require(r.id < steps_.size(), ErrorCode::InvalidInput, "certificate step references a later step");
  steps_.push_back(std::move(s));
  return steps_.size() - 1;
}

GComplex BuildCertificate::object(StepRef ref) const {
  const GComplex& o = steps_[ref.id].object;
  return ref.shift == 0 ? o : o.shift(ref.shift);
}

std::size_t BuildCertificate::zero() {
  BuildStep s;
  s.kind = StepKind::Zero;
  s.object = GComplex::zero(group_, ring_);
  return push(std::move(s));
}

std::size_t BuildCertificate::base(int shift) {
  BuildStep s;
  s.kind = StepKind::Base;
  s.shift = shift;
  s.object = GComplex::concentrated(GModule::trivial(group_, ring_), shift);
  s.note = "k in degree " + std::to_string(shift);
  return push(std::move(s));
}

std::size_t BuildCertificate::sum(const std::vector<StepRef>& refs, std::string note) {
  BuildStep s;
  s.kind = StepKind::Sum;
  s.refs = refs;
  s.note = std::move(note);
  s.object = GComplex::zero(group_, ring_);
  for (const auto& r : refs) s.object = s.object.direct_sum(object(r));
  return push(std::move(s));
}

std::size_t BuildCertificate::triangle(const Triangle& t, int vertex, StepRef first, StepRef second, std::string note) {
  require(vertex >= 0 && vertex <= 2, ErrorCode::InvalidInput, "triangle vertex must be 0, 1 or 2");
  BuildStep s;
  s.kind = StepKind::Triangle;
  s.triangle = t;
  s.vertex = vertex;
  s.refs = {first, second};
  s.note = std::move(note);
  s.object = vertex == 0 ? t.A : (vertex == 1 ? t.B : t.C);
  return push(std::move(s));
}

std::size_t BuildCertificate::retract(StepRef of, const ComplexMap& i, const ComplexMap& r, std::string note) {
  BuildStep s;
  s.kind = StepKind::Retract;
  s.refs = {of};
  s.map = i;
  s.retraction = r;
  s.note = std::move(note);
  s.object = i.source;
  return push(std::move(s));
}

std::size_t BuildCertificate::equivalence(StepRef ref, const ComplexMap& f, std::string note) {
  BuildStep s;
  s.kind = StepKind::Equivalence;
  s.refs = {ref};
  s.map = f;
  s.note = std::move(note);
  s.object = same_complex(f.source, object(ref)) ? f.target : f.source;
  return push(std::move(s));
}

std::size_t BuildCertificate::colimit_stage(StepRef stage_object, std::optional<std::size_t> previous,
                                            const ComplexMap& from_previous, int stage, std::string note) {
  BuildStep s;
  s.kind = StepKind::ColimitStage;
  s.refs = {stage_object};
  if (previous) {
    s.refs.push_back(StepRef{*previous, 0});
    s.map = from_previous;
  }
  s.stage = stage;
  s.note = std::move(note);
  s.object = object(stage_object);
  return push(std::move(s));
}

std::size_t BuildCertificate::over_quotient(std::shared_ptr<const BuildCertificate> sub, const GroupHom& along,
                                            std::string note) {
  BuildStep s;
  s.kind = StepKind::ModuleOverQuotient;
  s.sub = sub;
  s.along = along;
  s.note = std::move(note);
  s.object = sub->empty() ? GComplex::zero(group_, ring_) : sub->result().restrict_along(along);
  return push(std::move(s));
}

namespace {

// Rebuilding through the validating constructor re-checks chain-map conditions.
bool valid_map(const ComplexMap& f, std::string* why) {
  try {
    ComplexMap check(f.source, f.target, f.comps);
    (void)check;
    return true;
  } catch (const Error& e) {
    *why = e.what();
    return false;
  }
}

}  // namespace

std::string BuildCertificate::check_step(std::size_t id) const {
  const BuildStep& s = steps_[id];
  for (const auto& r : s.refs)
    if (r.id >= id) return "references a later step";
  std::string why;
  switch (s.kind) {
    case StepKind::Zero:
      if (!s.object.trimmed().empty()) return "zero step has a nonzero object";
      return "";
    case StepKind::Base:
      if (!same_complex(s.object, GComplex::concentrated(GModule::trivial(group_, ring_), s.shift)))
        return "base object is not k in degree " + std::to_string(s.shift);
      return "";
    case StepKind::Sum: {
      GComplex acc = GComplex::zero(group_, ring_);
      for (const auto& r : s.refs) acc = acc.direct_sum(object(r));
      if (!same_complex(acc, s.object)) return "sum object does not match its summands";
      return "";
    }
    case StepKind::Triangle: {
      if (!s.triangle) return "triangle missing";
      const Triangle& t = *s.triangle;
      std::string tv = t.validate();
      if (!tv.empty()) return "invalid triangle: " + tv;
      std::vector<const GComplex*> v{&t.A, &t.B, &t.C};
      const GComplex* mine = v[static_cast<std::size_t>(s.vertex)];
      v.erase(v.begin() + s.vertex);
      if (!same_complex(*v[0], object(s.refs[0])) || !same_complex(*v[1], object(s.refs[1])))
        return "triangle vertices do not match the referenced objects";
      if (!same_complex(*mine, s.object)) return "triangle vertex does not match the step object";
      return "";
    }
    case StepKind::Retract: {
      if (!s.map || !s.retraction) return "retract maps missing";
      if (!valid_map(*s.map, &why) || !valid_map(*s.retraction, &why)) return "retract map invalid: " + why;
      const GComplex big = object(s.refs[0]);
      if (!same_complex(s.map->source, s.object) || !same_complex(s.map->target, big) ||
          !same_complex(s.retraction->source, big) || !same_complex(s.retraction->target, s.object))
        return "retract maps have the wrong endpoints";
      if (!s.retraction->compose_after(*s.map).same_as(ComplexMap::identity(s.object)))
        return "r∘i is not the identity";
      return "";
    }
    case StepKind::Equivalence: {
      if (!s.map) return "equivalence map missing";
      if (!valid_map(*s.map, &why)) return "equivalence map invalid: " + why;
      const GComplex other = object(s.refs[0]);
      const bool forward = same_complex(s.map->source, other) && same_complex(s.map->target, s.object);
      const bool backward = same_complex(s.map->target, other) && same_complex(s.map->source, s.object);
      if (!forward && !backward) return "equivalence endpoints do not match";
      if (!s.map->is_quasi_iso()) return "map is not a quasi-isomorphism";
      return "";
    }
    case StepKind::ColimitStage: {
      if (!same_complex(object(s.refs[0]), s.object)) return "stage object does not match";
      if (s.refs.size() > 1) {
        if (!s.map) return "stage map missing";
        if (!valid_map(*s.map, &why)) return "stage map invalid: " + why;
        if (!same_complex(s.map->source, object(s.refs[1])) || !same_complex(s.map->target, s.object))
          return "stage map has the wrong endpoints";
      }
      return "";
    }
    case StepKind::ModuleOverQuotient: {
      if (!s.sub || !s.along) return "quotient certificate missing";
      if (s.along->source->table() != group_->table()) return "pullback homomorphism has the wrong source";
      if (s.along->target->table() != s.sub->group()->table()) return "pullback homomorphism has the wrong target";
      if (!s.along->is_surjective()) return "pullback homomorphism is not onto";
      std::string sv = s.sub->validate();
      if (!sv.empty()) return "quotient certificate: " + sv;
      GComplex pulled = s.sub->empty() ? GComplex::zero(group_, ring_) : s.sub->result().restrict_along(*s.along);
      if (!same_complex(pulled, s.object)) return "object is not the pullback of the quotient result";
      return "";
    }
  }
  return "unknown step kind";
}

std::string BuildCertificate::validate() const {
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    std::string m = check_step(i);
    if (!m.empty()) return "step " + std::to_string(i) + " (" + step_kind_name(steps_[i].kind) + "): " + m;
  }
  return "";
}

std::string BuildCertificate::validate_against(const GComplex& c) const {
  if (steps_.empty()) return c.trimmed().empty() ? "" : "empty certificate for a nonzero complex";
  std::string v = validate();
  if (!v.empty()) return v;
  if (!same_complex(result(), c)) return "certified object differs from the approximation";
  return "";
}

std::vector<std::string> BuildCertificate::summary() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const BuildStep& s = steps_[i];
    std::ostringstream os;
    os << i << " " << step_kind_name(s.kind);
    if (!s.refs.empty()) {
      os << " [";
      for (std::size_t j = 0; j < s.refs.size(); ++j) {
        os << (j ? "," : "") << s.refs[j].id;
        if (s.refs[j].shift) os << "<" << s.refs[j].shift << ">";
      }
      os << "]";
    }
    if (s.kind == StepKind::ColimitStage) os << " stage " << s.stage;
    if (!s.note.empty()) os << " " << s.note;
    out.push_back(os.str());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t CertificateBuilder::zero() {
  if (!zero_id_) zero_id_ = cert_.zero();
  return *zero_id_;
}

std::size_t CertificateBuilder::base(int shift) {
  auto it = base_ids_.find(shift);
  if (it != base_ids_.end()) return it->second;
  std::size_t id = cert_.base(shift);
  base_ids_[shift] = id;
  return id;
}

std::size_t CertificateBuilder::match(std::size_t id, const GComplex& target, const ComplexMap& f) {
  if (same_complex(cert_.step(id).object, target)) return id;
  return cert_.equivalence(StepRef{id, 0}, f);
}

std::size_t CertificateBuilder::trivial_module(const GModule& m, int shift) {
  const GroupPtr& g = cert_.group();
  const Ring ring = cert_.ring();
  const Matrix id = Matrix::identity(m.rank(), ring);
  for (int e = 0; e < g->order(); ++e)
    require(m.same_elements(m.action(e), id), ErrorCode::InvalidInput, "trivial_module: action is not trivial");
  GComplex target = GComplex::concentrated(m, shift);
  auto cm = m.canonical();
  const std::size_t r = cm.module.rank();
  if (r == 0) return match(zero(), target, ComplexMap::zero(GComplex::zero(g, ring), target));
  std::vector<Integer> orders(r, 0);
  const Matrix& rel = cm.module.relations();
  for (std::size_t c = 0; c < rel.cols(); ++c)
    for (std::size_t i = 0; i < r; ++i)
      if (rel(i, c) != 0) orders[i] = rel(i, c);
  std::vector<StepRef> pieces;
  for (std::size_t j = 0; j < r; ++j) {
    if (orders[j] == 0) {
      pieces.push_back(StepRef{base(shift), 0});
      continue;
    }
    auto key = std::make_pair(orders[j].get_str(), shift);
    auto it = cyclic_ids_.find(key);
    if (it == cyclic_ids_.end()) {
      const std::size_t b = base(shift);
      GComplex k = cert_.step(b).object;
      GComplex zd = GComplex::concentrated(GModule::cyclic_torsion(g, ring, orders[j]), shift);
      ComplexMap u(k, k, {{shift, Matrix(1, 1, ring)}});
      u.comps[shift].set(0, 0, orders[j]);
      u = ComplexMap(k, k, u.comps);
      ComplexMap v(k, zd, {{shift, Matrix::identity(1, ring)}});
      Triangle t = Triangle::from_homotopy(u, v, {});
      std::size_t tid = cert_.triangle(t, 2, StepRef{b, 0}, StepRef{b, 0}, "cone of multiplication by " + orders[j].get_str());
      it = cyclic_ids_.emplace(key, tid).first;
    }
    pieces.push_back(StepRef{it->second, 0});
  }
  std::size_t sid;
  if (pieces.size() == 1) {
    sid = pieces[0].id;
  } else {
    sid = cert_.sum(pieces, "trivial module " + m.underlying().to_string());
  }
  GComplex sum_obj = cert_.step(sid).object;
  return match(sid, target, ComplexMap(sum_obj, target, {{shift, cm.lift}}));
}

std::size_t CertificateBuilder::nilpotent_module(const GModule& m, int shift) {
  const GroupPtr& g = cert_.group();
  const Ring ring = cert_.ring();
  GComplex target = GComplex::concentrated(m, shift);
  NilpotenceReport rep = is_nilpotent_module(m);
  if (!rep.nilpotent) fail(ErrorCode::NotNilpotentAction, "module in degree " + std::to_string(shift) + " is not nilpotent");
  if (rep.nil_class == 0) return match(zero(), target, ComplexMap::zero(GComplex::zero(g, ring), target));
  const Lattice& rel = m.relation_lattice();
  const std::size_t c = rep.nil_class;
  std::optional<std::size_t> cur;
  SubquotientModule below;
  for (std::size_t jj = c; jj-- > 0;) {
    const Lattice& fj = rep.filtration[jj];
    const Lattice& fnext = jj + 1 < rep.filtration.size() ? rep.filtration[jj + 1] : rel;
    SubquotientModule nj = make_subquotient_module(g, ring, m.actions(), fj, rel);
    SubquotientModule tj = make_subquotient_module(g, ring, m.actions(), fj, fnext);
    const std::size_t tid = trivial_module(tj.module, shift);
    GComplex bobj = GComplex::concentrated(nj.module, shift);
    if (!cur) {
      ComplexMap f(cert_.step(tid).object, bobj, {{shift, nj.sq.coordinates_of(tj.reps)}});
      cur = match(tid, bobj, f);
    } else {
      GComplex aobj = GComplex::concentrated(below.module, shift);
      GComplex cobj = GComplex::concentrated(tj.module, shift);
      ComplexMap u(aobj, bobj, {{shift, nj.sq.coordinates_of(below.reps)}});
      ComplexMap v(bobj, cobj, {{shift, tj.sq.coordinates_of(nj.reps)}});
      Triangle t = Triangle::from_homotopy(u, v, {});
      cur = cert_.triangle(t, 1, StepRef{*cur, 0}, StepRef{tid, 0}, "I-adic layer " + std::to_string(jj));
    }
    below = nj;
  }
  GComplex top = cert_.step(*cur).object;
  return match(*cur, target, ComplexMap(top, target, {{shift, below.reps}}));
}

std::size_t CertificateBuilder::regular_from_koszul() {
  if (regular_id_) return *regular_id_;
  const GroupPtr& g = cert_.group();
  const Ring ring = cert_.ring();
  const int order = g->order();
  int gen = -1;
  for (int e = 0; e < order; ++e)
    if (g->element_order(e) == order) {
      gen = e;
      break;
    }
  if (gen < 0) fail(ErrorCode::WrongGroupClass, "Koszul filtration needs a cyclic group");
  require(g->is_p_group(static_cast<int>(ring.p)) && ring.p != 0, ErrorCode::WrongCharacteristic,
          "Koszul filtration needs a p-group over F_p");
  GModule kp = GModule::free(g, ring);
  Matrix z = algebra_action(kp, one_minus(*g, gen));
  require(z.pow(static_cast<unsigned>(order)).is_zero(), ErrorCode::WrongCharacteristic, "(1-g)^|P| is not zero");
  auto koszul = [&](int n) { return GComplex(g, ring, 0, {kp, kp}, {z.pow(static_cast<unsigned>(n))}); };
  const Matrix id = Matrix::identity(kp.rank(), ring);
  GComplex k1 = koszul(1);
  const std::size_t k1_id = complex_by_homology(k1, [](CertificateBuilder& b, const GModule& m, int s) {
    return b.nilpotent_module(m, s);
  });
  std::size_t cur = k1_id;
  GComplex kn = k1;
  for (int n = 1; n < order; ++n) {
    GComplex next = koszul(n + 1);
    ComplexMap u(kn, next, {{1, id}, {0, z}});
    ComplexMap v(next, k1, {{1, z.pow(static_cast<unsigned>(n))}, {0, id}});
    Triangle t = Triangle::from_homotopy(u, v, {{1, id}});
    cur = cert_.triangle(t, 1, StepRef{cur, 0}, StepRef{k1_id, 0}, "K_" + std::to_string(n + 1));
    kn = next;
  }
  GComplex reg = GComplex::concentrated(kp, 0);
  ComplexMap i(reg, kn, {{0, id}});
  ComplexMap r(kn, reg, {{0, id}});
  regular_id_ = cert_.retract(StepRef{cur, 0}, i, r, "kP splits off K_" + std::to_string(order));
  return *regular_id_;
}

std::size_t CertificateBuilder::free_module(std::size_t r, int shift) {
  if (r == 0) return zero();
  const std::size_t reg = regular_from_koszul();
  if (r == 1 && shift == 0) return reg;
  return cert_.sum(std::vector<StepRef>(r, StepRef{reg, shift}), "free module of rank " + std::to_string(r));
}

std::size_t CertificateBuilder::complex_by_modules(const GComplex& x, const ModuleBuilder& build) {
  const GroupPtr& g = cert_.group();
  const Ring ring = cert_.ring();
  if (x.trimmed().empty()) return match(zero(), x, ComplexMap::zero(GComplex::zero(g, ring), x));
  auto sigma = [&](int n) {
    std::vector<GModule> mods;
    std::vector<Matrix> diffs;
    for (int m = n; m <= x.hi(); ++m) {
      mods.push_back(x.module(m));
      if (m > n) diffs.push_back(x.d(m));
    }
    return GComplex::trusted(g, ring, n, std::move(mods), std::move(diffs));
  };
  std::optional<std::size_t> cur;
  for (int n = x.hi(); n >= x.lo(); --n) {
    if (x.rank(n) == 0 && cur) continue;
    const std::size_t mid = build(*this, x.module(n), n);
    if (!cur) {
      cur = mid;
      continue;
    }
    GComplex a = GComplex::concentrated(x.module(n), n);
    GComplex b = sigma(n);
    GComplex c = sigma(n + 1);
    std::map<int, Matrix> vc;
    for (int m = n + 1; m <= x.hi(); ++m) vc[m] = Matrix::identity(x.rank(m), ring);
    ComplexMap u(a, b, {{n, Matrix::identity(x.rank(n), ring)}});
    ComplexMap v(b, c, std::move(vc));
    Triangle t = Triangle::from_homotopy(u, v, {});
    cur = cert_.triangle(t, 1, StepRef{mid, 0}, StepRef{*cur, 0}, "brutal filtration at degree " + std::to_string(n));
  }
  return match(*cur, x, ComplexMap::identity(x));
}

std::size_t CertificateBuilder::complex_by_homology(const GComplex& x, const ModuleBuilder& build) {
  const GroupPtr& g = cert_.group();
  const Ring ring = cert_.ring();
  if (x.empty()) return zero();
  std::optional<std::size_t> cur;
  std::optional<Truncation> prev;
  for (int n = x.hi(); n >= x.lo(); --n) {
    Truncation tr = truncate_above(x, n);
    HomologyModule h = x.homology_module(n);
    GComplex hc = GComplex::concentrated(h.module(), n);
    const std::size_t hid = build(*this, h.module(), n);
    ComplexMap v(tr.complex, hc, {{n, h.data.sq.coordinates_of(tr.map.at(n))}});
    if (!cur) {
      cur = match(hid, tr.complex, v);
    } else {
      std::map<int, Matrix> uc;
      for (int m = n + 1; m <= x.hi(); ++m) uc[m] = prev->map.at(m);
      ComplexMap u(prev->complex, tr.complex, std::move(uc));
      Triangle t = Triangle::from_homotopy(u, v, {});
      cur = cert_.triangle(t, 1, StepRef{*cur, 0}, StepRef{hid, 0}, "Postnikov layer " + std::to_string(n));
    }
    prev = tr;
  }
  (void)g;
  return *cur;
}

}  // namespace kcell
