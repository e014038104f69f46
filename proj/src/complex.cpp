#include "kcell/complex.hpp"

#include <algorithm>
#include <sstream>

#include "kcell/errors.hpp"

namespace kcell {

Matrix solve_matrix(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), ErrorCode::InvalidInput, "solve: row mismatch");
  const Ring ring = a.ring();
  RowReduction rr = row_reduce(a.transpose());
  Matrix x(a.cols(), b.cols(), ring);
  for (std::size_t col = 0; col < b.cols(); ++col) {
    std::vector<Integer> rem = b.column_vector(col);
    for (std::size_t i = 0; i < rr.rank; ++i) {
      const std::size_t p = rr.pivots[i];
      const Integer& piv = rr.echelon(i, p);
      if (rem[p] == 0) continue;
      Integer c;
      if (ring.p == 0) {
        require(rem[p] % piv == 0, ErrorCode::InvalidInput, "solve: no integral solution");
        c = rem[p] / piv;
      } else {
        c = ring.reduced(rem[p] * ring.inverse(piv));
      }
      for (std::size_t j = p; j < a.rows(); ++j) {
        rem[j] -= c * rr.echelon(i, j);
        ring.normalize(rem[j]);
      }
      for (std::size_t j = 0; j < a.cols(); ++j) {
        Integer v = x(j, col) + c * rr.transform(i, j);
        x.set(j, col, v);
      }
    }
    for (const auto& r : rem) require(r == 0, ErrorCode::InvalidInput, "solve: inconsistent system");
  }
  return x;
}

// ---------------------------------------------------------------------------

GComplex::GComplex(GroupPtr g, Ring ring, int lo, std::vector<GModule> modules, std::vector<Matrix> diffs)
    : group_(std::move(g)), ring_(ring), lo_(lo), modules_(std::move(modules)), diffs_(std::move(diffs)) {
  zero_ = GModule::zero(group_, ring_);
  validate();
}

GComplex GComplex::trusted(GroupPtr g, Ring ring, int lo, std::vector<GModule> modules, std::vector<Matrix> diffs) {
  GComplex c;
  c.group_ = std::move(g);
  c.ring_ = ring;
  c.lo_ = lo;
  c.modules_ = std::move(modules);
  c.diffs_ = std::move(diffs);
  c.zero_ = GModule::zero(c.group_, ring);
  return c;
}

void GComplex::validate() const {
  const std::size_t want = modules_.empty() ? 0 : modules_.size() - 1;
  require(diffs_.size() == want, ErrorCode::InvalidInput,
          "complex needs " + std::to_string(want) + " differentials, got " + std::to_string(diffs_.size()));
  for (const auto& m : modules_) {
    require(m.group()->table() == group_->table(), ErrorCode::InvalidInput, "complex modules over different groups");
    if (!(m.ring() == ring_)) fail(ErrorCode::CoefficientMismatch, "complex modules over different rings");
  }
  for (int n = lo_ + 1; n <= hi(); ++n) {
    std::string why;
    if (!is_equivariant(module(n), module(n - 1), d(n), &why))
      fail(why.find("shape") != std::string::npos ? ErrorCode::InvalidInput : ErrorCode::BadAction,
           "differential d_" + std::to_string(n) + ": " + why);
  }
  for (int n = lo_ + 2; n <= hi(); ++n)
    if (!module(n - 2).relation_lattice().contains_columns(d(n - 1) * d(n)))
      fail(ErrorCode::NotAComplex, "d_" + std::to_string(n - 1) + " * d_" + std::to_string(n) + " != 0");
}

GComplex GComplex::zero(GroupPtr g, Ring ring) { return trusted(std::move(g), ring, 0, {}, {}); }

GComplex GComplex::concentrated(const GModule& m, int degree) { return trusted(m.group(), m.ring(), degree, {m}, {}); }

const GModule& GComplex::module(int n) const {
  if (n < lo_ || n > hi()) return zero_;
  return modules_[static_cast<std::size_t>(n - lo_)];
}

Matrix GComplex::d(int n) const {
  if (n - 1 >= lo_ && n <= hi()) return diffs_[static_cast<std::size_t>(n - lo_ - 1)];
  return Matrix(rank(n - 1), rank(n), ring_);
}

Lattice GComplex::cycles(int n) const { return Lattice::preimage(d(n), module(n - 1).relation_lattice()); }

Lattice GComplex::boundaries(int n) const {
  return Lattice::span(Matrix::hstack(d(n + 1), module(n).relations()));
}

HomologyModule GComplex::homology_module(int n) const {
  return HomologyModule{n, make_subquotient_module(group_, ring_, module(n).actions(), cycles(n), boundaries(n))};
}

FgAbelianGroup GComplex::homology(int n) const {
  if (rank(n) == 0) return FgAbelianGroup::zero(ring_);
  return subquotient(cycles(n), boundaries(n)).group;
}

std::vector<HomologyModule> GComplex::homology_modules() const {
  std::vector<HomologyModule> out;
  for (int n = lo_; n <= hi(); ++n) out.push_back(homology_module(n));
  return out;
}

bool GComplex::is_acyclic_in(int a, int b) const {
  for (int n = std::max(a, lo_); n <= std::min(b, hi()); ++n)
    if (!boundaries(n).contains(cycles(n))) return false;
  return true;
}

bool GComplex::is_acyclic() const { return is_acyclic_in(lo_, hi()); }

GComplex GComplex::shift(int s) const {
  std::vector<Matrix> diffs;
  for (const auto& d : diffs_) diffs.push_back(s % 2 ? -d : d);
  return trusted(group_, ring_, lo_ + s, modules_, std::move(diffs));
}

GComplex GComplex::padded(int lo, int hi_) const {
  if (empty() && lo > hi_) return *this;
  const int a = empty() ? lo : std::min(lo, lo_);
  const int b = empty() ? hi_ : std::max(hi_, hi());
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  for (int n = a; n <= b; ++n) {
    mods.push_back(module(n));
    if (n > a) diffs.push_back(d(n));
  }
  return trusted(group_, ring_, a, std::move(mods), std::move(diffs));
}

GComplex GComplex::direct_sum(const GComplex& other) const {
  if (empty()) return other;
  if (other.empty()) return *this;
  const int a = std::min(lo_, other.lo_), b = std::max(hi(), other.hi());
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  for (int n = a; n <= b; ++n) {
    mods.push_back(module(n).direct_sum(other.module(n)));
    if (n > a) diffs.push_back(Matrix::block_diag(d(n), other.d(n)));
  }
  return trusted(group_, ring_, a, std::move(mods), std::move(diffs));
}

GComplex GComplex::trimmed() const {
  int a = lo_, b = hi();
  while (a <= b && rank(a) == 0) ++a;
  while (b >= a && rank(b) == 0) --b;
  if (a > b) return zero(group_, ring_);
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  for (int n = a; n <= b; ++n) {
    mods.push_back(module(n));
    if (n > a) diffs.push_back(d(n));
  }
  return trusted(group_, ring_, a, std::move(mods), std::move(diffs));
}

GComplex GComplex::restrict_along(const GroupHom& along) const {
  std::vector<GModule> mods;
  for (const auto& m : modules_) mods.push_back(restrict_module(m, along));
  return trusted(along.source, ring_, lo_, std::move(mods), diffs_);
}

std::string GComplex::describe() const {
  std::ostringstream os;
  os << "complex over " << ring_.name() << "[" << group_->label() << "]";
  if (empty()) return os.str() + " (zero)";
  os << " in degrees [" << lo_ << "," << hi() << "], ranks (";
  for (int n = lo_; n <= hi(); ++n) os << (n > lo_ ? "," : "") << rank(n);
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

ComplexMap::ComplexMap(GComplex s, GComplex t, std::map<int, Matrix> c)
    : source(std::move(s)), target(std::move(t)), comps(std::move(c)) {
  validate();
}

ComplexMap ComplexMap::trusted(GComplex s, GComplex t, std::map<int, Matrix> c) {
  ComplexMap f;
  f.source = std::move(s);
  f.target = std::move(t);
  f.comps = std::move(c);
  return f;
}

void ComplexMap::validate() const {
  for (const auto& [n, m] : comps) {
    std::string why;
    if (!is_equivariant(source.module(n), target.module(n), m, &why))
      fail(ErrorCode::BadAction, "chain map component " + std::to_string(n) + ": " + why);
  }
  const int a = std::min(source.lo(), target.lo()), b = std::max(source.hi(), target.hi());
  for (int n = a; n <= b + 1; ++n) {
    if (!target.module(n - 1).same_elements(target.d(n) * at(n), at(n - 1) * source.d(n)))
      fail(ErrorCode::NotAComplex, "map does not commute with differentials in degree " + std::to_string(n));
  }
}

Matrix ComplexMap::at(int n) const {
  auto it = comps.find(n);
  if (it != comps.end()) return it->second;
  return Matrix(target.rank(n), source.rank(n), source.ring());
}

ComplexMap ComplexMap::identity(const GComplex& x) {
  std::map<int, Matrix> c;
  for (int n = x.lo(); n <= x.hi(); ++n) c[n] = Matrix::identity(x.rank(n), x.ring());
  return trusted(x, x, std::move(c));
}

ComplexMap ComplexMap::zero(const GComplex& s, const GComplex& t) { return trusted(s, t, {}); }

ComplexMap ComplexMap::compose_after(const ComplexMap& first) const {
  std::map<int, Matrix> c;
  for (const auto& [n, m] : first.comps) c[n] = at(n) * m;
  return trusted(first.source, target, std::move(c));
}

ComplexMap ComplexMap::shift(int s) const {
  std::map<int, Matrix> c;
  for (const auto& [n, m] : comps) c[n + s] = m;
  return trusted(source.shift(s), target.shift(s), std::move(c));
}

Matrix ComplexMap::on_homology(int n) const {
  auto hs = source.homology_module(n);
  auto ht = target.homology_module(n);
  return ht.data.sq.coordinates_of(at(n) * hs.data.reps);
}

bool ComplexMap::is_quasi_iso() const { return cone(*this).complex.is_acyclic(); }

bool ComplexMap::is_quasi_iso_in(int a, int b) const {
  // H_n(cone) = 0 for a <= n <= b+1 gives isomorphisms in degrees a..b.
  return cone(*this).complex.is_acyclic_in(a, b + 1);
}

bool ComplexMap::same_as(const ComplexMap& g) const {
  const int a = std::min(source.lo(), target.lo()), b = std::max(source.hi(), target.hi());
  for (int n = a; n <= b; ++n)
    if (!target.module(n).same_elements(at(n), g.at(n))) return false;
  return true;
}

Cone cone(const ComplexMap& f) {
  const GComplex& a = f.source;
  const GComplex& b = f.target;
  const Ring ring = b.ring();
  if (a.empty() && b.empty()) {
    GComplex z = GComplex::zero(b.group(), ring);
    return Cone{z, ComplexMap::zero(b, z), ComplexMap::zero(z, a.shift(1))};
  }
  const int lo = a.empty() ? b.lo() : (b.empty() ? a.lo() + 1 : std::min(a.lo() + 1, b.lo()));
  const int hi = a.empty() ? b.hi() : (b.empty() ? a.hi() + 1 : std::max(a.hi() + 1, b.hi()));
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  for (int n = lo; n <= hi; ++n) {
    mods.push_back(a.module(n - 1).direct_sum(b.module(n)));
    if (n > lo) {
      const std::size_t ra = a.rank(n - 2), rb = b.rank(n - 1), ca = a.rank(n - 1), cb = b.rank(n);
      Matrix m(ra + rb, ca + cb, ring);
      m.set_block(0, 0, -a.d(n - 1));
      m.set_block(ra, 0, f.at(n - 1));
      m.set_block(ra, ca, b.d(n));
      diffs.push_back(m);
    }
  }
  GComplex c = GComplex::trusted(b.group(), ring, lo, std::move(mods), std::move(diffs));
  std::map<int, Matrix> inc, proj;
  for (int n = lo; n <= hi; ++n) {
    const std::size_t ra = a.rank(n - 1), rb = b.rank(n);
    Matrix i(ra + rb, rb, ring);
    i.set_block(ra, 0, Matrix::identity(rb, ring));
    inc[n] = i;
    Matrix p(ra, ra + rb, ring);
    p.set_block(0, 0, Matrix::identity(ra, ring));
    proj[n] = p;
  }
  return Cone{c, ComplexMap::trusted(b, c, std::move(inc)), ComplexMap::trusted(c, a.shift(1), std::move(proj))};
}

Triangle Triangle::from_homotopy(const ComplexMap& u, const ComplexMap& v, const std::map<int, Matrix>& h) {
  Cone c = cone(u);
  std::map<int, Matrix> w;
  for (int n = c.complex.lo(); n <= c.complex.hi(); ++n) {
    Matrix hn = Matrix(v.target.rank(n), u.source.rank(n - 1), u.source.ring());
    auto it = h.find(n);
    if (it != h.end()) hn = it->second;
    w[n] = Matrix::hstack(hn, v.at(n));
  }
  Triangle t;
  t.A = u.source;
  t.B = u.target;
  t.C = v.target;
  t.u = u;
  t.v = v;
  t.w = ComplexMap(c.complex, v.target, std::move(w));
  return t;
}

Triangle Triangle::standard(const ComplexMap& u) {
  Cone c = cone(u);
  Triangle t;
  t.A = u.source;
  t.B = u.target;
  t.C = c.complex;
  t.u = u;
  t.v = c.inclusion;
  t.w = ComplexMap::identity(c.complex);
  return t;
}

Triangle cyclic_triangle(const GroupPtr& g, Ring ring, int generator) {
  require(g->element_order(generator) == g->order(), ErrorCode::WrongGroupClass, "the element does not generate the group");
  const auto n = static_cast<std::size_t>(g->order());
  GModule kg = GModule::free(g, ring);
  GComplex a = GComplex::concentrated(kg, 0);
  GComplex k = cone(ComplexMap(a, a, {{0, algebra_action(kg, one_minus(*g, generator))}})).complex;
  GModule triv = GModule::trivial(g, ring);
  Matrix norm(n, 1, ring), aug(1, n, ring);
  for (std::size_t i = 0; i < n; ++i) {
    norm.set(i, 0, 1);
    aug.set(0, i, 1);
  }
  ComplexMap u(GComplex::concentrated(triv, 1), k, {{1, norm}});
  ComplexMap v(k, GComplex::concentrated(triv, 0), {{0, aug}});
  return Triangle::from_homotopy(u, v, {});
}

bool exact_at(const ComplexMap& f, const ComplexMap& g, int n) {
  const GComplex& y = f.target;
  Lattice zy = y.cycles(n), by = y.boundaries(n);
  Lattice im = Lattice::image(f.at(n), f.source.cycles(n)) + by;
  Lattice ker = Lattice::preimage(g.at(n), g.target.boundaries(n)).intersect(zy) + by;
  return im == ker;
}

std::string Triangle::validate() const {
  Cone c = cone(u);
  if (!w.compose_after(c.inclusion).same_as(v)) return "witness does not restrict to B -> C";
  if (!w.is_quasi_iso()) return "witness cone(u) -> C is not a quasi-isomorphism";
  ComplexMap su = u.shift(1);
  const int lo = std::min({A.lo(), B.lo(), C.lo()}) - 1;
  const int hi = std::max({A.hi(), B.hi(), C.hi()}) + 2;
  for (int n = lo; n <= hi; ++n) {
    if (!exact_at(u, c.inclusion, n)) return "long exact sequence fails at B in degree " + std::to_string(n);
    if (!exact_at(c.inclusion, c.projection, n)) return "long exact sequence fails at C in degree " + std::to_string(n);
    if (!exact_at(c.projection, su, n)) return "long exact sequence fails at A in degree " + std::to_string(n - 1);
  }
  return "";
}

// ---------------------------------------------------------------------------

Truncation truncate_above(const GComplex& x, int i) {
  if (x.empty() || i <= x.lo()) return Truncation{x, ComplexMap::identity(x)};
  if (i > x.hi()) {
    GComplex z = GComplex::zero(x.group(), x.ring());
    return Truncation{z, ComplexMap::zero(z, x)};
  }
  auto sm = make_subquotient_module(x.group(), x.ring(), x.module(i).actions(), x.cycles(i),
                                    x.module(i).relation_lattice());
  std::vector<GModule> mods{sm.module};
  std::vector<Matrix> diffs;
  for (int n = i + 1; n <= x.hi(); ++n) {
    mods.push_back(x.module(n));
    diffs.push_back(n == i + 1 ? sm.sq.coordinates_of(x.d(n)) : x.d(n));
  }
  GComplex t(x.group(), x.ring(), i, std::move(mods), std::move(diffs));
  std::map<int, Matrix> m;
  m[i] = sm.reps;
  for (int n = i + 1; n <= x.hi(); ++n) m[n] = Matrix::identity(x.rank(n), x.ring());
  return Truncation{t, ComplexMap(t, x, std::move(m))};
}

Truncation truncate_below(const GComplex& x, int j) {
  if (x.empty() || j >= x.hi()) return Truncation{x, ComplexMap::identity(x)};
  if (j < x.lo()) {
    GComplex z = GComplex::zero(x.group(), x.ring());
    return Truncation{z, ComplexMap::zero(x, z)};
  }
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  for (int n = x.lo(); n <= j; ++n) {
    const GModule& m = x.module(n);
    if (n == j)
      mods.push_back(GModule(x.group(), x.ring(), m.rank(), Matrix::hstack(m.relations(), x.d(j + 1)), m.actions()));
    else
      mods.push_back(m);
    if (n > x.lo()) diffs.push_back(x.d(n));
  }
  GComplex t(x.group(), x.ring(), x.lo(), std::move(mods), std::move(diffs));
  std::map<int, Matrix> m;
  for (int n = x.lo(); n <= j; ++n) m[n] = Matrix::identity(x.rank(n), x.ring());
  return Truncation{t, ComplexMap(x, t, std::move(m))};
}

Window postnikov_window(const GComplex& x, int i, int j) {
  if (i > j) fail(ErrorCode::BadWindow, "window lower bound " + std::to_string(i) + " exceeds upper " + std::to_string(j));
  Truncation up = truncate_above(x, i);
  Truncation low = truncate_below(up.complex, j);
  return Window{low.complex, up.map, low.map, up.complex};
}

// ---------------------------------------------------------------------------

Matrix algebra_action(const GModule& m, const std::vector<Integer>& z) {
  require(static_cast<int>(z.size()) == m.group()->order(), ErrorCode::InvalidInput, "group algebra element has wrong length");
  Matrix s(m.rank(), m.rank(), m.ring());
  for (std::size_t g = 0; g < z.size(); ++g)
    if (z[g] != 0) s = s + m.action(static_cast<int>(g)).scaled(z[g]);
  return s;
}

ComplexMap algebra_action_map(const GComplex& x, const std::vector<Integer>& z) {
  std::map<int, Matrix> c;
  for (int n = x.lo(); n <= x.hi(); ++n) c[n] = algebra_action(x.module(n), z);
  return ComplexMap(x, x, std::move(c));
}

std::vector<Integer> one_minus(const FiniteGroup& g, int element) {
  std::vector<Integer> z(g.order(), 0);
  z[0] += 1;
  z[element] -= 1;
  return z;
}

namespace {

std::size_t prime_factor_count(const FgAbelianGroup& a) {
  std::size_t omega = 0;
  for (const auto& d : a.torsion) {
    Integer x = d;
    for (const auto& q : prime_factors(d))
      while (x % q == 0) {
        x /= q;
        ++omega;
      }
  }
  return omega;
}

// Sub-presented complex on lattices L_n (each containing R_n and d-stable).
struct SubComplex {
  GComplex complex;
  ComplexMap inclusion;
  std::vector<SubquotientModule> parts;
};

SubComplex sub_complex(const GComplex& x, const std::vector<Lattice>& lats) {
  std::vector<SubquotientModule> parts;
  for (int n = x.lo(); n <= x.hi(); ++n)
    parts.push_back(make_subquotient_module(x.group(), x.ring(), x.module(n).actions(),
                                            lats[static_cast<std::size_t>(n - x.lo())], x.module(n).relation_lattice()));
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  std::map<int, Matrix> inc;
  for (int n = x.lo(); n <= x.hi(); ++n) {
    const auto& p = parts[static_cast<std::size_t>(n - x.lo())];
    mods.push_back(p.module);
    if (n > x.lo()) diffs.push_back(parts[static_cast<std::size_t>(n - 1 - x.lo())].sq.coordinates_of(x.d(n) * p.reps));
    inc[n] = p.reps;
  }
  GComplex c(x.group(), x.ring(), x.lo(), std::move(mods), std::move(diffs));
  ComplexMap i(c, x, std::move(inc));
  return SubComplex{c, i, std::move(parts)};
}

}  // namespace

Telescope telescope_localize(const GComplex& x, const std::vector<Integer>& z) {
  ComplexMap zmap = algebra_action_map(x, z);
  Telescope out;
  if (x.empty()) {
    out.image = out.kernel = x;
    out.image_inclusion = out.kernel_inclusion = out.projection = ComplexMap::identity(x);
    return out;
  }
  std::vector<Lattice> img;
  int stage = 0;
  for (int n = x.lo(); n <= x.hi(); ++n) {
    const GModule& m = x.module(n);
    const Matrix zn = zmap.at(n);
    FgAbelianGroup u = m.underlying();
    const std::size_t bound = m.rank() + prime_factor_count(u) + 1;
    Lattice cur = Lattice::whole(m.rank(), x.ring());
    std::size_t steps = 0;
    for (;;) {
      Lattice next = Lattice::span(Matrix::hstack(zn * cur.basis(), m.relations()));
      if (next == cur) break;
      cur = next;
      if (++steps > bound)
        fail(ErrorCode::NotStabilized, "images of z^N do not stabilize in degree " + std::to_string(n));
    }
    stage = std::max(stage, static_cast<int>(steps));
    img.push_back(cur);
  }
  std::vector<Lattice> ker;
  for (int n = x.lo(); n <= x.hi(); ++n)
    ker.push_back(Lattice::preimage(zmap.at(n).pow(static_cast<unsigned>(stage)), x.module(n).relation_lattice()));
  SubComplex e = sub_complex(x, img), k = sub_complex(x, ker);
  std::map<int, Matrix> proj;
  for (int n = x.lo(); n <= x.hi(); ++n) {
    const auto& pe = e.parts[static_cast<std::size_t>(n - x.lo())];
    const auto& pk = k.parts[static_cast<std::size_t>(n - x.lo())];
    Matrix gens = Matrix::hstack(Matrix::hstack(pe.reps, pk.reps), x.module(n).relations());
    Matrix y = solve_matrix(gens, Matrix::identity(x.rank(n), x.ring()));
    proj[n] = y.block(0, 0, pe.reps.cols(), x.rank(n));
  }
  out.stage = stage;
  out.image = e.complex;
  out.kernel = k.complex;
  out.image_inclusion = e.inclusion;
  out.kernel_inclusion = k.inclusion;
  out.projection = ComplexMap(x, e.complex, std::move(proj));
  return out;
}

FixedComplex fixed_point_complex(const GComplex& x, const Subgroup& h) {
  require(x.group()->is_normal(h), ErrorCode::BadSubgroup, "fixed points require a normal subgroup");
  std::vector<Lattice> lats;
  for (int n = x.lo(); n <= x.hi(); ++n) lats.push_back(fixed_lattice(x.module(n), h));
  if (x.empty()) return FixedComplex{x, ComplexMap::identity(x)};
  SubComplex s = sub_complex(x, lats);
  return FixedComplex{s.complex, s.inclusion};
}

}  // namespace kcell
