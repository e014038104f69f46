#include "kcell/derived.hpp"

#include <algorithm>
#include <sstream>

#include "kcell/errors.hpp"

namespace kcell {

namespace {

const GroupPtr& trivial_group() {
  static const GroupPtr g = make_group(FiniteGroup::trivial());
  return g;
}

GModule abelian(Ring ring, std::size_t rank, Matrix relations) {
  return GModule::trusted(trivial_group(), ring, rank, std::move(relations), {Matrix::identity(rank, ring)});
}

std::size_t kg_rank(const GComplex& p, int m) {
  return p.rank(m) / static_cast<std::size_t>(p.group()->order());
}

// Relations of Y_k repeated r times.
Matrix repeated_relations(const GModule& y, std::size_t r) {
  Matrix rel(y.rank() * r, y.relations().cols() * r, y.ring());
  for (std::size_t j = 0; j < r; ++j) rel.set_block(j * y.rank(), j * y.relations().cols(), y.relations());
  return rel;
}

struct Block {
  int m;               // degree in P
  int k;               // degree in Y
  std::size_t offset;
  std::size_t r;       // kG-rank of P_m
};

}  // namespace

std::size_t FreeResolution::rank(int n) const {
  if (n < complex.lo() || n > complex.hi()) return 0;
  return ranks[static_cast<std::size_t>(n - complex.lo())];
}

bool FreeResolution::verify() const {
  return cone(augmentation).complex.is_acyclic_in(std::min(base.lo(), complex.lo()), valid_through);
}

FreeResolution free_resolution(const GModule& m, int depth) {
  require(depth >= 0, ErrorCode::InvalidInput, "resolution depth must be nonnegative");
  return free_resolution(GComplex::concentrated(m, 0), depth);
}

FreeResolution free_resolution(const GComplex& x, int top) {
  const GroupPtr& g = x.group();
  const Ring ring = x.ring();
  const int order = g->order();
  FreeResolution res;
  res.base = x;
  res.kind = "kernel-cover";
  const int lo = x.empty() ? 0 : x.lo();
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  std::map<int, Matrix> phi;
  for (int n = lo; n <= std::max(top, lo); ++n) {
    const bool first = n == lo;
    const GModule& pprev = first ? x.module(lo - 1) : mods.back();  // zero module when first
    const std::size_t pa = first ? 0 : pprev.rank();
    const std::size_t xb = x.rank(n);
    const std::size_t pa2 = (n - 2 >= lo) ? mods[static_cast<std::size_t>(n - 2 - lo)].rank() : 0;
    const std::size_t xb2 = x.rank(n - 1);
    // cone differential in degree n: (P_{n-1} ⊕ X_n) -> (P_{n-2} ⊕ X_{n-1})
    Matrix d(pa2 + xb2, pa + xb, ring);
    if (!first) {
      if (n - 1 > lo) d.set_block(0, 0, -diffs.back());
      d.set_block(pa2, 0, phi[n - 1]);
    }
    d.set_block(pa2, pa, x.d(n));
    Matrix low_rel(pa2 + xb2, x.module(n - 1).relations().cols(), ring);
    low_rel.set_block(pa2, 0, x.module(n - 1).relations());
    Lattice cycles = Lattice::preimage(d, Lattice::span(low_rel));
    Matrix up(pa + xb, x.rank(n + 1) + x.module(n).relations().cols(), ring);
    up.set_block(pa, 0, Matrix::hstack(x.d(n + 1), x.module(n).relations()));
    Lattice span = Lattice::span(up);
    Subquotient h = subquotient(cycles, span);
    std::vector<Matrix> action;
    for (int e = 0; e < order; ++e)
      action.push_back(Matrix::block_diag(first ? Matrix(0, 0, ring) : pprev.action(e), x.module(n).action(e)));
    std::vector<std::size_t> chosen;
    for (std::size_t j = 0; j < h.size(); ++j) {
      Matrix c = h.generators.column(j);
      if (span.contains(c.column_vector(0))) continue;
      chosen.push_back(j);
      std::vector<Matrix> orbit;
      for (int e = 0; e < order; ++e) orbit.push_back(action[static_cast<std::size_t>(e)] * c);
      span = span + Lattice::span(Matrix::hstack_all(orbit, pa + xb, ring));
    }
    require(span.contains(cycles), ErrorCode::InvalidInput, "resolution stage failed to cover the cone cycles");
    Matrix gens = h.generators.select_columns(chosen);
    GModule pn = GModule::free(g, ring, chosen.size());
    if (!first) diffs.push_back(free_map_matrix(pprev, -gens.block(0, 0, pa, gens.cols())));
    phi[n] = free_map_matrix(x.module(n), gens.block(pa, 0, xb, gens.cols()));
    mods.push_back(pn);
    res.ranks.push_back(chosen.size());
  }
  res.complex = GComplex::trusted(g, ring, lo, std::move(mods), std::move(diffs));
  res.augmentation = ComplexMap::trusted(res.complex, x, std::move(phi));
  res.valid_through = std::max(top, lo);
  return res;
}

FreeResolution bar_resolution(const GModule& m, int depth, std::size_t cap) {
  require(depth >= 0, ErrorCode::InvalidInput, "resolution depth must be nonnegative");
  require(!m.has_relations(), ErrorCode::InvalidInput, "bar resolution needs a module without relations");
  const GroupPtr& g = m.group();
  const Ring ring = m.ring();
  const std::size_t order = static_cast<std::size_t>(g->order());
  const std::size_t r = m.rank();
  std::size_t total = 0;
  std::size_t pw = 1;  // |G|^n
  for (int n = 0; n <= depth; ++n) {
    const std::size_t rows = (n == 0 ? r : pw / order * r * order);
    total += rows * pw * r * order;
    if (total > cap)
      fail(ErrorCode::TooLarge, "bar resolution through stage " + std::to_string(depth) + " exceeds " +
                                    std::to_string(cap) + " matrix entries");
    pw *= order;
  }
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  pw = 1;
  for (int n = 0; n <= depth; ++n) {
    mods.push_back(GModule::free(g, ring, pw * r));
    if (n > 0) {
      const std::size_t below = pw / order;  // number of (n-1)-tuples
      Matrix d(below * r * order, pw * r * order, ring);
      std::vector<int> tuple(static_cast<std::size_t>(n));
      for (std::size_t t = 0; t < pw; ++t) {
        std::size_t rest = t;
        for (int i = n - 1; i >= 0; --i) {
          tuple[static_cast<std::size_t>(i)] = static_cast<int>(rest % order);
          rest /= order;
        }
        auto index_of = [&](const std::vector<int>& tu) {
          std::size_t idx = 0;
          for (int v : tu) idx = idx * order + static_cast<std::size_t>(v);
          return idx;
        };
        for (std::size_t j = 0; j < r; ++j) {
          const std::size_t col = (t * r + j) * order;  // generator e_{(t,j),1}
          auto add = [&](std::size_t gen, int elem, long s) {
            const std::size_t row = gen * order + static_cast<std::size_t>(elem);
            d.set(row, col, d(row, col) + s);
          };
          std::vector<int> tail(tuple.begin() + 1, tuple.end());
          add(index_of(tail) * r + j, tuple[0], 1);
          for (int i = 1; i < n; ++i) {
            std::vector<int> merged;
            for (int q = 0; q < n; ++q) {
              if (q == i) continue;
              merged.push_back(q == i - 1 ? g->mul(tuple[static_cast<std::size_t>(i - 1)], tuple[static_cast<std::size_t>(i)])
                                          : tuple[static_cast<std::size_t>(q)]);
            }
            add(index_of(merged) * r + j, 0, i % 2 ? -1 : 1);
          }
          std::vector<int> head(tuple.begin(), tuple.end() - 1);
          const Matrix& a = m.action(tuple.back());
          for (std::size_t k = 0; k < r; ++k) {
            if (a(k, j) == 0) continue;
            const std::size_t row = (index_of(head) * r + k) * order;
            Integer v = d(row, col) + (n % 2 ? -a(k, j) : a(k, j));
            d.set(row, col, v);
          }
        }
      }
      // fill in the other columns of each generator by equivariance
      Matrix images(d.rows(), pw * r, ring);
      for (std::size_t c = 0; c < pw * r; ++c) images.set_block(0, c, d.column(c * order));
      diffs.push_back(free_map_matrix(mods[static_cast<std::size_t>(n - 1)], images));
    }
    pw *= order;
  }
  FreeResolution res;
  res.base = GComplex::concentrated(m, 0);
  res.kind = "bar";
  for (const auto& md : mods) res.ranks.push_back(md.rank() / order);
  res.complex = GComplex::trusted(g, ring, 0, std::move(mods), std::move(diffs));
  res.augmentation =
      ComplexMap::trusted(res.complex, res.base, {{0, free_map_matrix(m, Matrix::identity(r, ring))}});
  res.valid_through = depth;
  return res;
}

// ---------------------------------------------------------------------------

std::string RangeReport::describe() const {
  std::ostringstream os;
  os << "[" << a << "," << b << "] via " << resolution << " resolution through stage " << available << " (needs "
     << required << ")" << (certified() ? "" : " NOT CERTIFIED");
  return os.str();
}

bool GradedGroups::all_zero() const {
  return std::all_of(groups.begin(), groups.end(), [](const FgAbelianGroup& x) { return x.is_zero(); });
}

std::vector<std::size_t> GradedGroups::dims() const {
  std::vector<std::size_t> out;
  for (const auto& x : groups) out.push_back(x.free_rank + x.torsion.size());
  return out;
}

std::string GradedGroups::describe() const {
  std::ostringstream os;
  for (int i = a; i <= b; ++i) os << (i > a ? ", " : "") << i << ": " << at(i).to_string();
  return os.str();
}

namespace {

// blocks of Hom_n: (m, k = m + n) with P_m, Y_k both in range
std::vector<Block> hom_blocks(const GComplex& p, const GComplex& y, int n, std::size_t& size) {
  std::vector<Block> out;
  size = 0;
  if (p.empty() || y.empty()) return out;
  for (int m = p.lo(); m <= p.hi(); ++m) {
    const int k = m + n;
    if (k < y.lo() || k > y.hi()) continue;
    const std::size_t r = kg_rank(p, m);
    if (r == 0 || y.rank(k) == 0) continue;
    out.push_back(Block{m, k, size, r});
    size += r * y.rank(k);
  }
  return out;
}

}  // namespace

GComplex hom_complex(const GComplex& p, const GComplex& y, int nlo, int nhi) {
  const Ring ring = y.ring();
  const int order = p.group()->order();
  auto blocks = [&](int n, std::size_t& size) { return hom_blocks(p, y, n, size); };
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  std::vector<std::vector<Block>> all;
  std::vector<std::size_t> sizes;
  for (int n = nlo; n <= nhi; ++n) {
    std::size_t size = 0;
    auto bl = blocks(n, size);
    Matrix rel(size, 0, ring);
    for (const auto& b : bl) {
      Matrix rb(size, y.module(b.k).relations().cols() * b.r, ring);
      rb.set_block(b.offset, 0, repeated_relations(y.module(b.k), b.r));
      rel = Matrix::hstack(rel, rb);
    }
    mods.push_back(abelian(ring, size, rel));
    all.push_back(bl);
    sizes.push_back(size);
  }
  for (int n = nlo + 1; n <= nhi; ++n) {
    const auto& src = all[static_cast<std::size_t>(n - nlo)];
    const auto& dst = all[static_cast<std::size_t>(n - 1 - nlo)];
    Matrix dm(sizes[static_cast<std::size_t>(n - 1 - nlo)], sizes[static_cast<std::size_t>(n - nlo)], ring);
    const Integer sign = (n % 2 == 0) ? -1 : 1;  // −(−1)^n
    for (const auto& s : src) {
      const std::size_t yk = y.rank(s.k);
      for (const auto& t : dst) {
        const std::size_t yt = y.rank(t.k);
        if (t.m == s.m && t.k == s.k - 1) {
          // d_Y ∘ φ_m
          const Matrix dy = y.d(s.k);
          for (std::size_t j = 0; j < s.r; ++j) dm.set_block(t.offset + j * yt, s.offset + j * yk, dy);
        } else if (t.m == s.m + 1 && t.k == s.k) {
          // −(−1)^n φ_m ∘ d_P(m+1): φ ∈ Hom(P_m, Y_k) to Hom(P_{m+1}, Y_k)
          const Matrix dp = p.d(t.m);
          for (std::size_t jt = 0; jt < t.r; ++jt)
            for (std::size_t js = 0; js < s.r; ++js) {
              Matrix acc(yk, yk, ring);
              bool any = false;
              for (int e = 0; e < order; ++e) {
                const Integer& c = dp(js * order + static_cast<std::size_t>(e), jt * order);
                if (c == 0) continue;
                acc = acc + y.module(s.k).action(e).scaled(c);
                any = true;
              }
              if (any) dm.set_block(t.offset + jt * yt, s.offset + js * yk, acc.scaled(sign));
            }
        }
      }
    }
    diffs.push_back(dm);
  }
  return GComplex(trivial_group(), ring, nlo, std::move(mods), std::move(diffs));
}

GComplex tensor_complex(const GComplex& p, const GComplex& y, int nlo, int nhi) {
  const Ring ring = y.ring();
  const GroupPtr& g = p.group();
  const int order = g->order();
  auto blocks = [&](int n, std::size_t& size) {
    std::vector<Block> out;
    size = 0;
    if (p.empty() || y.empty()) return out;
    for (int m = p.lo(); m <= p.hi(); ++m) {
      const int k = n - m;
      if (k < y.lo() || k > y.hi()) continue;
      const std::size_t r = kg_rank(p, m);
      if (r == 0 || y.rank(k) == 0) continue;
      out.push_back(Block{m, k, size, r});
      size += r * y.rank(k);
    }
    return out;
  };
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  std::vector<std::vector<Block>> all;
  std::vector<std::size_t> sizes;
  for (int n = nlo; n <= nhi; ++n) {
    std::size_t size = 0;
    auto bl = blocks(n, size);
    Matrix rel(size, 0, ring);
    for (const auto& b : bl) {
      Matrix rb(size, y.module(b.k).relations().cols() * b.r, ring);
      rb.set_block(b.offset, 0, repeated_relations(y.module(b.k), b.r));
      rel = Matrix::hstack(rel, rb);
    }
    mods.push_back(abelian(ring, size, rel));
    all.push_back(bl);
    sizes.push_back(size);
  }
  for (int n = nlo + 1; n <= nhi; ++n) {
    const auto& src = all[static_cast<std::size_t>(n - nlo)];
    const auto& dst = all[static_cast<std::size_t>(n - 1 - nlo)];
    Matrix dm(sizes[static_cast<std::size_t>(n - 1 - nlo)], sizes[static_cast<std::size_t>(n - nlo)], ring);
    for (const auto& s : src) {
      const std::size_t yk = y.rank(s.k);
      for (const auto& t : dst) {
        if (t.m == s.m - 1 && t.k == s.k) {
          const Matrix dp = p.d(s.m);
          for (std::size_t js = 0; js < s.r; ++js)
            for (std::size_t jt = 0; jt < t.r; ++jt) {
              Matrix acc(yk, yk, ring);
              bool any = false;
              for (int e = 0; e < order; ++e) {
                const Integer& c = dp(jt * order + static_cast<std::size_t>(e), js * order);
                if (c == 0) continue;
                acc = acc + y.module(s.k).action(g->inv(e)).scaled(c);
                any = true;
              }
              if (any) dm.set_block(t.offset + jt * yk, s.offset + js * yk, acc);
            }
        } else if (t.m == s.m && t.k == s.k - 1) {
          const std::size_t yt = y.rank(t.k);
          const Matrix dy = s.m % 2 ? -y.d(s.k) : y.d(s.k);
          for (std::size_t j = 0; j < s.r; ++j) dm.set_block(t.offset + j * yt, s.offset + j * yk, dy);
        }
      }
    }
    diffs.push_back(dm);
  }
  return GComplex(trivial_group(), ring, nlo, std::move(mods), std::move(diffs));
}

// ---------------------------------------------------------------------------
ComplexMap hom_induced(const GComplex& p, const ComplexMap& f, int nlo, int nhi) {
  GComplex hs = hom_complex(p, f.source, nlo, nhi);
  GComplex ht = hom_complex(p, f.target, nlo, nhi);
  std::map<int, Matrix> comps;
  for (int n = nlo; n <= nhi; ++n) {
    std::size_t ss = 0, ts = 0;
    auto sb = hom_blocks(p, f.source, n, ss);
    auto tb = hom_blocks(p, f.target, n, ts);
    Matrix c(ts, ss, f.target.ring());
    for (const auto& s : sb)
      for (const auto& t : tb) {
        if (s.m != t.m) continue;
        const Matrix fk = f.at(s.k);
        for (std::size_t j = 0; j < s.r; ++j)
          c.set_block(t.offset + j * f.target.rank(t.k), s.offset + j * f.source.rank(s.k), fk);
      }
    comps[n] = c;
  }
  return ComplexMap(hs, ht, std::move(comps));
}

InducedExt ext_induced(const FreeResolution& res, const ComplexMap& f, int a, int b) {
  require(a <= b, ErrorCode::BadWindow, "empty degree range");
  InducedExt out;
  out.a = a;
  out.b = b;
  ComplexMap h = hom_induced(res.complex, f, -b - 1, -a + 1);
  for (int i = a; i <= b; ++i) {
    out.source.push_back(h.source.homology_module(-i).module());
    out.target.push_back(h.target.homology_module(-i).module());
    out.maps.push_back(h.on_homology(-i));
  }
  return out;
}

bool InducedExt::nilpotent_at(int i) const {
  const auto idx = static_cast<std::size_t>(i - a);
  const GModule& m = source[idx];
  require(m.rank() == target[idx].rank(), ErrorCode::InvalidInput, "nilpotence needs an endomorphism");
  const FgAbelianGroup u = m.underlying();
  // a nilpotent endomorphism of a group of length ℓ satisfies φ^ℓ = 0
  std::size_t bound = u.free_rank + 1;
  for (const auto& t : u.torsion) bound += mpz_sizeinbase(t.get_mpz_t(), 2);
  Matrix pw = Matrix::identity(m.rank(), m.ring());
  const Matrix zero(m.rank(), m.rank(), m.ring());
  for (std::size_t e = 0; e <= bound; ++e) {
    if (m.same_elements(pw, zero)) return true;
    pw = maps[idx] * pw;
  }
  return false;
}

namespace {

FreeResolution resolve(const GModule& m, int top, ResolutionKind kind) {
  return kind == ResolutionKind::Bar ? bar_resolution(m, std::max(top, 0)) : free_resolution(m, std::max(top, 0));
}

GComplex as_complex(const GModule& y) { return GComplex::concentrated(y, 0); }

int ext_top(const GComplex& y, int b) { return y.empty() ? 0 : b + y.hi() + 1; }
int tor_top(const GComplex& y, int b) { return y.empty() ? 0 : b - y.lo() + 1; }

}  // namespace

GradedGroups ext_from_resolution(const FreeResolution& res, const GComplex& y, int a, int b) {
  require(a <= b, ErrorCode::BadWindow, "empty degree range");
  require(res.complex.ring() == y.ring(), ErrorCode::CoefficientMismatch, "Ext over different coefficient rings");
  GradedGroups out;
  out.a = a;
  out.b = b;
  out.report = RangeReport{a, b, ext_top(y, b), res.valid_through, res.kind};
  GComplex hom = hom_complex(res.complex, y, -b - 1, -a + 1);
  for (int i = a; i <= b; ++i) out.groups.push_back(hom.homology(-i));
  return out;
}

GradedGroups ext_range(const GModule& m, const GComplex& y, int a, int b, ResolutionKind kind) {
  return ext_from_resolution(resolve(m, ext_top(y, b), kind), y, a, b);
}

GradedGroups ext_range(const GModule& m, const GModule& y, int a, int b, ResolutionKind kind) {
  return ext_range(m, as_complex(y), a, b, kind);
}

GradedGroups ext_range(const GComplex& x, const GComplex& y, int a, int b) {
  return ext_from_resolution(free_resolution(x, ext_top(y, b)), y, a, b);
}

GradedGroups tor_from_resolution(const FreeResolution& res, const GComplex& y, int a, int b) {
  require(a <= b, ErrorCode::BadWindow, "empty degree range");
  require(res.complex.ring() == y.ring(), ErrorCode::CoefficientMismatch, "Tor over different coefficient rings");
  GradedGroups out;
  out.a = a;
  out.b = b;
  out.report = RangeReport{a, b, tor_top(y, b), res.valid_through, res.kind};
  GComplex t = tensor_complex(res.complex, y, a - 1, b + 1);
  for (int i = a; i <= b; ++i) out.groups.push_back(t.homology(i));
  return out;
}

GradedGroups tor_range(const GModule& m, const GComplex& y, int a, int b, ResolutionKind kind) {
  return tor_from_resolution(resolve(m, tor_top(y, b), kind), y, a, b);
}

GradedGroups tor_range(const GModule& m, const GModule& y, int a, int b, ResolutionKind kind) {
  return tor_range(m, as_complex(y), a, b, kind);
}

GradedGroups borel_cochains(const GComplex& x, int a, int b) {
  return ext_range(GModule::trivial(x.group(), x.ring()), x, a, b);
}

OrbitCochains homotopy_orbit_cochains(const GComplex& x, const Subgroup& h, int a, int b) {
  require(x.group()->is_subgroup(h) && x.group()->is_normal(h), ErrorCode::BadSubgroup,
          "homotopy orbits need a normal subgroup");
  auto emb = embed_subgroup(x.group(), h);
  GComplex xh = x.restrict_along(emb.inclusion);
  OrbitCochains out;
  out.groups = ext_range(GModule::trivial(emb.sub, x.ring()), xh, a, b);
  const Ring ring = x.ring();
  out.order_invertible = ring.p != 0 && h.size() % ring.p != 0;
  if (out.order_invertible) {
    GComplex fixed = fixed_point_complex(x, h).complex;
    out.fixed.a = a;
    out.fixed.b = b;
    out.fixed.report = RangeReport{a, b, 0, 0, "none"};
    for (int i = a; i <= b; ++i) out.fixed.groups.push_back(fixed.homology(-i));
    out.agrees_with_fixed = out.fixed.groups == out.groups.groups;
  }
  return out;
}

NullReport is_k_null_in_range(const GComplex& x, int a, int b) {
  NullReport out;
  out.ext = borel_cochains(x, a, b);
  out.null = out.ext.all_zero();
  return out;
}

NullReport is_k_equivalence_in_range(const ComplexMap& f, int a, int b) {
  return is_k_null_in_range(cone(f).complex, a, b);
}

}  // namespace kcell
