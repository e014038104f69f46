#include "kcell/emss.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

#include "kcell/errors.hpp"

namespace kcell {

namespace {

std::vector<int> sorted_image(const std::vector<int>& perm, const std::vector<int>& s, int* sign) {
  std::vector<int> img;
  img.reserve(s.size());
  for (int v : s) img.push_back(perm[static_cast<std::size_t>(v)]);
  int inversions = 0;
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t j = i + 1; j < img.size(); ++j)
      if (img[i] > img[j]) ++inversions;
  if (sign) *sign = inversions % 2 ? -1 : 1;
  std::sort(img.begin(), img.end());
  return img;
}

LocalGroup zero_group(Ring r) { return LocalGroup{FgAbelianGroup::zero(r), {}}; }

LocalGroup add(LocalGroup a, const LocalGroup& b) {
  a.fg = a.fg.direct_sum(b.fg);
  for (const auto& [l, m] : b.prufer) a.prufer[l] += m;
  return a;
}

bool same_group(const LocalGroup& a, const LocalGroup& b) {
  return a.prufer == b.prufer && a.fg.free_rank == b.fg.free_rank && a.fg.torsion == b.fg.torsion;
}

// free rank, torsion order and divisible part agree
bool same_invariants(const LocalGroup& a, const LocalGroup& b) {
  return a.prufer == b.prufer && a.fg.free_rank == b.fg.free_rank && a.fg.torsion_order() == b.fg.torsion_order();
}

std::size_t size_of(const LocalGroup& g) {
  std::size_t n = g.fg.num_generators();
  for (const auto& [l, m] : g.prufer) n += m;
  return n;
}

std::optional<int> first_generator(const FiniteGroup& g) {
  for (int e = 0; e < g.order(); ++e)
    if (g.element_order(e) == g.order()) return e;
  return std::nullopt;
}

Lattice span_columns(std::size_t n, Ring ring, const std::vector<std::vector<Integer>>& cols) {
  Matrix m(n, cols.size(), ring);
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) m.set(i, j, cols[j][i]);
  return Lattice::span(m);
}

bool exterior(const std::vector<int>& degrees, Ring field, std::size_t i) {
  return field.p != 2 && degrees[i] % 2 != 0;
}

}  // namespace

GSimplicialComplex::GSimplicialComplex(GroupPtr g, std::size_t vertices, std::vector<std::vector<int>> simplices,
                                       std::vector<std::vector<int>> perms)
    : group_(std::move(g)), vertices_(vertices), perms_(std::move(perms)) {
  require(group_ != nullptr, ErrorCode::InvalidInput, "simplicial complex without a group");
  const int order = group_->order();
  if (static_cast<int>(perms_.size()) != order)
    fail(ErrorCode::BadAction, "one vertex permutation per group element is required");
  for (const auto& p : perms_) {
    if (p.size() != vertices_) fail(ErrorCode::BadAction, "vertex permutation of the wrong length");
    std::vector<int> seen(vertices_, 0);
    for (int v : p)
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_ || seen[static_cast<std::size_t>(v)]++)
        fail(ErrorCode::BadAction, "not a permutation of the vertices");
  }
  for (std::size_t v = 0; v < vertices_; ++v)
    if (perms_[0][v] != static_cast<int>(v)) fail(ErrorCode::BadAction, "the identity moves a vertex");
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b)
      for (std::size_t v = 0; v < vertices_; ++v)
        if (perms_[static_cast<std::size_t>(group_->mul(a, b))][v] !=
            perms_[static_cast<std::size_t>(a)][static_cast<std::size_t>(perms_[static_cast<std::size_t>(b)][v])])
          fail(ErrorCode::BadAction, "the vertex action does not respect composition");
  std::set<std::vector<int>> all;
  for (std::size_t v = 0; v < vertices_; ++v) all.insert({static_cast<int>(v)});
  for (auto s : simplices) {
    require(!s.empty(), ErrorCode::InvalidInput, "empty simplex");
    std::sort(s.begin(), s.end());
    require(std::adjacent_find(s.begin(), s.end()) == s.end(), ErrorCode::InvalidInput, "repeated vertex in a simplex");
    require(s.front() >= 0 && static_cast<std::size_t>(s.back()) < vertices_, ErrorCode::InvalidInput,
            "simplex vertex out of range");
    require(s.size() <= 20, ErrorCode::TooLarge, "simplex of dimension above 19");
    const std::size_t k = s.size();
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> face;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1u << i)) face.push_back(s[i]);
      all.insert(face);
    }
  }
  for (const auto& s : all) {
    const std::size_t d = s.size() - 1;
    if (by_dim_.size() <= d) by_dim_.resize(d + 1);
    by_dim_[d].push_back(s);
  }
  for (int h = 0; h < order; ++h)
    for (const auto& s : all)
      if (!all.count(sorted_image(perms_[static_cast<std::size_t>(h)], s, nullptr)))
        fail(ErrorCode::BadAction, "the action does not map simplices to simplices");
}

GSimplicialComplex GSimplicialComplex::point(GroupPtr g) {
  const auto order = static_cast<std::size_t>(g->order());
  return GSimplicialComplex(std::move(g), 1, {}, std::vector<std::vector<int>>(order, {0}));
}

GSimplicialComplex GSimplicialComplex::discrete(GroupPtr g, std::vector<std::vector<int>> perms) {
  const std::size_t n = perms.empty() ? 0 : perms[0].size();
  return GSimplicialComplex(std::move(g), n, {}, std::move(perms));
}

const std::vector<std::vector<int>>& GSimplicialComplex::simplices(int n) const {
  static const std::vector<std::vector<int>> none;
  if (n < 0 || n > dimension()) return none;
  return by_dim_[static_cast<std::size_t>(n)];
}

bool GSimplicialComplex::is_free() const {
  for (int h = 1; h < group_->order(); ++h)
    for (const auto& layer : by_dim_)
      for (const auto& s : layer)
        if (sorted_image(perm(h), s, nullptr) == s) return false;
  return true;
}

GSimplicialComplex cross_polytope_sphere(int n) {
  require(n >= 0 && n <= 12, ErrorCode::InvalidInput, "sphere dimension must lie in 0..12");
  const std::size_t k = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<int>> top;
  for (std::uint32_t signs = 0; signs < (1u << k); ++signs) {
    std::vector<int> s;
    for (std::size_t i = 0; i < k; ++i) s.push_back(static_cast<int>(2 * i + ((signs >> i) & 1u)));
    top.push_back(s);
  }
  std::vector<int> id(2 * k), flip(2 * k);
  for (std::size_t v = 0; v < 2 * k; ++v) {
    id[v] = static_cast<int>(v);
    flip[v] = static_cast<int>(v ^ 1u);
  }
  GSimplicialComplex x(make_group(FiniteGroup::cyclic(2)), 2 * k, std::move(top), {id, flip});
  require(x.is_free(), ErrorCode::BadAction, "antipodal action is not free");
  return x;
}

GComplex cochains_of(const GSimplicialComplex& x, Ring ring) {
  const GroupPtr& g = x.group();
  const int dim = x.dimension();
  if (dim < 0) return GComplex::zero(g, ring);
  std::vector<std::map<std::vector<int>, std::size_t>> index(static_cast<std::size_t>(dim) + 1);
  for (int n = 0; n <= dim; ++n)
    for (std::size_t i = 0; i < x.count(n); ++i) index[static_cast<std::size_t>(n)][x.simplices(n)[i]] = i;
  std::vector<GModule> modules;
  for (int n = dim; n >= 0; --n) {
    const auto& sims = x.simplices(n);
    const std::size_t r = sims.size();
    std::vector<Matrix> action;
    for (int h = 0; h < g->order(); ++h) {
      Matrix a(r, r, ring);
      const auto& perm = x.perm(g->inv(h));
      for (std::size_t s = 0; s < r; ++s) {
        int sign = 1;
        auto img = sorted_image(perm, sims[s], &sign);
        a.set(s, index[static_cast<std::size_t>(n)].at(img), Integer(sign));
      }
      action.push_back(std::move(a));
    }
    modules.emplace_back(g, ring, r, Matrix(r, 0, ring), std::move(action));
  }
  std::vector<Matrix> diffs;
  for (int n = dim - 1; n >= 0; --n) {
    // d_{-n} : C^n -> C^{n+1}, the transposed boundary
    const auto& upper = x.simplices(n + 1);
    Matrix d(upper.size(), x.count(n), ring);
    for (std::size_t t = 0; t < upper.size(); ++t)
      for (std::size_t j = 0; j < upper[t].size(); ++j) {
        std::vector<int> face = upper[t];
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(j));
        d.set(t, index[static_cast<std::size_t>(n)].at(face), Integer(j % 2 ? -1 : 1));
      }
    diffs.push_back(std::move(d));
  }
  return GComplex(g, ring, -dim, std::move(modules), std::move(diffs));
}

// ---- graded algebras ----

GradedAlgebraPresentation::GradedAlgebraPresentation(Ring field, std::vector<int> degrees,
                                                     std::vector<GradedPolynomial> relations, int cap, std::string name)
    : field_(field), degrees_(std::move(degrees)), relations_(std::move(relations)), cap_(cap), name_(std::move(name)) {
  require(field_.is_field(), ErrorCode::WrongCharacteristic, "graded presentations need a prime field");
  require(cap_ >= 0, ErrorCode::InvalidInput, "negative degree cap");
  for (int d : degrees_) require(d >= 1, ErrorCode::InvalidInput, "generator degrees must be positive");
  const std::size_t ng = degrees_.size();
  mono_.assign(static_cast<std::size_t>(cap_) + 1, {});
  index_.assign(static_cast<std::size_t>(cap_) + 1, {});
  std::vector<int> e(ng, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int deg) {
    if (i == ng) {
      mono_[static_cast<std::size_t>(deg)].push_back(e);
      return;
    }
    for (int k = 0; deg + k * degrees_[i] <= cap_; ++k) {
      if (exterior(degrees_, field_, i) && k > 1) break;
      e[i] = k;
      rec(i + 1, deg + k * degrees_[i]);
    }
    e[i] = 0;
  };
  rec(0, 0);
  for (std::size_t t = 0; t < mono_.size(); ++t) {
    std::sort(mono_[t].begin(), mono_[t].end());
    for (std::size_t i = 0; i < mono_[t].size(); ++i) index_[t][mono_[t][i]] = i;
  }
  std::vector<std::vector<std::vector<Integer>>> cols(mono_.size());
  for (const auto& r : relations_) {
    if (r.terms.empty()) continue;
    const int d = degree_of(r.terms.begin()->first);
    for (const auto& [ex, c] : r.terms)
      require(degree_of(ex) == d, ErrorCode::InvalidInput, "relation is not homogeneous");
    require(d >= 1, ErrorCode::InvalidInput, "relations must have positive degree");
    if (d > cap_)
      fail(ErrorCode::CapExceeded, "relation of degree " + std::to_string(d) + " above the cap " + std::to_string(cap_));
    for (int t = d; t <= cap_; ++t)
      for (const auto& m : mono_[static_cast<std::size_t>(t - d)]) {
        std::vector<Integer> v(mono_[static_cast<std::size_t>(t)].size(), 0);
        for (const auto& [ex, c] : r.terms) {
          auto [sg, prod] = monomial_product(m, ex);
          if (sg == 0) continue;
          v[index_[static_cast<std::size_t>(t)].at(prod)] += c * sg;
        }
        cols[static_cast<std::size_t>(t)].push_back(std::move(v));
      }
  }
  for (std::size_t t = 0; t < mono_.size(); ++t) {
    const std::size_t n = mono_[t].size();
    quot_.push_back(subquotient(Lattice::whole(n, field_), span_columns(n, field_, cols[t])));
  }
}

GradedAlgebraPresentation GradedAlgebraPresentation::cyclic_cohomology(std::uint64_t p, int cap) {
  require(is_prime(p), ErrorCode::InvalidInput, "characteristic must be prime");
  if (p == 2) return GradedAlgebraPresentation(Ring::prime_field(2), {1}, {}, cap, "F_2[x], |x| = 1");
  return GradedAlgebraPresentation(Ring::prime_field(p), {1, 2}, {}, cap,
                                   "Λ(x) ⊗ F_" + std::to_string(p) + "[y], |x| = 1, |y| = 2");
}

GradedAlgebraPresentation GradedAlgebraPresentation::polynomial(Ring field, std::vector<int> degrees, int cap,
                                                                std::string name) {
  return GradedAlgebraPresentation(field, std::move(degrees), {}, cap, std::move(name));
}

int GradedAlgebraPresentation::degree_of(const std::vector<int>& e) const {
  require(e.size() == degrees_.size(), ErrorCode::InvalidInput, "exponent vector of the wrong length");
  int d = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    require(e[i] >= 0, ErrorCode::InvalidInput, "negative exponent");
    d += e[i] * degrees_[i];
  }
  return d;
}

std::pair<int, std::vector<int>> GradedAlgebraPresentation::monomial_product(const std::vector<int>& a,
                                                                            const std::vector<int>& b) const {
  std::vector<int> e(a.size());
  long parity = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e[i] = a[i] + b[i];
    if (exterior(degrees_, field_, i) && e[i] > 1) return {0, {}};
    for (std::size_t j = 0; j < i; ++j) parity += static_cast<long>(a[i]) * b[j] * degrees_[i] * degrees_[j];
  }
  return {parity % 2 ? -1 : 1, e};
}

std::size_t GradedAlgebraPresentation::dim(int t) const {
  if (t < 0) return 0;
  if (t > cap_) fail(ErrorCode::CapExceeded, "degree " + std::to_string(t) + " above the cap " + std::to_string(cap_));
  return quot_[static_cast<std::size_t>(t)].size();
}

std::vector<std::size_t> GradedAlgebraPresentation::dims() const {
  std::vector<std::size_t> out;
  for (int t = 0; t <= cap_; ++t) out.push_back(dim(t));
  return out;
}

std::vector<Integer> GradedAlgebraPresentation::monomial_vector(const GradedPolynomial& f, int t) const {
  std::vector<Integer> v(monomials(t).size(), 0);
  for (const auto& [ex, c] : f.terms) {
    require(degree_of(ex) == t, ErrorCode::InvalidInput, "polynomial term of the wrong degree");
    bool dead = false;
    for (std::size_t i = 0; i < ex.size(); ++i)
      if (exterior(degrees_, field_, i) && ex[i] > 1) dead = true;
    if (!dead) v[index_[static_cast<std::size_t>(t)].at(ex)] += c;
  }
  for (auto& x : v) field_.normalize(x);
  return v;
}

std::vector<Integer> GradedAlgebraPresentation::coordinates(const GradedPolynomial& f, int t) const {
  if (t < 0) {
    require(f.terms.empty(), ErrorCode::InvalidInput, "polynomial of negative degree");
    return {};
  }
  dim(t);
  auto c = quotient(t).coordinates(monomial_vector(f, t));
  for (auto& x : c) field_.normalize(x);
  return c;
}

const std::vector<Integer>& GradedAlgebraPresentation::product(int s, std::size_t i, int t, std::size_t j) const {
  if (s + t > cap_) fail(ErrorCode::CapExceeded, "product above the degree cap");
  auto key = std::make_pair(s, t);
  auto it = table_.find(key);
  if (it == table_.end()) {
    const Subquotient& qs = quotient(s);
    const Subquotient& qt = quotient(t);
    const auto& target = index_[static_cast<std::size_t>(s + t)];
    std::vector<std::vector<std::vector<Integer>>> tab(qs.size(), std::vector<std::vector<Integer>>(qt.size()));
    for (std::size_t a = 0; a < qs.size(); ++a)
      for (std::size_t b = 0; b < qt.size(); ++b) {
        std::vector<Integer> v(monomials(s + t).size(), 0);
        for (std::size_t x = 0; x < monomials(s).size(); ++x) {
          const Integer& ca = qs.generators(x, a);
          if (ca == 0) continue;
          for (std::size_t y = 0; y < monomials(t).size(); ++y) {
            const Integer& cb = qt.generators(y, b);
            if (cb == 0) continue;
            auto [sg, prod] = monomial_product(monomials(s)[x], monomials(t)[y]);
            if (sg != 0) v[target.at(prod)] += ca * cb * sg;
          }
        }
        for (auto& x : v) field_.normalize(x);
        auto c = quotient(s + t).coordinates(v);
        for (auto& x : c) field_.normalize(x);
        tab[a][b] = std::move(c);
      }
    it = table_.emplace(key, std::move(tab)).first;
  }
  return it->second[i][j];
}

std::vector<Integer> GradedAlgebraPresentation::multiply(int s, const std::vector<Integer>& a, int t,
                                                         const std::vector<Integer>& b) const {
  std::vector<Integer> out(dim(s + t), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      const auto& p = product(s, i, t, j);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += a[i] * b[j] * p[k];
    }
  }
  for (auto& x : out) field_.normalize(x);
  return out;
}

// ---- graded free modules ----

namespace {

struct GradedFree {
  const GradedAlgebraPresentation* a = nullptr;
  std::vector<int> deg;

  std::size_t offset(int t, std::size_t j) const {
    std::size_t o = 0;
    for (std::size_t i = 0; i < j; ++i) o += a->dim(t - deg[i]);
    return o;
  }
  std::size_t dim(int t) const { return offset(t, deg.size()); }

  // basis element i of A_s times an element of degree u
  std::vector<Integer> times(int s, std::size_t i, int u, const std::vector<Integer>& v) const {
    std::vector<Integer> out(dim(s + u), 0);
    for (std::size_t j = 0; j < deg.size(); ++j) {
      const int cd = u - deg[j];
      if (cd < 0) continue;
      const std::size_t src = offset(u, j), dst = offset(s + u, j);
      for (std::size_t k = 0; k < a->dim(cd); ++k) {
        const Integer& c = v[src + k];
        if (c == 0) continue;
        const auto& p = a->product(s, i, cd, k);
        for (std::size_t m = 0; m < p.size(); ++m) out[dst + m] += c * p[m];
      }
    }
    for (auto& x : out) a->field().normalize(x);
    return out;
  }

  // degree-t part of the submodule generated by (degree, element) pairs
  Lattice span(const std::vector<std::pair<int, std::vector<Integer>>>& gens, int t) const {
    std::vector<std::vector<Integer>> cols;
    for (const auto& [d, v] : gens) {
      if (d > t) continue;
      for (std::size_t i = 0; i < a->dim(t - d); ++i) cols.push_back(times(t - d, i, d, v));
    }
    return span_columns(dim(t), a->field(), cols);
  }

  // degree-t component of the map sending generator j to images[j]
  Matrix map(const GradedFree& target, const std::vector<std::pair<int, std::vector<Integer>>>& images, int t) const {
    Matrix m(target.dim(t), dim(t), a->field());
    std::size_t col = 0;
    for (std::size_t j = 0; j < deg.size(); ++j) {
      const int s = t - deg[j];
      if (s < 0) continue;
      for (std::size_t i = 0; i < a->dim(s); ++i, ++col) {
        auto v = target.times(s, i, deg[j], images[j].second);
        for (std::size_t r = 0; r < v.size(); ++r) m.set(r, col, v[r]);
      }
    }
    return m;
  }
};

std::vector<std::pair<int, std::vector<Integer>>> relation_elements(const GradedModulePresentation& m,
                                                                    const GradedFree& f) {
  const auto& a = *m.algebra;
  std::vector<std::pair<int, std::vector<Integer>>> out;
  for (const auto& r : m.relations) {
    require(r.size() == m.degrees.size(), ErrorCode::InvalidInput, "module relation needs one entry per generator");
    std::optional<int> d;
    for (std::size_t j = 0; j < r.size(); ++j)
      if (!r[j].terms.empty()) {
        const int dj = a.degree_of(r[j].terms.begin()->first) + m.degrees[j];
        require(!d || *d == dj, ErrorCode::InvalidInput, "module relation is not homogeneous");
        d = dj;
      }
    if (!d) continue;
    if (*d > a.cap()) fail(ErrorCode::CapExceeded, "module relation above the degree cap");
    std::vector<Integer> v(f.dim(*d), 0);
    for (std::size_t j = 0; j < r.size(); ++j) {
      auto c = a.coordinates(r[j], *d - m.degrees[j]);
      const std::size_t o = f.offset(*d, j);
      for (std::size_t k = 0; k < c.size(); ++k) v[o + k] = c[k];
    }
    out.emplace_back(*d, std::move(v));
  }
  return out;
}

GradedPolynomial monomial(std::size_t vars, std::size_t i, int power) {
  std::vector<int> e(vars, 0);
  e[i] = power;
  GradedPolynomial p;
  p.terms[e] = 1;
  return p;
}

Lattice kernel_lattice(const Matrix& m) {
  if (m.rows() == 0) return Lattice::whole(m.cols(), m.ring());
  if (m.cols() == 0) return Lattice(0, m.ring());
  return Lattice::span(kernel_basis(m));
}

}  // namespace

std::vector<std::size_t> GradedModulePresentation::dims(int tmax) const {
  require(algebra != nullptr, ErrorCode::InvalidInput, "module presentation without an algebra");
  if (tmax > algebra->cap()) fail(ErrorCode::CapExceeded, "module degrees above the algebra cap");
  GradedFree f{algebra, degrees};
  auto rels = relation_elements(*this, f);
  std::vector<std::size_t> out;
  for (int t = 0; t <= tmax; ++t) out.push_back(f.dim(t) - f.span(rels, t).rank());
  return out;
}

GradedModulePresentation truncated_module(const GradedAlgebraPresentation& a, int generator, int power) {
  require(generator >= 0 && static_cast<std::size_t>(generator) < a.degrees().size(), ErrorCode::InvalidInput,
          "no such algebra generator");
  GradedModulePresentation m;
  m.algebra = &a;
  m.degrees = {0};
  m.relations.push_back({monomial(a.degrees().size(), static_cast<std::size_t>(generator), power)});
  return m;
}

GradedModulePresentation free_module(const GradedAlgebraPresentation& a) {
  GradedModulePresentation m;
  m.algebra = &a;
  m.degrees = {0};
  return m;
}

GradedModulePresentation residue_field(const GradedAlgebraPresentation& a) {
  GradedModulePresentation m;
  m.algebra = &a;
  m.degrees = {0};
  for (std::size_t i = 0; i < a.degrees().size(); ++i) m.relations.push_back({monomial(a.degrees().size(), i, 1)});
  return m;
}

std::size_t BigradedPage::at(int s, int t) const {
  auto it = entries.find({s, t});
  return it == entries.end() ? 0 : it->second;
}

std::size_t BigradedPage::total(int n) const {
  std::size_t sum = 0;
  for (const auto& [st, d] : entries)
    if (st.second - st.first == n) sum += d;
  return sum;
}

bool BigradedPage::sparse() const {
  std::map<int, int> count;
  for (const auto& [st, d] : entries)
    if (d && ++count[st.second - st.first] > 1) return false;
  return true;
}

BigradedPage bigraded_tor(const GradedModulePresentation& m, TorCaps caps) {
  require(m.algebra != nullptr, ErrorCode::InvalidInput, "module presentation without an algebra");
  const auto& a = *m.algebra;
  require(caps.s_max >= 0 && caps.t_max >= 0, ErrorCode::InvalidInput, "negative Tor caps");
  if (caps.t_max > a.cap())
    fail(ErrorCode::CapExceeded, "internal degree cap " + std::to_string(caps.t_max) + " above the presentation cap " +
                                     std::to_string(a.cap()));
  const Ring k = a.field();
  using Gens = std::vector<std::pair<int, std::vector<Integer>>>;
  std::vector<GradedFree> F{GradedFree{&a, m.degrees}};
  std::vector<Gens> images(1);
  const Gens rels = relation_elements(m, F[0]);
  for (int s = 1; s <= caps.s_max; ++s) {
    const GradedFree& prev = F.back();
    Gens chosen;
    for (int t = 0; t <= caps.t_max; ++t) {
      Lattice ker = s == 1 ? prev.span(rels, t)
                           : kernel_lattice(prev.map(F[static_cast<std::size_t>(s) - 2], images.back(), t));
      Lattice have = prev.span(chosen, t);
      Matrix basis = ker.basis();
      for (std::size_t j = 0; j < basis.cols(); ++j) {
        auto v = basis.column_vector(j);
        if (have.contains(v)) continue;
        chosen.emplace_back(t, v);
        have = have + Lattice::span(basis.column(j));
      }
    }
    std::vector<int> degs;
    for (const auto& c : chosen) degs.push_back(c.first);
    F.push_back(GradedFree{&a, degs});
    images.push_back(std::move(chosen));
  }
  BigradedPage page;
  page.s_max = caps.s_max;
  page.t_max = caps.t_max;
  for (int t = 0; t <= caps.t_max; ++t) {
    // resolution ⊗_A k in internal degree t: generators of degree t, A_0-components of the differential
    std::vector<std::vector<std::size_t>> gens(F.size());
    for (std::size_t s = 0; s < F.size(); ++s)
      for (std::size_t j = 0; j < F[s].deg.size(); ++j)
        if (F[s].deg[j] == t) gens[s].push_back(j);
    std::vector<std::size_t> rank(F.size() + 1, 0);
    for (std::size_t s = 1; s < F.size(); ++s) {
      Matrix d(gens[s - 1].size(), gens[s].size(), k);
      for (std::size_t c = 0; c < gens[s].size(); ++c) {
        const auto& img = images[s][gens[s][c]].second;
        for (std::size_t r = 0; r < gens[s - 1].size(); ++r) d.set(r, c, img[F[s - 1].offset(t, gens[s - 1][r])]);
      }
      rank[s] = rank_of(d);
    }
    for (std::size_t s = 0; s < F.size(); ++s) {
      const std::size_t dim = gens[s].size() - rank[s] - rank[s + 1];
      if (dim) page.entries[{static_cast<int>(s), t}] = dim;
    }
  }
  return page;
}

PresentationVerdict validate_presentation(const GradedAlgebraPresentation& a, const GroupPtr& g, int cap) {
  if (cap > a.cap()) fail(ErrorCode::CapExceeded, "validation cap above the presentation cap");
  PresentationVerdict v;
  for (int t = 0; t <= cap; ++t) v.algebra_dims.push_back(a.dim(t));
  const GModule k = GModule::trivial(g, a.field());
  v.ext_dims = ext_range(k, k, 0, cap).dims();
  v.match = true;
  for (int t = 0; t <= cap; ++t)
    if (v.algebra_dims[static_cast<std::size_t>(t)] != v.ext_dims[static_cast<std::size_t>(t)]) {
      v.match = false;
      v.first_mismatch = t;
      break;
    }
  return v;
}

// ---- targets ----

std::map<int, LocalGroup> cell_homotopy(const CellResult& r, int lo, int hi) {
  std::map<int, LocalGroup> out;
  const Ring ring = r.input.ring();
  for (int n = lo; n <= hi; ++n) out[n] = zero_group(ring);
  if (!r.homotopy.empty()) {
    for (const auto& e : r.homotopy)
      if (e.n >= lo && e.n <= hi) out[e.n] = e.value ? *e.value : add(e.sub, e.quotient);
    return out;
  }
  const GComplex& c = r.approximation;
  if (c.empty()) return out;
  for (int n = std::max(lo, c.lo()); n <= std::min(hi, c.hi()); ++n) out[n] = LocalGroup{c.homology(n), {}};
  return out;
}

std::vector<std::size_t> TargetReport::dims() const {
  std::vector<std::size_t> out;
  for (const auto& g : target) out.push_back(size_of(g));
  return out;
}

TargetReport emss_target(const GComplex& cochains, int lo, int hi, const std::string& strategy) {
  require(lo <= hi, ErrorCode::BadWindow, "empty degree range");
  TargetReport rep;
  rep.lo = lo;
  rep.hi = hi;
  rep.cell = cellular_approximation(cochains, strategy);
  auto pi = cell_homotopy(rep.cell, -hi, -lo);
  for (int n = lo; n <= hi; ++n) rep.target.push_back(pi.at(-n));
  const GroupPtr& g = cochains.group();
  const Ring ring = cochains.ring();
  bool orbit_ok = true;
  if (ring.is_field() && g->is_p_group(ring.p)) {
    rep.theorem = "p-group";
    for (int n = lo; n <= hi; ++n) rep.prediction.push_back(LocalGroup{cochains.homology(-n), {}});
  } else if (ring.is_field() && g->is_nilpotent()) {
    rep.theorem = "nilpotent";
    SylowSplit split = sylow_decomposition(g, ring.p);
    for (int n = lo; n <= hi; ++n)
      rep.prediction.push_back(
          LocalGroup{fixed_points(cochains.homology_module(-n).module(), split.H).module.underlying(), {}});
    OrbitCochains orbit = homotopy_orbit_cochains(cochains, split.H, lo, hi);
    orbit_ok = orbit.agrees_with_fixed;
    for (int n = lo; n <= hi; ++n)
      if (orbit.groups.at(n).num_generators() != size_of(rep.prediction[static_cast<std::size_t>(n - lo)]))
        orbit_ok = false;
    rep.notes.push_back(std::string("H^*(F_hH) ") + (orbit_ok ? "agrees" : "disagrees") + " with H^*(F)^H");
  } else if (!ring.is_field() && first_generator(*g)) {
    rep.theorem = "cyclic";
    std::vector<GModule> coh;
    for (int n = 0; n <= std::max(hi, -cochains.lo()); ++n) coh.push_back(cochains.homology_module(-n).module());
    PiSequence seq = cyclic_pi1_sequence(coh, *first_generator(*g));
    for (int n = lo; n <= hi; ++n) {
      LocalGroup v = zero_group(ring);
      for (const auto& e : seq.entries)
        if (e.n == n) v = e.value ? *e.value : add(e.sub, e.quotient);
      rep.prediction.push_back(v);
    }
    rep.notes.push_back(seq.note);
  } else {
    rep.theorem = "none";
  }
  rep.matches = orbit_ok;
  for (std::size_t i = 0; i < rep.prediction.size(); ++i)
    if (!same_group(rep.prediction[i], rep.target[i])) rep.matches = false;
  return rep;
}

TargetReport emss_target(const GSimplicialComplex& f, Ring ring, const std::string& strategy) {
  return emss_target(cochains_of(f, ring), 0, std::max(f.dimension(), 0), strategy);
}

E2Report emss_e2_vs_target(const GSimplicialComplex& f, Ring ring, const GradedAlgebraPresentation& a,
                           const GradedModulePresentation& m, TorCaps caps) {
  if (!(a.field() == ring)) fail(ErrorCode::CoefficientMismatch, "presentation field differs from the coefficients");
  require(m.algebra == &a, ErrorCode::InvalidInput, "module presentation over a different algebra");
  E2Report rep;
  std::ostringstream os;
  rep.algebra = validate_presentation(a, f.group(), std::min(a.cap(), caps.t_max));
  if (!rep.algebra.match) os << "algebra presentation disagrees with Ext(k, k) at degree " << rep.algebra.first_mismatch
                             << "; dims-only mode; ";
  const GComplex x = cochains_of(f, ring);
  rep.borel_dims = borel_cochains(x, 0, caps.t_max).dims();
  rep.module_dims = m.dims(caps.t_max);
  rep.module_matches = rep.borel_dims == rep.module_dims;
  if (!rep.module_matches) os << "module presentation disagrees with H^*(E); ";
  rep.e2 = bigraded_tor(m, caps);
  rep.target = emss_target(x, 0, std::max(f.dimension(), 0));
  const auto tdims = rep.target.dims();
  rep.totals_match = true;
  for (int n = 0; n <= caps.t_max - caps.s_max; ++n) {
    rep.totals.push_back(rep.e2.total(n));
    const std::size_t want = static_cast<std::size_t>(n) < tdims.size() ? tdims[static_cast<std::size_t>(n)] : 0;
    if (rep.totals.back() != want) rep.totals_match = false;
  }
  rep.collapse_forced = rep.e2.sparse();
  rep.e2_finite = true;
  for (const auto& [st, d] : rep.e2.entries) {
    rep.euler_e2 += (st.second - st.first) % 2 ? -static_cast<long>(d) : static_cast<long>(d);
    if (st.first == caps.s_max) rep.e2_finite = false;
  }
  for (std::size_t n = 0; n < tdims.size(); ++n)
    rep.euler_target += n % 2 ? -static_cast<long>(tdims[n]) : static_cast<long>(tdims[n]);
  if (rep.collapse_forced && rep.totals_match)
    os << "forced collapse: at most one E² entry per total degree and the sums equal the target";
  else if (rep.collapse_forced)
    os << "mismatch: E² has at most one entry per total degree but the sums differ from the target";
  else if (rep.totals_match)
    os << "sums equal the target; collapse is not forced by sparsity";
  else
    os << "associated-graded mismatch unresolved: several E² entries on a total-degree line and the sums differ from "
          "the target; no collapse";
  rep.verdict = os.str();
  return rep;
}

// ---- the Postnikov spectral sequence ----

namespace {

using Key = std::pair<int, int>;

// E¹ from the layer modules: π of the approximation of H placed in one degree.
std::optional<std::map<Key, LocalGroup>> e1_formula(const std::vector<GModule>& layers, int top,
                                                    const std::string& strategy) {
  std::map<Key, LocalGroup> out;
  for (std::size_t p = 0; p < layers.size(); ++p) {
    const GModule& m = layers[p];
    const int deg = top - static_cast<int>(p);
    const int pp = static_cast<int>(p);
    if (strategy == "p-group" || strategy == "nilpotent-action") {
      out[{pp, deg}] = LocalGroup{m.underlying(), {}};
    } else if (strategy == "nilpotent") {
      SylowSplit split = sylow_decomposition(m.group(), m.ring().p);
      out[{pp, deg}] = LocalGroup{fixed_points(m, split.H).module.underlying(), {}};
    } else if (strategy == "cyclic") {
      TorsionReport tr = torsion_report(m, *first_generator(*m.group()));
      out[{pp, deg}] = LocalGroup{tr.gamma.data.sq.group, {}};
      out[{pp, deg - 1}] = tr.quotient;
    } else {
      return std::nullopt;
    }
  }
  return out;
}

bool entries_agree(const std::map<Key, LocalGroup>& a, const std::map<Key, LocalGroup>& b) {
  std::set<Key> keys;
  for (const auto& [k, g] : a) keys.insert(k);
  for (const auto& [k, g] : b) keys.insert(k);
  for (const auto& k : keys) {
    auto ia = a.find(k);
    auto ib = b.find(k);
    const bool za = ia == a.end() || ia->second.is_zero();
    const bool zb = ib == b.end() || ib->second.is_zero();
    if (za && zb) continue;
    if (za != zb || !same_group(ia->second, ib->second)) return false;
  }
  return true;
}

// relations of a subquotient in its generator coordinates
Lattice generator_relations(const Subquotient& q) {
  std::vector<std::vector<Integer>> cols;
  for (std::size_t j = 0; j < q.size(); ++j)
    if (q.orders[j] != 0) {
      std::vector<Integer> v(q.size(), 0);
      v[j] = q.orders[j];
      cols.push_back(v);
    }
  return span_columns(q.size(), q.ring, cols);
}

class FilteredModel {
 public:
  FilteredModel(const GComplex& x, const CellResult& cell) : x_(x), c_(cell.approximation), iota_(cell.map) {}

  const GComplex& complex() const { return c_; }

  // preimage of the window filtration τ_{≥ top−p} X
  const Lattice& G(int p, int n) {
    const int P = x_.hi() - x_.lo();
    p = std::clamp(p, -1, P);
    auto key = std::make_pair(p, n);
    auto it = g_.find(key);
    if (it != g_.end()) return it->second;
    Lattice f;
    const int cut = x_.hi() - p;
    if (p < 0 || n < cut)
      f = x_.module(n).relation_lattice();
    else if (n == cut)
      f = x_.cycles(n);
    else
      f = Lattice::whole(x_.rank(n), x_.ring());
    return g_.emplace(key, Lattice::preimage(iota_.at(n), f)).first->second;
  }

  const Lattice& Z(int r, int p, int n) {
    auto key = std::make_tuple(r, std::clamp(p, -1 - r, x_.hi() - x_.lo() + r + 1), n);
    auto it = z_.find(key);
    if (it != z_.end()) return it->second;
    Lattice z = G(p, n).intersect(Lattice::preimage(c_.d(n), G(p - r, n - 1)));
    return z_.emplace(key, std::move(z)).first->second;
  }

  const Subquotient& E(int r, int p, int n) {
    auto key = std::make_tuple(r, p, n);
    auto it = e_.find(key);
    if (it != e_.end()) return it->second;
    Lattice den = Z(r - 1, p - 1, n) + Lattice::image(c_.d(n + 1), Z(r - 1, p + r - 1, n + 1));
    return e_.emplace(key, subquotient(Z(r, p, n), den)).first->second;
  }

 private:
  GComplex x_, c_;
  ComplexMap iota_;
  std::map<Key, Lattice> g_;
  std::map<std::tuple<int, int, int>, Lattice> z_;
  std::map<std::tuple<int, int, int>, Subquotient> e_;
};

bool columns_in(const Matrix& m, const Lattice& l) {
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (!l.contains(m.column_vector(j))) return false;
  return true;
}

}  // namespace

SSReport postnikov_ss(const GComplex& x, const std::string& strategy, CellRange range) {
  SSReport rep;
  const Ring ring = x.ring();
  if (x.empty()) {
    rep.mode = "exact";
    rep.e1_matches_formula = rep.abutment_matches = rep.pages_consistent = true;
    rep.pages.push_back(SSPage{});
    rep.notes.push_back("empty complex");
    return rep;
  }
  const int top = x.hi();
  const int P = x.hi() - x.lo();
  CellResult whole = cellular_approximation(x, strategy, range);
  rep.direct = cell_homotopy(whole, x.lo() - 2, x.hi() + 1);
  std::vector<GModule> layers;
  for (int p = 0; p <= P; ++p) layers.push_back(x.homology_module(top - p).module());
  const auto formula = e1_formula(layers, top, whole.strategy);
  const bool exact = whole.strategy == "p-group" || whole.strategy == "nilpotent" ||
                     whole.strategy == "nilpotent-action" ||
                     (whole.strategy == "cyclic" && whole.verification.method != "colimit");
  rep.notes.push_back("strategy " + whole.strategy);
  if (exact) {
    rep.mode = "exact";
    FilteredModel model(x, whole);
    const GComplex& c = model.complex();
    const int nlo = c.empty() ? 0 : c.lo(), nhi = c.empty() ? -1 : c.hi();
    bool consistent = true;
    int last_nonzero = 0;
    for (int r = 1; r <= P + 1; ++r) {
      SSPage page;
      page.r = r;
      for (int p = 0; p <= P; ++p)
        for (int n = nlo; n <= nhi; ++n) {
          const Subquotient& e = model.E(r, p, n);
          if (e.size()) page.entries[{p, n}] = LocalGroup{e.group, {}};
        }
      for (int p = r; p <= P; ++p)
        for (int n = nlo + 1; n <= nhi; ++n) {
          const Subquotient& src = model.E(r, p, n);
          const Subquotient& dst = model.E(r, p - r, n - 1);
          if (!src.size() || !dst.size()) continue;
          Matrix d(dst.size(), src.size(), ring);
          Matrix image = c.d(n) * src.generators;
          for (std::size_t j = 0; j < src.size(); ++j) {
            auto v = dst.coordinates(image.column_vector(j));
            for (std::size_t i = 0; i < v.size(); ++i) d.set(i, j, v[i]);
          }
          if (!columns_in(d, generator_relations(dst))) last_nonzero = r;
          page.differentials[{p, n}] = d;
        }
      // d∘d = 0
      for (const auto& [k, d1] : page.differentials) {
        auto it = page.differentials.find({k.first - r, k.second - 1});
        if (it == page.differentials.end()) continue;
        if (!columns_in(it->second * d1, generator_relations(model.E(r, k.first - 2 * r, k.second - 2))))
          consistent = false;
      }
      // E^{r+1} = H(E^r, d_r)
      for (int p = 0; p <= P; ++p)
        for (int n = nlo; n <= nhi; ++n) {
          const Subquotient& here = model.E(r, p, n);
          Lattice ker = Lattice::whole(here.size(), ring);
          auto out = page.differentials.find({p, n});
          if (out != page.differentials.end())
            ker = Lattice::preimage(out->second, generator_relations(model.E(r, p - r, n - 1)));
          Lattice im = generator_relations(here);
          auto in = page.differentials.find({p + r, n + 1});
          if (in != page.differentials.end())
            im = im + Lattice::image(in->second, Lattice::whole(in->second.cols(), ring));
          const FgAbelianGroup h = subquotient(ker, im).group;
          const FgAbelianGroup next = model.E(r + 1, p, n).group;
          if (!(h.free_rank == next.free_rank && h.torsion == next.torsion)) consistent = false;
        }
      rep.pages.push_back(std::move(page));
    }
    rep.stable_page = last_nonzero + 1;
    rep.pages_consistent = consistent;
    for (int n = nlo; n <= nhi; ++n) {
      LocalGroup sum = zero_group(ring);
      for (int p = 0; p <= P; ++p) sum = add(sum, LocalGroup{model.E(P + 2, p, n).group, {}});
      rep.abutment[n] = sum;
    }
    rep.notes.push_back("pages from the filtration of the approximation by preimages of the windows x⟨−p, 0⟩");
    if (formula) {
      rep.e1_matches_formula = entries_agree(rep.pages.front().entries, *formula);
    } else {
      rep.notes.push_back("no closed E¹ formula for this strategy");
    }
  } else {
    rep.mode = "homotopy";
    SSPage page;
    page.r = 1;
    for (int p = 0; p <= P; ++p) {
      const int deg = top - p;
      CellResult layer = cellular_approximation(GComplex::concentrated(layers[static_cast<std::size_t>(p)], deg),
                                                whole.strategy, range);
      for (const auto& [n, g] : cell_homotopy(layer, deg - 2, deg + 1))
        if (!g.is_zero()) page.entries[{p, n}] = g;
    }
    bool blocked = false;
    for (const auto& [k, g] : page.entries)
      for (int r = 1; r <= P; ++r)
        if (page.entries.count({k.first - r, k.second - 1})) blocked = true;
    rep.e1_matches_formula = formula ? entries_agree(page.entries, *formula) : false;
    if (!formula) rep.notes.push_back("no closed E¹ formula for this strategy");
    for (const auto& [k, g] : page.entries) {
      auto it = rep.abutment.emplace(k.second, zero_group(ring)).first;
      it->second = add(it->second, g);
    }
    if (blocked) {
      rep.pages_consistent = false;
      rep.stable_page = P + 1;
      rep.notes.push_back("E¹ from the cellular approximations of the layers; differentials between nonzero entries "
                          "are not determined without a finite model, abutment shown is E¹");
    } else {
      rep.pages_consistent = true;
      rep.stable_page = 1;
      rep.notes.push_back("E¹ from the cellular approximations of the layers; every differential has a zero source "
                          "or target, so the sequence collapses at E¹");
    }
    rep.pages.push_back(std::move(page));
  }
  rep.abutment_matches = true;
  std::set<int> degrees;
  for (const auto& [n, g] : rep.abutment) degrees.insert(n);
  for (const auto& [n, g] : rep.direct) degrees.insert(n);
  for (int n : degrees) {
    const LocalGroup a = rep.abutment.count(n) ? rep.abutment.at(n) : zero_group(ring);
    const LocalGroup d = rep.direct.count(n) ? rep.direct.at(n) : zero_group(ring);
    if (!(same_group(a, d) || (!ring.is_field() && same_invariants(a, d)))) rep.abutment_matches = false;
  }
  return rep;
}

}  // namespace kcell
