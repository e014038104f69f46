#include "kcell/module.hpp"

#include <algorithm>
#include <sstream>

#include "kcell/errors.hpp"

namespace kcell {

namespace {

std::vector<int> subgroup_generators(const FiniteGroup& g, const Subgroup& h) {
  std::vector<int> gens;
  Subgroup span{0};
  for (int x : h) {
    if (std::binary_search(span.begin(), span.end(), x)) continue;
    gens.push_back(x);
    span = g.closure(gens);
  }
  return gens;
}

}  // namespace

GModule::GModule(GroupPtr g, Ring ring, std::size_t rank, Matrix relations, std::vector<Matrix> action)
    : group_(std::move(g)), ring_(ring), rank_(rank), relations_(std::move(relations)), action_(std::move(action)) {
  require(group_ != nullptr, ErrorCode::InvalidInput, "module without a group");
  require(relations_.rows() == rank_, ErrorCode::InvalidInput, "relations have wrong row count");
  if (!(relations_.ring() == ring_)) fail(ErrorCode::CoefficientMismatch, "relations over a different ring");
  rel_lattice_ = Lattice::span(relations_);
  validate();
}

GModule GModule::trusted(GroupPtr g, Ring ring, std::size_t rank, Matrix relations, std::vector<Matrix> action) {
  GModule m;
  m.group_ = std::move(g);
  m.ring_ = ring;
  m.rank_ = rank;
  m.relations_ = std::move(relations);
  m.action_ = std::move(action);
  m.rel_lattice_ = Lattice::span(m.relations_);
  return m;
}

void GModule::validate() const {
  const int n = group_->order();
  require(static_cast<int>(action_.size()) == n, ErrorCode::BadAction,
          "expected " + std::to_string(n) + " action matrices, got " + std::to_string(action_.size()));
  for (const auto& a : action_) {
    require(a.rows() == rank_ && a.cols() == rank_, ErrorCode::BadAction, "action matrix has wrong shape");
    if (!(a.ring() == ring_)) fail(ErrorCode::CoefficientMismatch, "action matrix over a different ring");
  }
  require(same_elements(action_[0], Matrix::identity(rank_, ring_)), ErrorCode::BadAction,
          "identity element does not act as the identity");
  for (int s : group_->generators()) {
    require(rel_lattice_.contains_columns(action_[s] * relations_), ErrorCode::BadAction,
            "action of element " + std::to_string(s) + " does not preserve the relations");
    for (int g = 0; g < n; ++g)
      require(same_elements(action_[group_->mul(g, s)], action_[g] * action_[s]), ErrorCode::BadAction,
              "action(" + std::to_string(g) + "*" + std::to_string(s) + ") != action(" + std::to_string(g) +
                  ")*action(" + std::to_string(s) + ")");
  }
}

GModule GModule::zero(GroupPtr g, Ring ring) {
  const int n = g->order();
  return trusted(std::move(g), ring, 0, Matrix(0, 0, ring), std::vector<Matrix>(n, Matrix(0, 0, ring)));
}

GModule GModule::trivial(GroupPtr g, Ring ring, std::size_t rank) {
  const int n = g->order();
  return trusted(std::move(g), ring, rank, Matrix(rank, 0, ring),
                 std::vector<Matrix>(n, Matrix::identity(rank, ring)));
}

GModule GModule::free(GroupPtr g, Ring ring, std::size_t r) {
  const int n = g->order();
  const std::size_t d = r * static_cast<std::size_t>(n);
  std::vector<Matrix> act(n, Matrix(d, d, ring));
  for (int h = 0; h < n; ++h)
    for (std::size_t i = 0; i < r; ++i)
      for (int x = 0; x < n; ++x) act[h](i * n + g->mul(h, x), i * n + x) = 1;
  return trusted(std::move(g), ring, d, Matrix(d, 0, ring), std::move(act));
}

GModule GModule::character(GroupPtr g, Ring ring, const std::vector<int>& chi) {
  require(static_cast<int>(chi.size()) == g->order(), ErrorCode::InvalidInput, "character has wrong length");
  std::vector<Matrix> act;
  for (int c : chi) {
    require(c == 1 || c == -1, ErrorCode::InvalidInput, "character values must be +1 or -1");
    Matrix a(1, 1, ring);
    a.set(0, 0, c);
    act.push_back(a);
  }
  return GModule(std::move(g), ring, 1, Matrix(1, 0, ring), std::move(act));
}

GModule GModule::cyclic_torsion(GroupPtr g, Ring ring, const Integer& m, const std::vector<int>& chi) {
  std::vector<int> c = chi.empty() ? std::vector<int>(g->order(), 1) : chi;
  require(static_cast<int>(c.size()) == g->order(), ErrorCode::InvalidInput, "character has wrong length");
  Matrix rel(1, 1, ring);
  rel.set(0, 0, m);
  std::vector<Matrix> act;
  for (int v : c) {
    Matrix a(1, 1, ring);
    a.set(0, 0, v);
    act.push_back(a);
  }
  return GModule(std::move(g), ring, 1, std::move(rel), std::move(act));
}

GModule GModule::from_generators(GroupPtr g, Ring ring, std::size_t rank, Matrix relations,
                                 const std::vector<int>& gens, const std::vector<Matrix>& gen_action) {
  require(gens.size() == gen_action.size(), ErrorCode::InvalidInput, "generator/action count mismatch");
  const int n = g->order();
  std::vector<Matrix> act(n);
  std::vector<bool> known(n, false);
  act[0] = Matrix::identity(rank, ring);
  known[0] = true;
  std::vector<int> queue{0};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const int x = queue[i];
    for (std::size_t s = 0; s < gens.size(); ++s) {
      require(gen_action[s].rows() == rank && gen_action[s].cols() == rank, ErrorCode::BadAction,
              "generator action has wrong shape");
      const int y = g->mul(x, gens[s]);
      if (known[y]) continue;
      act[y] = act[x] * gen_action[s].over(ring);
      known[y] = true;
      queue.push_back(y);
    }
  }
  for (int x = 0; x < n; ++x)
    require(known[x], ErrorCode::BadAction, "listed generators do not generate the group");
  GModule m(std::move(g), ring, rank, std::move(relations), std::move(act));
  // The closure only used right multiplication; check the listed data really is an action.
  for (std::size_t s = 0; s < gens.size(); ++s)
    require(m.same_elements(m.action(gens[s]), gen_action[s].over(ring)), ErrorCode::BadAction,
            "generator relations violated by the given matrices");
  return m;
}

GModule GModule::permutation(GroupPtr g, Ring ring, const std::vector<std::vector<int>>& perms) {
  require(static_cast<int>(perms.size()) == g->order(), ErrorCode::InvalidInput, "need one permutation per element");
  const std::size_t d = perms.empty() ? 0 : perms[0].size();
  std::vector<Matrix> act;
  for (const auto& p : perms) {
    require(p.size() == d, ErrorCode::InvalidInput, "permutations of different sizes");
    Matrix a(d, d, ring);
    for (std::size_t i = 0; i < d; ++i) a(static_cast<std::size_t>(p[i]), i) = 1;
    act.push_back(a);
  }
  return GModule(std::move(g), ring, d, Matrix(d, 0, ring), std::move(act));
}

FgAbelianGroup GModule::underlying() const { return subquotient(Lattice::whole(rank_, ring_), rel_lattice_).group; }

bool GModule::is_zero() const { return rel_lattice_.rank() == rank_ && underlying().is_zero(); }

bool GModule::same_elements(const Matrix& a, const Matrix& b) const {
  if (!has_relations()) return a == b;
  return rel_lattice_.contains_columns(a - b);
}

bool GModule::is_zero_element(const std::vector<Integer>& v) const { return rel_lattice_.contains(v); }

GModule GModule::direct_sum(const GModule& other) const {
  require(group_->table() == other.group_->table(), ErrorCode::InvalidInput, "direct sum over different groups");
  if (!(ring_ == other.ring_)) fail(ErrorCode::CoefficientMismatch, "direct sum over different rings");
  std::vector<Matrix> act;
  for (std::size_t g = 0; g < action_.size(); ++g) act.push_back(Matrix::block_diag(action_[g], other.action_[g]));
  return trusted(group_, ring_, rank_ + other.rank_, Matrix::block_diag(relations_, other.relations_),
                 std::move(act));
}

GModule GModule::with_group(GroupPtr g, std::vector<Matrix> action) const {
  return GModule(std::move(g), ring_, rank_, relations_, std::move(action));
}

GModule::Canonical GModule::canonical() const {
  SmithForm sf = smith_normal_form(relations_);
  std::vector<std::size_t> keep;
  std::vector<Integer> orders;
  for (std::size_t i = 0; i < rank_; ++i) {
    Integer d = i < sf.invariant_factors.size() ? sf.invariant_factors[i] : Integer(0);
    if (ring_.is_field() ? d != 0 : d == 1) continue;
    keep.push_back(i);
    orders.push_back(d);
  }
  Matrix proj = sf.U.select_rows(keep);
  Matrix lift = sf.U_inv.select_columns(keep);
  const std::size_t r = keep.size();
  std::vector<Matrix> cols;
  for (std::size_t j = 0; j < r; ++j) {
    if (orders[j] == 0) continue;
    Matrix c(r, 1, ring_);
    c(j, 0) = orders[j];
    cols.push_back(c);
  }
  Matrix rel = Matrix::hstack_all(cols, r, ring_);
  std::vector<Matrix> act;
  for (const auto& a : action_) {
    Matrix b = proj * a * lift;
    for (std::size_t i = 0; i < r; ++i)
      if (orders[i] != 0)
        for (std::size_t j = 0; j < r; ++j) mpz_fdiv_r(b(i, j).get_mpz_t(), b(i, j).get_mpz_t(), orders[i].get_mpz_t());
    act.push_back(b);
  }
  return Canonical{trusted(group_, ring_, r, rel, std::move(act)), proj, lift};
}

std::string GModule::describe() const {
  std::ostringstream os;
  os << "module over " << ring_.name() << "[" << group_->label() << "] with " << rank_ << " generators";
  if (has_relations()) os << " and " << relations_.cols() << " relations";
  os << " (underlying " << underlying().to_string() << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

bool is_equivariant(const GModule& s, const GModule& t, const Matrix& m, std::string* why) {
  auto bad = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (m.rows() != t.rank() || m.cols() != s.rank()) return bad("map matrix has wrong shape");
  if (!(m.ring() == s.ring()) || !(s.ring() == t.ring())) return bad("rings differ");
  if (!t.relation_lattice().contains_columns(m * s.relations())) return bad("map does not respect relations");
  for (int g : s.group()->generators())
    if (!t.same_elements(m * s.action(g), t.action(g) * m))
      return bad("map does not commute with element " + std::to_string(g));
  return true;
}

GModuleMap::GModuleMap(GModule s, GModule t, Matrix m) : source(std::move(s)), target(std::move(t)), matrix(std::move(m)) {
  std::string why;
  if (!is_equivariant(source, target, matrix, &why)) fail(ErrorCode::BadAction, "module map: " + why);
}

GModuleMap GModuleMap::identity(const GModule& m) { return GModuleMap(m, m, Matrix::identity(m.rank(), m.ring())); }

GModuleMap GModuleMap::zero(const GModule& s, const GModule& t) {
  return GModuleMap(s, t, Matrix(t.rank(), s.rank(), s.ring()));
}

GModuleMap GModuleMap::compose_after(const GModuleMap& first) const {
  return GModuleMap(first.source, target, matrix * first.matrix);
}

bool GModuleMap::is_zero() const { return target.relation_lattice().contains_columns(matrix); }

Matrix free_map_matrix(const GModule& m, const Matrix& images) {
  const int n = m.group()->order();
  Matrix out(m.rank(), images.cols() * static_cast<std::size_t>(n), m.ring());
  for (std::size_t i = 0; i < images.cols(); ++i) {
    Matrix col = images.column(i);
    for (int g = 0; g < n; ++g) out.set_block(0, i * n + g, m.action(g) * col);
  }
  return out;
}

SubquotientModule make_subquotient_module(const GroupPtr& g, Ring ring, const std::vector<Matrix>& action,
                                          const Lattice& num, const Lattice& den) {
  SubquotientModule out;
  out.sq = subquotient(num, den);
  out.reps = out.sq.generators;
  const std::size_t r = out.sq.size();
  std::vector<Matrix> cols;
  for (std::size_t j = 0; j < r; ++j) {
    if (out.sq.orders[j] == 0) continue;
    Matrix c(r, 1, ring);
    c(j, 0) = out.sq.orders[j];
    cols.push_back(c);
  }
  std::vector<Matrix> act;
  act.reserve(action.size());
  for (const auto& a : action) act.push_back(out.sq.coordinates_of(a * out.reps));
  out.module = GModule(g, ring, r, Matrix::hstack_all(cols, r, ring), std::move(act));
  return out;
}

Lattice fixed_lattice(const GModule& m, const Subgroup& h) {
  const auto& g = *m.group();
  require(g.is_subgroup(h), ErrorCode::BadSubgroup, "fixed points: not a subgroup");
  Lattice l = Lattice::whole(m.rank(), m.ring());
  const Matrix id = Matrix::identity(m.rank(), m.ring());
  for (int x : subgroup_generators(g, h)) l = l.intersect(Lattice::preimage(m.action(x) - id, m.relation_lattice()));
  return l;
}

FixedPoints fixed_points(const GModule& m, const Subgroup& h) {
  require(m.group()->is_normal(h), ErrorCode::BadSubgroup, "fixed points require a normal subgroup");
  auto sm = make_subquotient_module(m.group(), m.ring(), m.actions(), fixed_lattice(m, h), m.relation_lattice());
  GModuleMap incl(sm.module, m, sm.reps);
  return FixedPoints{sm.module, incl};
}

Lattice augmentation_image(const GModule& m, const Lattice& l) {
  const Matrix id = Matrix::identity(m.rank(), m.ring());
  const Matrix b = l.basis();
  std::vector<Matrix> parts{m.relations()};
  for (int g = 1; g < m.group()->order(); ++g) parts.push_back((m.action(g) - id) * b);
  return Lattice::span(Matrix::hstack_all(parts, m.rank(), m.ring()));
}

NilpotenceReport is_nilpotent_module(const GModule& m) {
  NilpotenceReport rep;
  const Lattice& rel = m.relation_lattice();
  Lattice cur = Lattice::whole(m.rank(), m.ring());
  rep.filtration.push_back(cur);
  if (rel.contains(cur)) {
    rep.nilpotent = true;
    return rep;
  }
  // Over a field the chain strictly drops until it stops. Over Z, a nilpotent
  // M has I^f M inside the torsion T (f = free rank) and the chain on T drops
  // strictly, so the class is at most f + (number of prime factors of |T|).
  std::size_t bound = m.rank() + 1;
  if (!m.ring().is_field()) {
    FgAbelianGroup u = m.underlying();
    std::size_t omega = 0;
    for (const auto& d : u.torsion) {
      Integer x = d;
      for (const auto& q : prime_factors(d))
        while (x % q == 0) {
          x /= q;
          ++omega;
        }
    }
    bound = u.free_rank + omega + 1;
  }
  for (std::size_t j = 1; j <= bound; ++j) {
    Lattice next = augmentation_image(m, cur);
    rep.filtration.push_back(next);
    if (rel.contains(next)) {
      rep.nilpotent = true;
      rep.nil_class = j;
      return rep;
    }
    if (next == cur) return rep;
    cur = next;
  }
  return rep;
}

GModule restrict_module(const GModule& m, const GroupHom& along) {
  require(along.target->table() == m.group()->table(), ErrorCode::InvalidInput, "restriction along a map to another group");
  std::vector<Matrix> act;
  for (int h = 0; h < along.source->order(); ++h) act.push_back(m.action(along(h)));
  return GModule::trusted(along.source, m.ring(), m.rank(), m.relations(), std::move(act));
}

GModule restrict_to_subgroup(const GModule& m, const Subgroup& h) {
  return restrict_module(m, embed_subgroup(m.group(), h).inclusion);
}

GModule induce_module(const GModule& m, const GroupHom& inclusion) {
  require(inclusion.is_injective(), ErrorCode::BadSubgroup, "induction along a non-injective map");
  require(inclusion.source->table() == m.group()->table(), ErrorCode::InvalidInput, "induction: module over wrong group");
  const GroupPtr& g = inclusion.target;
  Subgroup k = inclusion.image();
  std::vector<int> back(g->order(), -1);
  for (int x = 0; x < inclusion.source->order(); ++x) back[inclusion(x)] = x;
  auto reps = g->left_coset_reps(k);
  std::vector<int> coset(g->order());
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (int x : k) coset[g->mul(reps[i], x)] = static_cast<int>(i);
  const std::size_t d = m.rank(), r = reps.size();
  std::vector<Matrix> act;
  for (int x = 0; x < g->order(); ++x) {
    Matrix a(d * r, d * r, m.ring());
    for (std::size_t i = 0; i < r; ++i) {
      const int y = g->mul(x, reps[i]);
      const std::size_t j = static_cast<std::size_t>(coset[y]);
      const int kk = back[g->mul(g->inv(reps[j]), y)];
      a.set_block(j * d, i * d, m.action(kk));
    }
    act.push_back(a);
  }
  Matrix rel(d * r, 0, m.ring());
  for (std::size_t i = 0; i < r; ++i) {
    Matrix block(d * r, m.relations().cols(), m.ring());
    block.set_block(i * d, 0, m.relations());
    rel = Matrix::hstack(rel, block);
  }
  return GModule(g, m.ring(), d * r, rel, std::move(act));
}

Matrix norm_matrix(const GModule& m, const Subgroup& h) {
  Matrix s(m.rank(), m.rank(), m.ring());
  for (int x : h) s = s + m.action(x);
  return s;
}

}  // namespace kcell
