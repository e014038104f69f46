#include "kcell/linalg.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "kcell/errors.hpp"

namespace kcell {

namespace {

// Row-major scratch over mpz used by the integer (and large-prime) paths.
struct Work {
  std::size_t r, c;
  Ring ring;
  std::vector<Integer> a;
  Integer& at(std::size_t i, std::size_t j) { return a[i * c + j]; }
  const Integer& at(std::size_t i, std::size_t j) const { return a[i * c + j]; }

  explicit Work(const Matrix& m) : r(m.rows()), c(m.cols()), ring(m.ring()), a(m.data()) {}
  Matrix to_matrix() const {
    Matrix m(r, c, ring);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m.set(i, j, at(i, j));
    return m;
  }
  void swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t j = 0; j < c; ++j) std::swap(at(i, j), at(k, j));
  }
  void swap_cols(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t t = 0; t < r; ++t) std::swap(at(t, i), at(t, k));
  }
  // row_i += q·row_k
  void add_row(std::size_t i, std::size_t k, const Integer& q, std::size_t from = 0) {
    if (q == 0) return;
    for (std::size_t j = from; j < c; ++j) {
      const Integer& y = at(k, j);
      if (y == 0) continue;
      Integer& x = at(i, j);
      mpz_addmul(x.get_mpz_t(), q.get_mpz_t(), y.get_mpz_t());
      ring.normalize(x);
    }
  }
  // col_i += q·col_k
  void add_col(std::size_t i, std::size_t k, const Integer& q) {
    if (q == 0) return;
    for (std::size_t t = 0; t < r; ++t) {
      const Integer& y = at(t, k);
      if (y == 0) continue;
      Integer& x = at(t, i);
      mpz_addmul(x.get_mpz_t(), q.get_mpz_t(), y.get_mpz_t());
      ring.normalize(x);
    }
  }
  void scale_row(std::size_t i, const Integer& s) {
    for (std::size_t j = 0; j < c; ++j) {
      at(i, j) *= s;
      ring.normalize(at(i, j));
    }
  }
  void scale_col(std::size_t j, const Integer& s) {
    for (std::size_t t = 0; t < r; ++t) {
      at(t, j) *= s;
      ring.normalize(at(t, j));
    }
  }
};

// q with |a − q·b| < |b| over Z (floor division), a·b⁻¹ over a field.
Integer ring_quotient(const Ring& ring, const Integer& a, const Integer& b) {
  if (ring.p != 0) return ring.reduced(a * ring.inverse(b));
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

bool fast_field(const Ring& ring) { return ring.p != 0 && ring.p < kernels::kMaxFastPrime; }

RowReduction row_reduce_fast(const Matrix& m, kernels::Exec exec) {
  const std::size_t r = m.rows(), c = m.cols();
  std::vector<kernels::Word> a(r * c), u(r * r, 0);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = m.data()[i].get_ui();
  for (std::size_t i = 0; i < r; ++i) u[i * r + i] = 1;
  auto piv = kernels::fp_rref(a.data(), r, c, m.ring().p, u.data(), exec);
  RowReduction out{Matrix(r, c, m.ring()), Matrix(r, r, m.ring()), std::move(piv), 0};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out.echelon(i, j) = static_cast<unsigned long>(a[i * c + j]);
    for (std::size_t j = 0; j < r; ++j) out.transform(i, j) = static_cast<unsigned long>(u[i * r + j]);
  }
  out.rank = out.pivots.size();
  return out;
}

RowReduction row_reduce_generic(const Matrix& m) {
  const Ring ring = m.ring();
  Work e(m);
  Work u(Matrix::identity(m.rows(), ring));
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < e.c && rank < e.r; ++col) {
    bool found = false;
    for (;;) {
      std::size_t best = e.r;
      for (std::size_t i = rank; i < e.r; ++i) {
        if (e.at(i, col) == 0) continue;
        if (best == e.r || abs(e.at(i, col)) < abs(e.at(best, col))) best = i;
      }
      if (best == e.r) break;
      found = true;
      e.swap_rows(rank, best);
      u.swap_rows(rank, best);
      bool clean = true;
      for (std::size_t i = rank + 1; i < e.r; ++i) {
        if (e.at(i, col) == 0) continue;
        Integer q = -ring_quotient(ring, e.at(i, col), e.at(rank, col));
        e.add_row(i, rank, q, col);
        u.add_row(i, rank, q);
        if (e.at(i, col) != 0) clean = false;
      }
      if (clean) break;
    }
    if (!found) continue;
    if (ring.p != 0) {
      Integer inv = ring.inverse(e.at(rank, col));
      e.scale_row(rank, inv);
      u.scale_row(rank, inv);
    } else if (e.at(rank, col) < 0) {
      e.scale_row(rank, -1);
      u.scale_row(rank, -1);
    }
    for (std::size_t i = 0; i < rank; ++i) {
      if (e.at(i, col) == 0) continue;
      Integer q = -ring_quotient(ring, e.at(i, col), e.at(rank, col));
      e.add_row(i, rank, q, col);
      u.add_row(i, rank, q);
    }
    pivots.push_back(col);
    ++rank;
  }
  return RowReduction{e.to_matrix(), u.to_matrix(), std::move(pivots), rank};
}

}  // namespace

RowReduction row_reduce(const Matrix& m, kernels::Exec exec) {
  if (fast_field(m.ring())) return row_reduce_fast(m, exec);
  return row_reduce_generic(m);
}

EchelonResult echelonize(const Matrix& m, kernels::Exec exec) {
  EchelonResult out;
  RowReduction rr = row_reduce(m, exec);
  out.rank = rr.rank;
  out.pivots = rr.pivots;
  RowReduction rt = row_reduce(m.transpose(), exec);
  out.image = rt.echelon.block(0, 0, rt.rank, m.rows()).transpose();
  if (m.ring().is_field()) {
    // Free-variable basis read off the RREF.
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : rr.pivots) is_pivot[p] = true;
    out.kernel = Matrix(m.cols(), m.cols() - rr.rank, m.ring());
    std::size_t k = 0;
    for (std::size_t f = 0; f < m.cols(); ++f) {
      if (is_pivot[f]) continue;
      out.kernel(f, k) = 1;
      for (std::size_t i = 0; i < rr.rank; ++i) out.kernel.set(rr.pivots[i], k, -rr.echelon(i, f));
      ++k;
    }
  } else {
    Matrix rows = rt.transform.block(rt.rank, 0, m.cols() - rt.rank, m.cols());
    out.kernel = Lattice::span(rows.transpose()).basis();
  }
  return out;
}

Matrix kernel_basis(const Matrix& m) { return echelonize(m).kernel; }

Matrix image_basis(const Matrix& m) { return Lattice::span(m).basis(); }

std::size_t rank_of(const Matrix& m) { return row_reduce(m).rank; }

Integer determinant(const Matrix& m) {
  require(m.rows() == m.cols(), ErrorCode::InvalidInput, "determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  // Bareiss fraction-free elimination on integer representatives.
  std::vector<Integer> a(m.data());
  auto at = [&](std::size_t i, std::size_t j) -> Integer& { return a[i * n + j]; };
  Integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && at(s, k) == 0) ++s;
      if (s == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(s, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = at(i, j) * at(k, k) - at(i, k) * at(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        at(i, j) = v;
      }
    }
    prev = at(k, k);
  }
  Integer d = sign * at(n - 1, n - 1);
  m.ring().normalize(d);
  return d;
}

SmithForm smith_normal_form(const Matrix& a) {
  const Ring ring = a.ring();
  Work s(a);
  Work u(Matrix::identity(a.rows(), ring)), ui(Matrix::identity(a.rows(), ring));
  Work v(Matrix::identity(a.cols(), ring)), vi(Matrix::identity(a.cols(), ring));
  // Elementary operations mirrored into the transforms and their inverses.
  auto row_swap = [&](std::size_t i, std::size_t k) {
    s.swap_rows(i, k);
    u.swap_rows(i, k);
    ui.swap_cols(i, k);
  };
  auto col_swap = [&](std::size_t i, std::size_t k) {
    s.swap_cols(i, k);
    v.swap_cols(i, k);
    vi.swap_rows(i, k);
  };
  auto row_add = [&](std::size_t i, std::size_t k, const Integer& q) {
    s.add_row(i, k, q);
    u.add_row(i, k, q);
    ui.add_col(k, i, -q);
  };
  auto col_add = [&](std::size_t i, std::size_t k, const Integer& q) {
    s.add_col(i, k, q);
    v.add_col(i, k, q);
    vi.add_row(k, i, -q);
  };
  auto row_scale = [&](std::size_t i, const Integer& q, const Integer& q_inv) {
    s.scale_row(i, q);
    u.scale_row(i, q);
    ui.scale_col(i, q_inv);
  };

  const std::size_t diag = std::min(s.r, s.c);
  for (std::size_t t = 0; t < diag; ++t) {
    std::size_t bi = s.r, bj = s.c;
    for (std::size_t i = t; i < s.r; ++i)
      for (std::size_t j = t; j < s.c; ++j) {
        if (s.at(i, j) == 0) continue;
        if (bi == s.r || abs(s.at(i, j)) < abs(s.at(bi, bj))) {
          bi = i;
          bj = j;
        }
      }
    if (bi == s.r) break;
    row_swap(t, bi);
    col_swap(t, bj);
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < s.r; ++i) {
        if (s.at(i, t) == 0) continue;
        row_add(i, t, -ring_quotient(ring, s.at(i, t), s.at(t, t)));
        if (s.at(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < s.c; ++j) {
        if (s.at(t, j) == 0) continue;
        col_add(j, t, -ring_quotient(ring, s.at(t, j), s.at(t, t)));
        if (s.at(t, j) != 0) clean = false;
      }
      if (!clean) {
        std::size_t best_i = t, best_j = t;
        for (std::size_t i = t + 1; i < s.r; ++i)
          if (s.at(i, t) != 0 && abs(s.at(i, t)) < abs(s.at(best_i, best_j))) {
            best_i = i;
            best_j = t;
          }
        for (std::size_t j = t + 1; j < s.c; ++j)
          if (s.at(t, j) != 0 && abs(s.at(t, j)) < abs(s.at(best_i, best_j))) {
            best_i = t;
            best_j = j;
          }
        row_swap(t, best_i);
        col_swap(t, best_j);
        continue;
      }
      std::size_t bad = s.r;
      if (ring.p == 0) {
        for (std::size_t i = t + 1; i < s.r && bad == s.r; ++i)
          for (std::size_t j = t + 1; j < s.c; ++j)
            if (s.at(i, j) % s.at(t, t) != 0) {
              bad = i;
              break;
            }
      }
      if (bad == s.r) break;
      row_add(t, bad, 1);
    }
    if (ring.p != 0) {
      Integer inv = ring.inverse(s.at(t, t));
      row_scale(t, inv, s.at(t, t));
    } else if (s.at(t, t) < 0) {
      row_scale(t, -1, -1);
    }
  }
  SmithForm out{u.to_matrix(), s.to_matrix(), v.to_matrix(), ui.to_matrix(), vi.to_matrix(), {}};
  for (std::size_t t = 0; t < diag; ++t) out.invariant_factors.push_back(out.S(t, t));
  return out;
}

// ---------------------------------------------------------------------------

FgAbelianGroup FgAbelianGroup::cyclic(const Integer& order) {
  return from_orders(Ring::integers(), {order});
}

FgAbelianGroup FgAbelianGroup::from_orders(Ring r, const std::vector<Integer>& orders) {
  FgAbelianGroup g{r, 0, {}};
  if (r.is_field()) {
    for (const auto& d : orders)
      if (r.reduced(d) == 0) ++g.free_rank;
    return g;
  }
  Matrix diag(orders.size(), orders.size(), r);
  for (std::size_t i = 0; i < orders.size(); ++i) diag(i, i) = abs(orders[i]);
  for (const auto& d : smith_normal_form(diag).invariant_factors) {
    if (d == 0)
      ++g.free_rank;
    else if (d != 1)
      g.torsion.push_back(d);
  }
  return g;
}

Integer FgAbelianGroup::torsion_order() const {
  Integer o = 1;
  for (const auto& d : torsion) o *= d;
  return o;
}

FgAbelianGroup FgAbelianGroup::direct_sum(const FgAbelianGroup& other) const {
  std::vector<Integer> orders(free_rank + other.free_rank, 0);
  orders.insert(orders.end(), torsion.begin(), torsion.end());
  orders.insert(orders.end(), other.torsion.begin(), other.torsion.end());
  return from_orders(ring, orders);
}

std::string FgAbelianGroup::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  const std::string base = ring.is_field() ? ring.name() : "Z";
  bool first = true;
  if (free_rank) {
    os << base;
    if (free_rank > 1) os << "^" << free_rank;
    first = false;
  }
  for (const auto& d : torsion) {
    os << (first ? "" : " + ") << "Z/" << d;
    first = false;
  }
  return os.str();
}

bool LocalGroup::is_zero() const {
  if (!fg.is_zero()) return false;
  for (const auto& [l, s] : prufer)
    if (s) return false;
  return true;
}

std::string LocalGroup::to_string() const {
  std::ostringstream os;
  bool first = true;
  if (!fg.is_zero()) {
    os << fg.to_string();
    first = false;
  }
  for (const auto& [l, s] : prufer) {
    if (!s) continue;
    os << (first ? "" : " + ") << "(Z[1/" << l << "]/Z)";
    if (s > 1) os << "^" << s;
    first = false;
  }
  return first ? "0" : os.str();
}

// ---------------------------------------------------------------------------

Lattice::Lattice(std::size_t ambient, Ring ring) : n_(ambient), ring_(ring), rows_(0, ambient, ring) {}

Lattice Lattice::span(const Matrix& columns) {
  Lattice l(columns.rows(), columns.ring());
  if (columns.cols() == 0) return l;
  RowReduction rr = row_reduce(columns.transpose());
  l.rows_ = rr.echelon.block(0, 0, rr.rank, columns.rows());
  l.pivots_ = rr.pivots;
  return l;
}

Lattice Lattice::whole(std::size_t n, Ring ring) { return span(Matrix::identity(n, ring)); }

bool Lattice::try_coords(const std::vector<Integer>& v, std::vector<Integer>* out) const {
  require(v.size() == n_, ErrorCode::InvalidInput, "lattice: vector of wrong length");
  std::vector<Integer> rem(v);
  for (auto& x : rem) ring_.normalize(x);
  std::vector<Integer> c(rank());
  for (std::size_t i = 0; i < rank(); ++i) {
    const std::size_t p = pivots_[i];
    const Integer& piv = rows_(i, p);
    if (rem[p] == 0) continue;
    if (ring_.p == 0) {
      if (rem[p] % piv != 0) return false;
      c[i] = rem[p] / piv;
    } else {
      c[i] = ring_.reduced(rem[p] * ring_.inverse(piv));
    }
    for (std::size_t j = p; j < n_; ++j) {
      rem[j] -= c[i] * rows_(i, j);
      ring_.normalize(rem[j]);
    }
  }
  for (const auto& x : rem)
    if (x != 0) return false;
  if (out) *out = std::move(c);
  return true;
}

bool Lattice::contains(const std::vector<Integer>& v) const { return try_coords(v, nullptr); }

bool Lattice::contains(const Lattice& other) const {
  for (std::size_t i = 0; i < other.rank(); ++i)
    if (!contains(other.rows_.row_vector(i))) return false;
  return true;
}

bool Lattice::contains_columns(const Matrix& cols) const {
  for (std::size_t j = 0; j < cols.cols(); ++j)
    if (!contains(cols.column_vector(j))) return false;
  return true;
}

std::vector<Integer> Lattice::coords(const std::vector<Integer>& v) const {
  std::vector<Integer> c;
  require(try_coords(v, &c), ErrorCode::InvalidInput, "vector not in lattice");
  return c;
}

Matrix Lattice::coords_of(const Matrix& m) const {
  Matrix out(rank(), m.cols(), ring_);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    auto c = coords(m.column_vector(j));
    for (std::size_t i = 0; i < c.size(); ++i) out.set(i, j, c[i]);
  }
  return out;
}

Lattice Lattice::operator+(const Lattice& other) const {
  require(n_ == other.n_, ErrorCode::InvalidInput, "lattice sum: ambient mismatch");
  return span(Matrix::hstack(basis(), other.basis()));
}

Lattice Lattice::intersect(const Lattice& other) const {
  require(n_ == other.n_, ErrorCode::InvalidInput, "lattice intersection: ambient mismatch");
  Matrix b = basis();
  return image(b, preimage(b, other));
}

Lattice Lattice::preimage(const Matrix& a, const Lattice& l) {
  require(a.rows() == l.ambient(), ErrorCode::InvalidInput, "preimage: shape mismatch");
  if (l.rank() == 0) return span(kernel_basis(a));
  Matrix m = Matrix::hstack(a, -l.basis());
  Matrix k = kernel_basis(m);
  return span(k.block(0, 0, a.cols(), k.cols()));
}

Lattice Lattice::image(const Matrix& a, const Lattice& l) {
  require(a.cols() == l.ambient(), ErrorCode::InvalidInput, "image: shape mismatch");
  if (l.rank() == 0) return Lattice(a.rows(), a.ring());
  return span(a * l.basis());
}

// ---------------------------------------------------------------------------

std::vector<Integer> Subquotient::coordinates(const std::vector<Integer>& v) const {
  auto c = num.coords(v);
  std::vector<Integer> out(orders.size());
  for (std::size_t j = 0; j < orders.size(); ++j) {
    Integer x = 0;
    for (std::size_t i = 0; i < c.size(); ++i) x += to_gens(j, i) * c[i];
    ring.normalize(x);
    if (orders[j] != 0) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), orders[j].get_mpz_t());
    out[j] = x;
  }
  return out;
}

Matrix Subquotient::coordinates_of(const Matrix& m) const {
  Matrix out(orders.size(), m.cols(), ring);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    auto c = coordinates(m.column_vector(j));
    for (std::size_t i = 0; i < c.size(); ++i) out(i, j) = c[i];
  }
  return out;
}

Subquotient subquotient(const Lattice& num, const Lattice& den) {
  require(num.contains(den), ErrorCode::InvalidInput, "subquotient: denominator not contained in numerator");
  const Ring ring = num.ring();
  Subquotient q;
  q.ring = ring;
  q.num = num;
  q.den = den;
  const std::size_t r = num.rank();
  Matrix d = num.coords_of(den.basis());
  SmithForm sf = smith_normal_form(d);
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < r; ++j) {
    Integer dj = j < sf.invariant_factors.size() ? sf.invariant_factors[j] : Integer(0);
    if (ring.is_field()) {
      if (dj != 0) continue;
    } else if (dj == 1) {
      continue;
    }
    keep.push_back(j);
    q.orders.push_back(dj);
  }
  Matrix gens = num.basis() * sf.U_inv;
  q.generators = gens.select_columns(keep);
  q.to_gens = sf.U.select_rows(keep);
  q.group = FgAbelianGroup::from_orders(ring, q.orders);
  return q;
}

FgAbelianGroup homology_pair(const Matrix& d_out, const Matrix& d_in) {
  if (!(d_out.ring() == d_in.ring())) fail(ErrorCode::CoefficientMismatch, "homology_pair: rings differ");
  require(d_out.cols() == d_in.rows(), ErrorCode::InvalidInput, "homology_pair: shapes do not compose");
  if (!(d_out * d_in).is_zero()) fail(ErrorCode::NotAComplex, "homology_pair: d_out * d_in != 0");
  return subquotient(Lattice::span(kernel_basis(d_out)), Lattice::span(d_in)).group;
}

}  // namespace kcell
