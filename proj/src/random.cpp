#include "kcell/random.hpp"

#include <algorithm>

#include "kcell/errors.hpp"

namespace kcell {

GComplex random_free_complex(std::mt19937_64& rng, const GroupPtr& g, Ring ring, int lo,
                             const std::vector<std::size_t>& ranks) {
  const long top = ring.p == 0 ? 2 : static_cast<long>(ring.p) - 1;
  const long bottom = ring.p == 0 ? -2 : 0;
  std::uniform_int_distribution<long> coef(bottom, top);
  std::vector<GModule> mods;
  std::vector<Matrix> diffs;
  for (std::size_t r : ranks) mods.push_back(GModule::free(g, ring, r));
  for (std::size_t i = 1; i < mods.size(); ++i) {
    const GModule& below = mods[i - 1];
    Matrix ker = i == 1 ? Matrix::identity(below.rank(), ring) : kernel_basis(diffs.back());
    Matrix images(below.rank(), ranks[i], ring);
    for (std::size_t j = 0; j < ranks[i]; ++j)
      for (std::size_t c = 0; c < ker.cols(); ++c) {
        const long a = coef(rng);
        if (a == 0) continue;
        for (std::size_t r = 0; r < ker.rows(); ++r) images.set(r, j, images(r, j) + ker(r, c) * a);
      }
    diffs.push_back(free_map_matrix(below, images));
  }
  return GComplex(g, ring, lo, std::move(mods), std::move(diffs));
}

GComplex random_free_complex(std::uint64_t seed, const GroupPtr& g, Ring ring, int lo,
                             const std::vector<std::size_t>& ranks) {
  std::mt19937_64 rng(seed);
  return random_free_complex(rng, g, ring, lo, ranks);
}

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, Ring ring) {
  std::uniform_int_distribution<long> coef(0, static_cast<long>(ring.p) - 1);
  Matrix m(r, c, ring);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, coef(rng));
  return m;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix m(a.rows() * b.rows(), a.cols() * b.cols(), a.ring());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) m.set(i * b.rows() + k, j * b.cols() + l, a(i, j) * b(k, l));
  return m;
}

}  // namespace

GModule random_cyclic_module(std::mt19937_64& rng, const GroupPtr& g, Ring ring, std::size_t rank) {
  require(ring.is_field(), ErrorCode::WrongCharacteristic, "random_cyclic_module needs F_p coefficients");
  int gen = -1;
  for (int e = 0; e < g->order(); ++e)
    if (g->element_order(e) == g->order()) {
      gen = e;
      break;
    }
  require(gen >= 0, ErrorCode::WrongGroupClass, "random_cyclic_module needs a cyclic group");
  std::size_t ppart = 1;
  auto rest = static_cast<std::size_t>(g->order());
  while (rest % ring.p == 0) {
    rest /= ring.p;
    ppart *= ring.p;
  }
  std::vector<std::size_t> orders;
  for (std::size_t d = 1; d <= rest; ++d)
    if (rest % d == 0) orders.push_back(d);

  Matrix a(0, 0, ring);
  std::size_t filled = 0;
  while (filled < rank) {
    const std::size_t left = rank - filled;
    std::vector<std::size_t> ds;
    for (std::size_t d : orders)
      if (d <= left) ds.push_back(d);
    const std::size_t d = ds[std::uniform_int_distribution<std::size_t>(0, ds.size() - 1)(rng)];
    const std::size_t smax = std::min(ppart, left / d);
    const std::size_t s = std::uniform_int_distribution<std::size_t>(1, smax)(rng);
    Matrix jordan = Matrix::identity(s, ring);
    for (std::size_t i = 0; i + 1 < s; ++i) jordan.set(i, i + 1, 1);
    Matrix shift(d, d, ring);
    for (std::size_t i = 0; i < d; ++i) shift.set((i + 1) % d, i, 1);
    a = Matrix::block_diag(a, kronecker(jordan, shift));
    filled += s * d;
  }
  Matrix p;
  do p = random_matrix(rng, rank, rank, ring);
  while (rank_of(p) != rank);
  const Matrix pinv = solve_matrix(p, Matrix::identity(rank, ring));
  return GModule::from_generators(g, ring, rank, Matrix(rank, 0, ring), {gen}, {p * a * pinv});
}

GComplex random_complex(std::mt19937_64& rng, const std::vector<GModule>& modules, int lo) {
  require(!modules.empty(), ErrorCode::InvalidInput, "random_complex needs at least one module");
  const GroupPtr& g = modules.front().group();
  const Ring ring = modules.front().ring();
  require(ring.is_field(), ErrorCode::WrongCharacteristic, "random_complex needs F_p coefficients");
  const std::vector<int> gens = g->generators();
  std::uniform_int_distribution<long> coef(0, static_cast<long>(ring.p) - 1);
  std::vector<Matrix> diffs;
  for (std::size_t i = 1; i < modules.size(); ++i) {
    const GModule& src = modules[i];
    const GModule& dst = modules[i - 1];
    require(!src.has_relations() && !dst.has_relations(), ErrorCode::InvalidInput,
            "random_complex needs modules without relations");
    const std::size_t r = dst.rank(), c = src.rank();
    // unknown D (r × c) stored row-major; equations A_dst D − D A_src = 0 and d_prev D = 0
    std::vector<std::vector<Integer>> eqs;
    for (int h : gens) {
      const Matrix& ad = dst.action(h);
      const Matrix& as = src.action(h);
      for (std::size_t row = 0; row < r; ++row)
        for (std::size_t col = 0; col < c; ++col) {
          std::vector<Integer> e(r * c, 0);
          for (std::size_t j = 0; j < r; ++j) e[j * c + col] += ad(row, j);
          for (std::size_t j = 0; j < c; ++j) e[row * c + j] -= as(j, col);
          eqs.push_back(std::move(e));
        }
    }
    if (!diffs.empty()) {
      const Matrix& prev = diffs.back();
      for (std::size_t row = 0; row < prev.rows(); ++row)
        for (std::size_t col = 0; col < c; ++col) {
          std::vector<Integer> e(r * c, 0);
          for (std::size_t j = 0; j < r; ++j) e[j * c + col] += prev(row, j);
          eqs.push_back(std::move(e));
        }
    }
    Matrix sys(eqs.size(), r * c, ring);
    for (std::size_t k = 0; k < eqs.size(); ++k)
      for (std::size_t j = 0; j < r * c; ++j) sys.set(k, j, eqs[k][j]);
    const Matrix basis = r * c == 0 ? Matrix(0, 0, ring) : eqs.empty() ? Matrix::identity(r * c, ring) : kernel_basis(sys);
    Matrix d(r, c, ring);
    for (std::size_t b = 0; b < basis.cols(); ++b) {
      const long a = coef(rng);
      if (a == 0) continue;
      for (std::size_t j = 0; j < r * c; ++j) d.set(j / c, j % c, d(j / c, j % c) + basis(j, b) * a);
    }
    diffs.push_back(d);
  }
  return GComplex(g, ring, lo, modules, std::move(diffs));
}

}  // namespace kcell
