#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "kcell/kernels.hpp"

using namespace kcell::kernels;

namespace {

std::vector<Word> random_words(std::mt19937_64& rng, std::size_t n, Word p) {
  std::uniform_int_distribution<Word> d(0, p - 1);
  std::vector<Word> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP F_p kernels"};
  std::vector<std::size_t> sizes{128, 256, 512};
  Word p = 65521;
  int reps = 3;
  std::uint64_t seed = 7;
  app.add_option("--sizes", sizes, "square matrix sizes");
  app.add_option("--prime", p, "modulus below 2^31");
  app.add_option("--reps", reps, "repetitions, best time reported");
  app.add_option("--seed", seed, "matrix seed");
  CLI11_PARSE(app, argc, argv);
  if (p < 2 || p >= kMaxFastPrime) {
    std::fprintf(stderr, "prime out of range\n");
    return 1;
  }

  std::printf("threads %d, p = %llu\n", omp_get_max_threads(), static_cast<unsigned long long>(p));
  std::printf("%-8s %6s %12s %12s %8s %6s\n", "kernel", "n", "serial_ms", "parallel_ms", "speedup", "same");
  std::mt19937_64 rng(seed);
  bool all_same = true;
  for (std::size_t n : sizes) {
    const auto a = random_words(rng, n * n, p);
    const auto b = random_words(rng, n * n, p);
    std::vector<Word> cs(n * n), cp(n * n);
    const double ms_s = best_ms(reps, [&] { fp_matmul_serial(a.data(), b.data(), cs.data(), n, n, n, p); });
    const double ms_p = best_ms(reps, [&] { fp_matmul_parallel(a.data(), b.data(), cp.data(), n, n, n, p); });
    bool same = cs == cp;
    all_same = all_same && same;
    std::printf("%-8s %6zu %12.2f %12.2f %8.2f %6s\n", "matmul", n, ms_s, ms_p, ms_s / ms_p, same ? "yes" : "NO");

    // rank-deficient input: the bottom quarter repeats rows from the top
    auto e = random_words(rng, n * n, p);
    for (std::size_t r = 3 * n / 4; r < n; ++r)
      for (std::size_t j = 0; j < n; ++j) e[r * n + j] = e[(r - 3 * n / 4) * n + j];
    std::vector<Word> es, ep;
    std::vector<std::size_t> ps, pp;
    const double rs = best_ms(reps, [&] {
      es = e;
      ps = fp_rref_serial(es.data(), n, n, p, nullptr);
    });
    const double rp = best_ms(reps, [&] {
      ep = e;
      pp = fp_rref_parallel(ep.data(), n, n, p, nullptr);
    });
    same = es == ep && ps == pp;
    all_same = all_same && same;
    std::printf("%-8s %6zu %12.2f %12.2f %8.2f %6s  rank %zu\n", "rref", n, rs, rp, rs / rp, same ? "yes" : "NO",
                ps.size());
  }
  return all_same ? 0 : 2;
}
