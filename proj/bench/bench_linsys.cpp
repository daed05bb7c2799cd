#include "varlie/linsys.hpp"
#include "varlie/search.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

using namespace varlie;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

/* dense-ish random system with a planted solution, entries small rationals */
LinSys random_system(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 4);
  std::uniform_int_distribution<int> hit(0, 2);
  std::vector<Rat> planted(cols);
  for (auto& v : planted) {
    v = Rat(num(rng), den(rng));
    v.canonicalize();
  }
  LinSys sys;
  sys.ncols = cols;
  for (int r = 0; r < rows; ++r) {
    std::vector<std::pair<int, Rat>> a;
    Rat b = 0;
    for (int c = 0; c < cols; ++c) {
      if (hit(rng) != 0) continue;
      Rat v(num(rng), den(rng));
      v.canonicalize();
      if (v == 0) continue;
      a.push_back({c, v});
      b += v * planted[c];
    }
    sys.add_row(std::move(a), b);
  }
  return sys;
}

double bench_solve(const LinSys& sys, bool parallel, int reps) {
  double best = 1e30;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    auto sol = parallel ? solve_parallel(sys) : solve_serial(sys);
    double t = ms_since(t0);
    if (!sol.consistent) {
      std::fprintf(stderr, "planted system reported inconsistent\n");
      std::exit(1);
    }
    if (t < best) best = t;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int size = argc > 1 ? std::atoi(argv[1]) : 120;
  int reps = argc > 2 ? std::atoi(argv[2]) : 2;

  std::printf("exact rational elimination, %dx%d planted system, best of %d\n",
              size, size + size / 4, reps);
  LinSys sys = random_system(size, size + size / 4, 0xC0FFEE);

  double serial = bench_solve(sys, false, reps);
  std::printf("  %-22s %9.1f ms\n", "serial reference", serial);
  for (int jobs : {1, 2, 4}) {
    set_jobs(jobs);
    double t = bench_solve(sys, true, reps);
    std::printf("  %-18s j=%d %9.1f ms   speedup %.2fx\n", "parallel kernel",
                jobs, t, serial / t);
  }

  std::printf("operator census up to weight 7, best of %d\n", reps);
  double census_serial = 1e30;
  for (int jobs : {1, 2, 4}) {
    set_jobs(jobs);
    double best = 1e30;
    for (int i = 0; i < reps; ++i) {
      auto t0 = std::chrono::steady_clock::now();
      auto reports = search_up_to(7);
      double t = ms_since(t0);
      if (reports.size() != 7) {
        std::fprintf(stderr, "census returned %zu weights\n", reports.size());
        return 1;
      }
      if (t < best) best = t;
    }
    if (jobs == 1) census_serial = best;
    std::printf("  %-18s j=%d %9.1f ms   speedup %.2fx\n", "search_up_to(7)",
                jobs, best, census_serial / best);
  }
  return 0;
}
