#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "varlie/linsys.hpp"

#include <cstdint>

using namespace varlie;

TEST_CASE("exact small system") {
  LinSys s(2);
  s.add_row({{0, Rat(1)}, {1, Rat(1)}}, Rat(1));
  s.add_row({{0, Rat(1)}, {1, Rat(-1)}}, Rat(0));
  auto sol = solve_serial(s);
  CHECK(sol.consistent);
  CHECK(sol.x[0] == Rat(1, 2));
  CHECK(sol.x[1] == Rat(1, 2));
  CHECK(sol.free_count == 0);
}

TEST_CASE("free variables pinned to zero") {
  LinSys s(3);
  s.add_row({{0, Rat(2)}, {2, Rat(4)}}, Rat(6));
  auto sol = solve_serial(s);
  CHECK(sol.consistent);
  CHECK(sol.x[0] == Rat(3));
  CHECK(sol.x[1] == 0);
  CHECK(sol.x[2] == 0);
  CHECK(sol.free_count == 2);
}

TEST_CASE("inconsistent system still reports a candidate") {
  LinSys s(2);
  s.add_row({{0, Rat(1)}, {1, Rat(1)}}, Rat(1));
  s.add_row({{0, Rat(1)}, {1, Rat(1)}}, Rat(2));
  auto sol = solve_serial(s);
  CHECK_FALSE(sol.consistent);
  CHECK(sol.x.size() == 2);
  CHECK(sol.x[0] == Rat(1));
}

TEST_CASE("duplicate column entries merge") {
  LinSys s(1);
  s.add_row({{0, Rat(1)}, {0, Rat(2)}}, Rat(6));
  auto sol = solve_serial(s);
  CHECK(sol.consistent);
  CHECK(sol.x[0] == Rat(2));
}

namespace {

LinSys pseudo_random_system(int rows, int cols, uint64_t seed) {
  LinSys s(cols);
  uint64_t st = seed;
  auto next = [&]() {
    st = st * 6364136223846793005ull + 1442695040888963407ull;
    return (st >> 33);
  };
  for (int r = 0; r < rows; ++r) {
    std::vector<std::pair<int, Rat>> a;
    int nz = 1 + (int)(next() % 7);
    for (int k = 0; k < nz; ++k) {
      int c = (int)(next() % cols);
      long num = (long)(next() % 19) - 9;
      long den = 1 + (long)(next() % 7);
      if (num) a.push_back({c, Rat(num, den)});
    }
    long b = (long)(next() % 11) - 5;
    s.add_row(a, Rat(b, 3));
  }
  return s;
}

bool same(const LinSolution& a, const LinSolution& b) {
  return a.consistent == b.consistent && a.x == b.x && a.pivots == b.pivots &&
         a.free_count == b.free_count;
}

}  // namespace

TEST_CASE("parallel kernel matches the serial reference bit for bit") {
  for (uint64_t seed : {1ull, 2ull, 77ull}) {
    LinSys s = pseudo_random_system(60, 40, seed);
    auto ref = solve_serial(s);
    set_jobs(1);
    auto p1 = solve_parallel(s);
    set_jobs(4);
    auto p4 = solve_parallel(s);
    CHECK(same(ref, p1));
    CHECK(same(ref, p4));
  }
  set_jobs(0);
}
