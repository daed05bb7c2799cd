#include "varlie/linsys.hpp"

#include <algorithm>

#ifdef VARLIE_HAVE_OPENMP
#include <omp.h>
#endif

namespace varlie {

namespace {

int g_jobs = 0; /* 0: library default */

/* r -= f * p, sparse merge; the factor may alias an entry of r, so work on
 * a copy */
void axpy(LinSys::Row& r, const Rat& fa, const LinSys::Row& p) {
  Rat f = fa;
  std::vector<std::pair<int, Rat>> out;
  out.reserve(r.a.size() + p.a.size());
  size_t i = 0, j = 0;
  while (i < r.a.size() || j < p.a.size()) {
    if (j == p.a.size() || (i < r.a.size() && r.a[i].first < p.a[j].first)) {
      out.push_back(r.a[i++]);
    } else if (i == r.a.size() || p.a[j].first < r.a[i].first) {
      out.push_back({p.a[j].first, -f * p.a[j].second});
      ++j;
    } else {
      Rat v = r.a[i].second - f * p.a[j].second;
      if (v != 0) out.push_back({r.a[i].first, v});
      ++i;
      ++j;
    }
  }
  r.a = std::move(out);
  r.b -= f * p.b;
}

const Rat* coeff_at(const LinSys::Row& r, int col) {
  auto it = std::lower_bound(
      r.a.begin(), r.a.end(), col,
      [](const std::pair<int, Rat>& e, int c) { return e.first < c; });
  if (it != r.a.end() && it->first == col) return &it->second;
  return nullptr;
}

template <bool Parallel>
LinSolution run(const LinSys& sys) {
  std::vector<LinSys::Row> rows = sys.rows;
  std::vector<char> used(rows.size(), 0);
  LinSolution sol;
  for (int col = 0; col < sys.ncols; ++col) {
    int piv = -1;
    for (int r = 0; r < (int)rows.size(); ++r) {
      if (used[r] || rows[r].a.empty()) continue;
      if (rows[r].a.front().first == col) {
        piv = r;
        break;
      }
    }
    if (piv < 0) {
      sol.free_count += 1;
      continue;
    }
    used[piv] = 1;
    sol.pivots.push_back({piv, col});
    Rat lead = rows[piv].a.front().second;
    for (auto& [c, v] : rows[piv].a) v /= lead;
    rows[piv].b /= lead;
    const LinSys::Row& p = rows[piv];
    if constexpr (Parallel) {
#ifdef VARLIE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (int r = 0; r < (int)rows.size(); ++r) {
        if (r == piv) continue;
        const Rat* f = coeff_at(rows[r], col);
        if (f) axpy(rows[r], *f, p);
      }
    } else {
      for (int r = 0; r < (int)rows.size(); ++r) {
        if (r == piv) continue;
        const Rat* f = coeff_at(rows[r], col);
        if (f) axpy(rows[r], *f, p);
      }
    }
  }
  /* a solution candidate is always produced (free variables pinned to 0)
   * so callers can report honest residuals for inconsistent systems */
  sol.x.assign(sys.ncols, Rat(0));
  for (auto& [r, c] : sol.pivots) sol.x[c] = rows[r].b;
  sol.consistent = true;
  for (int r = 0; r < (int)rows.size(); ++r)
    if (!used[r] && rows[r].b != 0) {
      /* after full Jordan elimination every unused row is empty, so a
       * nonzero right-hand side here means 0 = b */
      sol.consistent = false;
      break;
    }
  return sol;
}

}  // namespace

void LinSys::add_row(std::vector<std::pair<int, Rat>> a, Rat b) {
  std::sort(a.begin(), a.end(),
            [](auto& l, auto& r) { return l.first < r.first; });
  std::vector<std::pair<int, Rat>> merged;
  for (auto& [c, v] : a) {
    if (!merged.empty() && merged.back().first == c)
      merged.back().second += v;
    else
      merged.push_back({c, v});
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](auto& e) { return e.second == 0; }),
               merged.end());
  rows.push_back({std::move(merged), std::move(b)});
}

LinSolution solve_serial(const LinSys& sys) { return run<false>(sys); }

LinSolution solve_parallel(const LinSys& sys) {
#ifdef VARLIE_HAVE_OPENMP
  if (g_jobs > 0) omp_set_num_threads(g_jobs);
#endif
  return run<true>(sys);
}

LinSolution solve(const LinSys& sys) {
#ifdef VARLIE_HAVE_OPENMP
  return solve_parallel(sys);
#else
  return solve_serial(sys);
#endif
}

void set_jobs(int n) {
  g_jobs = n;
#ifdef VARLIE_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#endif
}

int get_jobs() { return g_jobs; }

}  // namespace varlie
