#pragma once
/* Exact sparse rational linear systems.
 *
 * Gauss-Jordan elimination with a deterministic pivot rule (first column,
 * then lowest row index), so the parallel row-update variant produces
 * bit-identical results to the serial reference for any thread count. */

#include <gmpxx.h>

#include <vector>

namespace varlie {

using Rat = mpq_class;

struct LinSys {
  int ncols = 0;
  struct Row {
    std::vector<std::pair<int, Rat>> a; /* sorted by column */
    Rat b = 0;
  };
  std::vector<Row> rows;

  void add_row(std::vector<std::pair<int, Rat>> a, Rat b);
};

struct LinSolution {
  bool consistent = false;
  std::vector<Rat> x;                  /* one solution, free vars = 0 */
  std::vector<std::pair<int, int>> pivots; /* (row, col) */
  int free_count = 0;
};

LinSolution solve_serial(const LinSys& sys);
LinSolution solve_parallel(const LinSys& sys);
/* dispatches to the parallel kernel when built with OpenMP */
LinSolution solve(const LinSys& sys);

void set_jobs(int n);
int get_jobs();

}  // namespace varlie
