#pragma once
/* Matrix operators in total derivatives, normal form sum_tau a_tau * D^tau
 * with coefficients on the left. */

#include "varlie/jet.hpp"

namespace varlie {

struct TotalDiffOperator {
  const Context* ctx = nullptr;
  int rows = 1;
  int cols = 1;
  std::map<std::tuple<int, int, Midx>, Poly> ent; /* (row, col, tau) */

  TotalDiffOperator() = default;
  TotalDiffOperator(const Context& c, int r, int co)
      : ctx(&c), rows(r), cols(co) {}

  static TotalDiffOperator zero(const Context& c, int r, int co) {
    return TotalDiffOperator(c, r, co);
  }
  static TotalDiffOperator identity(const Context& c, int n);
  /* scalar operator a * D^tau */
  static TotalDiffOperator dpow(const Context& c, const Midx& tau);

  void add(int r, int c, const Midx& tau, const Poly& coeff);
  Poly entry(int r, int c, const Midx& tau) const;

  std::vector<Poly> apply(const std::vector<Poly>& s) const;
  Poly apply_scalar(const Poly& s) const; /* rows == cols == 1 */

  TotalDiffOperator compose(const TotalDiffOperator& inner) const;
  TotalDiffOperator adjoint() const;
  TotalDiffOperator operator+(const TotalDiffOperator& o) const;
  TotalDiffOperator operator-(const TotalDiffOperator& o) const;
  TotalDiffOperator scale(const Rat& r) const;
  bool operator==(const TotalDiffOperator& o) const;
  bool is_zero() const;
  int order() const;
};

/* density <psi, A(phi)> = sum_r psi_r * (A phi)_r, in this order */
Poly coupling(const std::vector<Poly>& psi, const TotalDiffOperator& A,
              const std::vector<Poly>& phi);

/* linearization of the tuple F along the variable codes:
 * entry (r, c, tau) = dF_r / d q_{codes[c], tau} */
TotalDiffOperator linearization(const std::vector<Poly>& F,
                                const std::vector<int>& codes);

std::string render(const TotalDiffOperator& A);

}  // namespace varlie
