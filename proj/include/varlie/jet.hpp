#pragma once
/* Calculus on the infinite jet space: total derivatives, evolutionary
 * vector fields, Euler operators, divergence tests, on-shell reduction. */

#include "varlie/algebra.hpp"

namespace varlie {

Poly total_derivative(const Poly& p, int dir);
Poly total_derivative_multi(const Poly& p, const Midx& sigma);

/* An evolutionary vector field, determined by its generating sections.
 * Application uses left partial derivatives with the section derivative
 * multiplied from the left, which is the graded-Leibniz-correct choice. */
struct EvolutionaryField {
  const Context* ctx = nullptr;
  bool odd = false;
  std::map<int, Poly> sections; /* variable code -> velocity */

  EvolutionaryField() = default;
  EvolutionaryField(const Context& c, bool isOdd) : ctx(&c), odd(isOdd) {}

  Poly section(int code) const;
  void set_section(int code, const Poly& p);
  Poly apply(const Poly& F) const;
  bool is_zero() const;
};

/* graded commutator [X,Y]; parity adds mod 2 */
EvolutionaryField commutator(const EvolutionaryField& X,
                             const EvolutionaryField& Y);

/* coefficients of the linearization of F along variable `code`:
 * tau -> dF/d q_{code,tau} (left partials) */
std::map<Midx, Poly> lin_entries(const Poly& F, int code);

/* left and right Euler (variational) derivatives */
Poly eulerL(const Poly& p, int code);
Poly eulerR(const Poly& p, int code);

/* equality of horizontal cohomology classes: Euler derivatives of the
 * difference vanish for every declared variable */
bool cohomology_equal(const Poly& a, const Poly& b);
bool is_total_divergence(const Poly& p);

struct EquationNormalForm {
  enum Kind { Evolution, Hyperbolic };
  Kind kind = Evolution;
  int code = 0;   /* variable on the left-hand side */
  Midx lhs_sigma; /* one step in the evolution direction, or (1,1) mixed */
  Poly rhs;

  static EquationNormalForm evolution(const Context& c, int code, int dir,
                                      const Poly& rhs);
  static EquationNormalForm hyperbolic(const Context& c, int code, int dx,
                                       int dy, const Poly& rhs);
};

/* replace every derivative of the left-hand side by the prolonged
 * right-hand side until no reducible jet variable remains */
Poly on_shell_reduce(const Poly& p,
                     const std::vector<EquationNormalForm>& eqs);

}  // namespace varlie
