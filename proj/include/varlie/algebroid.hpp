#pragma once

#include "varlie/diffop.hpp"
#include "varlie/jet.hpp"
#include "varlie/linsys.hpp"

#include <optional>
#include <tuple>
#include <vector>

namespace varlie {

/* A finite collection of total differential operators with a common target:
 * every operator maps sections of its own argument bundle into evolutionary
 * velocities on the same set of field components. */
struct OperatorCollection {
  const Context* ctx = nullptr;
  std::vector<int> target;              /* field component codes, shared rows */
  std::vector<TotalDiffOperator> ops;

  int size() const { return (int)ops.size(); }
  int max_order() const;
};

/* Bilinear bidifferential expression Gamma(a, b): for each output component
 * a sum of coeff * D^sigma(a_ci) * D^tau(b_cj).  Arguments may be attached to
 * odd variables later, so evaluation multiplies in this fixed order. */
struct BiDiffSymbol {
  const Context* ctx = nullptr;
  int out_comps = 0;
  struct Term {
    int out, ci, cj;
    Midx sigma, tau;
    Poly coeff;
  };
  std::vector<Term> terms;

  bool is_zero() const;
  std::vector<Poly> eval(const std::vector<Poly>& a,
                         const std::vector<Poly>& b) const;
  /* reads a polynomial vector that is bilinear in the jets of the given
   * argument codes back into symbol form */
  static BiDiffSymbol from_polys(const Context& ctx,
                                 const std::vector<Poly>& comps,
                                 const std::vector<int>& acodes,
                                 const std::vector<int>& bcodes);
  std::vector<Poly> to_polys(const std::vector<int>& acodes,
                             const std::vector<int>& bcodes) const;
};

/* [A_i(p1), A_j(p2)] evaluated on the target fields, with the section jets
 * p1, p2 taken as frozen auxiliary variables (their own velocities vanish).
 * Returns one polynomial per target component. */
std::vector<Poly> image_bracket(const OperatorCollection& C, int i, int j,
                                const std::vector<int>& p1codes,
                                const std::vector<int>& p2codes);

struct DecompositionResult {
  bool decided = false;                 /* true when the solve was consistent */
  std::vector<std::vector<Poly>> sections;  /* per operator, per argument comp */
  std::vector<Poly> residual;           /* expr - sum_k A_k(sections_k) */
  int order_bound = 0;
  int columns = 0;
};

/* Decides membership of an expression (one polynomial per target component)
 * in the sum of the operator images, with section ansatz built from jets of
 * the carrier codes up to the order bound and coefficient monomials divided
 * out of the expression itself.  A failed solve reports the unresolved
 * residual; it never claims non-membership. */
DecompositionResult image_membership_solve(const OperatorCollection& C,
                                           const std::vector<Poly>& expr,
                                           const std::vector<int>& carriers,
                                           int order_bound = -1);

struct ChristoffelResult {
  bool decided = false;
  /* Gamma^k, the bracket on sections induced on the k-th argument bundle */
  std::vector<BiDiffSymbol> gamma;
  std::vector<Poly> residual;
  int order_bound = 0;
};

/* Solves [A_i(p1), A_j(p2)] = sum_k A_k(Gamma^k(p1, p2)) for the bilinear
 * symbols Gamma^k. */
ChristoffelResult christoffel_extract(const OperatorCollection& C, int i,
                                      int j,
                                      const std::vector<int>& p1codes,
                                      const std::vector<int>& p2codes,
                                      int order_bound = -1);

/* Cyclic Jacobi expression for the section bracket of a single operator:
 * sum over cyclic permutations of
 *   A( X_{A(p1)}(Gamma(p2, p3)) + Gamma(p1, Gamma(p2, p3)) ).
 * Identically zero exactly when the induced bracket satisfies Jacobi. */
std::vector<Poly> jacobi_residual(const OperatorCollection& C,
                                  const BiDiffSymbol& gamma,
                                  const std::vector<int>& p1codes,
                                  const std::vector<int>& p2codes,
                                  const std::vector<int>& p3codes);

/* The odd evolutionary field encoding a collection with section bracket:
 * target velocity sum_i A_i(b_i), ghost velocity -1/2 Gamma^k(b, b). */
EvolutionaryField build_homological_field(
    const OperatorCollection& C,
    const std::vector<std::vector<int>>& ghost_codes,
    const std::map<std::pair<int, int>, std::vector<BiDiffSymbol>>& gamma);

struct HomologicalCheck {
  enum class Status { ExactZero, ZeroModKernel, Fail } status;
  /* residual sections of Q^2 on targets then ghosts, in order */
  std::vector<std::pair<int, Poly>> residuals;
  bool passed() const { return status != Status::Fail; }
};

/* Q^2 = 0 test: residual section on every coordinate must vanish exactly, or
 * the ghost residuals must lie in the kernel of the collection (target
 * residuals zero and sum_k A_k(r_k) = 0). */
HomologicalCheck verify_homological(
    const EvolutionaryField& Q, const OperatorCollection& C,
    const std::vector<std::vector<int>>& ghost_codes);

/* shared default: order of the expression plus the largest operator order,
 * overridable by the VARLIE_ORDER_BOUND environment variable */
int resolve_order_bound(int requested, const std::vector<Poly>& expr,
                        const OperatorCollection& C);

}  // namespace varlie
