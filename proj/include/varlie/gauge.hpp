#pragma once

#include "varlie/algebroid.hpp"
#include "varlie/poisson.hpp"

namespace varlie {

/* Euler-Lagrange system of an action density */
struct EquationSystem {
  const Context* ctx = nullptr;
  std::vector<int> qcodes;
  std::vector<Poly> F; /* F_k = dS/dq_k */

  static EquationSystem of_action(const Poly& S,
                                  const std::vector<int>& qcodes);
};

/* ell_F = ell_F^dagger on the equation tuple */
bool helmholtz_check(const std::vector<Poly>& F,
                     const std::vector<int>& qcodes);

struct NoetherCheck {
  bool exact_zero = false;
  std::vector<Poly> residual;
};

/* differential Noether identity N(F) = 0, N given as an operator acting on
 * the equation tuple */
NoetherCheck noether_check(const TotalDiffOperator& N,
                           const std::vector<Poly>& F);

/* the gauge generator paired to a linear Noether identity: the adjoint
 * operator, acting on one parameter per identity row */
TotalDiffOperator generator_from_relation(const TotalDiffOperator& N);

/* Noether identity carried by an operator collection: A_k^dagger(F) = 0 */
NoetherCheck linear_noether_relation(const TotalDiffOperator& A,
                                     const std::vector<Poly>& F);

struct NablaResult {
  bool found = false;
  TotalDiffOperator nabla;
  std::vector<Poly> residual; /* X(F) - nabla(F) for the reported nabla */
  int order_bound = 0;
};

/* witness that X generates a symmetry of F = 0: a total-differential
 * operator with X(F) = nabla(F) identically.  Failure means none exists
 * with the given order bound and coefficient ansatz. */
NablaResult solve_nabla(const EvolutionaryField& X, const std::vector<Poly>& F,
                        int order_bound);

/* field content of the Batalin-Vilkovisky extension of a gauge system:
 * fields, ghosts per operator, and their odd/even antifield partners */
struct BVSpace {
  std::vector<int> q;
  std::vector<int> qdag;
  std::vector<std::vector<int>> gh;
  std::vector<std::vector<int>> ghdag;

  std::vector<ConjugatePair> pairs() const;
};

/* Koszul-Tate part: antifield velocities F on qdag and A^dagger(qdag) on
 * ghdag, zero on fields and ghosts */
EvolutionaryField koszul_tate(const OperatorCollection& C, const BVSpace& bv,
                              const std::vector<Poly>& F);

/* gauge part: field velocity sum A_i(gamma_i), ghost velocity
 * -1/2 Gamma(gamma, gamma), antifields frozen */
EvolutionaryField brst_lift(
    const OperatorCollection& C, const BVSpace& bv,
    const std::map<std::pair<int, int>, std::vector<BiDiffSymbol>>& gamma);

/* master action S + <qdag, sum A_i(gamma_i)> - 1/2 <ghdag, Gamma(gh, gh)> */
Poly bv_action(
    const Poly& S, const OperatorCollection& C, const BVSpace& bv,
    const std::map<std::pair<int, int>, std::vector<BiDiffSymbol>>& gamma);

struct MasterCheck {
  bool ok_initial = false; /* [[S,S]] already a total divergence */
  bool ok = false;
  Poly correction;         /* additive correction found, zero if none */
  Poly self_bracket;       /* [[S+C, S+C]] for the reported correction */
};

/* classical master equation [[S,S]] ~ 0; when it fails, one linearized
 * correction round is attempted and the corrected action is rechecked
 * exactly */
MasterCheck bv_master_check(const Poly& S,
                            const std::vector<ConjugatePair>& pairs);

/* Q(Q(section)) residual per listed variable */
std::vector<std::pair<int, Poly>> square_residuals(
    const EvolutionaryField& Q, const std::vector<int>& codes);

}  // namespace varlie
