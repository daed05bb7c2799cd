#pragma once

#include "varlie/algebroid.hpp"
#include "varlie/diffop.hpp"

namespace varlie {

/* an ordered pair of conjugate variables: a field component and its odd
 * (or antifield) partner */
struct ConjugatePair {
  int coord;
  int conj;
};

/* variational Schouten bracket of two densities,
 * [[w1,w2]] = sum over pairs of
 *   dR(w1)/d(conj) * dL(w2)/d(coord) - dR(w1)/d(coord) * dL(w2)/d(conj),
 * returned as a density (an equivalence class modulo total divergences) */
Poly schouten(const Poly& w1, const Poly& w2,
              const std::vector<ConjugatePair>& pairs);

/* odd charge of a skew operator: -1/2 <b, A(b)> */
Poly w_charge(const TotalDiffOperator& A, const std::vector<int>& bcodes);

/* {F,G} = <dF/dq, A(dG/dq)> as a density */
Poly poisson_bracket(const Poly& F, const Poly& G, const TotalDiffOperator& A,
                     const std::vector<int>& qcodes);

struct HamiltonianCheck {
  bool skew = false;
  bool jacobi = false;
  Poly self_bracket; /* [[w_A, w_A]] */
  bool passed() const { return skew && jacobi; }
};

/* A is Hamiltonian iff it is skew-adjoint and the self-bracket of its odd
 * charge is a total divergence */
HamiltonianCheck is_hamiltonian(const TotalDiffOperator& A,
                                const std::vector<int>& qcodes,
                                const std::vector<int>& bcodes);

/* evolutionary field generated by a charge through the bracket:
 * coord velocity dR(w)/d(conj), conj velocity -dR(w)/d(coord) */
EvolutionaryField field_of_charge(const Poly& w,
                                  const std::vector<ConjugatePair>& pairs);

}  // namespace varlie
