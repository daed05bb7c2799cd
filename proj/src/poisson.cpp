#include "varlie/poisson.hpp"

namespace varlie {

Poly schouten(const Poly& w1, const Poly& w2,
              const std::vector<ConjugatePair>& pairs) {
  const Context& ctx = w1.ctx();
  Poly out = Poly::zero(ctx);
  for (auto& pr : pairs) {
    out += eulerR(w1, pr.conj) * eulerL(w2, pr.coord);
    out -= eulerR(w1, pr.coord) * eulerL(w2, pr.conj);
  }
  return out;
}

Poly w_charge(const TotalDiffOperator& A, const std::vector<int>& bcodes) {
  const Context& ctx = *A.ctx;
  std::vector<Poly> b;
  for (int c : bcodes) b.push_back(Poly::var(ctx, c, midx_zero(ctx.dim())));
  return coupling(b, A, b).scale(Rat(-1, 2));
}

Poly poisson_bracket(const Poly& F, const Poly& G, const TotalDiffOperator& A,
                     const std::vector<int>& qcodes) {
  std::vector<Poly> dF, dG;
  for (int c : qcodes) {
    dF.push_back(eulerL(F, c));
    dG.push_back(eulerL(G, c));
  }
  return coupling(dF, A, dG);
}

HamiltonianCheck is_hamiltonian(const TotalDiffOperator& A,
                                const std::vector<int>& qcodes,
                                const std::vector<int>& bcodes) {
  HamiltonianCheck out;
  out.skew = (A + A.adjoint()).is_zero();
  Poly w = w_charge(A, bcodes);
  std::vector<ConjugatePair> pairs;
  for (int i = 0; i < (int)qcodes.size(); ++i)
    pairs.push_back({qcodes[i], bcodes[i]});
  out.self_bracket = schouten(w, w, pairs);
  out.jacobi = is_total_divergence(out.self_bracket);
  return out;
}

EvolutionaryField field_of_charge(const Poly& w,
                                  const std::vector<ConjugatePair>& pairs) {
  const Context& ctx = w.ctx();
  /* an even charge generates an odd field and vice versa */
  EvolutionaryField X(ctx, w.parity() != 1);
  for (auto& pr : pairs) {
    X.set_section(pr.coord, eulerR(w, pr.conj));
    X.set_section(pr.conj, -eulerR(w, pr.coord));
  }
  return X;
}

}  // namespace varlie
