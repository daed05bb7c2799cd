#include "varlie/gauge.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace varlie {

EquationSystem EquationSystem::of_action(const Poly& S,
                                         const std::vector<int>& qcodes) {
  EquationSystem E;
  E.ctx = &S.ctx();
  E.qcodes = qcodes;
  for (int c : qcodes) E.F.push_back(eulerL(S, c));
  return E;
}

bool helmholtz_check(const std::vector<Poly>& F,
                     const std::vector<int>& qcodes) {
  TotalDiffOperator L = linearization(F, qcodes);
  return L == L.adjoint();
}

NoetherCheck noether_check(const TotalDiffOperator& N,
                           const std::vector<Poly>& F) {
  NoetherCheck out;
  out.residual = N.apply(F);
  out.exact_zero = true;
  for (auto& p : out.residual)
    if (!p.is_zero()) out.exact_zero = false;
  return out;
}

TotalDiffOperator generator_from_relation(const TotalDiffOperator& N) {
  return N.adjoint();
}

NoetherCheck linear_noether_relation(const TotalDiffOperator& A,
                                     const std::vector<Poly>& F) {
  return noether_check(A.adjoint(), F);
}

NablaResult solve_nabla(const EvolutionaryField& X, const std::vector<Poly>& F,
                        int order_bound) {
  const Context& ctx = *X.ctx;
  int m = (int)F.size();
  NablaResult R;
  R.order_bound = order_bound;
  R.nabla = TotalDiffOperator(ctx, m, m);

  std::vector<Poly> lhs;
  for (auto& f : F) lhs.push_back(X.apply(f));

  /* coefficient candidates divide some monomial of the target expression */
  std::set<Monomial> coeffs;
  for (auto& p : lhs)
    for (auto& [mn, c] : p.terms())
      for (auto& d : monomial_divisors(mn)) coeffs.insert(d);

  std::vector<Midx> taus;
  {
    Midx cur = midx_zero(ctx.dim());
    std::vector<Midx> all;
    /* reuse of the membership enumeration is not worth a shared helper;
     * multi-indices up to the bound are generated directly */
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == ctx.dim()) {
        all.push_back(cur);
        return;
      }
      for (int k = 0; k <= left; ++k) {
        cur[pos] = k;
        rec(pos + 1, left - k);
      }
      cur[pos] = 0;
    };
    rec(0, order_bound);
    std::sort(all.begin(), all.end(),
              [](const Midx& a, const Midx& b) {
                return std::make_pair(midx_order(a), a) <
                       std::make_pair(midx_order(b), b);
              });
    taus = all;
  }

  struct Col {
    int tord;
    Monomial mu;
    int r, c;
    Midx tau;
    Poly image; /* contribution to row r */
  };
  std::vector<Col> cols;
  std::map<std::pair<int, Midx>, Poly> dF;
  for (int c = 0; c < m; ++c)
    for (auto& tau : taus) dF[{c, tau}] = total_derivative_multi(F[c], tau);
  for (auto& tau : taus)
    for (auto& mu : coeffs) {
      Poly mup = Poly::zero(ctx);
      mup.add_term(mu, Rat(1));
      for (int c = 0; c < m; ++c) {
        Poly img = mup * dF[{c, tau}];
        if (img.is_zero()) continue;
        for (int r = 0; r < m; ++r)
          cols.push_back({midx_order(tau), mu, r, c, tau, img});
      }
    }
  std::stable_sort(cols.begin(), cols.end(), [](const Col& a, const Col& b) {
    return std::tie(a.tord, a.tau, a.mu, a.r, a.c) <
           std::tie(b.tord, b.tau, b.mu, b.r, b.c);
  });

  std::map<std::pair<int, Monomial>, std::vector<std::pair<int, Rat>>> lhsrows;
  for (int t = 0; t < (int)cols.size(); ++t)
    for (auto& [mn, cf] : cols[t].image.terms())
      lhsrows[{cols[t].r, mn}].push_back({t, cf});
  std::map<std::pair<int, Monomial>, Rat> rhs;
  for (int r = 0; r < m; ++r)
    for (auto& [mn, cf] : lhs[r].terms()) {
      rhs[{r, mn}] = cf;
      lhsrows.try_emplace({r, mn});
    }

  LinSys sys((int)cols.size());
  for (auto& [key, a] : lhsrows) {
    auto it = rhs.find(key);
    sys.add_row(a, it == rhs.end() ? Rat(0) : it->second);
  }
  LinSolution sol = solve(sys);

  for (int t = 0; t < (int)cols.size(); ++t)
    if (sol.x[t] != 0) {
      Poly mup = Poly::zero(ctx);
      mup.add_term(cols[t].mu, sol.x[t]);
      R.nabla.add(cols[t].r, cols[t].c, cols[t].tau, mup);
    }
  R.residual = lhs;
  std::vector<Poly> img = R.nabla.apply(F);
  bool zero = true;
  for (int r = 0; r < m; ++r) {
    R.residual[r] -= img[r];
    if (!R.residual[r].is_zero()) zero = false;
  }
  R.found = sol.consistent && zero;
  return R;
}

std::vector<ConjugatePair> BVSpace::pairs() const {
  std::vector<ConjugatePair> out;
  for (int i = 0; i < (int)q.size(); ++i) out.push_back({q[i], qdag[i]});
  for (int k = 0; k < (int)gh.size(); ++k)
    for (int c = 0; c < (int)gh[k].size(); ++c)
      out.push_back({gh[k][c], ghdag[k][c]});
  return out;
}

static std::vector<Poly> vars_of(const Context& ctx,
                                 const std::vector<int>& codes) {
  std::vector<Poly> v;
  for (int c : codes) v.push_back(Poly::var(ctx, c, midx_zero(ctx.dim())));
  return v;
}

EvolutionaryField koszul_tate(const OperatorCollection& C, const BVSpace& bv,
                              const std::vector<Poly>& F) {
  const Context& ctx = *C.ctx;
  EvolutionaryField d(ctx, true);
  for (int k = 0; k < (int)bv.qdag.size(); ++k)
    d.set_section(bv.qdag[k], F[k]);
  std::vector<Poly> qd = vars_of(ctx, bv.qdag);
  for (int i = 0; i < C.size(); ++i) {
    std::vector<Poly> v = C.ops[i].adjoint().apply(qd);
    for (int c = 0; c < (int)v.size(); ++c) d.set_section(bv.ghdag[i][c], v[c]);
  }
  return d;
}

EvolutionaryField brst_lift(
    const OperatorCollection& C, const BVSpace& bv,
    const std::map<std::pair<int, int>, std::vector<BiDiffSymbol>>& gamma) {
  return build_homological_field(C, bv.gh, gamma);
}

Poly bv_action(
    const Poly& S, const OperatorCollection& C, const BVSpace& bv,
    const std::map<std::pair<int, int>, std::vector<BiDiffSymbol>>& gamma) {
  const Context& ctx = S.ctx();
  Poly out = S;
  std::vector<Poly> tvel(C.target.size(), Poly::zero(ctx));
  for (int i = 0; i < C.size(); ++i) {
    std::vector<Poly> img = C.ops[i].apply(vars_of(ctx, bv.gh[i]));
    for (int r = 0; r < (int)tvel.size(); ++r) tvel[r] += img[r];
  }
  std::vector<Poly> qd = vars_of(ctx, bv.qdag);
  for (int r = 0; r < (int)tvel.size(); ++r) out += qd[r] * tvel[r];
  for (auto& [ij, G] : gamma) {
    auto gi = vars_of(ctx, bv.gh[ij.first]);
    auto gj = vars_of(ctx, bv.gh[ij.second]);
    for (int k = 0; k < C.size(); ++k) {
      if (G[k].is_zero()) continue;
      std::vector<Poly> v = G[k].eval(gi, gj);
      std::vector<Poly> gd = vars_of(ctx, bv.ghdag[k]);
      for (int c = 0; c < (int)v.size(); ++c)
        out += (gd[c] * v[c]).scale(Rat(-1, 2));
    }
  }
  return out;
}

MasterCheck bv_master_check(const Poly& S,
                            const std::vector<ConjugatePair>& pairs) {
  const Context& ctx = S.ctx();
  MasterCheck out;
  out.correction = Poly::zero(ctx);
  out.self_bracket = schouten(S, S, pairs);
  out.ok_initial = is_total_divergence(out.self_bracket);
  if (out.ok_initial) {
    out.ok = true;
    return out;
  }

  /* one linearized round: [[S,S]] + 2[[S,C]] must be a divergence, with the
   * candidate monomials of C divided out of the defect itself */
  std::set<Monomial> cand;
  for (auto& [mn, c] : out.self_bracket.terms())
    for (auto& d : monomial_divisors(mn))
      if (!d.is_one() && (d.parity() & 1) == 0) cand.insert(d);
  std::vector<Monomial> cands(cand.begin(), cand.end());

  std::vector<Poly> br;
  for (auto& mu : cands) {
    Poly mup = Poly::zero(ctx);
    mup.add_term(mu, Rat(1));
    br.push_back(schouten(S, mup, pairs).scale(Rat(2)));
  }

  std::map<std::pair<int, Monomial>, std::vector<std::pair<int, Rat>>> lhs;
  std::map<std::pair<int, Monomial>, Rat> rhs;
  for (int code = 0; code < ctx.num_codes(); ++code) {
    Poly e0 = eulerL(out.self_bracket, code);
    for (auto& [mn, cf] : e0.terms()) {
      rhs[{code, mn}] = -cf;
      lhs.try_emplace({code, mn});
    }
    for (int t = 0; t < (int)br.size(); ++t) {
      Poly et = eulerL(br[t], code);
      for (auto& [mn, cf] : et.terms()) lhs[{code, mn}].push_back({t, cf});
    }
  }
  LinSys sys((int)cands.size());
  for (auto& [key, a] : lhs) {
    auto it = rhs.find(key);
    sys.add_row(a, it == rhs.end() ? Rat(0) : it->second);
  }
  LinSolution sol = solve(sys);
  for (int t = 0; t < (int)cands.size(); ++t)
    if (sol.x[t] != 0) {
      Poly mup = Poly::zero(ctx);
      mup.add_term(cands[t], sol.x[t]);
      out.correction += mup;
    }
  Poly corrected = S + out.correction;
  out.self_bracket = schouten(corrected, corrected, pairs);
  out.ok = is_total_divergence(out.self_bracket);
  return out;
}

std::vector<std::pair<int, Poly>> square_residuals(
    const EvolutionaryField& Q, const std::vector<int>& codes) {
  std::vector<std::pair<int, Poly>> out;
  for (int c : codes) out.push_back({c, Q.apply(Q.section(c))});
  return out;
}

}  // namespace varlie
