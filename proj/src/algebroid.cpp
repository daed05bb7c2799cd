#include "varlie/algebroid.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>
#include <stdexcept>

namespace varlie {

int OperatorCollection::max_order() const {
  int m = 0;
  for (auto& A : ops) m = std::max(m, A.order());
  return m;
}

bool BiDiffSymbol::is_zero() const {
  for (auto& t : terms)
    if (!t.coeff.is_zero()) return false;
  return true;
}

std::vector<Poly> BiDiffSymbol::eval(const std::vector<Poly>& a,
                                     const std::vector<Poly>& b) const {
  std::vector<Poly> out(out_comps, Poly::zero(*ctx));
  for (auto& t : terms) {
    Poly da = total_derivative_multi(a[t.ci], t.sigma);
    Poly db = total_derivative_multi(b[t.cj], t.tau);
    out[t.out] += t.coeff * da * db;
  }
  return out;
}

BiDiffSymbol BiDiffSymbol::from_polys(const Context& ctx,
                                      const std::vector<Poly>& comps,
                                      const std::vector<int>& acodes,
                                      const std::vector<int>& bcodes) {
  BiDiffSymbol G;
  G.ctx = &ctx;
  G.out_comps = (int)comps.size();
  std::map<int, int> apos, bpos;
  for (int i = 0; i < (int)acodes.size(); ++i) apos[acodes[i]] = i;
  for (int i = 0; i < (int)bcodes.size(); ++i) bpos[bcodes[i]] = i;
  std::map<std::tuple<int, int, int, Midx, Midx>, Poly> acc;
  for (int out = 0; out < (int)comps.size(); ++out) {
    for (auto& [m, c] : comps[out].terms()) {
      std::optional<JetVar> va, vb;
      Monomial rest = m;
      int swaps = 0;
      /* odd carriers: record positions so the Koszul sign of moving both
       * factors to the tail (order a then b) is accounted for */
      int n = (int)rest.odd.size();
      int ia = -1, ib = -1;
      for (int i = 0; i < n; ++i) {
        if (ia < 0 && apos.count(rest.odd[i].code))
          ia = i;
        else if (ib < 0 && bpos.count(rest.odd[i].code))
          ib = i;
      }
      if (ia >= 0) {
        va = rest.odd[ia];
        swaps += n - 1 - ia;
      }
      if (ib >= 0) {
        vb = rest.odd[ib];
        int shift = (ia >= 0 && ib > ia) ? 1 : 0;
        swaps += n - 1 - (ia >= 0 ? 1 : 0) - (ib - shift);
      }
      std::vector<JetVar> kept;
      for (int i = 0; i < n; ++i)
        if (i != ia && i != ib) kept.push_back(rest.odd[i]);
      rest.odd = kept;
      for (auto it = rest.even.begin(); it != rest.even.end();) {
        bool hit = false;
        if (!va && apos.count(it->first.code)) {
          va = it->first;
          hit = true;
        } else if (!vb && bpos.count(it->first.code)) {
          vb = it->first;
          hit = true;
        }
        if (hit) {
          if (--it->second == 0)
            it = rest.even.erase(it);
          else
            ++it;
        } else
          ++it;
      }
      if (!va || !vb)
        throw std::runtime_error("expression is not bilinear in the sections");
      Rat cc = (swaps & 1) ? -c : c;
      auto key = std::make_tuple(out, apos[va->code], bpos[vb->code],
                                 va->sigma, vb->sigma);
      auto it = acc.find(key);
      if (it == acc.end()) it = acc.emplace(key, Poly::zero(ctx)).first;
      it->second.add_term(rest, cc);
    }
  }
  for (auto& [k, coeff] : acc) {
    if (coeff.is_zero()) continue;
    auto [out, ci, cj, sg, tu] = k;
    G.terms.push_back({out, ci, cj, sg, tu, coeff});
  }
  return G;
}

std::vector<Poly> BiDiffSymbol::to_polys(const std::vector<int>& acodes,
                                         const std::vector<int>& bcodes) const {
  std::vector<Poly> out(out_comps, Poly::zero(*ctx));
  for (auto& t : terms)
    out[t.out] += t.coeff * Poly::var(*ctx, acodes[t.ci], t.sigma) *
                  Poly::var(*ctx, bcodes[t.cj], t.tau);
  return out;
}

static std::vector<Poly> var_vector(const Context& ctx,
                                    const std::vector<int>& codes) {
  std::vector<Poly> v;
  Midx z = midx_zero(ctx.dim());
  for (int c : codes) v.push_back(Poly::var(ctx, c, z));
  return v;
}

static EvolutionaryField field_along(const Context& ctx,
                                     const std::vector<int>& target,
                                     const std::vector<Poly>& vel) {
  EvolutionaryField X;
  X.ctx = &ctx;
  X.odd = false;
  for (int r = 0; r < (int)target.size(); ++r) X.set_section(target[r], vel[r]);
  return X;
}

std::vector<Poly> image_bracket(const OperatorCollection& C, int i, int j,
                                const std::vector<int>& p1codes,
                                const std::vector<int>& p2codes) {
  const Context& ctx = *C.ctx;
  std::vector<Poly> f1 = C.ops[i].apply(var_vector(ctx, p1codes));
  std::vector<Poly> f2 = C.ops[j].apply(var_vector(ctx, p2codes));
  EvolutionaryField X1 = field_along(ctx, C.target, f1);
  EvolutionaryField X2 = field_along(ctx, C.target, f2);
  std::vector<Poly> out;
  for (int r = 0; r < (int)C.target.size(); ++r)
    out.push_back(X1.apply(f2[r]) - X2.apply(f1[r]));
  return out;
}

int resolve_order_bound(int requested, const std::vector<Poly>& expr,
                        const OperatorCollection& C) {
  if (requested >= 0) return requested;
  if (const char* env = std::getenv("VARLIE_ORDER_BOUND")) {
    int v = std::atoi(env);
    if (v >= 0) return v;
  }
  int eo = 0;
  for (auto& p : expr) eo = std::max(eo, max_order(p));
  return eo + C.max_order();
}

/* profile: carrier code -> total degree within one monomial */
using Profile = std::vector<std::pair<int, int>>;

static Profile carrier_profile(const Monomial& m, const std::set<int>& cset) {
  std::map<int, int> p;
  for (auto& [v, e] : m.even)
    if (cset.count(v.code)) p[v.code] += e;
  for (auto& v : m.odd)
    if (cset.count(v.code)) p[v.code] += 1;
  return Profile(p.begin(), p.end());
}

static Monomial strip_carriers(const Monomial& m, const std::set<int>& cset) {
  Monomial r = m;
  for (auto it = r.even.begin(); it != r.even.end();)
    it = cset.count(it->first.code) ? r.even.erase(it) : std::next(it);
  r.odd.erase(
      std::remove_if(r.odd.begin(), r.odd.end(),
                     [&](const JetVar& v) { return cset.count(v.code) > 0; }),
      r.odd.end());
  return r;
}

static void gen_midx(int dim, Midx& cur, int pos, int left,
                     std::vector<Midx>& out) {
  if (pos == dim) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= left; ++k) {
    cur[pos] = k;
    gen_midx(dim, cur, pos + 1, left - k, out);
  }
  cur[pos] = 0;
}

/* all carrier-jet monomials realizing one degree profile with every jet
 * order at most the bound */
static std::vector<Monomial> profile_monomials(const Context& ctx,
                                               const Profile& prof,
                                               int bound) {
  std::vector<Midx> orders;
  Midx cur = midx_zero(ctx.dim());
  gen_midx(ctx.dim(), cur, 0, bound, orders);
  std::sort(orders.begin(), orders.end());

  std::vector<Monomial> acc{Monomial{}};
  for (auto& [code, count] : prof) {
    bool odd = ctx.code_odd(code);
    std::vector<std::vector<int>> picks;
    std::vector<int> pick;
    std::function<void(int, int)> rec = [&](int start, int need) {
      if (need == 0) {
        picks.push_back(pick);
        return;
      }
      for (int i = start; i < (int)orders.size(); ++i) {
        pick.push_back(i);
        rec(odd ? i + 1 : i, need - 1);
        pick.pop_back();
      }
    };
    rec(0, count);
    std::vector<Monomial> next;
    /* profile codes ascend and picks are non-decreasing, so plain appends
     * keep the factor lists canonical */
    for (auto& base : acc)
      for (auto& pk : picks) {
        Monomial t = base;
        for (int idx : pk) {
          JetVar v{code, orders[idx]};
          if (odd)
            t.odd.push_back(v);
          else if (!t.even.empty() && t.even.back().first == v)
            t.even.back().second += 1;
          else
            t.even.push_back({v, 1});
        }
        next.push_back(t);
      }
    acc = std::move(next);
  }
  return acc;
}

DecompositionResult image_membership_solve(const OperatorCollection& C,
                                           const std::vector<Poly>& expr,
                                           const std::vector<int>& carriers,
                                           int order_bound) {
  const Context& ctx = *C.ctx;
  DecompositionResult R;
  R.order_bound = resolve_order_bound(order_bound, expr, C);
  for (int k = 0; k < C.size(); ++k)
    R.sections.push_back(std::vector<Poly>(C.ops[k].cols, Poly::zero(ctx)));
  R.residual = expr;

  bool trivial = true;
  for (auto& p : expr)
    if (!p.is_zero()) trivial = false;
  if (trivial) {
    R.decided = true;
    return R;
  }

  std::set<int> cset(carriers.begin(), carriers.end());
  std::set<Profile> profiles;
  std::set<Monomial> divisors;
  for (auto& p : expr)
    for (auto& [m, c] : p.terms()) {
      profiles.insert(carrier_profile(m, cset));
      for (auto& d : monomial_divisors(strip_carriers(m, cset)))
        divisors.insert(d);
    }

  /* candidate section monomials mu = carrier-jet part * divisor */
  std::set<Monomial> mus;
  for (auto& prof : profiles)
    for (auto& s : profile_monomials(ctx, prof, R.order_bound))
      for (auto& d : divisors) {
        Monomial prod;
        if (mul_monomial(s, d, prod) != 0) mus.insert(prod);
      }

  /* deterministic column order: low carrier order first, then low divisor
   * degree, then the monomial itself, then operator and component */
  struct Col {
    int sord, deg;
    Monomial mu;
    int k, c;
    std::vector<Poly> image;
  };
  std::vector<Col> cols;
  for (auto& mu : mus) {
    int sord = 0, deg = 0;
    for (auto& [v, e] : mu.even)
      (cset.count(v.code) ? sord : deg) += e * (1 + midx_order(v.sigma));
    for (auto& v : mu.odd)
      (cset.count(v.code) ? sord : deg) += 1 + midx_order(v.sigma);
    for (auto& [b, e] : mu.xpow) deg += e;
    Poly mup = Poly::zero(ctx);
    mup.add_term(mu, Rat(1));
    for (int k = 0; k < C.size(); ++k)
      for (int c = 0; c < C.ops[k].cols; ++c) {
        std::vector<Poly> arg(C.ops[k].cols, Poly::zero(ctx));
        arg[c] = mup;
        std::vector<Poly> img = C.ops[k].apply(arg);
        bool z = true;
        for (auto& q : img)
          if (!q.is_zero()) z = false;
        if (!z) cols.push_back({sord, deg, mu, k, c, std::move(img)});
      }
  }
  std::stable_sort(cols.begin(), cols.end(), [](const Col& a, const Col& b) {
    return std::tie(a.sord, a.deg, a.mu, a.k, a.c) <
           std::tie(b.sord, b.deg, b.mu, b.k, b.c);
  });
  R.columns = (int)cols.size();

  /* linear equations: the coefficient of every monomial of every target
   * component must match */
  std::map<std::pair<int, Monomial>, std::vector<std::pair<int, Rat>>> lhs;
  for (int t = 0; t < (int)cols.size(); ++t)
    for (int r = 0; r < (int)C.target.size(); ++r)
      for (auto& [m, cf] : cols[t].image[r].terms())
        lhs[{r, m}].push_back({t, cf});
  std::map<std::pair<int, Monomial>, Rat> rhs;
  for (int r = 0; r < (int)expr.size(); ++r)
    for (auto& [m, cf] : expr[r].terms()) {
      rhs[{r, m}] = cf;
      lhs.try_emplace({r, m});
    }

  LinSys sys((int)cols.size());
  for (auto& [key, a] : lhs) {
    auto it = rhs.find(key);
    sys.add_row(a, it == rhs.end() ? Rat(0) : it->second);
  }
  LinSolution sol = solve(sys);

  for (int t = 0; t < (int)cols.size(); ++t)
    if (sol.x[t] != 0) {
      Poly mup = Poly::zero(ctx);
      mup.add_term(cols[t].mu, sol.x[t]);
      R.sections[cols[t].k][cols[t].c] += mup;
    }
  for (int k = 0; k < C.size(); ++k) {
    std::vector<Poly> img = C.ops[k].apply(R.sections[k]);
    for (int r = 0; r < (int)C.target.size(); ++r) R.residual[r] -= img[r];
  }
  bool resid_zero = true;
  for (auto& p : R.residual)
    if (!p.is_zero()) resid_zero = false;
  R.decided = sol.consistent && resid_zero;
  return R;
}

ChristoffelResult christoffel_extract(const OperatorCollection& C, int i,
                                      int j, const std::vector<int>& p1codes,
                                      const std::vector<int>& p2codes,
                                      int order_bound) {
  std::vector<Poly> expr = image_bracket(C, i, j, p1codes, p2codes);
  std::vector<int> carriers = p1codes;
  carriers.insert(carriers.end(), p2codes.begin(), p2codes.end());
  DecompositionResult d = image_membership_solve(C, expr, carriers, order_bound);
  ChristoffelResult R;
  R.decided = d.decided;
  R.residual = d.residual;
  R.order_bound = d.order_bound;
  for (int k = 0; k < C.size(); ++k)
    R.gamma.push_back(
        BiDiffSymbol::from_polys(*C.ctx, d.sections[k], p1codes, p2codes));
  return R;
}

std::vector<Poly> jacobi_residual(const OperatorCollection& C,
                                  const BiDiffSymbol& gamma,
                                  const std::vector<int>& p1codes,
                                  const std::vector<int>& p2codes,
                                  const std::vector<int>& p3codes) {
  const Context& ctx = *C.ctx;
  const TotalDiffOperator& A = C.ops[0];
  std::vector<const std::vector<int>*> p{&p1codes, &p2codes, &p3codes};
  std::vector<Poly> R(C.target.size(), Poly::zero(ctx));
  for (int s = 0; s < 3; ++s) {
    const auto& pa = *p[s];
    const auto& pb = *p[(s + 1) % 3];
    const auto& pc = *p[(s + 2) % 3];
    std::vector<Poly> inner =
        gamma.eval(var_vector(ctx, pb), var_vector(ctx, pc));
    EvolutionaryField X =
        field_along(ctx, C.target, A.apply(var_vector(ctx, pa)));
    std::vector<Poly> term(inner.size(), Poly::zero(ctx));
    for (int c = 0; c < (int)inner.size(); ++c) term[c] = X.apply(inner[c]);
    std::vector<Poly> nest = gamma.eval(var_vector(ctx, pa), inner);
    for (int c = 0; c < (int)inner.size(); ++c) term[c] += nest[c];
    std::vector<Poly> img = A.apply(term);
    for (int r = 0; r < (int)R.size(); ++r) R[r] += img[r];
  }
  return R;
}

EvolutionaryField build_homological_field(
    const OperatorCollection& C,
    const std::vector<std::vector<int>>& ghost_codes,
    const std::map<std::pair<int, int>, std::vector<BiDiffSymbol>>& gamma) {
  const Context& ctx = *C.ctx;
  EvolutionaryField Q;
  Q.ctx = &ctx;
  Q.odd = true;
  std::vector<Poly> tvel(C.target.size(), Poly::zero(ctx));
  for (int i = 0; i < C.size(); ++i) {
    std::vector<Poly> img = C.ops[i].apply(var_vector(ctx, ghost_codes[i]));
    for (int r = 0; r < (int)tvel.size(); ++r) tvel[r] += img[r];
  }
  for (int r = 0; r < (int)C.target.size(); ++r)
    Q.set_section(C.target[r], tvel[r]);
  std::vector<std::vector<Poly>> gvel;
  for (int k = 0; k < C.size(); ++k)
    gvel.push_back(std::vector<Poly>(C.ops[k].cols, Poly::zero(ctx)));
  for (auto& [ij, G] : gamma) {
    auto bi = var_vector(ctx, ghost_codes[ij.first]);
    auto bj = var_vector(ctx, ghost_codes[ij.second]);
    for (int k = 0; k < C.size(); ++k) {
      if (G[k].is_zero()) continue;
      std::vector<Poly> v = G[k].eval(bi, bj);
      for (int c = 0; c < (int)v.size(); ++c)
        gvel[k][c] += v[c].scale(Rat(-1, 2));
    }
  }
  for (int k = 0; k < C.size(); ++k)
    for (int c = 0; c < (int)gvel[k].size(); ++c)
      Q.set_section(ghost_codes[k][c], gvel[k][c]);
  return Q;
}

HomologicalCheck verify_homological(
    const EvolutionaryField& Q, const OperatorCollection& C,
    const std::vector<std::vector<int>>& ghost_codes) {
  const Context& ctx = *C.ctx;
  HomologicalCheck out;
  bool target_zero = true, ghost_zero = true;
  for (int t : C.target) {
    Poly r = Q.apply(Q.section(t));
    if (!r.is_zero()) target_zero = false;
    out.residuals.push_back({t, r});
  }
  std::vector<std::vector<Poly>> gres;
  for (auto& codes : ghost_codes) {
    std::vector<Poly> comp;
    for (int g : codes) {
      Poly r = Q.apply(Q.section(g));
      if (!r.is_zero()) ghost_zero = false;
      out.residuals.push_back({g, r});
      comp.push_back(r);
    }
    gres.push_back(comp);
  }
  if (target_zero && ghost_zero) {
    out.status = HomologicalCheck::Status::ExactZero;
    return out;
  }
  if (target_zero) {
    /* ghost residuals may cancel inside the collection: only their image
     * under the anchors acts on the fields */
    std::vector<Poly> img(C.target.size(), Poly::zero(ctx));
    for (int k = 0; k < C.size(); ++k) {
      std::vector<Poly> a = C.ops[k].apply(gres[k]);
      for (int r = 0; r < (int)img.size(); ++r) img[r] += a[r];
    }
    bool z = true;
    for (auto& p : img)
      if (!p.is_zero()) z = false;
    if (z) {
      out.status = HomologicalCheck::Status::ZeroModKernel;
      return out;
    }
  }
  out.status = HomologicalCheck::Status::Fail;
  return out;
}

}  // namespace varlie
