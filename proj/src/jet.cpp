#include "varlie/jet.hpp"

#include <algorithm>
#include <stdexcept>

namespace varlie {

Poly total_derivative(const Poly& p, int dir) {
  if (p.is_zero()) return p;
  const Context& c = p.ctx();
  Poly out = partial_x(p, dir);
  for (auto& v : support_vars_full(p)) {
    Poly dv = Poly::var(c, v.code, midx_plus(v.sigma, dir));
    out += dv * partialL(p, v);
  }
  return out;
}

Poly total_derivative_multi(const Poly& p, const Midx& sigma) {
  Poly out = p;
  for (int i = 0; i < (int)sigma.size(); ++i)
    for (int k = 0; k < sigma[i]; ++k) out = total_derivative(out, i);
  return out;
}

Poly EvolutionaryField::section(int code) const {
  auto it = sections.find(code);
  if (it != sections.end()) return it->second;
  if (!ctx) throw std::logic_error("evolutionary field without context");
  return Poly::zero(*ctx);
}

void EvolutionaryField::set_section(int code, const Poly& p) {
  if (!ctx) ctx = &p.ctx();
  if (p.is_zero())
    sections.erase(code);
  else
    sections[code] = p;
}

bool EvolutionaryField::is_zero() const {
  for (auto& [code, p] : sections)
    if (!p.is_zero()) return false;
  return true;
}

Poly EvolutionaryField::apply(const Poly& F) const {
  if (F.is_zero()) return F;
  const Context& c = F.ctx();
  Poly out(c);
  for (auto& v : support_vars_full(F)) {
    auto it = sections.find(v.code);
    if (it == sections.end()) continue;
    Poly dphi = total_derivative_multi(it->second, v.sigma);
    out += dphi * partialL(F, v);
  }
  return out;
}

EvolutionaryField commutator(const EvolutionaryField& X,
                             const EvolutionaryField& Y) {
  const Context* c = X.ctx ? X.ctx : Y.ctx;
  if (!c) throw std::logic_error("commutator of detached fields");
  EvolutionaryField Z(*c, X.odd != Y.odd);
  int sgn = (X.odd && Y.odd) ? 1 : -1; /* -(-1)^{|X||Y|} */
  std::vector<int> codes;
  for (auto& [k, p] : X.sections) codes.push_back(k);
  for (auto& [k, p] : Y.sections) codes.push_back(k);
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  for (int code : codes) {
    Poly s = X.apply(Y.section(code)) + Y.apply(X.section(code)).scale(sgn);
    Z.set_section(code, s);
  }
  return Z;
}

std::map<Midx, Poly> lin_entries(const Poly& F, int code) {
  std::map<Midx, Poly> out;
  for (auto& v : support_vars_full(F)) {
    if (v.code != code) continue;
    Poly d = partialL(F, v);
    if (!d.is_zero()) out[v.sigma] = d;
  }
  return out;
}

namespace {

Poly euler_from_entries(const Poly& p, int code, bool& any) {
  const Context& c = p.ctx();
  Poly out(c);
  any = false;
  for (auto& v : support_vars_full(p)) {
    if (v.code != code) continue;
    any = true;
    Poly d = partialL(p, v);
    if (d.is_zero()) continue;
    Poly term = total_derivative_multi(d, v.sigma);
    if (midx_order(v.sigma) & 1)
      out -= term;
    else
      out += term;
  }
  return out;
}

}  // namespace

Poly eulerL(const Poly& p, int code) {
  bool any;
  return euler_from_entries(p, code, any);
}

Poly eulerR(const Poly& p, int code) {
  const Context& c = p.ctx();
  if (!c.code_odd(code)) return eulerL(p, code);
  /* split p by parity; for an odd variable,
   * dR/dv = (-1)^{p(w)+1} dL/dv on the part of parity p(w) */
  Poly evenPart(c), oddPart(c);
  for (auto& [m, coef] : p.terms()) {
    if (m.parity() == 0)
      evenPart.add_term(m, coef);
    else
      oddPart.add_term(m, coef);
  }
  return -eulerL(evenPart, code) + eulerL(oddPart, code);
}

bool is_total_divergence(const Poly& p) {
  if (p.is_zero()) return true;
  const Context& c = p.ctx();
  for (int code = 0; code < c.num_codes(); ++code)
    if (!eulerL(p, code).is_zero()) return false;
  return true;
}

bool cohomology_equal(const Poly& a, const Poly& b) {
  return is_total_divergence(a - b);
}

EquationNormalForm EquationNormalForm::evolution(const Context& c, int code,
                                                 int dir, const Poly& rhs) {
  EquationNormalForm e;
  e.kind = Evolution;
  e.code = code;
  e.lhs_sigma = midx_zero(c.dim());
  e.lhs_sigma[dir] = 1;
  e.rhs = rhs;
  for (auto& v : support_vars_full(rhs))
    if (v.code == code && v.sigma[dir] > 0)
      throw std::invalid_argument(
          "evolution right-hand side contains the evolution direction");
  return e;
}

EquationNormalForm EquationNormalForm::hyperbolic(const Context& c, int code,
                                                  int dx, int dy,
                                                  const Poly& rhs) {
  EquationNormalForm e;
  e.kind = Hyperbolic;
  e.code = code;
  e.lhs_sigma = midx_zero(c.dim());
  e.lhs_sigma[dx] = 1;
  e.lhs_sigma[dy] = 1;
  e.rhs = rhs;
  for (auto& v : support_vars_full(rhs))
    if (v.code == code && v.sigma[dx] > 0 && v.sigma[dy] > 0)
      throw std::invalid_argument(
          "hyperbolic right-hand side contains a mixed derivative");
  return e;
}

namespace {

bool reducible(const JetVar& v, const EquationNormalForm& eq) {
  if (v.code != eq.code) return false;
  for (size_t i = 0; i < v.sigma.size(); ++i)
    if (v.sigma[i] < eq.lhs_sigma[i]) return false;
  return true;
}

}  // namespace

Poly on_shell_reduce(const Poly& p,
                     const std::vector<EquationNormalForm>& eqs) {
  Poly cur = p;
  for (;;) {
    std::map<JetVar, Poly> repl;
    for (auto& v : support_vars(cur)) {
      for (auto& eq : eqs) {
        if (reducible(v, eq)) {
          Midx rest = v.sigma;
          for (size_t i = 0; i < rest.size(); ++i) rest[i] -= eq.lhs_sigma[i];
          repl[v] = total_derivative_multi(eq.rhs, rest);
          break;
        }
      }
    }
    if (repl.empty()) return cur;
    cur = subst(cur, repl);
  }
}

}  // namespace varlie
