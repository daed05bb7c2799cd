#include "varlie/diffop.hpp"

#include <functional>
#include <stdexcept>

namespace varlie {

namespace {

/* enumerate mu <= tau componentwise, with multinomial binom(tau, mu) */
void for_each_sub(const Midx& tau,
                  const std::function<void(const Midx&, const Rat&)>& fn) {
  Midx mu = midx_zero((int)tau.size());
  std::function<void(size_t, Rat)> rec = [&](size_t i, Rat binom) {
    if (i == tau.size()) {
      fn(mu, binom);
      return;
    }
    Rat b = 1;
    for (int k = 0; k <= tau[i]; ++k) {
      mu[i] = k;
      rec(i + 1, binom * b);
      b = b * (tau[i] - k) / (k + 1);
    }
    mu[i] = 0;
  };
  rec(0, Rat(1));
}

}  // namespace

TotalDiffOperator TotalDiffOperator::identity(const Context& c, int n) {
  TotalDiffOperator A(c, n, n);
  for (int i = 0; i < n; ++i)
    A.add(i, i, midx_zero(c.dim()), Poly::constant(c, 1));
  return A;
}

TotalDiffOperator TotalDiffOperator::dpow(const Context& c, const Midx& tau) {
  TotalDiffOperator A(c, 1, 1);
  A.add(0, 0, tau, Poly::constant(c, 1));
  return A;
}

void TotalDiffOperator::add(int r, int c, const Midx& tau, const Poly& coeff) {
  if (coeff.is_zero()) return;
  auto key = std::make_tuple(r, c, tau);
  auto it = ent.find(key);
  if (it == ent.end()) {
    ent.emplace(key, coeff);
  } else {
    it->second += coeff;
    if (it->second.is_zero()) ent.erase(it);
  }
}

Poly TotalDiffOperator::entry(int r, int c, const Midx& tau) const {
  auto it = ent.find(std::make_tuple(r, c, tau));
  if (it != ent.end()) return it->second;
  return Poly::zero(*ctx);
}

std::vector<Poly> TotalDiffOperator::apply(const std::vector<Poly>& s) const {
  if ((int)s.size() != cols)
    throw std::invalid_argument("operator applied to wrong arity");
  std::vector<Poly> out(rows, Poly::zero(*ctx));
  for (auto& [key, a] : ent) {
    auto& [r, c, tau] = key;
    out[r] += a * total_derivative_multi(s[c], tau);
  }
  return out;
}

Poly TotalDiffOperator::apply_scalar(const Poly& s) const {
  if (rows != 1 || cols != 1)
    throw std::invalid_argument("apply_scalar on a matrix operator");
  return apply({s})[0];
}

TotalDiffOperator TotalDiffOperator::compose(
    const TotalDiffOperator& inner) const {
  if (cols != inner.rows)
    throw std::invalid_argument("composition arity mismatch");
  TotalDiffOperator out(*ctx, rows, inner.cols);
  for (auto& [ka, a] : ent) {
    auto& [r, k, tau] = ka;
    for (auto& [kb, b] : inner.ent) {
      auto& [k2, c, mu] = kb;
      if (k2 != k) continue;
      /* a D^tau (b D^mu s) = sum_nu binom(tau,nu) a D^nu(b) D^{tau-nu+mu} s */
      for_each_sub(tau, [&](const Midx& nu, const Rat& binom) {
        Poly dnb = total_derivative_multi(b, nu);
        if (dnb.is_zero()) return;
        Midx rest = mu;
        for (size_t i = 0; i < rest.size(); ++i) rest[i] += tau[i] - nu[i];
        out.add(r, c, rest, (a * dnb).scale(binom));
      });
    }
  }
  return out;
}

TotalDiffOperator TotalDiffOperator::adjoint() const {
  TotalDiffOperator out(*ctx, cols, rows);
  for (auto& [key, a] : ent) {
    auto& [r, c, tau] = key;
    /* (a D^tau)^† = (-1)^{|tau|} D^tau ∘ a */
    int sgn = (midx_order(tau) & 1) ? -1 : 1;
    for_each_sub(tau, [&](const Midx& nu, const Rat& binom) {
      Poly dna = total_derivative_multi(a, nu);
      if (dna.is_zero()) return;
      Midx rest = tau;
      for (size_t i = 0; i < rest.size(); ++i) rest[i] -= nu[i];
      out.add(c, r, rest, dna.scale(binom * sgn));
    });
  }
  return out;
}

TotalDiffOperator TotalDiffOperator::operator+(
    const TotalDiffOperator& o) const {
  TotalDiffOperator out = *this;
  for (auto& [key, a] : o.ent)
    out.add(std::get<0>(key), std::get<1>(key), std::get<2>(key), a);
  return out;
}

TotalDiffOperator TotalDiffOperator::operator-(
    const TotalDiffOperator& o) const {
  return *this + o.scale(-1);
}

TotalDiffOperator TotalDiffOperator::scale(const Rat& r) const {
  TotalDiffOperator out(*ctx, rows, cols);
  if (r == 0) return out;
  out.ent = ent;
  for (auto& [key, a] : out.ent) a = a.scale(r);
  return out;
}

bool TotalDiffOperator::operator==(const TotalDiffOperator& o) const {
  return rows == o.rows && cols == o.cols && ent == o.ent;
}

bool TotalDiffOperator::is_zero() const { return ent.empty(); }

int TotalDiffOperator::order() const {
  int n = 0;
  for (auto& [key, a] : ent) n = std::max(n, midx_order(std::get<2>(key)));
  return n;
}

Poly coupling(const std::vector<Poly>& psi, const TotalDiffOperator& A,
              const std::vector<Poly>& phi) {
  std::vector<Poly> Aphi = A.apply(phi);
  Poly out(*A.ctx);
  for (int r = 0; r < A.rows; ++r) out += psi[r] * Aphi[r];
  return out;
}

TotalDiffOperator linearization(const std::vector<Poly>& F,
                                const std::vector<int>& codes) {
  if (F.empty()) throw std::invalid_argument("empty tuple");
  const Context& c = F[0].ctx();
  TotalDiffOperator out(c, (int)F.size(), (int)codes.size());
  for (int r = 0; r < (int)F.size(); ++r)
    for (int j = 0; j < (int)codes.size(); ++j)
      for (auto& [tau, d] : lin_entries(F[r], codes[j])) out.add(r, j, tau, d);
  return out;
}

std::string render(const TotalDiffOperator& A) {
  const Context& c = *A.ctx;
  auto renderEntry = [&](int r, int col) {
    std::string s;
    bool any = false;
    for (auto& [key, a] : A.ent) {
      if (std::get<0>(key) != r || std::get<1>(key) != col) continue;
      const Midx& tau = std::get<2>(key);
      std::string dpart;
      for (int i = 0; i < (int)tau.size(); ++i) {
        if (tau[i] == 0) continue;
        if (!dpart.empty()) dpart += "*";
        dpart += "D" + c.base[i];
        if (tau[i] > 1) dpart += "^" + std::to_string(tau[i]);
      }
      std::string coeff = render(a);
      std::string term;
      if (dpart.empty()) {
        term = coeff;
      } else if (coeff == "1") {
        term = dpart;
      } else if (coeff == "-1") {
        term = "-" + dpart;
      } else {
        bool sum = a.size() > 1;
        term = (sum ? "(" + coeff + ")" : coeff) + "*" + dpart;
      }
      if (!any) {
        s = term;
      } else if (!term.empty() && term[0] == '-') {
        s += " - " + term.substr(1);
      } else {
        s += " + " + term;
      }
      any = true;
    }
    return any ? s : std::string("0");
  };
  if (A.rows == 1 && A.cols == 1) return renderEntry(0, 0);
  std::string s = "[";
  for (int r = 0; r < A.rows; ++r) {
    if (r) s += ", ";
    s += "[";
    for (int col = 0; col < A.cols; ++col) {
      if (col) s += ", ";
      s += renderEntry(r, col);
    }
    s += "]";
  }
  s += "]";
  return s;
}

}  // namespace varlie
