#include "varlie/algebra.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace varlie {

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

int midx_order(const Midx& s) {
  int n = 0;
  for (int k : s) n += k;
  return n;
}

Midx midx_zero(int dim) { return Midx(dim, 0); }

Midx midx_plus(const Midx& s, int dir) {
  Midx r = s;
  r.at(dir) += 1;
  return r;
}

int Context::add_base(const std::string& n) {
  base.push_back(n);
  dweight.push_back(1);
  return (int)base.size() - 1;
}

int Context::add_field(const std::string& n, int comps, bool odd,
                       std::optional<Rat> w) {
  Field f;
  f.name = n;
  f.components = comps;
  f.odd = odd;
  if (w) {
    f.has_weight = true;
    f.weight = *w;
  }
  fields.push_back(f);
  return (int)fields.size() - 1;
}

int Context::base_index(const std::string& n) const {
  for (int i = 0; i < (int)base.size(); ++i)
    if (base[i] == n) return i;
  return -1;
}

int Context::field_index(const std::string& n) const {
  for (int i = 0; i < (int)fields.size(); ++i)
    if (fields[i].name == n) return i;
  return -1;
}

int Context::num_codes() const {
  int n = 0;
  for (auto& f : fields) n += f.components;
  return n;
}

int Context::var_code(int field, int comp) const {
  int n = 0;
  for (int i = 0; i < field; ++i) n += fields[i].components;
  return n + comp;
}

std::pair<int, int> Context::code_fc(int code) const {
  for (int i = 0; i < (int)fields.size(); ++i) {
    if (code < fields[i].components) return {i, code};
    code -= fields[i].components;
  }
  throw std::out_of_range("bad variable code");
}

bool Context::code_odd(int code) const { return fields[code_fc(code).first].odd; }

std::string Context::code_name(int code) const {
  auto [f, c] = code_fc(code);
  if (fields[f].components == 1) return fields[f].name;
  return fields[f].name + std::to_string(c + 1);
}

int Context::code_by_name(const std::string& n) const {
  for (int code = 0; code < num_codes(); ++code)
    if (code_name(code) == n) return code;
  return -1;
}

bool Context::code_has_weight(int code) const {
  return fields[code_fc(code).first].has_weight;
}

Rat Context::code_weight(int code) const {
  return fields[code_fc(code).first].weight;
}

std::string jetvar_name(const Context& c, const JetVar& v) {
  std::string s = c.code_name(v.code);
  if (midx_order(v.sigma) == 0) return s;
  s += "_";
  for (int i = 0; i < (int)v.sigma.size(); ++i)
    for (int k = 0; k < v.sigma[i]; ++k) s += c.base[i];
  return s;
}

std::optional<Rat> jetvar_weight(const Context& c, const JetVar& v) {
  if (!c.code_has_weight(v.code)) return std::nullopt;
  Rat w = c.code_weight(v.code);
  for (int i = 0; i < (int)v.sigma.size(); ++i) w += v.sigma[i] * c.dweight[i];
  return w;
}

const Context& Poly::ctx() const {
  if (!ctx_) throw std::logic_error("polynomial without context");
  return *ctx_;
}

Poly Poly::constant(const Context& c, const Rat& r) {
  Poly p(c);
  p.add_term(Monomial{}, r);
  return p;
}

Poly Poly::var(const Context& c, const JetVar& v) {
  Poly p(c);
  Monomial m;
  if (c.code_odd(v.code))
    m.odd.push_back(v);
  else
    m.even.push_back({v, 1});
  p.add_term(m, 1);
  return p;
}

Poly Poly::var(const Context& c, int code, const Midx& sigma) {
  return var(c, JetVar{code, sigma});
}

Poly Poly::xvar(const Context& c, int baseIdx) {
  Poly p(c);
  Monomial m;
  m.xpow.push_back({baseIdx, 1});
  p.add_term(m, 1);
  return p;
}

Poly Poly::expf(const Context& c, std::vector<std::pair<int, long>> lin) {
  std::sort(lin.begin(), lin.end());
  Monomial m;
  for (auto& [code, k] : lin) {
    if (k == 0) continue;
    if (c.code_odd(code))
      throw std::invalid_argument("exp argument must be even");
    if (!m.expo.empty() && m.expo.back().first == code)
      m.expo.back().second += k;
    else
      m.expo.push_back({code, k});
  }
  m.expo.erase(std::remove_if(m.expo.begin(), m.expo.end(),
                              [](auto& e) { return e.second == 0; }),
               m.expo.end());
  Poly p(c);
  p.add_term(m, 1);
  return p;
}

Poly Poly::func(const Context& c, int code, int k) {
  if (c.code_odd(code))
    throw std::invalid_argument("function argument must be even");
  Poly p(c);
  Monomial m;
  m.func.push_back({{code, k}, 1});
  p.add_term(m, 1);
  return p;
}

int Poly::parity() const {
  if (t_.empty()) return -1;
  int par = t_.begin()->first.parity();
  for (auto& [m, c] : t_)
    if (m.parity() != par) return 2;
  return par;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) t_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.t_) c = -c;
  return r;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  r += o;
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  r -= o;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (!ctx_) ctx_ = o.ctx_;
  for (auto& [m, c] : o.t_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (!ctx_) ctx_ = o.ctx_;
  for (auto& [m, c] : o.t_) add_term(m, -c);
  return *this;
}

Poly Poly::scale(const Rat& r) const {
  Poly out(ctx());
  if (r == 0) return out;
  out.t_ = t_;
  for (auto& [m, c] : out.t_) c *= r;
  return out;
}

namespace {

template <typename K, typename V>
std::vector<std::pair<K, V>> merge_exp(const std::vector<std::pair<K, V>>& a,
                                       const std::vector<std::pair<K, V>>& b) {
  std::vector<std::pair<K, V>> out;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      V s = a[i].second + b[j].second;
      if (s != V(0)) out.push_back({a[i].first, s});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

int mul_monomial(const Monomial& a, const Monomial& b, Monomial& out) {
  /* odd factors: merge two sorted lists, counting cross inversions */
  out = Monomial{};
  long inv = 0;
  {
    size_t i = 0, j = 0;
    out.odd.reserve(a.odd.size() + b.odd.size());
    while (i < a.odd.size() || j < b.odd.size()) {
      if (j == b.odd.size() ||
          (i < a.odd.size() && a.odd[i] < b.odd[j])) {
        out.odd.push_back(a.odd[i++]);
      } else if (i == a.odd.size() || b.odd[j] < a.odd[i]) {
        inv += (long)(a.odd.size() - i); /* b.odd[j] jumps the rest of a */
        out.odd.push_back(b.odd[j++]);
      } else {
        return 0; /* repeated odd factor */
      }
    }
  }
  out.xpow = merge_exp(a.xpow, b.xpow);
  out.even = merge_exp(a.even, b.even);
  out.expo = merge_exp(a.expo, b.expo);
  out.func = merge_exp(a.func, b.func);
  return (inv & 1) ? -1 : 1;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r(ctx());
  Monomial m;
  for (auto& [ma, ca] : t_)
    for (auto& [mb, cb] : o.t_) {
      int s = mul_monomial(ma, mb, m);
      if (s == 0) continue;
      Rat prod = ca * cb;
      if (s < 0) prod = -prod;
      r.add_term(m, prod);
    }
  return r;
}

Poly Poly::pow(int k) const {
  Poly r = Poly::constant(ctx(), 1);
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

Poly partialL(const Poly& p, const JetVar& v) {
  const Context& c = p.ctx();
  Poly out(c);
  bool order0 = midx_order(v.sigma) == 0;
  for (auto& [m, coef] : p.terms()) {
    /* even factor */
    for (size_t i = 0; i < m.even.size(); ++i) {
      if (m.even[i].first == v) {
        Monomial r = m;
        int e = r.even[i].second;
        if (e == 1)
          r.even.erase(r.even.begin() + i);
        else
          r.even[i].second = e - 1;
        out.add_term(r, coef * e);
        break;
      }
    }
    /* odd factor: move it to the front */
    for (size_t i = 0; i < m.odd.size(); ++i) {
      if (m.odd[i] == v) {
        Monomial r = m;
        r.odd.erase(r.odd.begin() + i);
        Rat s = (i & 1) ? -coef : coef;
        out.add_term(r, s);
        break;
      }
    }
    if (order0) {
      /* exponential factor: chain rule adds k * term */
      for (auto& [code, k] : m.expo)
        if (code == v.code) out.add_term(m, coef * (long)k);
      /* formal-function factors */
      for (size_t i = 0; i < m.func.size(); ++i) {
        if (m.func[i].first.first == v.code) {
          Monomial r = m;
          int e = r.func[i].second;
          int k = r.func[i].first.second;
          if (e == 1)
            r.func.erase(r.func.begin() + i);
          else
            r.func[i].second = e - 1;
          /* multiply by f^{(k+1)} */
          std::pair<int, int> key{v.code, k + 1};
          auto pos = std::lower_bound(
              r.func.begin(), r.func.end(), key,
              [](auto& a, auto& b) { return a.first < b; });
          if (pos != r.func.end() && pos->first == key)
            pos->second += 1;
          else
            r.func.insert(pos, {key, 1});
          out.add_term(r, coef * e);
        }
      }
    }
  }
  return out;
}

Poly partial_x(const Poly& p, int baseIdx) {
  const Context& c = p.ctx();
  Poly out(c);
  for (auto& [m, coef] : p.terms()) {
    for (size_t i = 0; i < m.xpow.size(); ++i) {
      if (m.xpow[i].first == baseIdx) {
        Monomial r = m;
        int e = r.xpow[i].second;
        if (e == 1)
          r.xpow.erase(r.xpow.begin() + i);
        else
          r.xpow[i].second = e - 1;
        out.add_term(r, coef * e);
        break;
      }
    }
  }
  return out;
}

std::vector<JetVar> support_vars(const Poly& p) {
  std::vector<JetVar> vs;
  for (auto& [m, c] : p.terms()) {
    for (auto& [v, e] : m.even) vs.push_back(v);
    for (auto& v : m.odd) vs.push_back(v);
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

std::vector<JetVar> support_vars_full(const Poly& p) {
  std::vector<JetVar> vs = support_vars(p);
  int dim = p.attached() ? p.ctx().dim() : 0;
  for (auto& [m, c] : p.terms()) {
    for (auto& [code, k] : m.expo) vs.push_back(JetVar{code, midx_zero(dim)});
    for (auto& [ck, e] : m.func) vs.push_back(JetVar{ck.first, midx_zero(dim)});
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

int max_order(const Poly& p) {
  int mo = 0;
  for (auto& v : support_vars(p)) mo = std::max(mo, midx_order(v.sigma));
  return mo;
}

Poly subst(const Poly& p, const std::map<JetVar, Poly>& repl) {
  const Context& c = p.ctx();
  for (auto& [v, q] : repl)
    if (c.code_odd(v.code))
      throw std::invalid_argument("substitution of odd variables unsupported");
  Poly out(c);
  for (auto& [m, coef] : p.terms()) {
    for (auto& [code, k] : m.expo)
      if (repl.count(JetVar{code, midx_zero(c.dim())}))
        throw std::invalid_argument("substitution hits exp argument");
    for (auto& [ck, e] : m.func)
      if (repl.count(JetVar{ck.first, midx_zero(c.dim())}))
        throw std::invalid_argument("substitution hits function argument");
    Monomial keep = m;
    Poly factor = Poly::constant(c, 1);
    std::vector<std::pair<JetVar, int>> kept;
    for (auto& [v, e] : keep.even) {
      auto it = repl.find(v);
      if (it == repl.end())
        kept.push_back({v, e});
      else
        factor = factor * it->second.pow(e);
    }
    keep.even = kept;
    Poly base(c);
    base.add_term(keep, coef);
    out += base * factor;
  }
  return out;
}

std::vector<Monomial> monomial_divisors(const Monomial& m) {
  /* sub-factors are appended in the canonical order of the source monomial,
   * so every divisor comes out in canonical form */
  std::vector<Monomial> acc{Monomial{}};
  auto extend = [&](auto&& gen) {
    std::vector<Monomial> next;
    for (auto& base : acc) gen(base, next);
    acc = std::move(next);
  };
  for (auto& [b, e] : m.xpow)
    extend([&, b = b, e = e](const Monomial& base,
                             std::vector<Monomial>& next) {
      for (int k = 0; k <= e; ++k) {
        Monomial t = base;
        if (k) t.xpow.push_back({b, k});
        next.push_back(t);
      }
    });
  for (auto& ve : m.even)
    extend([&](const Monomial& base, std::vector<Monomial>& next) {
      for (int k = 0; k <= ve.second; ++k) {
        Monomial t = base;
        if (k) t.even.push_back({ve.first, k});
        next.push_back(t);
      }
    });
  for (auto& v : m.odd)
    extend([&](const Monomial& base, std::vector<Monomial>& next) {
      next.push_back(base);
      Monomial t = base;
      t.odd.push_back(v);
      next.push_back(t);
    });
  for (auto& ck : m.expo)
    extend([&](const Monomial& base, std::vector<Monomial>& next) {
      long lo = std::min<long>(0, ck.second), hi = std::max<long>(0, ck.second);
      for (long j = lo; j <= hi; ++j) {
        Monomial t = base;
        if (j) t.expo.push_back({ck.first, j});
        next.push_back(t);
      }
    });
  for (auto& fe : m.func)
    extend([&](const Monomial& base, std::vector<Monomial>& next) {
      for (int k = 0; k <= fe.second; ++k) {
        Monomial t = base;
        if (k) t.func.push_back({fe.first, k});
        next.push_back(t);
      }
    });
  return acc;
}

std::optional<Rat> weight(const Context& c, const Monomial& m) {
  Rat w = 0;
  for (auto& [b, e] : m.xpow) w -= e * c.dweight[b];
  for (auto& [v, e] : m.even) {
    auto vw = jetvar_weight(c, v);
    if (!vw) return std::nullopt;
    w += e * *vw;
  }
  for (auto& v : m.odd) {
    auto vw = jetvar_weight(c, v);
    if (!vw) return std::nullopt;
    w += *vw;
  }
  for (auto& [code, k] : m.expo) {
    if (!c.code_has_weight(code)) return std::nullopt;
    if (c.code_weight(code) != 0) return std::nullopt; /* inhomogeneous */
  }
  for (auto& [ck, e] : m.func) {
    if (!c.code_has_weight(ck.first)) return std::nullopt;
    w -= e * ck.second * c.code_weight(ck.first);
  }
  return w;
}

std::optional<Rat> weight(const Poly& p) {
  if (p.is_zero()) return Rat(0);
  std::optional<Rat> w;
  for (auto& [m, c] : p.terms()) {
    auto mw = weight(p.ctx(), m);
    if (!mw) return std::nullopt;
    if (!w)
      w = mw;
    else if (*w != *mw)
      return std::nullopt;
  }
  return w;
}

namespace {

std::string render_linear(const Context& c,
                          const std::vector<std::pair<int, long>>& lin) {
  std::string s;
  bool first = true;
  for (auto& [code, k] : lin) {
    long a = k;
    if (first) {
      if (a < 0) {
        s += "-";
        a = -a;
      }
    } else {
      s += a < 0 ? " - " : " + ";
      if (a < 0) a = -a;
    }
    if (a != 1) s += std::to_string(a) + "*";
    s += c.code_name(code);
    first = false;
  }
  return s;
}

}  // namespace

std::string render(const Context& c, const Monomial& m) {
  std::vector<std::string> parts;
  for (auto& [b, e] : m.xpow) {
    std::string s = c.base[b];
    if (e > 1) s += "^" + std::to_string(e);
    parts.push_back(s);
  }
  for (auto& [v, e] : m.even) {
    std::string s = jetvar_name(c, v);
    if (e > 1) s += "^" + std::to_string(e);
    parts.push_back(s);
  }
  for (auto& v : m.odd) parts.push_back(jetvar_name(c, v));
  if (!m.expo.empty()) parts.push_back("exp(" + render_linear(c, m.expo) + ")");
  for (auto& [ck, e] : m.func) {
    std::string s = "f";
    for (int i = 0; i < ck.second; ++i) s += "'";
    s += "(" + c.code_name(ck.first) + ")";
    if (e > 1) s += "^" + std::to_string(e);
    parts.push_back(s);
  }
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "*";
    out += parts[i];
  }
  return out;
}

std::string render(const Poly& p) {
  if (p.is_zero()) return "0";
  const Context& c = p.ctx();
  std::string out;
  bool first = true;
  for (auto& [m, coef] : p.terms()) {
    Rat a = coef;
    if (first) {
      if (a < 0) {
        out += "-";
        a = -a;
      }
    } else {
      out += a < 0 ? " - " : " + ";
      if (a < 0) a = -a;
    }
    std::string ms = render(c, m);
    if (ms.empty()) {
      out += rat_str(a);
    } else {
      if (a != 1) out += rat_str(a) + "*";
      out += ms;
    }
    first = false;
  }
  return out;
}

}  // namespace varlie
