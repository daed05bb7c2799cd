#pragma once
/* Graded algebra of differential polynomials.
 *
 * Coefficients are exact rationals.  A monomial is a product of
 *   - powers of base coordinates,
 *   - powers of even jet variables,
 *   - distinct odd jet variables in canonical order (Koszul signs folded
 *     into the coefficient),
 *   - one exponential factor exp(L) with L an integer-linear combination
 *     of order-0 even components,
 *   - powers of formal-function factors f^{(k)}(v) with v an order-0
 *     even component.
 */

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace varlie {

using Rat = mpq_class;

std::string rat_str(const Rat& r);

/* multi-index over the base directions; fixed length = base dimension */
using Midx = std::vector<int>;

int midx_order(const Midx& s);
Midx midx_zero(int dim);
Midx midx_plus(const Midx& s, int dir);

struct Context {
  std::vector<std::string> base;          /* single-letter coordinate names */
  std::vector<Rat> dweight;               /* weight of D_i, default 1 */

  struct Field {
    std::string name;
    int components = 1;
    bool odd = false;
    bool has_weight = false;
    Rat weight = 0;
  };
  std::vector<Field> fields;

  int add_base(const std::string& n);
  int add_field(const std::string& n, int comps, bool odd,
                std::optional<Rat> w = std::nullopt);

  int dim() const { return (int)base.size(); }
  int base_index(const std::string& n) const;        /* -1 if absent */
  int field_index(const std::string& n) const;       /* -1 if absent */

  /* a "code" enumerates (field, component) pairs in declaration order */
  int num_codes() const;
  int var_code(int field, int comp) const;
  std::pair<int, int> code_fc(int code) const;
  bool code_odd(int code) const;
  std::string code_name(int code) const;             /* "u", "A1", ... */
  int code_by_name(const std::string& n) const;      /* -1 if absent */
  bool code_has_weight(int code) const;
  Rat code_weight(int code) const;
};

struct JetVar {
  int code = 0;
  Midx sigma;
  auto operator<=>(const JetVar&) const = default;
};

std::string jetvar_name(const Context& c, const JetVar& v);
std::optional<Rat> jetvar_weight(const Context& c, const JetVar& v);

struct Monomial {
  std::vector<std::pair<int, int>> xpow;            /* base idx -> exp > 0 */
  std::vector<std::pair<JetVar, int>> even;         /* sorted, exp > 0 */
  std::vector<JetVar> odd;                          /* strictly increasing */
  std::vector<std::pair<int, long>> expo;           /* code -> coeff != 0 */
  std::vector<std::pair<std::pair<int, int>, int>> func; /* (code,k) -> exp */

  auto operator<=>(const Monomial&) const = default;
  bool is_one() const {
    return xpow.empty() && even.empty() && odd.empty() && expo.empty() &&
           func.empty();
  }
  int parity() const { return (int)(odd.size() & 1); }
};

class Poly {
 public:
  Poly() = default;
  explicit Poly(const Context& c) : ctx_(&c) {}

  static Poly zero(const Context& c) { return Poly(c); }
  static Poly constant(const Context& c, const Rat& r);
  static Poly var(const Context& c, const JetVar& v);
  static Poly var(const Context& c, int code, const Midx& sigma);
  static Poly xvar(const Context& c, int baseIdx);
  static Poly expf(const Context& c, std::vector<std::pair<int, long>> lin);
  static Poly func(const Context& c, int code, int k);

  const Context& ctx() const;
  bool attached() const { return ctx_ != nullptr; }
  bool is_zero() const { return t_.empty(); }
  const std::map<Monomial, Rat>& terms() const { return t_; }
  size_t size() const { return t_.size(); }

  /* -1 zero, 0 even, 1 odd, 2 mixed */
  int parity() const;

  void add_term(const Monomial& m, const Rat& c);

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  bool operator==(const Poly& o) const { return t_ == o.t_; }
  Poly scale(const Rat& r) const;
  Poly pow(int k) const;

 private:
  const Context* ctx_ = nullptr;
  std::map<Monomial, Rat> t_;
};

/* graded product of two monomials; returns coefficient sign factor or 0 */
int mul_monomial(const Monomial& a, const Monomial& b, Monomial& out);

/* left partial derivative with respect to a jet variable */
Poly partialL(const Poly& p, const JetVar& v);
/* partial derivative with respect to an explicit base coordinate */
Poly partial_x(const Poly& p, int baseIdx);

/* all jet variables occurring in p (even and odd factor lists only) */
std::vector<JetVar> support_vars(const Poly& p);
/* jet variables including those inside exp/func parts (at order 0) */
std::vector<JetVar> support_vars_full(const Poly& p);
int max_order(const Poly& p);

/* simultaneous substitution of even jet variables */
Poly subst(const Poly& p, const std::map<JetVar, Poly>& repl);

/* all sub-monomials (componentwise exponent ranges, including 1 and m
 * itself), in canonical form */
std::vector<Monomial> monomial_divisors(const Monomial& m);

std::optional<Rat> weight(const Context& c, const Monomial& m);
/* homogeneous weight of p, nullopt if inhomogeneous or undefined */
std::optional<Rat> weight(const Poly& p);

std::string render(const Context& c, const Monomial& m); /* without coeff */
std::string render(const Poly& p);

}  // namespace varlie
