#pragma once

#include <functional>
#include <set>

#include "varlie/algebroid.hpp"

namespace varlie {

/* sparse polynomial with rational coefficients in the undetermined ansatz
 * parameters; a key lists (parameter id, exponent) pairs in ascending id
 * order */
struct ParamPoly {
  using Key = std::vector<std::pair<int, int>>;
  std::map<Key, Rat> terms;

  static ParamPoly zero() { return {}; }
  static ParamPoly constant(const Rat& r);
  static ParamPoly var(int id);

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const;
  Rat constant_value() const; /* 0 for the zero polynomial */

  ParamPoly operator+(const ParamPoly& o) const;
  ParamPoly operator-(const ParamPoly& o) const;
  ParamPoly operator*(const ParamPoly& o) const;
  ParamPoly operator-() const;
  bool operator==(const ParamPoly& o) const { return terms == o.terms; }
  ParamPoly scale(const Rat& r) const;
  ParamPoly subst(int id, const ParamPoly& value) const;

  void collect_vars(std::set<int>& out) const;
  int degree() const;
  int degree_in(int id) const;
  /* coefficient polynomial of id^1; meaningful when degree_in(id) == 1 */
  ParamPoly linear_coeff(int id) const;
  /* divide by the rational content and make the leading coefficient
   * positive */
  ParamPoly normalized() const;

  std::string render(const std::function<std::string(int)>& name) const;
};

struct AnsatzSpec {
  int weight = 1;
  int max_order = -1; /* -1: up to the weight */
  bool formal = false; /* admit f(u)-decorated coefficients */
};

/* one undetermined-coefficient slot: coefficient monomial times Dx^dpow */
struct AnsatzTerm {
  int dpow = 0;
  Monomial mono;
};

/* the canonical scalar search context: base x, field u of weight 2, and
 * the two section arguments p, q (codes 0, 1, 2) */
const Context& search_context();

std::vector<AnsatzTerm> enumerate_ansatz(const AnsatzSpec& spec);

/* one emitted operator or operator family, scaled so that the first
 * coefficient monomial of the top Dx power equals 1 */
struct SearchEntry {
  int weight = 0;
  int order = 0;
  int nparams = 0; /* free parameters, rendered t1..tn */
  /* dpow -> coefficient monomial -> parameter-polynomial coefficient */
  std::map<int, std::map<Monomial, ParamPoly>> coeff;
  /* bilinear symbol: (a,b) with a<b -> u-monomial -> coefficient, the
   * entry standing for coeff * mono * (p_a q_b - p_b q_a) */
  std::map<std::pair<int, int>, std::map<Monomial, ParamPoly>> gamma;
  std::string status; /* verified | verified-at-samples | inconclusive */
  std::string constraints; /* leftover conditions when inconclusive */
  std::string rendered;
  std::string gamma_rendered;
};

struct WeightReport {
  int weight = 0;
  std::vector<SearchEntry> entries;
  int suppressed = 0; /* curated instances of the function families */
  std::vector<std::string> notes;
};

/* enumerate the weight-homogeneous ansatz and keep the specializations
 * whose image is closed under the commutator, together with their
 * bilinear symbols */
WeightReport search_weight(const AnsatzSpec& spec);
std::vector<WeightReport> search_up_to(int max_weight, bool formal = false,
                                       int max_order = -1);

/* does the entry specialize, for rational parameter values, to the given
 * operator?  target maps dpow -> coefficient polynomial over
 * search_context(); the target is normalized internally */
bool entry_contains(const SearchEntry& e, const std::map<int, Poly>& target);

struct FamilyCheck {
  std::string description;
  bool pass = false;
};

/* exact involutivity of the function-coefficient families together with
 * their closed-form symbols: f(u)*u_x, f(u)*(u*Dx - u_x), f(u)*Dx^n,
 * f(u)*u^2 */
std::vector<FamilyCheck> verify_function_families();

std::string render_entry(const SearchEntry& e);
std::string render_search_report(const std::vector<WeightReport>& reports);

}  // namespace varlie
