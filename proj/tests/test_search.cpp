#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "varlie/search.hpp"

#include "varlie/algebroid.hpp"
#include "varlie/linsys.hpp"

using namespace varlie;

namespace {

/* jet monomial in u over the search context, (sigma, exponent) pairs */
Monomial umon(std::initializer_list<std::pair<int, int>> l) {
  Monomial m;
  for (const auto& [s, e] : l) m.even.push_back({JetVar{0, Midx{s}}, e});
  return m;
}

struct Fix {
  const Context& ctx = search_context();
  Poly one = Poly::constant(ctx, 1);
  Poly u = Poly::var(ctx, 0, Midx{0});
  Poly ux = Poly::var(ctx, 0, Midx{1});
  Poly uxx = Poly::var(ctx, 0, Midx{2});
  Poly uxxx = Poly::var(ctx, 0, Midx{3});
  Poly p0 = Poly::var(ctx, 1, Midx{0});
  Poly p1 = Poly::var(ctx, 1, Midx{1});
  Poly q0 = Poly::var(ctx, 2, Midx{0});
  Poly q1 = Poly::var(ctx, 2, Midx{1});

  const SearchEntry* find(const WeightReport& r, const std::string& s) const {
    for (const auto& e : r.entries)
      if (e.rendered == s) return &e;
    return nullptr;
  }
};

}  // namespace

TEST_CASE("ansatz slot counts per weight") {
  int expect[] = {0, 1, 2, 3, 5, 7, 11, 15};
  for (int w = 1; w <= 7; ++w) {
    AnsatzSpec spec;
    spec.weight = w;
    CHECK((int)enumerate_ansatz(spec).size() == expect[w]);
  }
}

TEST_CASE("weight 1 finds exactly the translation generator") {
  AnsatzSpec spec;
  spec.weight = 1;
  WeightReport r = search_weight(spec);
  REQUIRE(r.entries.size() == 1);
  const SearchEntry& e = r.entries[0];
  CHECK(e.rendered == "Dx");
  CHECK(e.order == 1);
  CHECK(e.nparams == 0);
  CHECK(e.status == "verified");
  CHECK(e.gamma.empty());
  CHECK(e.gamma_rendered == "0");
  CHECK(r.suppressed == 0);
}

TEST_CASE("weight 2 admits nothing beyond curated instances") {
  AnsatzSpec spec;
  spec.weight = 2;
  WeightReport r = search_weight(spec);
  CHECK(r.entries.empty());
  CHECK(r.suppressed == 2); /* Dx^2 and multiplication by u */
}

TEST_CASE("weight 3: third-order pencil and first-order plane") {
  Fix F;
  AnsatzSpec spec;
  spec.weight = 3;
  WeightReport r = search_weight(spec);
  REQUIRE(r.entries.size() == 2);
  CHECK(r.suppressed == 1); /* u_x alone */

  const SearchEntry* pen = F.find(r, "Dx^3 + 2*t1*u*Dx + t1*u_x");
  REQUIRE(pen != nullptr);
  CHECK(pen->order == 3);
  CHECK(pen->nparams == 1);
  CHECK(pen->status == "verified");
  ParamPoly t = ParamPoly::var(0);
  CHECK(pen->coeff.at(3).at(Monomial{}) == ParamPoly::constant(1));
  CHECK(pen->coeff.at(1).at(umon({{0, 1}})) == t.scale(2));
  CHECK(pen->coeff.at(0).at(umon({{1, 1}})) == t);
  /* induced bracket of sections: -t1 * (p*q_x - p_x*q) */
  REQUIRE(pen->gamma.size() == 1);
  CHECK(pen->gamma.at({0, 1}).at(Monomial{}) == -t);
  CHECK(pen->gamma_rendered == "-t1*(p*q_x - p_x*q)");

  const SearchEntry* pl = F.find(r, "u*Dx + t1*u_x");
  REQUIRE(pl != nullptr);
  CHECK(pl->order == 1);
  CHECK(pl->nparams == 1);
  CHECK(pl->coeff.at(1).at(umon({{0, 1}})) == ParamPoly::constant(1));
  CHECK(pl->coeff.at(0).at(umon({{1, 1}})) == t);
  CHECK(pl->gamma.at({0, 1}).at(Monomial{}) == -t);
}

TEST_CASE("weight 4 admits nothing beyond curated instances") {
  AnsatzSpec spec;
  spec.weight = 4;
  WeightReport r = search_weight(spec);
  CHECK(r.entries.empty());
  CHECK(r.suppressed == 3); /* Dx^4, u*Dx^2, u^2 */
}

TEST_CASE("weight 5: fifth derivative and the u^2-plane") {
  Fix F;
  AnsatzSpec spec;
  spec.weight = 5;
  WeightReport r = search_weight(spec);
  REQUIRE(r.entries.size() == 2);
  CHECK(r.suppressed == 2); /* u*Dx^3, u*u_x */
  CHECK(F.find(r, "Dx^5") != nullptr);
  const SearchEntry* pl = F.find(r, "u^2*Dx + t1*u*u_x");
  REQUIRE(pl != nullptr);
  CHECK(pl->status == "verified");
  CHECK(pl->gamma.at({0, 1}).at(umon({{0, 1}})) == -ParamPoly::var(0));
  CHECK(pl->gamma_rendered == "-t1*u*(p*q_x - p_x*q)");
}

TEST_CASE("weight 6: second-order curve and zero-order families") {
  Fix F;
  AnsatzSpec spec;
  spec.weight = 6;
  WeightReport r = search_weight(spec);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.suppressed == 2); /* Dx^6, u*Dx^4 */

  const SearchEntry* curve = F.find(
      r, "u^2*Dx^2 + 2*t1*u*u_x*Dx + t1*u*u_xx + (-t1 + t1^2)*u_x^2");
  REQUIRE(curve != nullptr);
  CHECK(curve->status == "verified");
  ParamPoly t = ParamPoly::var(0);
  CHECK(curve->coeff.at(0).at(umon({{1, 2}})) == t * t - t);
  CHECK(curve->gamma_rendered ==
        "-2*t1^2*u_x*(p*q_x - p_x*q) - t1*u*(p*q_xx - p_xx*q)");

  const SearchEntry* cubic = F.find(r, "u^3 + t1*u_x^2");
  REQUIRE(cubic != nullptr);
  CHECK(cubic->gamma_rendered == "-2*t1*u_x*(p*q_x - p_x*q)");

  const SearchEntry* pt = F.find(r, "u_x^2");
  REQUIRE(pt != nullptr);
  CHECK(pt->nparams == 0);
  CHECK(pt->gamma_rendered == "-2*u_x*(p*q_x - p_x*q)");
}

TEST_CASE("weight 7: catalog points and the u^3-plane") {
  Fix F;
  AnsatzSpec spec;
  spec.weight = 7;
  WeightReport r = search_weight(spec);
  REQUIRE(r.entries.size() == 5);
  CHECK(r.suppressed == 3);
  CHECK(F.find(r, "Dx^7") != nullptr);
  CHECK(F.find(r, "u^2*Dx^3 + 3*u*u_x*Dx^2 + 3*u*u_xx*Dx + u*u_xxx") !=
        nullptr);
  CHECK(F.find(r,
               "u^2*Dx^3 + u*u_x*Dx^2 + 1/2*u*u_xx*Dx - 1/4*u_x^2*Dx") !=
        nullptr);
  CHECK(F.find(r, "u^3*Dx + t1*u^2*u_x") != nullptr);
  const SearchEntry* a9 = F.find(r, "u_x^2*Dx + 2*u_x*u_xx");
  REQUIRE(a9 != nullptr);
  CHECK(a9->gamma_rendered ==
        "-8*u_xx*(p*q_x - p_x*q) - 2*u_x*(p*q_xx - p_xx*q)");
  for (const auto& e : r.entries) CHECK(e.status == "verified");
}

TEST_CASE("every emission across weights 1..7 carries a verified identity") {
  for (const auto& rep : search_up_to(7)) {
    for (const auto& e : rep.entries) CHECK(e.status == "verified");
    CHECK(rep.notes.empty());
  }
}

TEST_CASE("catalog operators are contained in the emitted families") {
  Fix F;
  const Poly& u = F.u;
  const Poly& ux = F.ux;
  const Poly& uxx = F.uxx;
  const Poly& uxxx = F.uxxx;
  auto reports = search_up_to(7);
  auto contained = [&](int w, const std::map<int, Poly>& target) {
    for (const auto& e : reports[w - 1].entries)
      if (entry_contains(e, target)) return true;
    return false;
  };

  /* translation */
  CHECK(contained(1, {{1, F.one}}));
  /* second KdV structure -1/2*Dx^3 + 2u*Dx + u_x */
  CHECK(contained(3, {{3, F.one.scale(Rat(-1, 2))},
                      {1, u.scale(2)},
                      {0, ux}}));
  /* odd derivative powers */
  CHECK(contained(3, {{3, F.one}}));
  CHECK(contained(5, {{5, F.one}}));
  CHECK(contained(7, {{7, F.one}}));
  /* u o Dx^3 o u */
  CHECK(contained(7, {{3, u * u},
                      {2, (u * ux).scale(3)},
                      {1, (u * uxx).scale(3)},
                      {0, u * uxxx}}));
  /* u^3 - u_x^2 */
  CHECK(contained(6, {{0, u * u * u - ux * ux}}));
  /* 2u_x^2 - u*u_xx - 2u*u_x*Dx + u^2*Dx^2 */
  CHECK(contained(6, {{2, u * u},
                      {1, (u * ux).scale(-2)},
                      {0, (ux * ux).scale(2) - u * uxx}}));
  /* u_x^2*Dx - 2u*u_xx*Dx - 4u*u_x*Dx^2 - 4u^2*Dx^3 */
  CHECK(contained(7, {{3, (u * u).scale(-4)},
                      {2, (u * ux).scale(-4)},
                      {1, ux * ux - (u * uxx).scale(2)}}));
  /* -2u_x*u_xx - u_x^2*Dx */
  CHECK(contained(7, {{1, (ux * ux).scale(-1)},
                      {0, (ux * uxx).scale(-2)}}));

  /* specializations that violate the pencil and curve relations */
  CHECK_FALSE(contained(3, {{3, F.one}, {1, u}}));
  CHECK_FALSE(contained(6, {{2, u * u}, {1, u * ux}, {0, ux * ux}}));
}

TEST_CASE("emitted symbols re-verify through the operator interface") {
  Fix F;
  const Context& ctx = F.ctx;
  /* pencil instance at t1 = -2, i.e. -2 times the second KdV structure */
  TotalDiffOperator A(ctx, 1, 1);
  A.add(0, 0, Midx{3}, F.one);
  A.add(0, 0, Midx{1}, F.u.scale(-4));
  A.add(0, 0, Midx{0}, F.ux.scale(-2));
  OperatorCollection C{&ctx, {0}, {A}};
  Poly expr = image_bracket(C, 0, 0, {1}, {2})[0];
  Poly W = F.p0 * F.q1 - F.p1 * F.q0;
  CHECK(expr == A.apply_scalar(W.scale(2)));

  /* zero-order point u_x^2 with symbol -2*u_x*W */
  TotalDiffOperator Z(ctx, 1, 1);
  Z.add(0, 0, Midx{0}, F.ux * F.ux);
  OperatorCollection CZ{&ctx, {0}, {Z}};
  Poly ez = image_bracket(CZ, 0, 0, {1}, {2})[0];
  CHECK(ez == Z.apply_scalar((F.ux * W).scale(-2)));
}

TEST_CASE("function-coefficient families verify exactly") {
  auto checks = verify_function_families();
  REQUIRE(checks.size() == 6);
  for (const auto& c : checks) {
    CAPTURE(c.description);
    CHECK(c.pass);
  }
}

TEST_CASE("formal coefficients discover the decorated first-order family") {
  AnsatzSpec spec;
  spec.weight = 1;
  spec.formal = true;
  WeightReport r = search_weight(spec);
  REQUIRE(!r.entries.empty());
  bool decorated = false;
  for (const auto& e : r.entries) {
    CHECK(e.status == "verified");
    if (e.rendered.find("f'(u)") != std::string::npos) decorated = true;
  }
  CHECK(decorated);
}

TEST_CASE("search reports are identical for any job count") {
  set_jobs(1);
  std::string serial = render_search_report(search_up_to(7));
  set_jobs(4);
  std::string parallel = render_search_report(search_up_to(7));
  set_jobs(0);
  CHECK(serial == parallel);
  CHECK(serial.find("inconclusive") == std::string::npos);
}
