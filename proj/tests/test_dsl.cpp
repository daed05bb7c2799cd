#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "varlie/dsl.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace varlie;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario_path(const std::string& name) {
  return std::string(VARLIE_SCENARIO_DIR) + "/" + name;
}

ParseResult parse_ok(const std::string& src) {
  auto r = parse_scenario(src);
  for (const auto& d : r.diags)
    INFO("diag ", d.line, ":", d.col, ": ", d.message);
  REQUIRE(r.ok);
  return r;
}

const char* kKdvPrelude =
    "base x;\n"
    "field u even weight 2;\n"
    "field b odd weight -1;\n"
    "field p even;\n"
    "field r even;\n";

}  // namespace

TEST_CASE("diagnostics carry exact line and column") {
  auto r = parse_scenario(
      "base x;\n"
      "field u even;\n"
      "op bad = Dx +;\n"
      "task check-hamiltonian zap on u ghost u;\n");
  CHECK_FALSE(r.ok);
  REQUIRE(r.diags.size() == 2);
  CHECK(r.diags[0].line == 3);
  CHECK(r.diags[0].col == 14);
  CHECK(r.diags[0].message == "expected an expression factor");
  CHECK(r.diags[1].line == 4);
  CHECK(r.diags[1].col == 24);
  CHECK(r.diags[1].message == "undeclared operator 'zap'");
}

TEST_CASE("binding errors: undeclared and reserved names") {
  auto r = parse_scenario("base x;\nfield u even;\ndensity z = u*v_x;\n");
  CHECK_FALSE(r.ok);
  REQUIRE(r.diags.size() == 1);
  CHECK(r.diags[0].message == "undeclared symbol 'v_x'");

  r = parse_scenario("base x;\nfield weight even;\n");
  CHECK_FALSE(r.ok);
  CHECK(r.diags[0].message == "'weight' is a reserved word");

  r = parse_scenario("base x;\nfield u even;\nfield u odd;\n");
  CHECK_FALSE(r.ok);
  CHECK(r.diags[0].message == "'u' is already declared");

  r = parse_scenario("base x;\nfield Dx even;\n");
  CHECK_FALSE(r.ok);
  CHECK(r.diags[0].message ==
        "'Dx' collides with a total derivative symbol");
}

TEST_CASE("expression semantics: composition versus application") {
  auto r = parse_ok(std::string(kKdvPrelude) +
                    "op comp = Dx*u;\n"
                    "op app = Dx(u)*1;\n"
                    "density quo = Dx(u*u_x) - u_x^2 - u*u_xx;\n");
  const Context& c = *r.scenario->ctx;
  Midx z0 = midx_zero(1);

  /* composition picks up the derivative of the coefficient */
  const auto& comp = r.scenario->ops.at("comp");
  CHECK(comp.entry(0, 0, Midx{1}) == Poly::var(c, 0, Midx{0}));
  CHECK(comp.entry(0, 0, z0) == Poly::var(c, 0, Midx{1}));

  /* application evaluates and leaves a multiplication operator */
  const auto& app = r.scenario->ops.at("app");
  CHECK(app.entry(0, 0, z0) == Poly::var(c, 0, Midx{1}));
  CHECK(app.order() == 0);

  /* Leibniz rule through the applied form */
  CHECK(r.scenario->densities.at("quo").is_zero());
}

TEST_CASE("exponential and formal function factors") {
  auto r = parse_ok(
      "base x;\n"
      "field q even;\n"
      "density a = exp(2*q);\n"
      "density b = f''(q)*q_x + f(q);\n"
      "density c = exp(q)*exp(-3*q);\n");
  const Context& c = *r.scenario->ctx;
  CHECK(r.scenario->densities.at("a") ==
        Poly::expf(c, {{0, 2}}));
  CHECK(r.scenario->densities.at("b") ==
        Poly::func(c, 0, 2) * Poly::var(c, 0, Midx{1}) + Poly::func(c, 0, 0));
  CHECK(r.scenario->densities.at("c") == Poly::expf(c, {{0, -2}}));

  auto bad = parse_scenario("base x;\nfield q even;\ndensity z = exp(q_x);\n");
  CHECK_FALSE(bad.ok);
  CHECK(bad.diags[0].message ==
        "the exponent must be an integer combination of order-0 even "
        "components");

  bad = parse_scenario("base x;\nfield q even;\ndensity z = f(q_x);\n");
  CHECK_FALSE(bad.ok);
  CHECK(bad.diags[0].message ==
        "formal functions take a single order-0 even component");
}

TEST_CASE("operator render and reparse round trip") {
  auto r = parse_ok(std::string(kKdvPrelude) +
                    "op A2 = -1/2*Dx^3 + 2*u*Dx + u_x;\n"
                    "op M = [[Dx, u], [-u_x, 2*Dx^2]];\n");
  for (const char* name : {"A2", "M"}) {
    const auto& A = r.scenario->ops.at(name);
    std::string txt = render(A);
    auto r2 = parse_ok(std::string(kKdvPrelude) + "op Z = " + txt + ";\n");
    const auto& B = r2.scenario->ops.at("Z");
    CHECK(A == B);
    CHECK(render(B) == txt);
  }
}

TEST_CASE("random densities survive render and reparse") {
  std::mt19937 rng(0xC0FFEE);
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 5);
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_int_distribution<int> small(0, 2);

  const std::string prelude =
      "base x, y;\n"
      "field u even;\n"
      "field w even;\n"
      "field b odd;\n";
  auto base = parse_ok(prelude);
  const Context& c = *base.scenario->ctx;
  /* codes: u = 0, w = 1, b = 2 */

  for (int trial = 0; trial < 60; ++trial) {
    Poly p = Poly::zero(c);
    int nmono = 1 + small(rng);
    for (int t = 0; t < nmono; ++t) {
      Rat coef(num(rng), den(rng));
      coef.canonicalize();
      if (coef == 0) coef = 1;
      Poly m = Poly::constant(c, coef);
      int nfac = 1 + small(rng);
      for (int f = 0; f < nfac; ++f) {
        switch (pick(rng)) {
          case 0:
            m = m * Poly::var(c, 0, Midx{small(rng), small(rng)});
            break;
          case 1:
            m = m * Poly::var(c, 1, Midx{small(rng), 0});
            break;
          case 2:
            m = m * Poly::var(c, 2, Midx{small(rng), small(rng)});
            break;
          case 3:
            m = m * Poly::xvar(c, small(rng) % 2);
            break;
          case 4:
            m = m * Poly::expf(c, {{small(rng) % 2, 1 + small(rng)}});
            break;
          default:
            m = m * Poly::func(c, small(rng) % 2, small(rng));
            break;
        }
      }
      p = p + m;
    }
    if (p.is_zero()) continue;
    std::string txt = render(p);
    CAPTURE(txt);
    auto r2 = parse_ok(prelude + "density z = " + txt + ";\n");
    const Poly& q = r2.scenario->densities.at("z");
    CHECK(p == q);
    CHECK(render(q) == txt);
  }
}

TEST_CASE("every shipped scenario runs green") {
  const char* files[] = {
      "kdv.vl",
      "liouville.vl",
      "maxwell.vl",
      "schouten-props.vl",
      "appendix-weight1.vl",
      "appendix-weight2.vl",
      "appendix-weight3.vl",
      "appendix-weight4.vl",
      "appendix-weight5.vl",
      "appendix-weight6.vl",
      "appendix-weight7.vl",
  };
  for (const char* f : files) {
    CAPTURE(f);
    auto r = parse_ok(slurp(scenario_path(f)));
    Report rep = run_scenario(*r.scenario);
    CHECK(rep.exit_code() == 0);
    CHECK(rep.nfail == 0);
    CHECK(rep.ninconclusive == 0);
    CHECK(rep.npass == (int)rep.tasks.size());
    for (const auto& t : rep.tasks) {
      CAPTURE(t.heading);
      CHECK(t.status == "pass");
    }
  }
}

TEST_CASE("reports are byte-identical across worker counts") {
  for (const char* f : {"kdv.vl", "appendix-weight6.vl"}) {
    CAPTURE(f);
    auto r = parse_ok(slurp(scenario_path(f)));
    RunFlags one;
    one.jobs = 1;
    RunFlags four;
    four.jobs = 4;
    Report a = run_scenario(*r.scenario, one);
    Report b = run_scenario(*r.scenario, four);
    a.scenario = b.scenario = f;
    CHECK(render_text(a) == render_text(b));
    CHECK(render_tree(a) == render_tree(b));
  }
}

TEST_CASE("failing task yields exit code 1") {
  auto r = parse_ok(
      "base x;\n"
      "field u even;\n"
      "field b odd;\n"
      "op A = u*Dx;\n"
      "task check-hamiltonian A on u ghost b;\n");
  Report rep = run_scenario(*r.scenario);
  REQUIRE(rep.tasks.size() == 1);
  CHECK(rep.tasks[0].status == "fail");
  CHECK(rep.exit_code() == 1);
}

TEST_CASE("solver exhaustion yields inconclusive, never a silent pass") {
  auto r = parse_ok(slurp(scenario_path("kdv.vl")));
  RunFlags starved;
  starved.order_bound = 0;
  Report rep = run_scenario(*r.scenario, starved);
  CHECK(rep.exit_code() == 2);
  CHECK(rep.nfail == 0);
  bool saw = false;
  for (const auto& t : rep.tasks)
    if (t.kind == "extract-christoffel") {
      saw = true;
      CHECK(t.status == "inconclusive");
      /* the unresolved residual is part of the report */
      bool residual = false;
      for (const auto& [k, v] : t.objects)
        if (k.rfind("unresolved residual", 0) == 0 && !v.empty())
          residual = true;
      CHECK(residual);
    }
  CHECK(saw);
  /* downstream tasks degrade honestly */
  CHECK(rep.ninconclusive >= 2);
}

TEST_CASE("per-task order bound overrides the shared flag") {
  std::string src = slurp(scenario_path("kdv.vl"));
  auto at = src.find("task extract-christoffel C;");
  REQUIRE(at != std::string::npos);
  src.replace(at, 27, "task extract-christoffel C order 7;");
  auto r = parse_ok(src);
  RunFlags starved;
  starved.order_bound = 0;
  Report rep = run_scenario(*r.scenario, starved);
  CHECK(rep.exit_code() == 0);
  CHECK(rep.ninconclusive == 0);
}

TEST_CASE("structured reports are well-formed JSON") {
  auto r = parse_ok(slurp(scenario_path("liouville.vl")));
  Report rep = run_scenario(*r.scenario);
  rep.scenario = "liouville.vl";
  auto j = nlohmann::json::parse(render_tree(rep));
  CHECK(j["scenario"] == "liouville.vl");
  CHECK(j["tasks"].size() == rep.tasks.size());
  CHECK(j["summary"]["pass"] == rep.npass);

  auto reps = search_up_to(3);
  auto js = nlohmann::json::parse(render_search_tree(reps));
  CHECK(js.size() == 3);
  CHECK(js[2]["weight"] == 3);
  CHECK(js[2]["entries"].size() == 2);
}

TEST_CASE("task sequencing is enforced at parse time") {
  auto r = parse_scenario(std::string(kKdvPrelude) +
                          "op A2 = -1/2*Dx^3 + 2*u*Dx + u_x;\n"
                          "collection C = ops A2 on u ghost b args p, r;\n"
                          "task build-q C;\n");
  CHECK_FALSE(r.ok);
  CHECK(r.diags[0].message ==
        "extract-christoffel must run before build-q for 'C'");
}
