#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "varlie/poisson.hpp"

using namespace varlie;

namespace {

struct Fix {
  Context ctx;
  int w, b, u;
  Fix() {
    ctx.add_base("x");
    ctx.add_field("w", 1, false);
    ctx.add_field("b", 1, true);
    ctx.add_field("u", 1, false);
    w = 0;
    b = 1;
    u = 2;
  }
  Poly W(int k) const { return Poly::var(ctx, w, Midx{k}); }
  Poly B(int k) const { return Poly::var(ctx, b, Midx{k}); }
  Poly U(int k) const { return Poly::var(ctx, u, Midx{k}); }
  TotalDiffOperator A2() const {
    TotalDiffOperator A(ctx, 1, 1);
    A.add(0, 0, Midx{3}, Poly::constant(ctx, Rat(-1, 2)));
    A.add(0, 0, Midx{1}, W(0).scale(2));
    A.add(0, 0, Midx{0}, W(1));
    return A;
  }
};

}  // namespace

TEST_CASE("odd charge of the third-order structure") {
  Fix f;
  Poly om = w_charge(f.A2(), {f.b});
  CHECK(om == (f.B(0) * f.B(3)).scale(Rat(1, 4)) -
                  f.W(0) * f.B(0) * f.B(1));
  CHECK(om.parity() == 0);
}

TEST_CASE("field of a charge matches the homological construction") {
  Fix f;
  Poly om = w_charge(f.A2(), {f.b});
  EvolutionaryField Q = field_of_charge(om, {{f.w, f.b}});
  CHECK(Q.odd);
  CHECK(Q.section(f.w) == f.A2().apply_scalar(f.B(0)));
  CHECK(Q.section(f.b) == f.B(0) * f.B(1));
}

TEST_CASE("self-bracket of the odd charge is a divergence") {
  Fix f;
  Poly om = w_charge(f.A2(), {f.b});
  Poly sb = schouten(om, om, {{f.w, f.b}});
  CHECK(is_total_divergence(sb));
}

TEST_CASE("hamiltonian test") {
  Fix f;
  auto chk = is_hamiltonian(f.A2(), {f.w}, {f.b});
  CHECK(chk.skew);
  CHECK(chk.jacobi);
  CHECK(chk.passed());

  auto dx = is_hamiltonian(TotalDiffOperator::dpow(f.ctx, Midx{1}), {f.w},
                           {f.b});
  CHECK(dx.passed());

  /* w D_x is not skew-adjoint */
  TotalDiffOperator bad(f.ctx, 1, 1);
  bad.add(0, 0, Midx{1}, f.W(0));
  auto nb = is_hamiltonian(bad, {f.w}, {f.b});
  CHECK_FALSE(nb.skew);
  CHECK_FALSE(nb.passed());
}

TEST_CASE("bracket of linear sections against the commutator") {
  Fix f;
  /* both charges are linear in the odd variable, coefficients in u-jets */
  Poly om1 = f.B(0) * f.U(0) * f.U(0);
  Poly om2 = f.B(0) * f.U(0) * f.U(1);
  Poly br = schouten(om1, om2, {{f.u, f.b}});
  CHECK(br == -(f.U(0) * f.U(0) * f.U(0) * f.B(1)) -
                  (f.U(0) * f.U(0) * f.U(1) * f.B(0)).scale(2));
  /* the class of the bracket is the commutator of the generating sections */
  EvolutionaryField X1(f.ctx, false), X2(f.ctx, false);
  X1.set_section(f.u, f.U(0) * f.U(0));
  X2.set_section(f.u, f.U(0) * f.U(1));
  Poly K = X1.apply(X2.section(f.u)) - X2.apply(X1.section(f.u));
  CHECK(K == f.U(0) * f.U(0) * f.U(1));
  CHECK(cohomology_equal(br, f.B(0) * K));
  /* and the exact discrepancy is one full derivative */
  Poly dd = br - f.B(0) * K;
  Poly d1 = -total_derivative(f.U(0).pow(3) * f.B(0), 0);
  CHECK(dd == d1);
}

TEST_CASE("graded antisymmetry modulo divergences") {
  Fix f;
  Poly om1 = f.B(0) * f.U(0) * f.U(0);
  Poly om2 = f.B(0) * f.U(0) * f.U(1);
  /* odd-odd: symmetric combination is a divergence */
  CHECK(is_total_divergence(schouten(om1, om2, {{f.u, f.b}}) +
                            schouten(om2, om1, {{f.u, f.b}})));
  /* even-even: antisymmetric combination is a divergence */
  Poly e1 = (f.B(0) * f.B(3)).scale(Rat(1, 4));
  Poly e2 = f.W(0) * f.B(0) * f.B(1);
  CHECK(is_total_divergence(schouten(e1, e2, {{f.w, f.b}}) -
                            schouten(e2, e1, {{f.w, f.b}})));
}

TEST_CASE("poisson bracket of densities") {
  Fix f;
  TotalDiffOperator A = f.A2();
  Poly H = f.W(0) * f.W(0);
  Poly G = f.W(1) * f.W(1);
  Poly hg = poisson_bracket(H, G, A, {f.w});
  Poly gh = poisson_bracket(G, H, A, {f.w});
  CHECK(is_total_divergence(hg + gh));
  CHECK(is_total_divergence(poisson_bracket(H, H, A, {f.w})));
  /* explicit value: dH = 2w, dG = -2w_xx */
  Poly lhs = f.W(0).scale(2) * A.apply_scalar(f.W(2).scale(-2));
  CHECK(hg == lhs);
}

TEST_CASE("odd charge of a constant-coefficient structure") {
  Fix f;
  TotalDiffOperator D3 = TotalDiffOperator::dpow(f.ctx, Midx{3});
  Poly om = w_charge(D3, {f.b});
  CHECK(om == (f.B(0) * f.B(3)).scale(Rat(-1, 2)));
  CHECK(is_total_divergence(schouten(om, om, {{f.w, f.b}})));
}
