#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "varlie/diffop.hpp"

using namespace varlie;

namespace {

struct Line {
  Context ctx;
  int w, b;
  Line() {
    ctx.add_base("x");
    ctx.add_field("w", 1, false);
    ctx.add_field("b", 1, true);
    w = 0;
    b = 1;
  }
  Poly W(int k) const { return Poly::var(ctx, w, Midx{k}); }
  Poly B(int k) const { return Poly::var(ctx, b, Midx{k}); }
  /* -1/2 D^3 + 2w D + w_x */
  TotalDiffOperator A2() const {
    TotalDiffOperator A(ctx, 1, 1);
    A.add(0, 0, Midx{3}, Poly::constant(ctx, Rat(-1, 2)));
    A.add(0, 0, Midx{1}, W(0).scale(2));
    A.add(0, 0, Midx{0}, W(1));
    return A;
  }
};

}  // namespace

TEST_CASE("application") {
  Line f;
  TotalDiffOperator D2 = TotalDiffOperator::dpow(f.ctx, Midx{2});
  CHECK(D2.apply_scalar(f.W(0)) == f.W(2));
  CHECK(f.A2().apply_scalar(f.B(0)) ==
        f.B(3).scale(Rat(-1, 2)) + f.W(0) * f.B(1) * Poly::constant(f.ctx, 2) +
            f.W(1) * f.B(0));
  CHECK(TotalDiffOperator::identity(f.ctx, 1).apply_scalar(f.W(2)) == f.W(2));
}

TEST_CASE("composition") {
  Line f;
  TotalDiffOperator Dx = TotalDiffOperator::dpow(f.ctx, Midx{1});
  TotalDiffOperator mulU(f.ctx, 1, 1);
  mulU.add(0, 0, Midx{0}, f.W(0));
  TotalDiffOperator C = Dx.compose(mulU); /* D_x after w* = w D_x + w_x */
  CHECK(C.entry(0, 0, Midx{1}) == f.W(0));
  CHECK(C.entry(0, 0, Midx{0}) == f.W(1));
  /* composing in the other order leaves the coefficient on the left */
  TotalDiffOperator C2 = mulU.compose(Dx);
  CHECK(C2.entry(0, 0, Midx{1}) == f.W(0));
  CHECK(C2.entry(0, 0, Midx{0}).is_zero());
  /* operator composition agrees with successive application */
  Poly s = f.W(0) * f.W(1);
  CHECK(C.apply_scalar(s) == Dx.apply_scalar(mulU.apply_scalar(s)));
}

TEST_CASE("adjoints") {
  Line f;
  TotalDiffOperator A(f.ctx, 1, 1);
  A.add(0, 0, Midx{1}, f.W(0)); /* w D_x */
  TotalDiffOperator At = A.adjoint();
  CHECK(At.entry(0, 0, Midx{1}) == -f.W(0));
  CHECK(At.entry(0, 0, Midx{0}) == -f.W(1));
  CHECK(At.adjoint() == A);
  /* the third-order skew operator stays skew */
  CHECK(f.A2().adjoint() == f.A2().scale(-1));
  /* adjoint against the pairing: <psi, A phi> ~ <A^T psi, phi> up to a
   * divergence, checked through the Euler test */
  Poly psi = f.W(0) * f.W(1), phi = f.W(2);
  Poly lhs = psi * A.apply_scalar(phi);
  Poly rhs = At.apply_scalar(psi) * phi;
  CHECK(is_total_divergence(lhs - rhs));
}

TEST_CASE("adjoint of a multidimensional gradient") {
  Context c;
  c.add_base("x");
  c.add_base("y");
  c.add_field("g", 1, false);
  TotalDiffOperator grad(c, 2, 1);
  grad.add(0, 0, Midx{1, 0}, Poly::constant(c, -1));
  grad.add(1, 0, Midx{0, 1}, Poly::constant(c, -1));
  TotalDiffOperator div = grad.adjoint();
  CHECK(div.rows == 1);
  CHECK(div.cols == 2);
  CHECK(div.entry(0, 0, Midx{1, 0}) == Poly::constant(c, 1));
  CHECK(div.entry(0, 1, Midx{0, 1}) == Poly::constant(c, 1));
}

TEST_CASE("coupling density") {
  Line f;
  Poly c = coupling({f.B(0)}, f.A2(), {f.B(0)});
  /* the w_x b b term dies on the odd square */
  CHECK(c == f.B(0) * f.B(3).scale(Rat(-1, 2)) +
                 f.W(0) * f.B(0) * f.B(1) * Poly::constant(f.ctx, 2));
}

TEST_CASE("linearization") {
  Line f;
  TotalDiffOperator L = linearization({f.W(0) * f.W(1)}, {f.w});
  CHECK(L.entry(0, 0, Midx{0}) == f.W(1));
  CHECK(L.entry(0, 0, Midx{1}) == f.W(0));
  CHECK(L.order() == 1);
}

TEST_CASE("arithmetic and rendering") {
  Line f;
  TotalDiffOperator Dx = TotalDiffOperator::dpow(f.ctx, Midx{1});
  TotalDiffOperator mulU(f.ctx, 1, 1);
  mulU.add(0, 0, Midx{0}, f.W(0));
  TotalDiffOperator S = Dx.compose(mulU);
  CHECK(render(S) == "w_x + w*Dx");
  CHECK((S - S).is_zero());
  CHECK(S + S == S.scale(2));
  CHECK(render(TotalDiffOperator::zero(f.ctx, 1, 1)) == "0");
}
