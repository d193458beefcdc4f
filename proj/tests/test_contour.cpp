#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hflat/contour.hpp"
#include "hflat/expr.hpp"

using namespace hflat;

TEST_CASE("residue integral") {
    Expr z = variable();
    Expr w = div(constant(1.0), z);
    auto r = contour_integrate(w, Contour::circle(0.0, 1.0));
    CHECK(std::abs(r.value - cplx(0.0, 2.0 * kPi)) < 1e-9);
}

TEST_CASE("segment integral of exp") {
    Expr w = parse_expr("exp(z)");
    auto r = contour_integrate(w, Contour::segment(cplx(0.0), cplx(1.0)));
    CHECK(std::abs(r.value - (std::exp(1.0) - 1.0)) < 1e-10);
}

TEST_CASE("loop around origin with coefficient 3/2") {
    // the rotational-period integrand (2k+1)/(2z) with k=1
    Expr w = parse_expr("3/(2*z)");
    auto r = contour_integrate(w, Contour::circle(0.0, 0.7));
    CHECK(std::abs(r.value - cplx(0.0, 3.0 * kPi)) < 1e-9);
    CHECK(std::abs(r.value.real()) < 1e-10);
}

TEST_CASE("closed loop of an exact form vanishes") {
    Expr f = parse_expr("z^3-2*z+exp(z)");
    Expr w = differentiate(f);
    auto r = contour_integrate(w, Contour::circle(cplx(0.3, 0.2), 1.1));
    CHECK(std::abs(r.value) < 1e-9);
}

TEST_CASE("sqrt monodromy around odd and even zero sets") {
    Expr e = parse_expr("sqrt(z*(z^2-1))");
    // |z| = 2 encloses all three simple zeros: sheet flips
    cplx start(2.0, 0.0);
    cplx v0 = eval_principal(e, start);
    cplx v1 = continue_eval(e, Contour::circle(0.0, 2.0));
    CHECK(std::abs(v1 + v0) < 1e-8 * std::abs(v0));
    // small loop around z = 1 only: flips as well (one zero)
    Expr e2 = parse_expr("sqrt(z*(z^2-1))");
    cplx s2 = cplx(1.3, 0.0);
    cplx w0 = eval_principal(e2, s2);
    cplx w1 = continue_eval(e2, Contour::circle(1.0, 0.3));
    CHECK(std::abs(w1 + w0) < 1e-8 * std::abs(w0));
    // loop around z = 1 and z = -1 (two zeros): sheet preserved
    Expr e3 = parse_expr("sqrt((z^2-1))");
    cplx u0 = eval_principal(e3, cplx(2.5, 0.0));
    cplx u1 = continue_eval(e3, Contour::circle(0.0, 2.5));
    CHECK(std::abs(u1 - u0) < 1e-8 * std::abs(u0));
}

TEST_CASE("brute-force continuation oracle for sqrt flip") {
    // rough stepping oracle with 10^4 steps, nearest-value sheet tracking
    Expr e = parse_expr("sqrt(z*(z^2-1))");
    int n = 10000;
    cplx prev = eval_principal(e, cplx(2.0, 0.0));
    for (int k = 1; k <= n; ++k) {
        cplx z = 2.0 * std::polar(1.0, 2.0 * kPi * double(k) / double(n));
        cplx p = eval_principal(e, z);
        prev = (std::abs(p - prev) <= std::abs(-p - prev)) ? p : -p;
    }
    cplx v1 = continue_eval(e, Contour::circle(0.0, 2.0));
    CHECK(std::abs(v1 - prev) < 1e-6 * std::abs(prev));
}

TEST_CASE("log continuation accumulates 2 pi i") {
    Expr e = log_(variable());
    cplx v = continue_eval(e, Contour::circle(0.0, 1.0));
    CHECK(std::abs(v - cplx(0.0, 2.0 * kPi)) < 1e-10);
}

TEST_CASE("intexp along contour reproduces monodromy of z^(3/2)") {
    // xi = exp(int 3/(2 zeta) dzeta) from 1: one loop multiplies by -1
    Expr g = parse_expr("3/(2*z)");
    Expr xi = intexp(g, cplx(1.0, 0.0));
    cplx v = continue_eval(xi, Contour::circle(0.0, 1.0));
    CHECK(std::abs(v + 1.0) < 1e-8);
}

TEST_CASE("clearance violation detected") {
    Expr w = div(constant(1.0), variable());
    Contour c = Contour::segment(cplx(-1.0, 1e-9), cplx(1.0, 1e-9));
    c.avoid = {cplx(0.0, 0.0)};
    c.clearance = 1e-3;
    CHECK_THROWS_AS(contour_integrate(w, c), Error);
}

TEST_CASE("route_path detours around obstacles") {
    std::vector<cplx> avoid{cplx(0.0, 0.0)};
    Contour c = route_path(cplx(-1.0, 0.0), cplx(1.0, 0.0), avoid, 0.05);
    check_clearance(c);  // must not throw
    // the detour must still produce correct continuation for sqrt(z)
    Expr e = sqrt_(variable());
    PathEvaluator pe({e}, c.start());
    pe.follow(c);
    // value at +1 reached from -1 through the upper half plane:
    // sqrt picks up e^{-i pi/2} relative to sqrt(-1)=i when passing below;
    // here the detour is deterministic, just require |value| = 1 and
    // continuation consistency with the reverse path
    cplx v = pe.value(0);
    CHECK(std::abs(std::abs(v) - 1.0) < 1e-10);
    PathEvaluator pe2({e}, c.start());
    pe2.follow(c);
    CHECK(std::abs(pe2.value(0) - v) < 1e-12);
}
