#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hflat/catalog.hpp"
#include "hflat/frontdata.hpp"

using namespace hflat;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / (1.0 + std::abs(b)); }
}

TEST_CASE("theorem-route data: (z, dz) is totally umbilic") {
    FrontData d = front_from_G_omega(variable(), constant(1.0), 0.0);
    for (cplx z : {cplx(0.3, 0.1), cplx(-0.5, 0.4)}) {
        CHECK(std::abs(eval_principal(d.Q_hat, z)) < 1e-13);
        CHECK(std::abs(eval_principal(d.theta_hat, z)) < 1e-13);
    }
}

TEST_CASE("theorem-route data reproduces the exp family") {
    FrontData d = front_from_G_omega(variable(),
                                     neg(parse_expr("exp(-2*z)")), 0.0);
    cplx z(0.4, -0.2);
    CHECK(rel(eval_principal(d.Q_hat, z), cplx(-1.0)) < 1e-12);
    CHECK(rel(eval_principal(d.theta_hat, z), std::exp(2.0 * z)) < 1e-12);
}

TEST_CASE("theorem-route: G=z^2, omega=z dz has vanishing Hopf") {
    FrontData d = front_from_G_omega(powi(variable(), 2), variable(),
                                     cplx(1.0, 0.0));
    for (cplx z : {cplx(0.8, 0.3), cplx(1.4, -0.2)}) {
        CHECK(std::abs(eval_principal(d.Q_hat, z)) < 1e-12);
    }
}

TEST_CASE("schwarzian identity holds for constructed data") {
    FrontData d = build_front(builtin("peach"));
    Expr lhs = sub(schwarzian_of_form(d.omega_hat),
                   add(mul(constant(2.0), d.Q_hat), schwarzian(d.G)));
    Expr rhs = sub(schwarzian_of_form(d.theta_hat),
                   add(mul(constant(2.0), d.Q_hat), schwarzian(d.Gstar)));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int k = 0; k < 50; ++k) {
        cplx z(u(rng), u(rng));
        CHECK(std::abs(eval_principal(lhs, z)) < 1e-9);
        CHECK(std::abs(eval_principal(rhs, z)) < 1e-9);
    }
}

TEST_CASE("fundamental forms of the exp family") {
    FrontData d = build_front(builtin("peach"));
    // at z = 0: |omega| = |theta| = 1, ds11 density 2, bound >= 2/|b|^2
    FundamentalForms f = fundamental_forms(d, 0.0);
    CHECK(std::abs(f.ds11_density - 2.0) < 1e-12);
    CHECK(std::abs(f.dh2_density) < 1e-12);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        cplx z(u(rng), u(rng));
        CHECK(fundamental_forms(d, z).ds11_density >= 2.0 - 1e-12);
    }
}

TEST_CASE("first fundamental form matches finite differences of f") {
    FrontData d = build_front(builtin("peach"));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double h = 1e-4;
    for (int k = 0; k < 10; ++k) {
        cplx z(u(rng), u(rng));
        FundamentalForms ff = fundamental_forms(d, z);
        auto fd2 = [&](cplx dir) {
            Mat2 Ep = frame_at(d.frame, Contour::segment(d.basepoint, z + 0.5 * h * dir));
            Mat2 Em = frame_at(d.frame, Contour::segment(d.basepoint, z - 0.5 * h * dir));
            Mat2 dX = project_point(Ep).X - project_point(Em).X;
            return lorentz_inner(dX, dX) / (h * h);
        };
        double E = fd2(cplx(1.0, 0.0));
        double G = fd2(cplx(0.0, 1.0));
        CHECK(std::abs(E - ff.E) / (1.0 + std::abs(ff.E)) < 1e-5);
        CHECK(std::abs(G - ff.G) / (1.0 + std::abs(ff.G)) < 1e-5);
    }
}

TEST_CASE("singular locus of the exp family is the vertical axis") {
    FrontData d = build_front(builtin("peach"));
    SingularLocus loc = singular_locus(d, 0.0, {-1.0, 1.0, -1.0, 1.0}, 64);
    REQUIRE(!loc.chains.empty());
    size_t n = 0;
    for (const auto& chain : loc.chains)
        for (cplx p : chain) {
            CHECK(std::abs(p.real()) < 1e-6);
            ++n;
        }
    CHECK(n > 32);
    // locus points satisfy the defining equation to the bisection tolerance
    for (const auto& chain : loc.chains)
        for (cplx p : chain) {
            cplx om = eval_principal(d.omega_hat, p);
            cplx th = eval_principal(d.theta_hat, p);
            CHECK(std::abs(std::abs(th / om) - 1.0) < 1e-6);
        }
}

TEST_CASE("constant rho gives an empty locus; rotational data a circle") {
    FrontData cyl = build_front(builtin("cylinder"));
    SingularLocus loc = singular_locus(cyl, 0.0, {-2.0, 2.0, -2.0, 2.0}, 64);
    CHECK(loc.chains.empty());

    FrontData snow = build_front(builtin("snowman"));
    // |rho| = k |z|^{2b} with k=1, b = 5/4: locus |z| = 1 at t = 0
    SingularLocus sl = singular_locus(snow, 0.0, {-2.0, 2.0, -2.0, 2.0}, 96);
    REQUIRE(!sl.chains.empty());
    size_t n = 0;
    for (const auto& chain : sl.chains)
        for (cplx p : chain) {
            CHECK(std::abs(std::abs(p) - 1.0) < 1e-5);
            ++n;
        }
    CHECK(n > 60);
    // and at t = 0.25: |z| = e^{2t/(2b)} = e^{0.2}
    SingularLocus sl2 = singular_locus(snow, 0.25, {-2.0, 2.0, -2.0, 2.0}, 96);
    double expect = std::exp(2.0 * 0.25 / 2.5);
    for (const auto& chain : sl2.chains)
        for (cplx p : chain) CHECK(std::abs(std::abs(p) - expect) < 1e-5);
}

TEST_CASE("parallel transform scales rho and fixes Q") {
    FrontData d = build_front(builtin("snowman"));
    FrontData dt = d.parallel(0.7);
    cplx z(1.2, 0.4);
    CHECK(rel(eval_principal(dt.Q_hat, z), eval_principal(d.Q_hat, z)) <
          1e-12);
    CHECK(rel(eval_principal(dt.rho, z),
              std::exp(-1.4) * eval_principal(d.rho, z)) < 1e-12);
}

TEST_CASE("dh^2 changes sign across the singular locus") {
    FrontData d = build_front(builtin("peach"));
    CHECK(fundamental_forms(d, cplx(-0.3, 0.2)).dh2_density < 0.0);
    CHECK(fundamental_forms(d, cplx(0.3, 0.2)).dh2_density > 0.0);
}

TEST_CASE("excluded parallel parameters") {
    // |rho| finite nonzero at the puncture: t = log|rho|/2 is excluded
    Expr z = variable();
    // omega = dz/z, theta = e^4 * dz/z on the punctured disk at 0
    FrontData d = front_from_forms(div(constant(1.0), z),
                                   div(constant(std::exp(4.0)), z), 1.0);
    Puncture p{"origin"};
    p.z = 0.0;
    p.singular_distance = 0.8;
    d.punctures = {p};
    auto t = excluded_parallel_params(d);
    REQUIRE(t.size() == 1);
    CHECK(std::abs(t[0] - 2.0) < 1e-3);

    // |rho| -> 0 contributes nothing
    FrontData d2 = front_from_forms(div(constant(1.0), z), constant(1.0), 1.0);
    d2.punctures = {p};
    CHECK(excluded_parallel_params(d2).empty());

    // the exp family has no limit at infinity
    FrontData peach = build_front(builtin("peach"));
    CHECK_THROWS_AS(excluded_parallel_params(peach), Error);
}

TEST_CASE("end diagnostics") {
    // omega = dz, theta = z^2 dz at 0: orders 0 and 2, not weakly complete
    Expr z = variable();
    FrontData d = front_from_forms(constant(1.0), powi(z, 2), 0.5);
    Puncture p{"origin"};
    p.z = 0.0;
    p.singular_distance = 0.8;
    d.punctures = {p};
    EndDiagnostics e = end_diagnostics(d, p);
    CHECK(std::abs(e.ord_omega2 - 0.0) < 1e-2);
    CHECK(std::abs(e.ord_theta2 - 2.0) < 1e-2);
    CHECK(!e.weakly_complete);
    CHECK(!e.cylindrical);
    CHECK(e.ord_Q == 2);

    // cylinder end: orders both -1, cylindrical and weakly complete
    FrontData cyl = build_front(builtin("cylinder"));
    EndDiagnostics ec = end_diagnostics(cyl, cyl.punctures[0]);
    CHECK(std::abs(ec.ord_omega2 + 1.0) < 1e-2);
    CHECK(std::abs(ec.ord_theta2 + 1.0) < 1e-2);
    CHECK(ec.cylindrical);
    CHECK(ec.weakly_complete);
    CHECK(ec.ord_Q == -2);
}

TEST_CASE("hyperelliptic sheet flip") {
    FrontData d = build_front(builtin("fournoid-genus-k"));
    FrontData f = d.sheet_flipped();
    cplx z(0.4, 0.7);
    CHECK(rel(eval_principal(f.G, z), -eval_principal(d.G, z)) < 1e-12);
    // Q is even in w
    CHECK(rel(eval_principal(f.Q_hat, z), eval_principal(d.Q_hat, z)) < 1e-12);
}
