#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hflat/catalog.hpp"
#include "hflat/caustic.hpp"

using namespace hflat;

namespace {

std::vector<cplx> sample_points(const FrontData& d, const Window& w, int n,
                                double clear, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(w.x0, w.x1), uy(w.y0, w.y1);
    std::vector<cplx> out;
    while ((int)out.size() < n) {
        cplx z(ux(rng), uy(rng));
        bool ok = true;
        for (cplx a : d.avoid)
            if (std::abs(z - a) < clear) ok = false;
        if (std::abs(z - d.basepoint) < 1e-3) ok = false;
        if (ok) out.push_back(z);
    }
    return out;
}

}  // namespace

TEST_CASE("the exp-family caustic is totally umbilic") {
    FrontData d = build_front(builtin("peach"));
    CausticData c = caustic_of(d);
    CHECK(c.beta_degenerate);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int k = 0; k < 200; ++k) {
        cplx z(u(rng), u(rng));
        CHECK(std::abs(eval_principal(c.Qc_hat, z)) < 1e-10);
        CHECK(std::abs(eval_principal(c.omega_c, z)) < 1e-10);
        CHECK(std::abs(eval_principal(c.theta_c, z) - 2.0) < 1e-10);
    }
}

TEST_CASE("snowman caustic is the cylinder") {
    FrontData d = build_front(builtin("snowman"));  // c = 1
    CausticData c = caustic_of(d);
    REQUIRE(!c.beta_degenerate);
    for (cplx z : {cplx(1.2, 0.3), cplx(-0.7, 0.9), cplx(0.2, -1.1)}) {
        auto v = continue_eval_family({c.omega_c, c.theta_c, c.rho_c},
                                      Contour::segment(d.basepoint, z));
        CHECK(std::abs(v[0] - 1.0 / z) < 1e-10);
        CHECK(std::abs(v[1] - 0.25 / z) < 1e-10);
        CHECK(std::abs(v[2] - 0.25) < 1e-10);
    }
}

TEST_CASE("caustic form routes agree") {
    for (const char* name : {"snowman", "hourglass", "fournoid-genus-k",
                             "dihedral-caustic"}) {
        SceneSpec s = builtin(name);
        FrontData d = build_front(s);
        CausticData c = caustic_of(d);
        auto pts = sample_points(d, s.window, 40, 0.25, 7);
        CHECK(caustic_route_residual(c, pts, 1e-8) < 1e-8);
    }
}

TEST_CASE("triple identity and no common zeros") {
    for (const char* name : {"snowman", "fournoid-genus-k"}) {
        SceneSpec s = builtin(name);
        FrontData d = build_front(s);
        CausticData c = caustic_of(d);
        Expr dlr4 = mul(constant(0.25), div(differentiate(d.rho), d.rho));
        Expr resid = sub(mul(c.omega_c, c.theta_c),
                         add(d.Q_hat, powi(dlr4, 2)));
        auto pts = sample_points(d, s.window, 60, 0.25, 11);
        for (cplx z : pts) {
            Contour path = Contour::segment(d.basepoint, z);
            auto v = continue_eval_family({resid, c.omega_c, c.theta_c,
                                           d.Q_hat},
                                          path);
            CHECK(std::abs(v[0]) < 1e-8 * (1.0 + std::abs(v[3])));
            CHECK(std::max(std::abs(v[1]), std::abs(v[2])) > 1e-12);
        }
    }
}

TEST_CASE("beta flip realizes the dual caustic lift") {
    FrontData d = build_front(builtin("snowman"));
    CausticData c = caustic_of(d);
    // rebuild the lift with -beta by hand
    Expr b = neg(c.beta);
    Expr diff = sub(d.G, d.Gstar);
    Expr eta = powr(mul(constant(2.0), mul(b, diff)), -0.5);
    Expr ieta = mul(constant(kI), eta);
    Expr bGs = mul(b, d.Gstar);
    LegendrianFrame flipped = LegendrianFrame::closed_form(
        mul(ieta, add(d.G, bGs)), mul(ieta, sub(d.G, bGs)),
        mul(ieta, add(constant(1.0), b)), mul(ieta, sub(constant(1.0), b)),
        d.basepoint);
    cplx z(1.1, 0.4);
    Mat2 A = frame_at(c.frame, Contour::segment(d.basepoint, z));
    Mat2 B = frame_at(flipped, Contour::segment(d.basepoint, z));
    CHECK(psl_distance(B, A * dual_factor()) < 1e-9);
}

TEST_CASE("caustic frame projects to valid points and is Legendrian") {
    FrontData d = build_front(builtin("snowman"));
    CausticData c = caustic_of(d);
    Expr diag = c.frame.mc_diag();
    Expr om = c.frame.mc_omega();
    for (cplx z : {cplx(0.8, 0.5), cplx(-1.2, 0.2)}) {
        Contour path = Contour::segment(d.basepoint, z);
        Mat2 E = frame_at(c.frame, path);
        CHECK(std::abs(E.det() - 1.0) < 1e-9);
        project_point(E).validate(1e-8);
        auto v = continue_eval_family({diag, om, c.omega_c}, path);
        CHECK(std::abs(v[0]) < 1e-9);
        CHECK(std::abs(v[1] - v[2]) < 1e-9 * (1.0 + std::abs(v[2])));
    }
}

TEST_CASE("focal property: the caustic meets the singular parallel front") {
    for (const char* name : {"snowman", "fournoid-genus-k"}) {
        SceneSpec s = builtin(name);
        FrontData d = build_front(s);
        CausticData c = caustic_of(d);
        auto pts = sample_points(d, s.window, 12, 0.3, 13);
        for (cplx z : pts) {
            CHECK(focal_residual(d, c, z) < 1e-6);
        }
    }
}

TEST_CASE("umbilic ends of the caustic") {
    for (int m : {2, 3, 4, 5}) {
        SceneSpec s = builtin("uend-model", {{"m", double(m)}});
        FrontData d = build_front(s);
        double sd = 0.5 * (s.window.x1 - 0.0);
        UEndProfile up = uend_profile(d, 0.0, sd);
        CHECK(up.ord_Q == m - 1);
        CHECK(up.multiplicity == 0.5 * (m - 1));
        CHECK(up.co_orientable == ((m - 1) % 2 == 0));
        CHECK(up.type == EndType::Cylindrical);
        CHECK(up.singular_accumulation);
        CHECK(std::abs(up.ord_omega_c2 + 1.0) < 5e-2);
        CHECK(std::abs(up.ord_theta_c2 + 1.0) < 5e-2);
        CHECK(up.mult_from_ramification == up.multiplicity);
        CHECK(!up.is_cylinder_end);
    }
}

TEST_CASE("umbilic-end errors") {
    SceneSpec s = builtin("uend-model");
    FrontData d = build_front(s);
    CHECK_THROWS_AS(uend_profile(d, cplx(0.21, 0.0), 0.2), Error);
}

TEST_CASE("puncture ends of the caustic: shallow Hopf poles") {
    // k = 1: ord Q = -1, multiplicity m + 1/2, non-co-orientable
    for (int m : {1, 2}) {
        SceneSpec s = builtin("eend-model", {{"m", double(m)}, {"k", 1.0}});
        FrontData d = build_front(s);
        EEndProfile ep = eend_profile(d, d.punctures[0]);
        CHECK(ep.ord_Q == -1);
        CHECK(ep.mult_front == m);
        CHECK(ep.multiplicity == m + 0.5);
        CHECK(!ep.co_orientable);
        CHECK(ep.cylindrical);
        CHECK(ep.singular_accumulation);
    }
    // k = 0, am = -0.5: hourglass-type original, ord Q = -2
    SceneSpec s2 = builtin("eend-model", {{"m", 1.0}, {"k", 0.0},
                                          {"am", -0.5}});
    FrontData d2 = build_front(s2);
    EEndProfile e2 = eend_profile(d2, d2.punctures[0]);
    CHECK(e2.ord_Q == -2);
    CHECK(e2.multiplicity == 1.0);
    CHECK(e2.co_orientable);
    CHECK(e2.cylindrical);
    CHECK(e2.singular_accumulation);
    // k = 0, am = 0.5 (snowman-type): singularities stay away
    SceneSpec s3 = builtin("eend-model", {{"m", 1.0}, {"k", 0.0},
                                          {"am", 0.5}});
    FrontData d3 = build_front(s3);
    EEndProfile e3 = eend_profile(d3, d3.punctures[0]);
    CHECK(e3.ord_Q == -2);
    CHECK(!e3.singular_accumulation);
}

TEST_CASE("puncture ends of the caustic: deep Hopf poles") {
    for (int l : {2, 3}) {  // m = 1: l = 2m and l != 2m
        SceneSpec s = builtin("eend-model", {{"m", 1.0}, {"k", 0.0},
                                             {"am", 1.0}, {"l", double(l)},
                                             {"al", 0.5}});
        FrontData d = build_front(s);
        EEndProfile ep = eend_profile(d, d.punctures[0]);
        CHECK(ep.ord_Q == 2 * (1 - l - 1));
        CHECK(ep.ord_Q <= -4);
        CHECK(ep.multiplicity == 1.0);
        CHECK(ep.co_orientable);
        CHECK(!ep.cylindrical);
        CHECK(!ep.singular_accumulation);
    }
}

TEST_CASE("inverse caustic of the cylinder recovers rotational data") {
    // cylinder caustic forms with parameter c
    double c = 1.0;
    Expr z = variable();
    Expr om_c = div(constant(1.0 / (c * c)), z);
    Expr th_c = div(constant(c * c / 4.0), z);
    FrontData d = inverse_caustic(om_c, th_c, 0.0, 1.0);
    double a = c * c / 4.0 - 1.0 / (c * c);
    double b = c * c / 4.0 + 1.0 / (c * c);
    for (cplx zt : {cplx(1.3, 0.2), cplx(0.7, -0.4)}) {
        Contour path = Contour::segment(1.0, zt);
        auto v = continue_eval_family(
            {d.Q_hat, div(differentiate(d.rho), d.rho)}, path);
        // Q = -(a^2/4) dz^2/z^2 and dlog rho = 2b dz/z
        CHECK(std::abs(v[0] + 0.25 * a * a / (zt * zt)) < 1e-9);
        CHECK(std::abs(v[1] - 2.0 * b / zt) < 1e-9);
    }
}

TEST_CASE("inverse caustic round trip preserves caustic invariants") {
    SceneSpec s = builtin("dihedral-caustic");
    FrontData d = build_front(s);
    CausticData c = caustic_of(d);
    FrontData rec = inverse_caustic(c.omega_c, c.theta_c, 0.4, d.basepoint);
    CausticData c2 = caustic_of(rec);
    auto pts = sample_points(d, {0.2, 0.8, -0.3, 0.3}, 25, 0.1, 17);
    for (cplx z : pts) {
        auto v1 = continue_eval_family(
            {c.omega_c, c.theta_c, c.Qc_hat},
            Contour::segment(d.basepoint, z));
        auto v2 = continue_eval_family(
            {c2.omega_c, c2.theta_c, c2.Qc_hat},
            Contour::segment(d.basepoint, z));
        double s1 = std::norm(v1[0]) + std::norm(v1[1]);
        double s2 = std::norm(v2[0]) + std::norm(v2[1]);
        CHECK(std::abs(s1 - s2) < 1e-6 * (1.0 + s1));            // |w|^2+|t|^2
        CHECK(std::abs(v1[2] - v2[2]) < 1e-6 * (1.0 + std::abs(v1[2])));
        double r1 = std::abs(v1[1] / v1[0]), r2 = std::abs(v2[1] / v2[0]);
        CHECK(std::min(std::abs(r1 - r2), std::abs(r1 - 1.0 / r2)) <
              1e-6 * (1.0 + r1));                                 // |rho_c|
    }
}

TEST_CASE("distinct phases give distinct fronts with one caustic") {
    SceneSpec s = builtin("dihedral-caustic");
    FrontData d = build_front(s);
    CausticData c = caustic_of(d);
    FrontData r1 = inverse_caustic(c.omega_c, c.theta_c, 0.3, d.basepoint);
    FrontData r2 = inverse_caustic(c.omega_c, c.theta_c, 1.1, d.basepoint);
    cplx z(0.55, 0.1);
    cplx rho1 = continue_eval(r1.rho, Contour::segment(d.basepoint, z));
    cplx rho2 = continue_eval(r2.rho, Contour::segment(d.basepoint, z));
    CHECK(std::abs(rho1 - rho2) > 1e-6);
    CausticData c1 = caustic_of(r1), c2 = caustic_of(r2);
    auto v1 = continue_eval_family({c1.Qc_hat},
                                   Contour::segment(d.basepoint, z));
    auto v2 = continue_eval_family({c2.Qc_hat},
                                   Contour::segment(d.basepoint, z));
    CHECK(std::abs(v1[0] - v2[0]) < 1e-8 * (1.0 + std::abs(v1[0])));
}

TEST_CASE("admissible phases") {
    Expr z = variable();
    Expr om_c = div(constant(1.0), z);
    Expr th_c = div(constant(0.25), z);
    auto s = admissible_s(om_c, th_c, 1.0);
    CHECK(!s.empty());
    // omega_c = theta_c: Q_s = -omega_c^2 (e^{is} - e^{-is})^2/4 vanishes
    // only at s = 0 on the grid
    auto s2 = admissible_s(om_c, om_c, 1.0);
    CHECK(std::find(s2.begin(), s2.end(), 0.0) == s2.end());
    CHECK(!s2.empty());
}

TEST_CASE("quotient monodromy witness for the 3-end scene") {
    auto witness = [](double b) {
        SceneSpec s = builtin("pfront-3end", {{"b", b}});
        FrontData d = build_front(s);
        double r = 0.5 * std::min(1.0, std::abs(b));
        Contour tau = Contour::arc(0.0, r, 0.0, kPi, 24);
        return quotient_Q_monodromy(d.omega_hat, d.theta_hat, tau);
    };
    CHECK(std::abs(witness(0.3) - 1.0) > 1e-3);   // obstruction fires
    CHECK(std::abs(witness(0.5) - 1.0) < 1e-8);   // half-integer: silent
    CHECK(std::abs(witness(2.0) - 1.0) < 1e-8);   // integer: silent
}
