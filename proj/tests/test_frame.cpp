#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hflat/frame.hpp"

using namespace hflat;

namespace {

// (G, G*) = (z, z - b): entries (z e^{-z/b}/c, c(z-b)e^{z/b}/b;
//                                e^{-z/b}/c,  c e^{z/b}/b)
Mat2 reference_exp_frame(cplx z, cplx b, cplx c) {
    cplx em = std::exp(-z / b), ep = std::exp(z / b);
    return {z / c * em, c / b * (z - b) * ep, em / c, c / b * ep};
}

LegendrianFrame exp_family_frame(cplx b, cplx c) {
    Expr z = variable();
    Expr G = z;
    Expr Gs = sub(z, constant(b));
    Expr xi = mul(constant(c), exp_(div(z, constant(b))));
    return LegendrianFrame::from_gauss_pair(G, Gs, c, 0.0, xi);
}

}  // namespace

TEST_CASE("gauss-pair closed form reproduces the reference matrix") {
    LegendrianFrame f = exp_family_frame(1.0, 1.0);
    for (cplx z : {cplx(0.5, 0.2), cplx(-0.4, 0.9), cplx(1.5, -0.6)}) {
        Mat2 E = frame_at(f, Contour::segment(0.0, z));
        CHECK(psl_distance(E, reference_exp_frame(z, 1.0, 1.0)) < 1e-10);
        CHECK(std::abs(E.det() - 1.0) < 1e-10);
    }
}

TEST_CASE("data formulas for the exp family") {
    LegendrianFrame f = exp_family_frame(1.0, 1.0);
    cplx z(0.3, -0.2);
    // omega = -e^{-2z} dz, theta = e^{2z} dz, Q = -dz^2
    CHECK(std::abs(eval_principal(f.omega_hat, z) + std::exp(-2.0 * z)) < 1e-12);
    CHECK(std::abs(eval_principal(f.theta_hat, z) - std::exp(2.0 * z)) < 1e-12);
    CHECK(std::abs(eval_principal(f.Q_hat, z) + 1.0) < 1e-12);
}

TEST_CASE("ODE route agrees with the closed form") {
    LegendrianFrame cf = exp_family_frame(1.0, 1.0);
    LegendrianFrame ode = LegendrianFrame::from_forms_ode(
        cf.omega_hat, cf.theta_hat, 0.0);
    Mat2 E0 = frame_at(cf, Contour::segment(0.0, 0.0));
    for (cplx z : {cplx(1.0, 0.0), cplx(0.4, 0.7), cplx(-0.8, -0.3)}) {
        double drift = 0.0;
        Mat2 P = solve_ode(cf.omega_hat, cf.theta_hat,
                           Contour::segment(0.0, z), Mat2::identity(),
                           1e-11, &drift);
        Mat2 Ecf = frame_at(cf, Contour::segment(0.0, z));
        // E_cf(z) = E_cf(0) * P(z)
        CHECK(psl_distance(E0 * P, Ecf) < 1e-7);
        CHECK(drift < 1e-8);
    }
}

TEST_CASE("constant-coefficient ODE: omega = dz, theta = 0") {
    Mat2 E = solve_ode(constant(1.0), constant(0.0),
                       Contour::segment(0.0, 1.0));
    // exp of the nilpotent (0 0; 1 0): (1 0; 1 1)
    CHECK(entry_distance(E, Mat2{1.0, 0.0, 1.0, 1.0}) < 1e-10);
}

TEST_CASE("zero-length path returns the initial frame") {
    Mat2 E = solve_ode(constant(0.0), constant(0.0),
                       Contour::segment(0.4, 0.4));
    CHECK(entry_distance(E, Mat2::identity()) < 1e-14);
}

TEST_CASE("from_G_omega example (G, omega) = (z, dz)") {
    LegendrianFrame f = LegendrianFrame::from_G_omega(variable(),
                                                      constant(1.0), 0.0);
    Mat2 E = frame_at(f, Contour::segment(0.0, cplx(0.7, 0.1)));
    cplx z(0.7, 0.1);
    Mat2 ref{kI * z, kI, kI, 0.0};
    CHECK(psl_distance(E, ref) < 1e-10);
    // projecting and recomputing the Gauss map returns G = z
    CHECK(std::abs(E.a / E.c - z) < 1e-10);
}

TEST_CASE("from_G_omega reproduces the exp-family frame up to PSL sign") {
    Expr G = variable();
    Expr om = neg(parse_expr("exp(-2*z)"));
    LegendrianFrame f = LegendrianFrame::from_G_omega(G, om, 0.0);
    for (cplx z : {cplx(0.9, 0.0), cplx(0.2, 0.5)}) {
        Mat2 E = frame_at(f, Contour::segment(0.0, z));
        CHECK(psl_distance(E, reference_exp_frame(z, 1.0, 1.0)) < 1e-9);
    }
}

TEST_CASE("projection to the hyperboloid") {
    Mat2 id = Mat2::identity();
    H3Point p = project_point(id);
    auto m = p.minkowski();
    CHECK(std::abs(m[0] - 1.0) < 1e-15);
    CHECK(std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]) < 1e-15);
    NormalVector n = project_normal(id);
    CHECK(std::abs(lorentz_inner(n.N, n.N) - 1.0) < 1e-14);
    CHECK(std::abs(lorentz_inner(p.X, n.N)) < 1e-14);

    double t = 0.8;
    Mat2 Et = Mat2::diag(std::exp(cplx(t / 2)), std::exp(cplx(-t / 2)));
    auto mt = project_point(Et).minkowski();
    CHECK(std::abs(mt[0] - std::cosh(t)) < 1e-13);
    CHECK(std::abs(mt[3] - std::sinh(t)) < 1e-13);

    // sign invariance
    CHECK(entry_distance(project_point(Et * cplx(-1.0)).X,
                         project_point(Et).X) < 1e-14);
}

TEST_CASE("parallel family") {
    LegendrianFrame f = exp_family_frame(1.0, 1.0);
    double t = 0.37;
    LegendrianFrame ft = f.parallel(t);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 10; ++k) {
        cplx z(u(rng), u(rng));
        // rho_t / rho = e^{-2t}
        cplx r0 = eval_principal(f.rho, z);
        cplx r1 = eval_principal(ft.rho, z);
        CHECK(std::abs(r1 / r0 - std::exp(-2.0 * t)) < 1e-12);
        // Hopf differential unchanged
        CHECK(std::abs(eval_principal(ft.Q_hat, z) -
                       eval_principal(f.Q_hat, z)) < 1e-12);
        // f_t = cosh(t) f + sinh(t) nu
        Mat2 E = frame_at(f, Contour::segment(0.0, z));
        Mat2 Et = frame_at(ft, Contour::segment(0.0, z));
        H3Point direct = project_point(Et);
        H3Point via = geodesic_point(project_point(E), project_normal(E), t);
        CHECK(entry_distance(direct.X, via.X) < 1e-9);
    }
}

TEST_CASE("duality swaps the forms and fixes the projection") {
    LegendrianFrame f = exp_family_frame(1.0, 1.0);
    LegendrianFrame fd = f.dual();
    cplx z(0.4, 0.1);
    CHECK(std::abs(eval_principal(fd.omega_hat, z) -
                   eval_principal(f.theta_hat, z)) < 1e-13);
    CHECK(std::abs(eval_principal(fd.theta_hat, z) -
                   eval_principal(f.omega_hat, z)) < 1e-13);
    Mat2 E = frame_at(f, Contour::segment(0.0, z));
    Mat2 Ed = frame_at(fd, Contour::segment(0.0, z));
    CHECK(entry_distance(project_point(E).X, project_point(Ed).X) < 1e-10);
    // dual of dual = -E (same PSL class)
    LegendrianFrame fdd = fd.dual();
    Mat2 Edd = frame_at(fdd, Contour::segment(0.0, z));
    CHECK(entry_distance(Edd, E * cplx(-1.0)) < 1e-10);
}

TEST_CASE("mobius action") {
    LegendrianFrame f = exp_family_frame(1.0, 1.0);
    Mat2 a{0.0, 1.0, -1.0, 0.0};
    LegendrianFrame g = f.mobius(a);
    cplx z(0.6, -0.2);
    // G -> -1/G
    CHECK(std::abs(eval_principal(g.G, z) + 1.0 / z) < 1e-12);
    // f -> a f a*
    Mat2 E = frame_at(f, Contour::segment(0.0, z));
    Mat2 Eg = frame_at(g, Contour::segment(0.0, z));
    Mat2 lhs = project_point(Eg).X;
    Mat2 rhs = a * project_point(E).X * a.conj_transpose();
    CHECK(entry_distance(lhs, rhs) < 1e-10);
    // |Q| and |rho| invariant
    CHECK(std::abs(std::abs(eval_principal(g.Q_hat, z)) -
                   std::abs(eval_principal(f.Q_hat, z))) < 1e-12);
}

TEST_CASE("off-diagonal Maurer-Cartan form") {
    LegendrianFrame f = exp_family_frame(2.0, cplx(1.2, 0.4));
    Expr diag = f.mc_diag();
    Expr om = f.mc_omega();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int k = 0; k < 12; ++k) {
        cplx z(u(rng), u(rng));
        CHECK(std::abs(eval_principal(diag, z)) < 1e-10);
        CHECK(std::abs(eval_principal(om, z) -
                       eval_principal(f.omega_hat, z)) < 1e-10);
    }
}

TEST_CASE("monodromy: contractible loop and the rotational-family loop") {
    LegendrianFrame f = exp_family_frame(1.0, 1.0);
    auto rep = monodromy(f, Contour::circle(cplx(0.3, 0.1), 0.4));
    CHECK(psl_distance(rep.M, Mat2::identity()) < 1e-8);
    CHECK(rep.has_period);
    CHECK(std::abs(rep.period) < 1e-9);

    // xi = z^{3/2} family: once around the origin the period is 3 pi i
    Expr z = variable();
    Expr w = sqrt_(mul(z, sub(powi(z, 2), constant(1.0))));
    Expr G = w;
    Expr h = div(mul(constant(-2.0), z), constant(3.0));
    Expr Gs = div(h, w);
    Expr xi = powr(z, 1.5);
    LegendrianFrame f2 =
        LegendrianFrame::from_gauss_pair(G, Gs, 1.0, cplx(0.25, 0.0), xi);
    Contour loop = Contour::circle(0.0, 0.25);
    auto rep2 = monodromy(f2, loop);
    CHECK(rep2.has_period);
    CHECK(std::abs(rep2.period - cplx(0.0, 3.0 * kPi)) < 1e-7);
    CHECK(rep2.period_imaginary);
}
