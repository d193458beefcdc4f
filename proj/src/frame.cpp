#include "hflat/frame.hpp"

#include <cmath>

namespace hflat {

LegendrianFrame LegendrianFrame::closed_form(Expr A, Expr B, Expr C, Expr D,
                                             cplx basepoint) {
    LegendrianFrame f;
    f.route = Route::ClosedForm;
    f.A = std::move(A);
    f.B = std::move(B);
    f.C = std::move(C);
    f.D = std::move(D);
    f.basepoint = basepoint;
    return f;
}

LegendrianFrame LegendrianFrame::from_G_omega(const Expr& G,
                                              const Expr& omega_hat,
                                              cplx basepoint) {
    Expr dG = differentiate(G);
    cplx c;
    if (is_constant(dG, &c) && c == cplx(0.0))
        fail(ErrorCode::DegenerateData, "from_G_omega: dG vanishes identically");
    if (is_constant(omega_hat, &c) && c == cplx(0.0))
        fail(ErrorCode::DegenerateData, "from_G_omega: omega vanishes identically");
    Expr C = mul(constant(kI), sqrt_(div(omega_hat, dG)));
    Expr A = mul(G, C);
    Expr B = div(differentiate(A), omega_hat);
    Expr D = div(differentiate(C), omega_hat);
    LegendrianFrame f = closed_form(A, B, C, D, basepoint);
    f.G = G;
    f.omega_hat = omega_hat;
    f.Gstar = div(differentiate(A), differentiate(C));  // B/D with omega cancelled
    f.theta_hat = f.mc_theta();
    f.Q_hat = mul(f.omega_hat, f.theta_hat);
    f.rho = div(f.theta_hat, f.omega_hat);
    return f;
}

LegendrianFrame LegendrianFrame::from_gauss_pair(const Expr& G,
                                                 const Expr& Gstar, cplx c,
                                                 cplx basepoint, Expr xi) {
    Expr diff = sub(G, Gstar);
    cplx cv;
    if (is_constant(diff, &cv) && cv == cplx(0.0))
        fail(ErrorCode::GaussMapsCollide, "from_gauss_pair: G == G*");
    Expr dG = differentiate(G);
    Expr dGs = differentiate(Gstar);
    if (!xi) xi = mul(constant(c), intexp(div(dG, diff), basepoint));
    Expr A = div(G, xi);
    Expr B = div(mul(xi, Gstar), diff);
    Expr C = div(constant(1.0), xi);
    Expr D = div(xi, diff);
    LegendrianFrame f = closed_form(A, B, C, D, basepoint);
    f.G = G;
    f.Gstar = Gstar;
    Expr xi2 = powi(xi, 2);
    f.omega_hat = neg(div(dG, xi2));
    f.theta_hat = div(mul(xi2, dGs), powi(diff, 2));
    f.Q_hat = neg(div(mul(dG, dGs), powi(diff, 2)));
    f.rho = div(f.theta_hat, f.omega_hat);
    return f;
}

LegendrianFrame LegendrianFrame::from_forms_ode(const Expr& omega_hat,
                                                const Expr& theta_hat,
                                                cplx basepoint, Mat2 initial) {
    LegendrianFrame f;
    f.route = Route::Ode;
    f.omega_hat = omega_hat;
    f.theta_hat = theta_hat;
    f.basepoint = basepoint;
    f.initial = initial;
    f.Q_hat = mul(omega_hat, theta_hat);
    f.rho = div(theta_hat, omega_hat);
    return f;
}

LegendrianFrame LegendrianFrame::parallel(double t) const {
    LegendrianFrame f = *this;
    cplx ep = std::exp(cplx(0.5 * t)), em = std::exp(cplx(-0.5 * t));
    if (route == Route::ClosedForm) {
        f.A = mul(A, constant(ep));
        f.C = mul(C, constant(ep));
        f.B = mul(B, constant(em));
        f.D = mul(D, constant(em));
    } else {
        f.initial = initial * Mat2::diag(ep, em);
    }
    if (omega_hat) f.omega_hat = mul(constant(std::exp(cplx(t))), omega_hat);
    if (theta_hat) f.theta_hat = mul(constant(std::exp(cplx(-t))), theta_hat);
    if (rho) f.rho = mul(constant(std::exp(cplx(-2.0 * t))), rho);
    // Q is unchanged: e^t e^{-t} = 1
    return f;
}

LegendrianFrame LegendrianFrame::gauge(double s) const {
    LegendrianFrame f = parallel(0.0);
    cplx ep = std::exp(cplx(0.0, 0.5 * s)), em = std::exp(cplx(0.0, -0.5 * s));
    if (route == Route::ClosedForm) {
        f.A = mul(A, constant(ep));
        f.C = mul(C, constant(ep));
        f.B = mul(B, constant(em));
        f.D = mul(D, constant(em));
    } else {
        f.initial = initial * Mat2::diag(ep, em);
    }
    if (omega_hat) f.omega_hat = mul(constant(std::exp(cplx(0.0, s))), omega_hat);
    if (theta_hat) f.theta_hat = mul(constant(std::exp(cplx(0.0, -s))), theta_hat);
    if (rho) f.rho = mul(constant(std::exp(cplx(0.0, -2.0 * s))), rho);
    return f;
}

LegendrianFrame LegendrianFrame::dual() const {
    LegendrianFrame f = *this;
    if (route == Route::ClosedForm) {
        f.A = mul(constant(kI), B);
        f.B = mul(constant(kI), A);
        f.C = mul(constant(kI), D);
        f.D = mul(constant(kI), C);
    } else {
        f.initial = initial * dual_factor();
    }
    std::swap(f.omega_hat, f.theta_hat);
    std::swap(f.G, f.Gstar);
    if (f.omega_hat && f.theta_hat) f.rho = div(f.theta_hat, f.omega_hat);
    return f;
}

LegendrianFrame LegendrianFrame::mobius(const Mat2& a) const {
    if (std::abs(a.det() - 1.0) > 1e-10)
        fail(ErrorCode::SpecError, "mobius: matrix not in SL(2,C)");
    LegendrianFrame f = *this;
    auto lin = [&](cplx p, const Expr& x, cplx q, const Expr& y) {
        return add(mul(constant(p), x), mul(constant(q), y));
    };
    if (route == Route::ClosedForm) {
        f.A = lin(a.a, A, a.b, C);
        f.C = lin(a.c, A, a.d, C);
        f.B = lin(a.a, B, a.b, D);
        f.D = lin(a.c, B, a.d, D);
    } else {
        f.initial = a * initial;
    }
    // canonical forms and Q are unchanged; Gauss maps move by the Mobius action
    auto act = [&](const Expr& g) -> Expr {
        if (!g) return nullptr;
        return div(add(mul(constant(a.a), g), constant(a.b)),
                   add(mul(constant(a.c), g), constant(a.d)));
    };
    f.G = act(G);
    f.Gstar = act(Gstar);
    return f;
}

Expr LegendrianFrame::mc_omega() const {
    // (E^{-1} E')_{21} = -C A' + A C'
    return add(neg(mul(C, differentiate(A))), mul(A, differentiate(C)));
}
Expr LegendrianFrame::mc_theta() const {
    // (E^{-1} E')_{12} = D B' - B D'
    return sub(mul(D, differentiate(B)), mul(B, differentiate(D)));
}
Expr LegendrianFrame::mc_diag() const {
    // (E^{-1} E')_{11} = D A' - B C'
    return sub(mul(D, differentiate(A)), mul(B, differentiate(C)));
}

// ----------------------------------------------------------------------

FrameWalker::FrameWalker(const LegendrianFrame& frame, cplx start, double tol)
    : frame_(frame), z_(start), tol_(tol) {
    std::vector<Expr> roots;
    auto push = [&](const Expr& e, int& idx) {
        if (e) {
            idx = static_cast<int>(roots.size());
            roots.push_back(e);
        }
    };
    if (frame_.route == LegendrianFrame::Route::ClosedForm) {
        push(frame_.A, iA_);
        push(frame_.B, iB_);
        push(frame_.C, iC_);
        push(frame_.D, iD_);
        push(frame_.omega_hat, iom_);
        push(frame_.theta_hat, ith_);
    } else {
        push(frame_.omega_hat, iom_);
        push(frame_.theta_hat, ith_);
        if (std::abs(start - frame_.basepoint) > 1e-13 * (1.0 + std::abs(start)))
            fail(ErrorCode::SpecError,
                 "ODE frame walkers must start at the frame basepoint");
        E_ = frame_.initial;
    }
    pe_ = std::make_unique<PathEvaluator>(roots, start);
}

Mat2 FrameWalker::matrix() const {
    if (frame_.route == LegendrianFrame::Route::ClosedForm) {
        Mat2 E;
        E.a = pe_->value(size_t(iA_));
        E.b = pe_->value(size_t(iB_));
        E.c = pe_->value(size_t(iC_));
        E.d = pe_->value(size_t(iD_));
        return E;
    }
    return E_;
}

cplx FrameWalker::omega_value() const {
    if (iom_ < 0) fail(ErrorCode::SpecError, "frame carries no omega");
    return pe_->value(size_t(iom_));
}
cplx FrameWalker::theta_value() const {
    if (ith_ < 0) fail(ErrorCode::SpecError, "frame carries no theta");
    return pe_->value(size_t(ith_));
}

namespace {
// Dormand-Prince 5(4) coefficients
const double kDPc[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
const double kDPa[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
const double kDPb5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                         -2187.0 / 6784, 11.0 / 84, 0.0};
const double kDPb4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695,
                         393.0 / 640,     -92097.0 / 339200,
                         187.0 / 2100,    1.0 / 40};
}  // namespace

void FrameWalker::ode_segment(cplx z0, cplx z1) {
    cplx dz = z1 - z0;
    double seg = std::abs(dz);
    if (seg == 0.0) return;
    double t = 0.0, h = 0.25;
    auto deriv = [&](double tt, const Mat2& E) {
        cplx z = z0 + tt * dz;
        cplx om = pe_->value_at(size_t(iom_), z);
        cplx th = pe_->value_at(size_t(ith_), z);
        Mat2 M{0.0, th, om, 0.0};
        return (E * M) * dz;
    };
    int guard = 0;
    while (t < 1.0) {
        if (++guard > 200000)
            fail(ErrorCode::ToleranceNotMet, "ODE stepper stalled");
        h = std::min(h, 1.0 - t);
        Mat2 k[7];
        bool ok = true;
        try {
            for (int i = 0; i < 7; ++i) {
                Mat2 Ei = E_;
                for (int j = 0; j < i; ++j) {
                    double aij = kDPa[i][j];
                    if (aij != 0.0) Ei = Ei + k[j] * cplx(h * aij);
                }
                k[i] = deriv(t + kDPc[i] * h, Ei);
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::PoleHit ||
                e.code() == ErrorCode::SheetInconsistency) {
                ok = false;
            } else {
                throw;
            }
        }
        Mat2 E5 = E_, E4 = E_;
        if (ok) {
            for (int i = 0; i < 7; ++i) {
                if (kDPb5[i] != 0.0) E5 = E5 + k[i] * cplx(h * kDPb5[i]);
                if (kDPb4[i] != 0.0) E4 = E4 + k[i] * cplx(h * kDPb4[i]);
            }
            double err = (E5 - E4).norm_inf();
            double scale = tol_ * (1.0 + E5.norm_inf());
            double ddet = std::abs(E5.det() - E_.det());
            if (err > scale || ddet > 10.0 * tol_ * (1.0 + std::abs(h) * seg))
                ok = false;
            if (ok) {
                t += h;
                E_ = E5;
                pe_->advance_to(z0 + t * dz);
                double grow = std::pow(scale / (err + 1e-300), 0.2);
                h = std::min(h * std::clamp(0.9 * grow, 0.3, 4.0), 1.0);
                continue;
            }
        }
        h *= 0.5;
        if (h < 1e-12)
            fail(ErrorCode::BranchPointOnPath,
                 "ODE step collapsed (data singular on path?)");
    }
    det_drift_ = std::max(det_drift_, std::abs(E_.det() - 1.0));
    z_ = z1;
}

void FrameWalker::advance_to(cplx z) {
    if (frame_.route == LegendrianFrame::Route::ClosedForm) {
        pe_->advance_to(z);
        z_ = z;
    } else {
        ode_segment(z_, z);
    }
}

void FrameWalker::follow(const Contour& contour) {
    if (std::abs(contour.start() - z_) > 1e-12 * (1.0 + std::abs(z_)))
        fail(ErrorCode::SpecError, "contour does not start at walker position");
    check_clearance(contour);
    for (size_t i = 1; i < contour.vertices.size(); ++i)
        advance_to(contour.vertices[i]);
}

Mat2 frame_at(const LegendrianFrame& frame, const Contour& path, double tol) {
    FrameWalker w(frame, path.start(), tol);
    w.follow(path);
    return w.matrix();
}

MonodromyReport monodromy(const LegendrianFrame& frame, const Contour& loop,
                          double tol) {
    if (!loop.closed(1e-9))
        fail(ErrorCode::SpecError, "monodromy requires a closed loop");
    MonodromyReport rep;
    FrameWalker w(frame, loop.start(), tol);
    Mat2 E0 = w.matrix();
    w.follow(loop);
    Mat2 E1 = w.matrix();
    rep.M = E0.inverse() * E1;
    if (frame.G && frame.Gstar) {
        Expr integrand = div(differentiate(frame.G), sub(frame.G, frame.Gstar));
        IntegralResult ir = contour_integrate(integrand, loop, tol);
        rep.has_period = true;
        rep.period = ir.value;
        rep.period_imaginary =
            std::abs(ir.value.real()) < 1e-8 + 10.0 * ir.abs_error;
    }
    rep.dual_symmetry = psl_distance(rep.M, dual_factor()) < 1e-6;
    return rep;
}

Mat2 solve_ode(const Expr& omega_hat, const Expr& theta_hat,
               const Contour& path, Mat2 initial, double tol,
               double* det_drift) {
    LegendrianFrame f = LegendrianFrame::from_forms_ode(omega_hat, theta_hat,
                                                        path.start(), initial);
    FrameWalker w(f, path.start(), tol);
    w.follow(path);
    if (det_drift) *det_drift = w.det_drift();
    return w.matrix();
}

}  // namespace hflat
