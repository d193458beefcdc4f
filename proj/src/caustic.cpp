#include "hflat/caustic.hpp"

#include <cmath>

namespace hflat {

namespace {

Expr dlog(const Expr& f) { return div(differentiate(f), f); }

bool constant_one(const Expr& e, cplx z0) {
    for (cplx z : {z0 + cplx(0.13, 0.04), z0 + cplx(-0.07, 0.11),
                   z0 + cplx(0.02, -0.09)}) {
        cplx v;
        try {
            v = eval_principal(e, z);
        } catch (const Error&) {
            return false;
        }
        if (std::abs(v - 1.0) > 1e-10) return false;
    }
    return true;
}

}  // namespace

void caustic_forms_from_Q_rho(const FrontData& d, int sign, Expr* omega_c,
                              Expr* theta_c, Expr* Qc_hat) {
    Expr sq = mul(constant(double(sign)), sqrt_(d.Q_hat));
    Expr dlr4 = mul(constant(0.25), dlog(d.rho));
    *omega_c = add(mul(constant(kI), sq), dlr4);
    *theta_c = add(mul(constant(-kI), sq), dlr4);
    *Qc_hat = add(d.Q_hat, powi(dlr4, 2));
}

CausticData caustic_of(const FrontData& d) {
    CausticData c;
    c.basepoint = d.basepoint;
    if (!d.has_gauss_maps()) {
        // only the (Q, rho) route is available
        int sign = 1;
        Expr om, th, qc;
        caustic_forms_from_Q_rho(d, sign, &om, &th, &qc);
        cplx vo = eval_principal(om, d.basepoint);
        cplx vt = eval_principal(th, d.basepoint);
        if (std::abs(vo) > std::abs(vt)) {
            caustic_forms_from_Q_rho(d, -sign, &om, &th, &qc);
        }
        c.omega_c = c.omega_c_alt = om;
        c.theta_c = c.theta_c_alt = th;
        c.Qc_hat = qc;
        c.rho_c = div(th, om);
        c.beta_degenerate = true;
        c.frame = LegendrianFrame::from_forms_ode(om, th, d.basepoint);
        return c;
    }

    Expr dG = differentiate(d.G);
    Expr dGs = differentiate(d.Gstar);
    Expr ratio = div(dG, dGs);
    if (constant_one(ratio, d.basepoint)) {
        // dG = dG*: the Gauss maps differ by a constant, the caustic route
        // via beta collapses (exp family); use the (Q, rho) route with the
        // sign matched so the construction still distinguishes the forms
        c.beta_degenerate = true;
        Expr om, th, qc;
        caustic_forms_from_Q_rho(d, 1, &om, &th, &qc);
        cplx vo = eval_principal(om, d.basepoint);
        cplx vt = eval_principal(th, d.basepoint);
        if (std::abs(vo) > std::abs(vt)) caustic_forms_from_Q_rho(d, -1, &om, &th, &qc);
        c.omega_c = c.omega_c_alt = om;
        c.theta_c = c.theta_c_alt = th;
        c.Qc_hat = qc;
        c.rho_c = div(th, om);
        c.frame = LegendrianFrame::from_forms_ode(om, th, d.basepoint);
        return c;
    }

    c.beta = sqrt_(ratio);
    Expr diff = sub(d.G, d.Gstar);
    Expr one = constant(1.0);
    Expr onep = add(one, c.beta), onem = sub(one, c.beta);

    // E_c = i (2 beta (G - G*))^{-1/2} [[G + beta G*, G - beta G*],
    //                                   [1 + beta,     1 - beta    ]]
    Expr eta = powr(mul(constant(2.0), mul(c.beta, diff)), -0.5);
    Expr ieta = mul(constant(kI), eta);
    Expr bGs = mul(c.beta, d.Gstar);
    c.frame = LegendrianFrame::closed_form(
        mul(ieta, add(d.G, bGs)), mul(ieta, sub(d.G, bGs)),
        mul(ieta, onep), mul(ieta, onem), d.basepoint);

    c.Gc = div(add(d.G, bGs), onep);
    c.Gcs = div(sub(d.G, bGs), onem);
    c.frame.G = c.Gc;
    c.frame.Gstar = c.Gcs;

    // omega_c = { 2 (beta+1)^2 dG*/(G-G*) - dlog(dG/dG*) } / 4
    Expr dlog_ratio = dlog(ratio);
    Expr common = div(mul(constant(2.0), dGs), diff);
    c.omega_c = mul(constant(0.25),
                    sub(mul(powi(add(c.beta, one), 2), common), dlog_ratio));
    c.theta_c = mul(constant(0.25),
                    sub(mul(powi(sub(c.beta, one), 2), common), dlog_ratio));
    c.Qc_hat = mul(c.omega_c, c.theta_c);
    c.rho_c = div(c.theta_c, c.omega_c);
    c.frame.omega_hat = c.omega_c;
    c.frame.theta_hat = c.theta_c;
    c.frame.Q_hat = c.Qc_hat;
    c.frame.rho = c.rho_c;

    // (Q, rho) route: pick the sqrt(Q) sign matching omega_c at the basepoint
    Expr omA, thA, qcA;
    caustic_forms_from_Q_rho(d, 1, &omA, &thA, &qcA);
    std::vector<cplx> vals = continue_eval_family(
        {c.omega_c, omA, thA},
        Contour::segment(d.basepoint, d.basepoint));
    if (std::abs(vals[1] - vals[0]) > std::abs(vals[2] - vals[0]))
        caustic_forms_from_Q_rho(d, -1, &omA, &thA, &qcA);
    c.omega_c_alt = omA;
    c.theta_c_alt = thA;
    return c;
}

double caustic_route_residual(const CausticData& c,
                              const std::vector<cplx>& pts, double tol) {
    double worst = 0.0;
    for (cplx z : pts) {
        Contour path = Contour::segment(c.basepoint, z);
        auto v = continue_eval_family({c.omega_c, c.theta_c, c.omega_c_alt,
                                       c.theta_c_alt},
                                      path);
        double scale = std::abs(v[0]) + std::abs(v[1]) + 1e-30;
        double r = std::min(
            std::max(std::abs(v[0] - v[2]), std::abs(v[1] - v[3])),
            // a joint sign flip of sqrt(Q) swaps the two forms
            std::max(std::abs(v[0] - v[3]), std::abs(v[1] - v[2])));
        worst = std::max(worst, r / scale);
    }
    if (worst > tol)
        fail(ErrorCode::RouteDisagreement,
             "caustic form routes disagree: residual " + std::to_string(worst));
    return worst;
}

UEndProfile uend_profile(const FrontData& d, cplx umbilic,
                         double singular_distance) {
    SeriesOptions opt;
    opt.singular_distance = singular_distance;
    LocalChart tr = chart_translate(umbilic);
    Expr Q_local = tr.pull_quadratic(d.Q_hat);
    int n = vanish_order(Q_local, 0.0, opt);
    if (n <= 0)
        fail(ErrorCode::NotUmbilic,
             "Hopf coefficient does not vanish at the declared umbilic");
    for (const Puncture& p : d.punctures)
        if (!p.at_infinity && std::abs(p.z - umbilic) < 1e-9)
            fail(ErrorCode::NotUmbilic, "umbilic coincides with a puncture");
    UEndProfile out{};
    out.ord_Q = n;
    out.multiplicity = 0.5 * double(n);
    out.co_orientable = (n % 2 == 0);
    out.type = EndType::Cylindrical;

    CausticData c = caustic_of(d);
    if (c.beta_degenerate)
        fail(ErrorCode::BetaDegenerate,
             "umbilic-end analysis needs the Gauss-map caustic route");

    // orders of the caustic forms at the umbilic (moduli are single-valued)
    out.ord_omega_c2 = metric_order(tr.pull_form(c.omega_c), 0.0, opt);
    out.ord_theta_c2 = metric_order(tr.pull_form(c.theta_c), 0.0, opt);

    // rho_c -> 1: the caustic singular set accumulates
    ModulusLimit ml = modulus_limit(tr.pull_function(c.rho_c), 0.0, opt);
    out.singular_accumulation =
        ml.kind == LimitKind::Finite && std::abs(ml.value - 1.0) < 1e-2;

    // multiplicity from the ramification of the caustic Gauss maps on the
    // double cover u -> umbilic + u^2
    LocalChart cov = chart_double_cover(umbilic);
    int rg = ramification(cov.pull_function(c.Gc),
                          std::sqrt(singular_distance));
    int rgs = ramification(cov.pull_function(c.Gcs),
                           std::sqrt(singular_distance));
    out.mult_from_ramification = 0.5 * std::min(rg, rgs);

    // exact-cylinder test: best-fit constant k in theta_c = k omega_c
    double r = 0.25 * singular_distance;
    cplx ksum = 0.0;
    std::vector<cplx> ratios;
    for (int j = 0; j < 8; ++j) {
        cplx z = umbilic + r * std::polar(1.0, 2.0 * kPi * j / 8.0 + 0.1);
        auto v = continue_eval_family({c.omega_c, c.theta_c},
                                      Contour::segment(z, z));
        ratios.push_back(v[1] / v[0]);
        ksum += v[1] / v[0];
    }
    cplx k = ksum / 8.0;
    double dev = 0.0;
    for (cplx q : ratios) dev = std::max(dev, std::abs(q - k));
    out.is_cylinder_end = dev < 1e-8 * (1.0 + std::abs(k));
    return out;
}

EEndProfile eend_profile(const FrontData& d, const Puncture& p) {
    EndProfile ep = end_profile(d, p);
    if (!ep.regular)
        fail(ErrorCode::IrregularEnd, "E-end analysis needs a regular end");
    EEndProfile out{};
    out.ord_Q = ep.ord_Q;
    out.mult_front = ep.multiplicity;
    if (ep.ord_Q >= -2) {
        out.multiplicity = 0.5 * ep.ord_Q + ep.multiplicity + 1.0;
        out.co_orientable = (((ep.ord_Q % 2) + 2) % 2) == 0;
        out.cylindrical = true;
        out.singular_accumulation = ep.type != EndType::Snowman;
    } else {
        if (ep.ord_Q % 2 != 0 || ep.ord_Q > -4)
            fail(ErrorCode::InconsistentClassification,
                 "deep Hopf poles at regular ends must have even order <= -4");
        out.multiplicity = ep.multiplicity;
        out.co_orientable = true;
        out.cylindrical = false;
        out.singular_accumulation = false;
    }
    return out;
}

std::vector<double> admissible_s(const Expr& omega_c, const Expr& theta_c,
                                 cplx z0, int grid) {
    auto v = continue_eval_family({omega_c, theta_c},
                                  Contour::segment(z0, z0));
    double scale = std::norm(v[0]) + std::norm(v[1]) + 1e-300;
    std::vector<double> out;
    for (int j = 0; j < grid; ++j) {
        double s = kPi * double(j) / double(grid);
        cplx qs = std::polar(1.0, s) * v[0] - std::polar(1.0, -s) * v[1];
        if (std::norm(qs) > 1e-12 * scale) out.push_back(s);
    }
    if (out.empty())
        fail(ErrorCode::NoAdmissibleS,
             "Q_s vanishes at the basepoint for every sampled phase");
    return out;
}

FrontData inverse_caustic(const Expr& omega_c, const Expr& theta_c, double s,
                          cplx z0) {
    cplx eis = std::polar(1.0, s), emis = std::polar(1.0, -s);
    Expr g_om = mul(constant(eis), omega_c);
    Expr g_th = mul(constant(emis), theta_c);
    Expr diff = sub(g_om, g_th);
    Expr Qs = mul(constant(-0.25), powi(diff, 2));
    cplx qs0 = eval_principal(Qs, z0);
    if (std::abs(qs0) < 1e-14)
        fail(ErrorCode::QsVanishesAtBasepoint,
             "Q_s vanishes at the basepoint; choose another phase");
    Expr rho = intexp(mul(constant(2.0), add(g_om, g_th)), z0);
    Expr theta = sqrt_(mul(Qs, rho));
    Expr omega = div(Qs, theta);
    FrontData d = front_from_forms(omega, theta, z0);
    d.Q_hat = Qs;
    d.rho = rho;
    return d;
}

cplx quotient_Q_monodromy(const Expr& omega_hat, const Expr& theta_hat,
                          const Contour& tau_path) {
    cplx z0 = tau_path.start();
    if (std::abs(tau_path.end() + z0) > 1e-10 * (1.0 + std::abs(z0)))
        fail(ErrorCode::SpecError,
             "tau path must realize z -> -z (end = -start)");
    PathEvaluator pe({omega_hat, theta_hat}, z0);
    cplx om0 = pe.value(0), th0 = pe.value(1);
    pe.follow(tau_path);
    cplx om1 = pe.value(0), th1 = pe.value(1);
    cplx Q0 = -0.25 * (om0 - th0) * (om0 - th0);
    cplx Q1 = -0.25 * (om1 - th1) * (om1 - th1);
    return Q1 / Q0;
}

double focal_residual(const FrontData& d, const CausticData& c, cplx z) {
    Contour path = d.path_to(z);
    cplx rho = continue_eval(d.rho, path);
    double t = 0.5 * std::log(std::abs(rho));
    Mat2 E = frame_at(d.frame.parallel(t), path);
    Mat2 Ec = frame_at(c.frame, path);
    return entry_distance(project_point(E).X, project_point(Ec).X);
}

}  // namespace hflat
