#include "hflat/pfront.hpp"

#include <cmath>

namespace hflat {

AdjustedLiftReport adjusted_lift_check(const LegendrianFrame& frame,
                                       const Contour& tau_path, double tol) {
    cplx z0 = tau_path.start();
    if (std::abs(tau_path.end() + z0) > 1e-10 * (1.0 + std::abs(z0)))
        fail(ErrorCode::SpecError, "tau path must run from z0 to -z0");
    check_clearance(tau_path);
    FrameWalker w(frame, z0);
    Mat2 E0 = w.matrix();
    w.follow(tau_path);
    Mat2 Etau = w.matrix();
    Mat2 Edual = E0 * dual_factor();
    AdjustedLiftReport rep;
    rep.defect = Edual.inverse() * Etau;
    rep.residual = psl_distance(rep.defect, Mat2::identity());
    double scale = 1.0 + rep.defect.norm_inf();
    rep.diagonal = std::abs(rep.defect.b) + std::abs(rep.defect.c) <
                   1e-6 * scale;
    rep.passes = rep.residual < tol;
    return rep;
}

CoverReport cover_data_report(const FrontData& d, const Contour& tau_path) {
    cplx z0 = tau_path.start();
    if (std::abs(tau_path.end() + z0) > 1e-10 * (1.0 + std::abs(z0)))
        fail(ErrorCode::SpecError, "tau path must run from z0 to -z0");
    std::vector<Expr> roots{d.omega_hat, d.theta_hat, d.Q_hat};
    bool with_maps = d.has_gauss_maps();
    if (with_maps) {
        roots.push_back(d.G);
        roots.push_back(d.Gstar);
    }
    PathEvaluator pe(roots, z0);
    cplx om0 = pe.value(0), th0 = pe.value(1), Q0 = pe.value(2);
    cplx G0{}, Gs0{};
    if (with_maps) {
        G0 = pe.value(3);
        Gs0 = pe.value(4);
    }
    pe.follow(tau_path);
    cplx om1 = pe.value(0), th1 = pe.value(1), Q1 = pe.value(2);

    CoverReport rep;
    double fscale = std::abs(om0) + std::abs(th0) + 1e-300;
    // pullback by tau multiplies form coefficients by dtau/dz = -1;
    // moduli are unaffected
    rep.swap_residual = std::max(std::abs(std::abs(om1) - std::abs(th0)),
                                 std::abs(std::abs(th1) - std::abs(om0))) /
                        fscale;
    rep.keep_residual = std::max(std::abs(std::abs(om1) - std::abs(om0)),
                                 std::abs(std::abs(th1) - std::abs(th0))) /
                        fscale;
    rep.swaps = rep.swap_residual < 1e-6 &&
                rep.swap_residual < 0.1 * rep.keep_residual;
    rep.co_orientable = !rep.swaps;
    rep.q_residual = std::abs(Q1 - Q0) / (std::abs(Q0) + 1e-300);
    rep.fixes_Q = rep.q_residual < 1e-6;
    if (with_maps) {
        cplx G1 = pe.value(3), Gs1 = pe.value(4);
        double gscale = std::abs(G0) + std::abs(Gs0) + 1e-300;
        rep.gauss_swap = (std::abs(G1 - Gs0) + std::abs(Gs1 - G0)) / gscale <
                         1e-6;
    }
    return rep;
}

double pfront_multiplicity(double cover_multiplicity) {
    return 0.5 * cover_multiplicity;
}

double pfront_total_degree(double cover_deg_G, double cover_deg_Gstar) {
    return 0.5 * (cover_deg_G + cover_deg_Gstar);
}

double tau_square_residual(const LegendrianFrame& frame,
                           const Contour& tau_path) {
    cplx z0 = tau_path.start();
    FrameWalker w(frame, z0);
    Mat2 E0 = w.matrix();
    w.follow(tau_path);
    Contour mirrored = tau_path;
    for (cplx& v : mirrored.vertices) v = -v;
    w.follow(mirrored);
    return psl_distance(w.matrix(), E0) / (1.0 + E0.norm_inf());
}

double transition_holomorphy_residual(const FrontData& d, cplx z, double h) {
    if (!d.has_gauss_maps())
        fail(ErrorCode::SpecError, "transition test requires Gauss maps");
    cplx ratio0{};
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
        cplx dir = std::polar(h, 0.5 * kPi * k + 0.3);
        cplx dG = eval_principal(d.G, z + dir) - eval_principal(d.G, z - dir);
        cplx dGs =
            eval_principal(d.Gstar, z + dir) - eval_principal(d.Gstar, z - dir);
        if (std::abs(dG) < 1e-14)
            fail(ErrorCode::SpecError, "transition test at a branch of G");
        cplx r = dGs / dG;
        if (k == 0) ratio0 = r;
        else worst = std::max(worst, std::abs(r - ratio0));
    }
    return worst / (1.0 + std::abs(ratio0));
}

bool complete_end_contradiction(const EndDiagnostics& diag,
                                LimitKind rho_limit_kind, double rho_limit,
                                bool declared_co_orientable) {
    if (declared_co_orientable) return false;
    bool complete_end =
        diag.weakly_complete && diag.finite_type &&
        !(rho_limit_kind == LimitKind::Finite &&
          std::abs(rho_limit - 1.0) < 1e-9);
    return complete_end;  // complete + non-co-orientable is contradictory
}

}  // namespace hflat
