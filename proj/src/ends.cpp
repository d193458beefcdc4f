#include "hflat/ends.hpp"

#include <cmath>
#include <sstream>

namespace hflat {

const char* end_type_name(EndType t) {
    switch (t) {
        case EndType::Cylindrical: return "cylindrical";
        case EndType::Horospherical: return "horospherical";
        case EndType::Snowman: return "snowman";
        case EndType::Hourglass: return "hourglass";
        case EndType::NotFiniteType: return "notFiniteType";
        case EndType::Indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

// leading index >= 1 of the series with the constant term dropped
int positive_leading(const LocalSeries& s, double rel_thresh = 1e-7) {
    double best = 0.0;
    for (int k = std::max(1, s.k_lo); k <= s.k_hi; ++k)
        best = std::max(best, std::abs(s.at(k)) * std::pow(s.radius, k));
    if (best == 0.0)
        fail(ErrorCode::EssentialOrIrregular,
             "map is constant to working precision");
    for (int k = std::max(1, s.k_lo); k <= s.k_hi; ++k)
        if (std::abs(s.at(k)) * std::pow(s.radius, k) > rel_thresh * best)
            return k;
    fail(ErrorCode::EssentialOrIrregular, "no sub-leading term detected");
}

// Normalize a map to a finite value at 0 (inversion when it has a pole).
Expr finite_normalize(const Expr& g, double singular_distance) {
    SeriesOptions opt;
    opt.singular_distance = singular_distance;
    ModulusLimit ml = modulus_limit(g, 0.0, opt);
    if (ml.kind == LimitKind::Infinite) return div(constant(1.0), g);
    if (ml.kind == LimitKind::None)
        fail(ErrorCode::EssentialOrIrregular,
             "Gauss map without limit at the end (irregular)");
    return g;
}

}  // namespace

int ramification(const Expr& G_local, double singular_distance) {
    SeriesOptions opt;
    opt.singular_distance = singular_distance;
    Expr g = finite_normalize(G_local, singular_distance);
    LocalSeries s = local_series(g, 0.0, opt);
    return positive_leading(s);
}

double gauss_ratio(const Expr& G_local, const Expr& Gstar_local,
                   double singular_distance) {
    SeriesOptions opt;
    opt.singular_distance = singular_distance;
    Expr g = G_local, gs = Gstar_local;
    // one common rigid motion: invert both when either has a pole
    ModulusLimit mg = modulus_limit(g, 0.0, opt);
    ModulusLimit ms = modulus_limit(gs, 0.0, opt);
    if (mg.kind == LimitKind::None || ms.kind == LimitKind::None)
        fail(ErrorCode::NotRegularEnd, "Gauss map has no limit at the end");
    if (mg.kind == LimitKind::Infinite || ms.kind == LimitKind::Infinite) {
        if (mg.kind != ms.kind)
            fail(ErrorCode::NotRegularEnd,
                 "Gauss maps disagree at the end (one finite, one infinite)");
        g = div(constant(1.0), g);
        gs = div(constant(1.0), gs);
    }
    LocalSeries sg = local_series(g, 0.0, opt);
    LocalSeries ss = local_series(gs, 0.0, opt);
    cplx a0 = sg.k_lo <= 0 ? sg.at(0) : cplx(0.0);
    cplx b0 = ss.k_lo <= 0 ? ss.at(0) : cplx(0.0);
    double scale = std::abs(a0) + std::abs(b0) + 1.0;
    if (std::abs(a0 - b0) > 1e-6 * scale)
        fail(ErrorCode::NotRegularEnd,
             "Gauss maps do not collide at the end");
    int m = positive_leading(sg);
    int ms2 = positive_leading(ss);
    cplx alpha;
    if (m > ms2) {
        alpha = 0.0;
    } else if (m < ms2) {
        alpha = 0.0;  // the reciprocal branch has modulus <= 1 and limit 0
    } else {
        cplx r = sg.at(m) / ss.at(m);
        alpha = std::abs(r) <= 1.0 ? r : 1.0 / r;
    }
    if (std::abs(alpha.imag()) > 1e-6 * (1.0 + std::abs(alpha)))
        fail(ErrorCode::NonRealAlpha,
             "Gauss-map ratio has a nonvanishing imaginary part (period "
             "condition violated upstream?)");
    return alpha.real();
}

EndType classify_alpha(double alpha, double band) {
    double d1 = std::abs(alpha - 1.0);
    double d0 = std::abs(alpha);
    double dm1 = std::abs(alpha + 1.0);
    double dmin = std::min({d1, d0, dm1});
    if (dmin > band && dmin < 10.0 * band) return EndType::Indeterminate;
    if (d1 <= band) return EndType::NotFiniteType;
    if (d0 <= band) return EndType::Horospherical;
    if (dm1 <= band) return EndType::Cylindrical;
    if (alpha > 0.0 && alpha < 1.0) return EndType::Snowman;
    if (alpha < 0.0 && alpha > -1.0) return EndType::Hourglass;
    fail(ErrorCode::InconsistentClassification,
         "alpha outside [-1, 1]: " + std::to_string(alpha));
}

EndType classify_end(const Expr& G_local, const Expr& Gstar_local,
                     const Expr& Q_local, double singular_distance,
                     double band) {
    double alpha = gauss_ratio(G_local, Gstar_local, singular_distance);
    EndType t = classify_alpha(alpha, band);
    if (t == EndType::Snowman || t == EndType::Hourglass) {
        SeriesOptions opt;
        opt.singular_distance = singular_distance;
        LocalSeries q = local_series(Q_local, 0.0, opt);
        if (q.leading != -2)
            fail(ErrorCode::InconsistentClassification,
                 "alpha route expects a double pole of Q, found order " +
                     std::to_string(q.leading));
        cplx q0 = q.at(-2);
        if (std::abs(q0.imag()) > 1e-6 * std::abs(q0))
            fail(ErrorCode::InconsistentClassification,
                 "top coefficient of Q is not real");
        bool snow_by_q = q0.real() < 0.0;
        if (snow_by_q != (t == EndType::Snowman))
            fail(ErrorCode::InconsistentClassification,
                 "alpha route and top-coefficient route disagree");
        // value check: q0 = -alpha m^2 / (1-alpha)^2 with m = common ram
        int m = ramification(G_local, singular_distance);
        double expect = -alpha * double(m) * double(m) /
                        ((1.0 - alpha) * (1.0 - alpha));
        if (std::abs(q0.real() - expect) > 1e-4 * (1.0 + std::abs(expect)))
            fail(ErrorCode::InconsistentClassification,
                 "top coefficient deviates from the alpha prediction");
    }
    if (t == EndType::Horospherical) {
        SeriesOptions opt;
        opt.singular_distance = singular_distance;
        LocalSeries q = local_series(Q_local, 0.0, opt);
        if (q.leading < -1)
            fail(ErrorCode::InconsistentClassification,
                 "horospherical end must have ord Q >= -1");
    }
    return t;
}

MultiplicityResult end_multiplicity(const LocalData& loc,
                                    double singular_distance) {
    MultiplicityResult r{};
    int mg = ramification(loc.G, singular_distance);
    int ms = ramification(loc.Gstar, singular_distance);
    r.value = std::min(mg, ms);
    r.order_route = std::nan("");
    r.routes_agree = true;
    SeriesOptions opt;
    opt.singular_distance = singular_distance;
    int ordQ = 0;
    bool haveQ = true;
    try {
        ordQ = vanish_order(loc.Q_hat, 0.0, opt);
    } catch (const Error&) {
        haveQ = false;
    }
    if (haveQ && ordQ >= -1) {
        try {
            double mo = metric_order(loc.omega_hat, 0.0, opt);
            double mt = metric_order(loc.theta_hat, 0.0, opt);
            r.order_route = std::min(std::abs(1.0 + mo), std::abs(1.0 + mt));
            r.routes_agree = std::abs(r.order_route - r.value) < 0.05;
            if (!r.routes_agree)
                fail(ErrorCode::RouteDisagreement,
                     "ramification and order routes disagree on multiplicity");
        } catch (const Error& e) {
            if (e.code() == ErrorCode::RouteDisagreement) throw;
            // orders unavailable: leave the cross-check blank
        }
    }
    return r;
}

EndProfile end_profile(const FrontData& d, const Puncture& p) {
    if (!d.has_gauss_maps())
        fail(ErrorCode::SpecError, "end_profile requires Gauss maps");
    LocalData loc = localize(d, p);
    EndProfile out;
    out.puncture = p.name;
    EndDiagnostics diag = end_diagnostics(d, p);
    out.ord_Q = diag.ord_Q;
    out.weakly_complete = diag.weakly_complete;
    try {
        out.ram_G = ramification(loc.G, p.singular_distance);
        out.ram_Gstar = ramification(loc.Gstar, p.singular_distance);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::EssentialOrIrregular) {
            out.regular = false;
            out.type = EndType::Indeterminate;
            return out;
        }
        throw;
    }
    MultiplicityResult mr = end_multiplicity(loc, p.singular_distance);
    out.multiplicity = mr.value;
    out.mult_order_route = mr.order_route;
    out.routes_agree = mr.routes_agree;
    out.alpha = gauss_ratio(loc.G, loc.Gstar, p.singular_distance);
    if (!out.weakly_complete) {
        // classification hypotheses not met; report the raw alpha only
        out.type = EndType::Indeterminate;
        return out;
    }
    out.type = classify_end(loc.G, loc.Gstar, loc.Q_hat, p.singular_distance);
    return out;
}

OssermanReport osserman_report(double deg_G, double deg_Gstar, int co_ends,
                               int nonco_ends) {
    OssermanReport r;
    r.deg_G = deg_G;
    r.deg_Gstar = deg_Gstar;
    r.deg_total = deg_G + deg_Gstar;
    r.co_ends = co_ends;
    r.nonco_ends = nonco_ends;
    r.rhs = 0.5 * nonco_ends + co_ends;
    r.equality = std::abs(r.deg_total - r.rhs) < 1e-12;
    r.holds = r.deg_total >= r.rhs - 1e-12;
    return r;
}

std::string end_table_csv(const std::vector<EndProfile>& profiles) {
    std::ostringstream out;
    out << "puncture,ram_G,ram_Gstar,multiplicity,ord_Q,alpha,end_type,"
           "regular,co_orientable,weakly_complete,mult_order_route,routes_"
           "agree\n";
    for (const auto& p : profiles) {
        out << p.puncture << "," << p.ram_G << "," << p.ram_Gstar << ","
            << p.multiplicity << "," << p.ord_Q << "," << p.alpha << ","
            << end_type_name(p.type) << "," << (p.regular ? 1 : 0) << ","
            << (p.co_orientable ? 1 : 0) << "," << (p.weakly_complete ? 1 : 0)
            << "," << p.mult_order_route << "," << (p.routes_agree ? 1 : 0)
            << "\n";
    }
    return out.str();
}

}  // namespace hflat
