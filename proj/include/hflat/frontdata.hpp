#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hflat/frame.hpp"
#include "hflat/series.hpp"

namespace hflat {

// Chart transform z = map(u) with the problem point at u = 0.
struct LocalChart {
    Expr map;   // expression in the new variable
    Expr dmap;  // its derivative
    Expr pull_function(const Expr& f) const { return compose(f, map); }
    Expr pull_form(const Expr& w) const { return mul(compose(w, map), dmap); }
    Expr pull_quadratic(const Expr& q) const {
        return mul(compose(q, map), powi(dmap, 2));
    }
};
LocalChart chart_translate(cplx p);  // z = u + p
LocalChart chart_inversion();        // z = 1/u (puncture at infinity)
LocalChart chart_double_cover(cplx p);  // z = p + u^2

struct Puncture {
    std::string name;
    cplx z{0.0};
    bool at_infinity = false;
    // selects the hyperelliptic sheet when the fixture lives on w^2 = P(z)
    int sheet = 0;
    // ramification point of the hyperelliptic projection: the surface chart
    // at the end is the double cover u -> z = p + u^2 (or 1/u^2 at infinity)
    bool branch_point = false;
    double end_radius = 0.25;  // declared end disk radius in the local chart
    double singular_distance = 0.5;  // distance to the nearest other feature
};

struct FrontData {
    Expr G, Gstar;             // may be null (e.g. ODE-recovered fronts)
    Expr omega_hat, theta_hat; // canonical form coefficients, chart "z"
    Expr Q_hat;                // Hopf coefficient (= omega theta)
    Expr rho;                  // theta/omega
    Expr xi;                   // conformal factor of the Gauss-pair route
    LegendrianFrame frame;
    cplx basepoint{0.0};
    std::vector<Puncture> punctures;
    std::vector<cplx> umbilics;
    std::vector<cplx> avoid;   // punctures + umbilics + declared poles
    double clearance = 1e-3;
    // hyperelliptic sheet handle: the w = sqrt(P(z)) subtree, when present
    Expr w_node;

    bool has_gauss_maps() const { return bool(G) && bool(Gstar); }
    // the same data with the w-sheet flipped (hyperelliptic fixtures)
    FrontData sheet_flipped() const;
    FrontData parallel(double t) const;
    FrontData dual() const;
    Contour path_to(cplx z) const;  // routed path from basepoint
};

// Build from Gauss maps (xi optional closed form).
FrontData front_from_gauss_pair(const Expr& G, const Expr& Gstar, cplx c,
                                cplx basepoint, Expr xi = nullptr);
// Build from (G, omega) with theta = Q/omega, Q = (s(omega) - S(G))/2.
FrontData front_from_G_omega(const Expr& G, const Expr& omega_hat,
                             cplx basepoint);
// Build from the two canonical forms (frame by ODE integration).
FrontData front_from_forms(const Expr& omega_hat, const Expr& theta_hat,
                           cplx basepoint, Expr G = nullptr,
                           Expr Gstar = nullptr);

struct FundamentalForms {
    // first fundamental form as a real quadratic form in (dx, dy)
    double E, F, G;
    double dh2_density;    // |theta|^2 - |omega|^2
    double ds11_density;   // |omega|^2 + |theta|^2
};
FundamentalForms fundamental_forms(const FrontData& d, cplx z);

// Polyline chains approximating {|rho| = e^{2t}} inside the window.
struct SingularLocus {
    std::vector<std::vector<cplx>> chains;
};
struct Window {
    double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
    bool contains(cplx z) const {
        return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 &&
               z.imag() <= y1;
    }
};
SingularLocus singular_locus(const FrontData& d, double t, const Window& win,
                             int grid = 256, int bisect_steps = 40,
                             double value_tol = 1e-6);

// Parallel parameters excluded by the compactness argument: t = log|rho(p)|/2
// over punctures where |rho| has a finite nonzero limit.  Throws
// NotFiniteType when |rho| has no limit at some puncture.
std::vector<double> excluded_parallel_params(const FrontData& d);

struct EndDiagnostics {
    double ord_omega2;   // order of |omega|^2 in the sense of conformal
    double ord_theta2;   // metric order (exponent mu with |.| ~ r^mu)
    int ord_Q;           // integer order of the Hopf coefficient
    bool weakly_complete;
    bool finite_type;
    bool cylindrical;
};
EndDiagnostics end_diagnostics(const FrontData& d, const Puncture& p);

// Local pullbacks of the data at a puncture (handles infinity and sheets).
struct LocalData {
    Expr G, Gstar, omega_hat, theta_hat, Q_hat, rho;
    LocalChart chart;
};
LocalData localize(const FrontData& d, const Puncture& p);

}  // namespace hflat
