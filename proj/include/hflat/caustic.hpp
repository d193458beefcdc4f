#pragma once

#include "hflat/ends.hpp"
#include "hflat/frontdata.hpp"

namespace hflat {

// Caustic (focal surface) data of a flat front.
struct CausticData {
    Expr beta;          // sqrt(dG/dG*); sheet fixed at the basepoint
    LegendrianFrame frame;  // adjusted caustic lift (PSL-valued)
    Expr Gc, Gcs;       // caustic Gauss maps
    Expr omega_c, theta_c;  // canonical forms, Gauss-map route
    Expr Qc_hat, rho_c;
    // (Q, rho) route with the square-root sign fixed against the other route
    Expr omega_c_alt, theta_c_alt;
    bool beta_degenerate = false;  // dG = dG* identically (exp family)
    cplx basepoint{0.0};
};

// Build the caustic bundle.  When beta is degenerate (dG/dG* constant = 1)
// the Gauss-map route is unavailable and only the (Q, rho) route is
// populated, with the square-root sign chosen so |omega_c| <= |theta_c| at
// the basepoint.
CausticData caustic_of(const FrontData& d);

// The (Q, rho)-route forms for data without Gauss maps: the sign of sqrt(Q)
// is fixed at the basepoint by `sign`.
void caustic_forms_from_Q_rho(const FrontData& d, int sign, Expr* omega_c,
                              Expr* theta_c, Expr* Qc_hat);

// Largest residual of omega_c^A - omega_c^B (and theta) over sample points;
// throws RouteDisagreement above tol.
double caustic_route_residual(const CausticData& c,
                              const std::vector<cplx>& pts,
                              double tol = 1e-8);

struct UEndProfile {
    double multiplicity;       // ord_q(Q)/2
    int ord_Q;
    bool co_orientable;        // ord_q(Q) even
    EndType type;              // cylindrical
    bool singular_accumulation;  // rho_c -> 1
    double ord_omega_c2, ord_theta_c2;  // both -1
    double mult_from_ramification;      // min ram of caustic Gauss maps / 2
    bool is_cylinder_end;      // theta_c = k omega_c nearby (must be false)
};
UEndProfile uend_profile(const FrontData& d, cplx umbilic,
                         double singular_distance = 0.5);

struct EEndProfile {
    double multiplicity;
    int ord_Q;
    bool co_orientable;
    bool cylindrical;
    bool singular_accumulation;
    double mult_front;  // m(f, p)
};
EEndProfile eend_profile(const FrontData& d, const Puncture& p);

// Admissible phases s with Q_s(z0) != 0 on a pi-grid.
std::vector<double> admissible_s(const Expr& omega_c, const Expr& theta_c,
                                 cplx z0, int grid = 16);

// Local inverse of the caustic construction: from caustic forms and a phase
// s, rebuild front data with omega*theta = Q_s and theta/omega = rho.
FrontData inverse_caustic(const Expr& omega_c, const Expr& theta_c, double s,
                          cplx z0);

// Monodromy factor of the reconstructed Hopf coefficient
// Q = -(omega - theta)^2/4 under the half-turn deck map z -> -z realized by
// `tau_path` (a path from z0 to -z0): factor 1 means the inverse-caustic
// data is single-valued on the quotient.
cplx quotient_Q_monodromy(const Expr& omega_hat, const Expr& theta_hat,
                          const Contour& tau_path);

// Focal-point check: the parallel front at t(p) = log|rho(p)|/2 meets the
// caustic at p.  Returns the Herm-entry distance.
double focal_residual(const FrontData& d, const CausticData& c, cplx z);

}  // namespace hflat
