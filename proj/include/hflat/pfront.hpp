#pragma once

#include "hflat/frontdata.hpp"

namespace hflat {

// Checks and constructions around non-co-orientable p-fronts.  Covers are
// local and per-end: the deck map z -> -z is realized by an explicit contour
// from z0 to -z0 ("tau path"), and all comparisons continue the data along
// that path.

struct AdjustedLiftReport {
    bool passes = false;
    Mat2 defect;        // (E^dual(z0))^{-1} * (E continued along tau)
    double residual = 0.0;  // PSL distance of the defect from the identity
    bool diagonal = false;  // defect is diagonal (up to tol)
};

// E o tau = E (0 i; i 0)?  The continuation of E along tau_path is compared
// with the dual of E at the start point.
AdjustedLiftReport adjusted_lift_check(const LegendrianFrame& frame,
                                       const Contour& tau_path,
                                       double tol = 1e-6);

struct CoverReport {
    bool swaps = false;          // tau exchanges |omega| and |theta|
    bool fixes_Q = false;        // Q is tau-invariant (descends)
    bool gauss_swap = false;     // G o tau = G*, when maps are present
    bool co_orientable = true;   // !swaps
    double swap_residual = 0.0;
    double keep_residual = 0.0;
    double q_residual = 0.0;
};

// tau-action on the lifted data along the given deck path.
CoverReport cover_data_report(const FrontData& d, const Contour& tau_path);

// m(f,p) = m(f_cover, p_cover)/2 for a non-co-orientable end.
double pfront_multiplicity(double cover_multiplicity);
// deg of the Gauss maps downstairs = half the cover total degree.
double pfront_total_degree(double cover_deg_G, double cover_deg_Gstar);

// tau^2 continuation returns the original frame up to PSL sign.
double tau_square_residual(const LegendrianFrame& frame,
                           const Contour& tau_path);

// Operational shadow of orientability: G* must depend holomorphically on G.
// Returns the worst directional-derivative anisotropy at z.
double transition_holomorphy_residual(const FrontData& d, cplx z,
                                      double h = 1e-5);

// Complete ends are automatically co-orientable; returns true when the
// combination (complete, non-co-orientable) is contradictory.
bool complete_end_contradiction(const EndDiagnostics& diag,
                                LimitKind rho_limit_kind, double rho_limit,
                                bool declared_co_orientable);

}  // namespace hflat
