#pragma once

#include <string>

#include "hflat/frontdata.hpp"

namespace hflat {

enum class EndType {
    Cylindrical,
    Horospherical,
    Snowman,
    Hourglass,
    NotFiniteType,
    Indeterminate,
};

const char* end_type_name(EndType t);

struct EndProfile {
    std::string puncture;
    int ram_G = 0;        // ramification of G at the end
    int ram_Gstar = 0;
    double multiplicity = 0.0;  // half-integers possible on covers
    int ord_Q = 0;
    double alpha = 0.0;
    EndType type = EndType::Indeterminate;
    bool regular = true;
    bool co_orientable = true;
    bool weakly_complete = true;
    double mult_order_route = 0.0;  // min{|1+ord|omega|^2|, |1+ord|theta|^2|}
    bool routes_agree = true;       // only meaningful when ord_Q >= -1
};

// Ramification number of a map at u=0 in a local chart (the normalization
// making the value finite is applied internally).
int ramification(const Expr& G_local, double singular_distance = 0.5);

// Ratio of the Gauss maps at a regular end, the branch with modulus <= 1.
// Both maps are normalized by one common rigid motion; requires
// G(0) = G*(0).  The result must be real (NonRealAlpha otherwise).
double gauss_ratio(const Expr& G_local, const Expr& Gstar_local,
                   double singular_distance = 0.5);

// Trichotomy on alpha with a tolerance band; values falling inside
// (band, 10*band) of a boundary are flagged Indeterminate rather than
// misclassified.
EndType classify_alpha(double alpha, double band = 1e-6);

// Full classification with the top-coefficient cross-check: for
// alpha in (-1,0) u (0,1), ord Q must be -2 and the top coefficient must
// match -alpha m^2/(1-alpha)^2 (sign strictly, value loosely).
EndType classify_end(const Expr& G_local, const Expr& Gstar_local,
                     const Expr& Q_local, double singular_distance = 0.5,
                     double band = 1e-6);

// Multiplicity of a co-orientable regular end, with the order-based
// cross-check route when ord Q >= -1.
struct MultiplicityResult {
    double value;
    double order_route;  // NaN when not applicable
    bool routes_agree;
};
MultiplicityResult end_multiplicity(const LocalData& loc,
                                    double singular_distance = 0.5);

// Complete per-end record for a front (co-orientable data).
EndProfile end_profile(const FrontData& d, const Puncture& p);

struct OssermanReport {
    double deg_G = 0, deg_Gstar = 0;
    double deg_total = 0;
    int co_ends = 0, nonco_ends = 0;
    double rhs = 0;
    bool equality = false;
    bool holds = false;
};

// Osserman-type count: deg >= #nonco/2 + #co.  Degrees are the declared
// (scene-spec) values; use catalog validation to certify them.
OssermanReport osserman_report(double deg_G, double deg_Gstar, int co_ends,
                               int nonco_ends);

std::string end_table_csv(const std::vector<EndProfile>& profiles);

}  // namespace hflat
