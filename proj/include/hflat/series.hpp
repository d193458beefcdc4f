#pragma once

#include <optional>
#include <vector>

#include "hflat/contour.hpp"
#include "hflat/expr.hpp"

namespace hflat {

// Truncated Laurent expansion about a center, computed by Cauchy-integral
// quadrature on small circles.
struct LocalSeries {
    cplx center{0.0};
    int k_lo = 0, k_hi = 0;
    std::vector<cplx> coeff;  // coeff[j] is the coefficient of (z-center)^(k_lo+j)
    int leading = 0;          // smallest k with significant coefficient
    double radius = 0.0;      // circle used
    double trunc_error = 0.0; // cross-radius consistency residual

    cplx at(int k) const {
        if (k < k_lo || k > k_hi) return cplx(0.0);
        return coeff[size_t(k - k_lo)];
    }
    cplx leading_coeff() const { return at(leading); }
};

struct SeriesOptions {
    int terms = 12;              // one-sided window half-width around the pilot order
    int samples = 256;           // circle sample count
    double radius = 0.0;         // 0 = choose from singular_distance
    double singular_distance = 1.0;  // distance to nearest other singularity
    double rel_thresh = 1e-7;    // leading-coefficient significance threshold
};

// Values of f on the circle |z - p| = r, continued around once; *closed is
// false when continuation returns on another sheet.
std::vector<cplx> sample_circle(const Expr& f, cplx p, double r, int samples,
                                bool* closed);

// Laurent coefficients of f about p.  Throws EssentialOrIrregular when the
// modulus growth over three shrinking radii is inconsistent with a finite
// order, and BranchAmbiguous when f is multivalued around p (the caller
// should move to the double cover).
LocalSeries local_series(const Expr& f, cplx p,
                         const SeriesOptions& opt = {});

// Leading order of f at p (integer).
int vanish_order(const Expr& f, cplx p, const SeriesOptions& opt = {});

// Real-valued order mu with |f| ~ c |z-p|^mu, from log-log slopes over
// several radii.  Works for non-integer exponents and for moduli of
// multivalued expressions.  Throws EssentialOrIrregular when the slopes do
// not stabilize.
double metric_order(const Expr& f, cplx p, const SeriesOptions& opt = {});

enum class LimitKind { Finite, Zero, Infinite, None };
struct ModulusLimit {
    LimitKind kind;
    double value;  // meaningful for Finite
};

// Limit of |f| at p along shrinking circles; None when the circle
// oscillation refuses to settle (e.g. essential behavior).
ModulusLimit modulus_limit(const Expr& f, cplx p,
                           const SeriesOptions& opt = {});

}  // namespace hflat
