#pragma once

#include <memory>
#include <optional>

#include "hflat/contour.hpp"
#include "hflat/expr.hpp"
#include "hflat/sl2.hpp"

namespace hflat {

// A holomorphic Legendrian curve into SL(2,C), realized either by closed-form
// entry expressions (continued along contours, PSL-valued when square roots
// are involved) or by integrating E^{-1}dE = (0 theta; omega 0) from a
// basepoint.
class LegendrianFrame {
  public:
    enum class Route { ClosedForm, Ode };

    Route route = Route::Ode;
    // ClosedForm entries (shared subtrees ride shared sheets)
    Expr A, B, C, D;
    // canonical 1-form coefficients; defining data for the Ode route,
    // attached data for closed forms that carry them
    Expr omega_hat, theta_hat;
    Mat2 initial = Mat2::identity();  // Ode: E at basepoint
    cplx basepoint{0.0};

    // optional attached scalar data
    Expr G, Gstar, Q_hat, rho;

    static LegendrianFrame closed_form(Expr A, Expr B, Expr C, Expr D,
                                       cplx basepoint);
    // Legendrian curve with prescribed Gauss map and canonical form:
    // C = i*sqrt(omega/dG), A = G*C, second column d(first)/omega.
    static LegendrianFrame from_G_omega(const Expr& G, const Expr& omega_hat,
                                        cplx basepoint);
    // Curve with prescribed Gauss maps (G, G*): xi = c exp int dG/(G-G*),
    // entries (G/xi, xi G*/(G-G*); 1/xi, xi/(G-G*)).  `xi` may be supplied in
    // closed form; otherwise it is built as a path-integral expression from
    // the basepoint.
    static LegendrianFrame from_gauss_pair(const Expr& G, const Expr& Gstar,
                                           cplx c, cplx basepoint,
                                           Expr xi = nullptr);
    static LegendrianFrame from_forms_ode(const Expr& omega_hat,
                                          const Expr& theta_hat,
                                          cplx basepoint,
                                          Mat2 initial = Mat2::identity());

    LegendrianFrame parallel(double t) const;   // E -> E diag(e^{t/2}, e^{-t/2})
    LegendrianFrame dual() const;               // E -> E (0 i; i 0)
    LegendrianFrame mobius(const Mat2& a) const;  // E -> a E
    LegendrianFrame gauge(double s) const;      // U(1): E -> E diag(e^{is/2}, e^{-is/2})

    bool has_entries() const { return route == Route::ClosedForm; }
    bool has_forms() const { return bool(omega_hat) && bool(theta_hat); }

    // Off-diagonal Maurer-Cartan coefficients derived from the entries.
    Expr mc_omega() const;  // (E^{-1}E')_{21}
    Expr mc_theta() const;  // (E^{-1}E')_{12}
    Expr mc_diag() const;   // (E^{-1}E')_{11}, should vanish
};

// Stateful evaluation of a frame along paths.
class FrameWalker {
  public:
    FrameWalker(const LegendrianFrame& frame, cplx start,
                double tol = default_tol().ode_tol);

    void advance_to(cplx z);
    void follow(const Contour& contour);

    cplx position() const { return z_; }
    Mat2 matrix() const;
    double det_drift() const { return det_drift_; }  // Ode route only

    // current canonical form coefficients (when the frame carries them)
    cplx omega_value() const;
    cplx theta_value() const;

  private:
    const LegendrianFrame frame_;
    std::unique_ptr<PathEvaluator> pe_;
    // indices of roots inside pe_
    int iA_ = -1, iB_ = -1, iC_ = -1, iD_ = -1, iom_ = -1, ith_ = -1;
    Mat2 E_;
    cplx z_;
    double tol_;
    double det_drift_ = 0.0;

    void ode_segment(cplx z0, cplx z1);
};

// Evaluate the frame at the end of a contour starting anywhere (sheets are
// seeded principal at the contour start; closed-form frames are PSL-valued).
Mat2 frame_at(const LegendrianFrame& frame, const Contour& path,
              double tol = default_tol().ode_tol);

// Continuation of E around a based loop: E -> E * M.  Also reports the
// period int dG/(G - G*) over the loop when the frame carries (G, G*), and
// whether its real part vanishes (the purely-imaginary period condition).
struct MonodromyReport {
    Mat2 M;
    bool has_period = false;
    cplx period{0.0};
    bool period_imaginary = false;
    bool dual_symmetry = false;       // M realizes E -> E (0 i; i 0) up to sign
};
MonodromyReport monodromy(const LegendrianFrame& frame, const Contour& loop,
                          double tol = default_tol().ode_tol);

// E' = E (0 theta; omega 0) integrated along a contour from E(start)=initial.
Mat2 solve_ode(const Expr& omega_hat, const Expr& theta_hat,
               const Contour& path, Mat2 initial = Mat2::identity(),
               double tol = default_tol().ode_tol, double* det_drift = nullptr);

}  // namespace hflat
