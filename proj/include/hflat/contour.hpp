#pragma once

#include <unordered_map>
#include <vector>

#include "hflat/expr.hpp"
#include "hflat/types.hpp"

namespace hflat {

// A piecewise-linear path in a chart, together with the points the path must
// keep clear of (poles, branch points, umbilics of the data being continued).
struct Contour {
    std::vector<cplx> vertices;          // >= 1; first vertex is the start
    std::vector<cplx> avoid;             // declared singular points
    double clearance = 1e-3;             // minimum distance to `avoid`

    cplx start() const { return vertices.front(); }
    cplx end() const { return vertices.back(); }
    double length() const;
    bool closed(double tol = 1e-13) const;

    static Contour segment(cplx a, cplx b);
    static Contour polyline(std::vector<cplx> pts);
    // Counterclockwise (turns > 0) polygonal circle, `segments` edges,
    // starting and ending at center + radius.
    static Contour circle(cplx center, double radius, double turns = 1.0,
                          int segments = 24);
    // Arc from angle a0 to a1 (radians) about center.
    static Contour arc(cplx center, double radius, double a0, double a1,
                       int segments = 12);
    Contour& then(const Contour& next);  // append (next.start must match end)
    Contour reversed() const;
};

// Straight path from `a` to `b` that detours around any `avoid` point closer
// to the segment than 2*clearance (deterministic left-hand semicircles).
Contour route_path(cplx a, cplx b, const std::vector<cplx>& avoid,
                   double clearance);

// Joint analytic continuation of a family of expressions along a contour.
//
// All multivalued nodes (real powers, logs, path-integral exponentials) in
// the registered expressions carry sheet data that is advanced continuously;
// shared subtrees share one sheet.  Evaluation anywhere near the current
// anchor is consistent with that sheet.
class PathEvaluator {
  public:
    PathEvaluator(std::vector<Expr> roots, cplx start,
                  double quad_tol = default_tol().quad_abs);

    // Move the anchor along a straight segment to z (internally subdivided).
    void advance_to(cplx z);
    // Follow a whole contour (which must start at the current anchor).
    void follow(const Contour& contour);

    cplx anchor() const { return anchor_; }

    // Value of root i at the anchor.
    cplx value(size_t i) const;
    // Value of root i at a point near the anchor (no sheet commit).
    cplx value_at(size_t i, cplx z) const;

    // Register a 1-form coefficient to be integrated along every subsequent
    // advance; returns an accumulator handle.
    size_t add_accumulator(const Expr& coeff);
    cplx accumulated(size_t handle) const;

    // Estimated absolute quadrature error accumulated so far.
    double quad_error() const { return quad_err_; }

    double min_step_scale = 1e-11;  // relative halving floor before giving up

  private:
    struct Slot {
        const ExprNode* node;
        int a = -1, b = -1;
        bool multivalued = false;
        bool initialized = false;
        // sheet data (multivalued only)
        cplx base_val{0.0};  // value of child a at anchor (PowReal/Log)
        cplx lg{0.0};        // continuous log of base at anchor
        cplx integral{0.0};  // accumulated integral (IntExp)
    };

    int intern(const Expr& e);
    void init_sheets();
    // One committed straight step; returns false if conditions demand a split.
    bool try_step(cplx z1);
    void step_recursive(cplx z0, cplx z1, int depth);

    cplx eval_node(int idx, cplx z) const;  // probe against current sheets
    cplx eval_rec(int idx, cplx z, std::uint64_t my_epoch) const;
    cplx gk_segment(int idx, cplx a, cplx b, double* err) const;
    cplx gk_adaptive(int idx, cplx a, cplx b, double tol, int depth,
                     double* err) const;

    std::vector<Expr> keepalive_;
    std::vector<Slot> slots_;
    std::unordered_map<const ExprNode*, int> index_;
    std::vector<int> roots_;
    std::vector<int> mv_order_;  // multivalued slots, children first
    std::vector<int> accum_;
    std::vector<cplx> accum_val_;
    cplx anchor_;
    double quad_tol_;
    double quad_err_ = 0.0;
    bool advanced_ = false;

    mutable std::vector<cplx> val_;
    mutable std::vector<std::uint64_t> stamp_;
    mutable std::uint64_t epoch_ = 0;
};

// Continue `e` along the contour; value at the endpoint.
cplx continue_eval(const Expr& e, const Contour& contour,
                   double quad_tol = default_tol().quad_abs);

// Continue a family jointly (shared sheets); values at the endpoint.
std::vector<cplx> continue_eval_family(const std::vector<Expr>& exprs,
                                       const Contour& contour,
                                       double quad_tol = default_tol().quad_abs);

struct IntegralResult {
    cplx value;
    double abs_error;
};

// Adaptive integral of a 1-form coefficient along the contour, with analytic
// continuation of any multivalued factors.  Throws ToleranceNotMet if the
// error estimate exceeds `tol`, ClearanceViolation if the path passes within
// clearance of a declared singular point.
IntegralResult contour_integrate(const Expr& omega_hat, const Contour& contour,
                                 double tol = default_tol().quad_abs);

void check_clearance(const Contour& contour);

}  // namespace hflat
