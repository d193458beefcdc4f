#include "hflat/contour.hpp"

#include <algorithm>
#include <cmath>

namespace hflat {

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1].
const double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
const double kWgk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double kWg[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469, 0.381830050505119, 0.279705391489277,
                       0.129484966168870};

double dist_point_segment(cplx p, cplx a, cplx b) {
    cplx d = b - a;
    double l2 = std::norm(d);
    if (l2 == 0.0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(d)).real() / l2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

bool finite(cplx v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace

double Contour::length() const {
    double L = 0.0;
    for (size_t i = 1; i < vertices.size(); ++i)
        L += std::abs(vertices[i] - vertices[i - 1]);
    return L;
}

bool Contour::closed(double tol) const {
    return std::abs(end() - start()) <= tol * (1.0 + length());
}

Contour Contour::segment(cplx a, cplx b) {
    Contour c;
    c.vertices = {a, b};
    return c;
}

Contour Contour::polyline(std::vector<cplx> pts) {
    Contour c;
    c.vertices = std::move(pts);
    return c;
}

Contour Contour::circle(cplx center, double radius, double turns,
                        int segments) {
    Contour c;
    int n = std::max(4, static_cast<int>(std::ceil(segments * std::abs(turns))));
    for (int k = 0; k <= n; ++k) {
        double ang = 2.0 * kPi * turns * double(k) / double(n);
        c.vertices.push_back(center + radius * std::polar(1.0, ang));
    }
    return c;
}

Contour Contour::arc(cplx center, double radius, double a0, double a1,
                     int segments) {
    Contour c;
    int n = std::max(2, segments);
    for (int k = 0; k <= n; ++k) {
        double ang = a0 + (a1 - a0) * double(k) / double(n);
        c.vertices.push_back(center + radius * std::polar(1.0, ang));
    }
    return c;
}

Contour& Contour::then(const Contour& next) {
    if (vertices.empty()) {
        *this = next;
        return *this;
    }
    if (std::abs(next.start() - end()) > 1e-12 * (1.0 + length()))
        fail(ErrorCode::SpecError, "Contour::then: pieces do not join");
    vertices.insert(vertices.end(), next.vertices.begin() + 1,
                    next.vertices.end());
    avoid.insert(avoid.end(), next.avoid.begin(), next.avoid.end());
    return *this;
}

Contour Contour::reversed() const {
    Contour c = *this;
    std::reverse(c.vertices.begin(), c.vertices.end());
    return c;
}

void check_clearance(const Contour& contour) {
    for (size_t i = 1; i < contour.vertices.size(); ++i)
        for (const cplx& p : contour.avoid)
            if (dist_point_segment(p, contour.vertices[i - 1],
                                   contour.vertices[i]) < contour.clearance)
                fail(ErrorCode::ClearanceViolation,
                     "contour within clearance of declared singular point");
}

Contour route_path(cplx a, cplx b, const std::vector<cplx>& avoid,
                   double clearance) {
    struct Hit {
        double t;
        cplx p;
    };
    cplx d = b - a;
    double len = std::abs(d);
    std::vector<Hit> hits;
    if (len > 0.0) {
        for (const cplx& p : avoid) {
            double t = ((p - a) * std::conj(d)).real() / std::norm(d);
            if (t <= 0.02 || t >= 0.98) continue;
            if (dist_point_segment(p, a, b) < 2.0 * clearance)
                hits.push_back({t, p});
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& x, const Hit& y) { return x.t < y.t; });
    Contour c;
    c.vertices.push_back(a);
    cplx dir = (len > 0.0) ? d / len : cplx(1.0);
    for (const Hit& h : hits) {
        double r = 3.0 * clearance;
        cplx foot = a + h.t * d;
        cplx entry = foot - r * dir;
        cplx exit = foot + r * dir;
        c.vertices.push_back(entry);
        // left-hand semicircle around the obstacle
        double base = std::arg(entry - h.p);
        for (int k = 1; k < 8; ++k) {
            double ang = base - kPi * double(k) / 8.0;
            c.vertices.push_back(h.p + r * std::polar(1.0, ang));
        }
        c.vertices.push_back(exit);
    }
    c.vertices.push_back(b);
    c.avoid = avoid;
    c.clearance = clearance;
    return c;
}

// ----------------------------------------------------------------------
// PathEvaluator

PathEvaluator::PathEvaluator(std::vector<Expr> roots, cplx start,
                             double quad_tol)
    : anchor_(start), quad_tol_(quad_tol) {
    keepalive_ = roots;
    for (const Expr& r : roots) roots_.push_back(intern(r));
    for (size_t i = 0; i < slots_.size(); ++i)
        if (slots_[i].multivalued) mv_order_.push_back(static_cast<int>(i));
    val_.assign(slots_.size(), cplx(0.0));
    stamp_.assign(slots_.size(), 0);
    init_sheets();
}

int PathEvaluator::intern(const Expr& e) {
    auto it = index_.find(e.get());
    if (it != index_.end()) return it->second;
    Slot s;
    s.node = e.get();
    if (e->a) s.a = intern(e->a);
    if (e->b) s.b = intern(e->b);
    s.multivalued = e->multivalued_kind();
    int idx = static_cast<int>(slots_.size());
    slots_.push_back(s);
    index_.emplace(e.get(), idx);
    return idx;
}

void PathEvaluator::init_sheets() {
    // children-first order is guaranteed by intern()
    for (int i : mv_order_) {
        Slot& s = slots_[i];
        if (s.initialized) continue;
        if (s.node->kind == ExprKind::IntExp) {
            double err = 0.0;
            s.integral = (anchor_ == s.node->basepoint)
                             ? cplx(0.0)
                             : gk_adaptive(s.a, s.node->basepoint, anchor_,
                                           quad_tol_, 30, &err);
        } else {
            cplx base = eval_node(s.a, anchor_);
            if (base == cplx(0.0) || !finite(base))
                fail(ErrorCode::BranchPointOnPath,
                     "continuation starts at a branch point or pole");
            s.base_val = base;
            s.lg = std::log(base);
        }
        s.initialized = true;
    }
}

cplx PathEvaluator::eval_rec(int idx, cplx z, std::uint64_t my_epoch) const {
    const Slot& s = slots_[idx];
    if (stamp_[idx] == my_epoch) return val_[idx];
    const ExprNode* n = s.node;
    cplx v;
    switch (n->kind) {
        case ExprKind::Constant: v = n->cval; break;
        case ExprKind::Variable: v = z; break;
        case ExprKind::Add:
            v = eval_rec(s.a, z, my_epoch) + eval_rec(s.b, z, my_epoch);
            break;
        case ExprKind::Sub:
            v = eval_rec(s.a, z, my_epoch) - eval_rec(s.b, z, my_epoch);
            break;
        case ExprKind::Mul:
            v = eval_rec(s.a, z, my_epoch) * eval_rec(s.b, z, my_epoch);
            break;
        case ExprKind::Div:
            v = eval_rec(s.a, z, my_epoch) / eval_rec(s.b, z, my_epoch);
            break;
        case ExprKind::Neg: v = -eval_rec(s.a, z, my_epoch); break;
        case ExprKind::PowInt:
            v = std::pow(eval_rec(s.a, z, my_epoch), n->ipow);
            break;
        case ExprKind::Exp: v = std::exp(eval_rec(s.a, z, my_epoch)); break;
        case ExprKind::PowReal:
        case ExprKind::Log: {
            cplx base = eval_rec(s.a, z, my_epoch);
            if (!finite(base) || base == cplx(0.0))
                fail(ErrorCode::PoleHit, "branch base degenerate at probe");
            cplx ratio = base / s.base_val;
            if (std::abs(ratio - 1.0) > 0.95)
                fail(ErrorCode::SheetInconsistency,
                     "probe too far from sheet anchor");
            cplx L = s.lg + std::log(ratio);
            v = (n->kind == ExprKind::Log) ? L : std::exp(cplx(n->rpow) * L);
            break;
        }
        case ExprKind::IntExp: {
            cplx I = s.integral;
            if (z != anchor_) {
                // Nested quadrature churns the epoch; values stamped after
                // this point would collide, so finish via a fresh epoch.
                double err = 0.0;
                I += gk_adaptive(s.a, anchor_, z, quad_tol_, 20, &err);
            }
            v = std::exp(I);
            // do not cache across a nested quadrature: epochs moved on
            val_[idx] = v;
            stamp_[idx] = 0;
            return v;
        }
        default: fail(ErrorCode::SpecError, "eval: bad node kind");
    }
    val_[idx] = v;
    stamp_[idx] = my_epoch;
    return v;
}

cplx PathEvaluator::eval_node(int idx, cplx z) const {
    std::uint64_t e = ++epoch_;
    return eval_rec(idx, z, e);
}

cplx PathEvaluator::gk_segment(int idx, cplx a, cplx b, double* err) const {
    cplx mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx acc_k(0.0), acc_g(0.0);
    for (int i = 0; i < 15; ++i) {
        cplx z = mid + kXgk[i] * half;
        cplx f = eval_node(idx, z);
        if (!finite(f)) fail(ErrorCode::PoleHit, "integrand blew up");
        acc_k += kWgk[i] * f;
        if (i % 2 == 1) acc_g += kWg[i / 2] * f;
    }
    acc_k *= half;
    acc_g *= half;
    *err = std::abs(acc_k - acc_g);
    return acc_k;
}

cplx PathEvaluator::gk_adaptive(int idx, cplx a, cplx b, double tol, int depth,
                                double* err) const {
    double e0 = 0.0;
    cplx v = gk_segment(idx, a, b, &e0);
    if (e0 <= tol || depth <= 0) {
        *err = e0;
        return v;
    }
    cplx m = 0.5 * (a + b);
    double e1 = 0.0, e2 = 0.0;
    cplx v1 = gk_adaptive(idx, a, m, 0.5 * tol, depth - 1, &e1);
    cplx v2 = gk_adaptive(idx, m, b, 0.5 * tol, depth - 1, &e2);
    *err = e1 + e2;
    return v1 + v2;
}

bool PathEvaluator::try_step(cplx z1) {
    std::vector<cplx> dI(mv_order_.size(), cplx(0.0));
    std::vector<cplx> dA(accum_.size(), cplx(0.0));
    try {
        // Sheet conditions at midpoint and endpoint.
        cplx zm = 0.5 * (anchor_ + z1);
        for (int i : mv_order_) {
            const Slot& s = slots_[i];
            if (s.node->kind == ExprKind::IntExp) continue;
            for (cplx z : {zm, z1}) {
                cplx base = eval_node(s.a, z);
                if (!finite(base) || base == cplx(0.0)) return false;
                if (std::abs(base / s.base_val - 1.0) > 0.6) return false;
            }
        }
        double budget = quad_tol_ * std::max(1e-3, std::abs(z1 - anchor_));
        for (size_t k = 0; k < mv_order_.size(); ++k) {
            const Slot& s = slots_[mv_order_[k]];
            if (s.node->kind != ExprKind::IntExp) continue;
            double err = 0.0;
            dI[k] = gk_adaptive(s.a, anchor_, z1, budget, 12, &err);
            quad_err_ += err;
        }
        for (size_t k = 0; k < accum_.size(); ++k) {
            double err = 0.0;
            dA[k] = gk_adaptive(accum_[k], anchor_, z1, budget, 12, &err);
            quad_err_ += err;
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::PoleHit ||
            e.code() == ErrorCode::SheetInconsistency)
            return false;  // subdivide and retry
        throw;
    }
    // Commit: update sheets in dependency order so bases reflect new anchor.
    for (size_t k = 0; k < mv_order_.size(); ++k) {
        Slot& s = slots_[mv_order_[k]];
        if (s.node->kind == ExprKind::IntExp) {
            s.integral += dI[k];
        } else {
            cplx base = eval_node(s.a, z1);
            s.lg += std::log(base / s.base_val);
            s.base_val = base;
        }
    }
    for (size_t k = 0; k < accum_.size(); ++k) accum_val_[k] += dA[k];
    anchor_ = z1;
    advanced_ = true;
    ++epoch_;
    return true;
}

void PathEvaluator::step_recursive(cplx z0, cplx z1, int depth) {
    if (depth > 48)
        fail(ErrorCode::ClearanceViolation,
             "continuation step collapsed (branch point within clearance?)");
    if (try_step(z1)) return;
    cplx m = 0.5 * (z0 + z1);
    if (std::abs(m - z0) < min_step_scale * (1.0 + std::abs(z0)))
        fail(ErrorCode::ClearanceViolation,
             "continuation cannot advance past singular point");
    step_recursive(z0, m, depth + 1);
    step_recursive(anchor_, z1, depth + 1);
}

void PathEvaluator::advance_to(cplx z) {
    if (z == anchor_) return;
    step_recursive(anchor_, z, 0);
}

void PathEvaluator::follow(const Contour& contour) {
    if (std::abs(contour.start() - anchor_) >
        1e-12 * (1.0 + std::abs(anchor_)))
        fail(ErrorCode::SpecError, "contour does not start at current anchor");
    check_clearance(contour);
    for (size_t i = 1; i < contour.vertices.size(); ++i)
        advance_to(contour.vertices[i]);
}

cplx PathEvaluator::value(size_t i) const {
    return eval_node(roots_[i], anchor_);
}

cplx PathEvaluator::value_at(size_t i, cplx z) const {
    return eval_node(roots_[i], z);
}

size_t PathEvaluator::add_accumulator(const Expr& coeff) {
    size_t before = slots_.size();
    keepalive_.push_back(coeff);
    accum_.push_back(intern(coeff));
    accum_val_.push_back(cplx(0.0));
    if (slots_.size() != before) {
        if (advanced_)
            fail(ErrorCode::SpecError,
                 "accumulators must be registered before advancing");
        mv_order_.clear();
        for (size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i].multivalued) mv_order_.push_back(static_cast<int>(i));
        val_.resize(slots_.size(), cplx(0.0));
        stamp_.resize(slots_.size(), 0);
        init_sheets();
    }
    return accum_.size() - 1;
}

cplx PathEvaluator::accumulated(size_t handle) const {
    return accum_val_[handle];
}

// ----------------------------------------------------------------------

cplx continue_eval(const Expr& e, const Contour& contour, double quad_tol) {
    PathEvaluator pe({e}, contour.start(), quad_tol);
    pe.follow(contour);
    return pe.value(0);
}

std::vector<cplx> continue_eval_family(const std::vector<Expr>& exprs,
                                       const Contour& contour,
                                       double quad_tol) {
    PathEvaluator pe(exprs, contour.start(), quad_tol);
    pe.follow(contour);
    std::vector<cplx> out;
    out.reserve(exprs.size());
    for (size_t i = 0; i < exprs.size(); ++i) out.push_back(pe.value(i));
    return out;
}

IntegralResult contour_integrate(const Expr& omega_hat, const Contour& contour,
                                 double tol) {
    PathEvaluator pe({omega_hat}, contour.start(), tol);
    size_t h = pe.add_accumulator(omega_hat);
    pe.follow(contour);
    IntegralResult r{pe.accumulated(h), pe.quad_error()};
    if (r.abs_error > std::max(tol, 1e-14) * 50.0)
        fail(ErrorCode::ToleranceNotMet,
             "contour integral error estimate above tolerance");
    return r;
}

}  // namespace hflat
