#include "hflat/frontdata.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace hflat {

LocalChart chart_translate(cplx p) {
    Expr u = variable();
    return {add(u, constant(p)), constant(1.0)};
}

LocalChart chart_inversion() {
    Expr u = variable();
    return {div(constant(1.0), u), neg(powi(u, -2))};
}

LocalChart chart_double_cover(cplx p) {
    Expr u = variable();
    return {add(constant(p), powi(u, 2)), mul(constant(2.0), u)};
}

FrontData FrontData::sheet_flipped() const {
    if (!w_node)
        fail(ErrorCode::SpecError, "data has no hyperelliptic sheet handle");
    FrontData d = *this;
    Expr mw = neg(w_node);
    auto flip = [&](const Expr& e) -> Expr {
        return e ? substitute_subtree(e, w_node, mw) : e;
    };
    d.G = flip(G);
    d.Gstar = flip(Gstar);
    d.omega_hat = flip(omega_hat);
    d.theta_hat = flip(theta_hat);
    d.Q_hat = flip(Q_hat);
    d.rho = flip(rho);
    if (frame.route == LegendrianFrame::Route::ClosedForm) {
        d.frame = LegendrianFrame::closed_form(flip(frame.A), flip(frame.B),
                                               flip(frame.C), flip(frame.D),
                                               frame.basepoint);
        d.frame.G = d.G;
        d.frame.Gstar = d.Gstar;
        d.frame.omega_hat = d.omega_hat;
        d.frame.theta_hat = d.theta_hat;
        d.frame.Q_hat = d.Q_hat;
        d.frame.rho = d.rho;
    }
    return d;
}

FrontData FrontData::parallel(double t) const {
    FrontData d = *this;
    d.frame = frame.parallel(t);
    d.omega_hat = mul(constant(std::exp(cplx(t))), omega_hat);
    d.theta_hat = mul(constant(std::exp(cplx(-t))), theta_hat);
    d.Q_hat = Q_hat;  // e^t e^{-t} = 1
    d.rho = mul(constant(std::exp(cplx(-2.0 * t))), rho);
    return d;
}

FrontData FrontData::dual() const {
    FrontData d = *this;
    d.frame = frame.dual();
    std::swap(d.omega_hat, d.theta_hat);
    std::swap(d.G, d.Gstar);
    d.rho = div(d.theta_hat, d.omega_hat);
    return d;
}

Contour FrontData::path_to(cplx z) const {
    return route_path(basepoint, z, avoid, clearance);
}

FrontData front_from_gauss_pair(const Expr& G, const Expr& Gstar, cplx c,
                                cplx basepoint, Expr xi) {
    FrontData d;
    if (!xi) {
        xi = mul(constant(c),
                 intexp(div(differentiate(G), sub(G, Gstar)), basepoint));
    }
    d.frame = LegendrianFrame::from_gauss_pair(G, Gstar, c, basepoint, xi);
    d.G = G;
    d.Gstar = Gstar;
    d.xi = xi;
    d.omega_hat = d.frame.omega_hat;
    d.theta_hat = d.frame.theta_hat;
    d.Q_hat = d.frame.Q_hat;
    d.rho = d.frame.rho;
    d.basepoint = basepoint;
    return d;
}

FrontData front_from_G_omega(const Expr& G, const Expr& omega_hat,
                             cplx basepoint) {
    FrontData d;
    Expr Q = mul(constant(0.5),
                 sub(schwarzian_of_form(omega_hat), schwarzian(G)));
    Expr theta = div(Q, omega_hat);
    d.frame = LegendrianFrame::from_G_omega(G, omega_hat, basepoint);
    d.G = G;
    d.Gstar = d.frame.Gstar;
    d.omega_hat = omega_hat;
    d.theta_hat = theta;
    d.Q_hat = Q;
    d.rho = div(theta, omega_hat);
    d.basepoint = basepoint;
    return d;
}

FrontData front_from_forms(const Expr& omega_hat, const Expr& theta_hat,
                           cplx basepoint, Expr G, Expr Gstar) {
    FrontData d;
    d.frame = LegendrianFrame::from_forms_ode(omega_hat, theta_hat, basepoint);
    d.G = G;
    d.Gstar = Gstar;
    d.omega_hat = omega_hat;
    d.theta_hat = theta_hat;
    d.Q_hat = mul(omega_hat, theta_hat);
    d.rho = div(theta_hat, omega_hat);
    d.basepoint = basepoint;
    return d;
}

FundamentalForms fundamental_forms(const FrontData& d, cplx z) {
    cplx om = eval_principal(d.omega_hat, z);
    cplx th = eval_principal(d.theta_hat, z);
    cplx A = om + std::conj(th);         // coefficient of dx direction
    cplx B = kI * (om - std::conj(th));  // coefficient of dy direction
    FundamentalForms f;
    f.E = std::norm(A);
    f.G = std::norm(B);
    f.F = (A * std::conj(B)).real();
    f.dh2_density = std::norm(th) - std::norm(om);
    f.ds11_density = std::norm(om) + std::norm(th);
    return f;
}

// ----------------------------------------------------------------------
// singular locus marching

namespace {

double log_rho_abs(const FrontData& d, cplx z) {
    cplx om = eval_principal(d.omega_hat, z);
    cplx th = eval_principal(d.theta_hat, z);
    double a = std::abs(th), b = std::abs(om);
    if (b == 0.0 || !std::isfinite(a) || !std::isfinite(b)) return 1e300;
    if (a == 0.0) return -1e300;
    return std::log(a / b);
}

struct Key {
    long long x, y;
    bool operator==(const Key& o) const { return x == o.x && y == o.y; }
};
struct KeyHash {
    size_t operator()(const Key& k) const {
        return std::hash<long long>()(k.x * 1000003LL + k.y);
    }
};

}  // namespace

SingularLocus singular_locus(const FrontData& d, double t, const Window& win,
                             int grid, int bisect_steps, double value_tol) {
    const double target = 2.0 * t;
    int nx = grid, ny = grid;
    double dx = (win.x1 - win.x0) / nx;
    double dy = (win.y1 - win.y0) / ny;
    auto at = [&](int i, int j) {
        return cplx(win.x0 + dx * i, win.y0 + dy * j);
    };
    std::vector<double> val((nx + 1) * (ny + 1));
    std::vector<char> ok((nx + 1) * (ny + 1), 1);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            cplx z = at(i, j);
            bool clear = true;
            for (const cplx& p : d.avoid)
                if (std::abs(z - p) < d.clearance) clear = false;
            double v = 1e300;
            if (clear) {
                try {
                    v = log_rho_abs(d, z) - target;
                } catch (const Error&) {
                    clear = false;
                }
            }
            val[j * (nx + 1) + i] = v;
            ok[j * (nx + 1) + i] = clear && std::abs(v) < 1e250;
        }

    auto refine = [&](cplx a, cplx b, double fa, double fb) {
        for (int k = 0; k < bisect_steps; ++k) {
            cplx m = 0.5 * (a + b);
            double fm;
            try {
                fm = log_rho_abs(d, m) - target;
            } catch (const Error&) {
                break;
            }
            if (std::abs(fm) < 0.5 * value_tol) return m;
            if ((fa < 0.0) != (fm < 0.0)) {
                b = m;
                fb = fm;
            } else {
                a = m;
                fa = fm;
            }
        }
        (void)fb;
        return 0.5 * (a + b);
    };

    std::vector<std::pair<cplx, cplx>> segments;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int idx[4] = {j * (nx + 1) + i, j * (nx + 1) + i + 1,
                          (j + 1) * (nx + 1) + i + 1, (j + 1) * (nx + 1) + i};
            cplx pos[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1),
                           at(i, j + 1)};
            if (!ok[idx[0]] || !ok[idx[1]] || !ok[idx[2]] || !ok[idx[3]])
                continue;
            std::vector<cplx> cross;
            std::vector<int> edge_of;
            for (int e = 0; e < 4; ++e) {
                double fa = val[idx[e]], fb = val[idx[(e + 1) % 4]];
                if ((fa < 0.0) != (fb < 0.0)) {
                    cross.push_back(refine(pos[e], pos[(e + 1) % 4], fa, fb));
                    edge_of.push_back(e);
                }
            }
            if (cross.size() == 2) {
                segments.emplace_back(cross[0], cross[1]);
            } else if (cross.size() == 4) {
                double fc;
                try {
                    fc = log_rho_abs(d, 0.25 * (pos[0] + pos[1] + pos[2] +
                                                pos[3])) -
                         target;
                } catch (const Error&) {
                    fc = 0.0;
                }
                if ((fc < 0.0) == (val[idx[0]] < 0.0)) {
                    segments.emplace_back(cross[0], cross[3]);
                    segments.emplace_back(cross[1], cross[2]);
                } else {
                    segments.emplace_back(cross[0], cross[1]);
                    segments.emplace_back(cross[2], cross[3]);
                }
            }
        }
    }

    // stitch segments into chains by snapping endpoints to a fine lattice
    double snap = 0.25 * std::min(dx, dy);
    auto key_of = [&](cplx p) {
        return Key{llround(p.real() / snap), llround(p.imag() / snap)};
    };
    std::unordered_map<Key, std::vector<int>, KeyHash> by_end;
    for (int s = 0; s < (int)segments.size(); ++s) {
        by_end[key_of(segments[s].first)].push_back(s);
        by_end[key_of(segments[s].second)].push_back(s);
    }
    std::vector<char> used(segments.size(), 0);
    SingularLocus out;
    for (int s0 = 0; s0 < (int)segments.size(); ++s0) {
        if (used[s0]) continue;
        used[s0] = 1;
        std::vector<cplx> chain{segments[s0].first, segments[s0].second};
        for (int dir = 0; dir < 2; ++dir) {
            for (;;) {
                cplx tip = dir == 0 ? chain.back() : chain.front();
                int next = -1;
                for (int s : by_end[key_of(tip)]) {
                    if (!used[s]) {
                        next = s;
                        break;
                    }
                }
                if (next < 0) break;
                used[next] = 1;
                cplx a = segments[next].first, b = segments[next].second;
                cplx add_pt = (std::abs(a - tip) < std::abs(b - tip)) ? b : a;
                if (dir == 0) chain.push_back(add_pt);
                else chain.insert(chain.begin(), add_pt);
            }
        }
        out.chains.push_back(std::move(chain));
    }
    return out;
}

// ----------------------------------------------------------------------

LocalData localize(const FrontData& d, const Puncture& p) {
    const FrontData* src = &d;
    FrontData flipped;
    if (p.sheet != 0) {
        flipped = d.sheet_flipped();
        src = &flipped;
    }
    LocalChart ch;
    if (p.at_infinity && p.branch_point) {
        Expr u = variable();
        ch = {div(constant(1.0), powi(u, 2)),
              mul(constant(-2.0), powi(u, -3))};
    } else if (p.at_infinity) {
        ch = chart_inversion();
    } else if (p.branch_point) {
        ch = chart_double_cover(p.z);
    } else {
        ch = chart_translate(p.z);
    }
    LocalData out;
    out.chart = ch;
    if (src->G) out.G = ch.pull_function(src->G);
    if (src->Gstar) out.Gstar = ch.pull_function(src->Gstar);

    bool has_path_integrals = false;
    {
        std::vector<const ExprNode*> mv;
        collect_multivalued(src->omega_hat, mv);
        for (const ExprNode* n : mv)
            if (n->kind == ExprKind::IntExp) has_path_integrals = true;
    }
    if (!has_path_integrals) {
        out.omega_hat = ch.pull_form(src->omega_hat);
        out.theta_hat = ch.pull_form(src->theta_hat);
        out.Q_hat = ch.pull_quadratic(src->Q_hat);
        out.rho = ch.pull_function(src->rho);
        return out;
    }
    if (!src->G || !src->Gstar || !src->xi)
        fail(ErrorCode::SpecError,
             "end analysis of path-integral data needs the Gauss-map route");

    // Rebuild the data in the local chart with a locally based conformal
    // factor, matched in modulus to the true one (the leftover phase is the
    // U(1) gauge and enters none of the local diagnostics).
    Expr dGl = differentiate(out.G);
    Expr dGsl = differentiate(out.Gstar);
    Expr diff = sub(out.G, out.Gstar);
    cplx u_ref(0.5 * p.singular_distance, 0.0);
    Expr xi_loc = intexp(div(dGl, diff), u_ref);
    cplx z_ref = eval_principal(ch.map, u_ref);
    cplx xi_true = continue_eval(src->xi, d.path_to(z_ref));
    double mod = std::abs(xi_true);  // |xi_loc(u_ref)| = 1
    Expr xi2 = mul(constant(mod * mod), powi(xi_loc, 2));
    out.omega_hat = neg(div(dGl, xi2));
    out.theta_hat = div(mul(xi2, dGsl), powi(diff, 2));
    out.Q_hat = neg(div(mul(dGl, dGsl), powi(diff, 2)));
    out.rho = div(out.theta_hat, out.omega_hat);
    return out;
}

std::vector<double> excluded_parallel_params(const FrontData& d) {
    std::vector<double> out;
    for (const Puncture& p : d.punctures) {
        LocalData loc = localize(d, p);
        SeriesOptions opt;
        opt.singular_distance = p.singular_distance;
        ModulusLimit ml = modulus_limit(loc.rho, 0.0, opt);
        switch (ml.kind) {
            case LimitKind::None:
                fail(ErrorCode::NotFiniteType,
                     "|rho| has no limit at puncture " + p.name);
            case LimitKind::Zero:
            case LimitKind::Infinite: break;  // contributes nothing
            case LimitKind::Finite:
                out.push_back(0.5 * std::log(ml.value));
                break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Boundary case ord = -1: integrate |omega| radially along 8 rays over
// dyadically shrinking annuli and test whether the length increments decay.
bool radial_divergent(const Expr& coeff, double r0) {
    double prev = -1.0;
    int grow = 0;
    for (int blk = 0; blk < 6; ++blk) {
        double ra = r0 * std::pow(0.5, blk + 1), rb = r0 * std::pow(0.5, blk);
        double inc = 0.0;
        for (int ray = 0; ray < 8; ++ray) {
            cplx dir = std::polar(1.0, 2.0 * kPi * ray / 8.0);
            double acc = 0.0;
            for (int k = 0; k <= 16; ++k) {
                double r = ra * std::pow(rb / ra, double(k) / 16.0);
                double w = (k == 0 || k == 16) ? 0.5 : 1.0;
                double f = std::abs(eval_principal(coeff, r * dir));
                acc += w * f * r;  // dr = r dlog r
            }
            inc += acc * std::log(rb / ra) / 16.0 / 8.0;
        }
        if (blk > 0 && inc >= 0.8 * prev) ++grow;
        prev = inc;
    }
    return grow >= 4;
}

}  // namespace

EndDiagnostics end_diagnostics(const FrontData& d, const Puncture& p) {
    LocalData loc = localize(d, p);
    SeriesOptions opt;
    opt.singular_distance = p.singular_distance;
    EndDiagnostics out{};
    out.finite_type = true;
    try {
        out.ord_omega2 = metric_order(loc.omega_hat, 0.0, opt);
        out.ord_theta2 = metric_order(loc.theta_hat, 0.0, opt);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EssentialOrIrregular) throw;
        out.finite_type = false;
        out.weakly_complete = true;  // the exploding side dominates any circle
        out.ord_omega2 = out.ord_theta2 = 0.0;
        out.cylindrical = false;
        out.ord_Q = vanish_order(loc.Q_hat, 0.0, opt);
        return out;
    }
    out.ord_Q = vanish_order(loc.Q_hat, 0.0, opt);
    out.cylindrical = std::abs(out.ord_omega2 - out.ord_theta2) < 5e-2;
    double m = std::min(out.ord_omega2, out.ord_theta2);
    if (m < -1.05) {
        out.weakly_complete = true;
    } else if (m > -0.95) {
        out.weakly_complete = false;
    } else {
        const Expr& which =
            out.ord_omega2 <= out.ord_theta2 ? loc.omega_hat : loc.theta_hat;
        out.weakly_complete = radial_divergent(which, 0.5 * p.singular_distance);
    }
    return out;
}

}  // namespace hflat
