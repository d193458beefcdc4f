#include "hflat/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace hflat {

using nlohmann::json;

// ----------------------------------------------------------------------
// polynomial helpers

cplx Poly::eval(cplx z) const {
    cplx acc(0.0);
    for (size_t k = coeff.size(); k-- > 0;) acc = acc * z + coeff[k];
    return acc;
}

Poly Poly::derivative() const {
    Poly d;
    for (size_t k = 1; k < coeff.size(); ++k)
        d.coeff.push_back(double(k) * coeff[k]);
    return d;
}

int Poly::degree() const {
    for (size_t k = coeff.size(); k-- > 0;)
        if (std::abs(coeff[k]) > 0.0) return int(k);
    return -1;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    if (a.coeff.empty() || b.coeff.empty()) return out;
    out.coeff.assign(a.coeff.size() + b.coeff.size() - 1, cplx(0.0));
    for (size_t i = 0; i < a.coeff.size(); ++i)
        for (size_t j = 0; j < b.coeff.size(); ++j)
            out.coeff[i + j] += a.coeff[i] * b.coeff[j];
    return out;
}

std::vector<cplx> poly_roots(const Poly& p) {
    int n = p.degree();
    if (n <= 0) return {};
    std::vector<cplx> c(p.coeff.begin(), p.coeff.begin() + n + 1);
    for (auto& x : c) x /= p.coeff[size_t(n)];
    // Durand-Kerner
    std::vector<cplx> r;
    r.resize(size_t(n));
    cplx seed(0.4, 0.9);
    r[0] = seed;
    for (int k = 1; k < n; ++k) r[size_t(k)] = r[size_t(k - 1)] * seed;
    for (int it = 0; it < 500; ++it) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx num(0.0), zp(1.0);
            for (int k = 0; k <= n; ++k) {
                num += c[size_t(k)] * zp;
                zp *= r[size_t(i)];
            }
            cplx den(1.0);
            for (int j = 0; j < n; ++j)
                if (j != i) den *= r[size_t(i)] - r[size_t(j)];
            cplx delta = num / den;
            r[size_t(i)] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-14) break;
    }
    return r;
}

namespace {

Expr poly_expr(const Poly& p) {
    Expr z = variable();
    Expr acc = constant(0.0);
    for (size_t k = 0; k < p.coeff.size(); ++k)
        if (p.coeff[k] != cplx(0.0))
            acc = add(acc, mul(constant(p.coeff[k]), powi(z, int(k))));
    return acc;
}

std::string poly_str(const Poly& p) { return to_string(poly_expr(p)); }

double min_pairwise_distance(const std::vector<cplx>& pts) {
    double best = 1e300;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            best = std::min(best, std::abs(pts[i] - pts[j]));
    return best;
}

double get(const std::map<std::string, double>& params, const std::string& k,
           double dflt) {
    auto it = params.find(k);
    return it == params.end() ? dflt : it->second;
}

double dist_to_others(cplx z, const std::vector<cplx>& all) {
    double best = 1e300;
    for (const cplx& p : all)
        if (std::abs(p - z) > 1e-12) best = std::min(best, std::abs(p - z));
    return best;
}

// shared construction for the hyperelliptic family w^2 = z phi(z),
// G = w, G* = h/w, h = (2k z phi - z^2 phi')/(2k+1), xi = z^{(2k+1)/2}
SceneSpec fournoid_like(const std::string& name, const Poly& phi, int k) {
    SceneSpec s;
    s.name = name;
    s.route = "gauss-pair";
    Poly zphi = poly_mul(Poly{{0.0, 1.0}}, phi);
    Poly h;  // (2k z phi - z^2 phi')/(2k+1)
    {
        Poly a = zphi;
        for (auto& c : a.coeff) c *= double(2 * k);
        Poly b = poly_mul(Poly{{0.0, 0.0, 1.0}}, phi.derivative());
        Poly out;
        out.coeff.assign(std::max(a.coeff.size(), b.coeff.size()), cplx(0.0));
        for (size_t j = 0; j < a.coeff.size(); ++j) out.coeff[j] += a.coeff[j];
        for (size_t j = 0; j < b.coeff.size(); ++j) out.coeff[j] -= b.coeff[j];
        for (auto& c : out.coeff) c /= double(2 * k + 1);
        h = out;
    }
    s.hyperelliptic = poly_str(zphi);
    s.G = "w";
    s.Gstar = "(" + poly_str(h) + ")/w";
    s.xi = "pow(z," + std::to_string((2.0 * k + 1.0) / 2.0) + ")";
    s.c = 1.0;
    s.euler = 2 - 2 * k;
    s.deg_G = 2 * k + 1;
    s.deg_Gstar = (h.degree() > k) ? 2 * k + 1 : 2 * k;

    std::vector<cplx> branch = poly_roots(zphi);
    std::vector<cplx> end_roots = poly_roots(zphi.derivative());
    std::vector<cplx> all_avoid = branch;
    for (cplx r : end_roots) all_avoid.push_back(r);

    // umbilics: zeros of N = h' phi - (h/z) (z phi)'/2
    Poly g = h;  // h = z*g with g = (2k phi - z phi')/(2k+1)
    g.coeff.erase(g.coeff.begin());
    Poly N;
    {
        Poly a = poly_mul(h.derivative(), phi);
        Poly b = poly_mul(g, zphi.derivative());
        N.coeff.assign(std::max(a.coeff.size(), b.coeff.size()), cplx(0.0));
        for (size_t j = 0; j < a.coeff.size(); ++j) N.coeff[j] += a.coeff[j];
        for (size_t j = 0; j < b.coeff.size(); ++j)
            N.coeff[j] -= 0.5 * b.coeff[j];
    }
    for (cplx u : poly_roots(N)) {
        if (dist_to_others(u, all_avoid) > 1e-6) {
            s.umbilics.push_back(u);
            all_avoid.push_back(u);
        }
    }

    Puncture origin;
    origin.name = "z0_branch";
    origin.z = 0.0;
    origin.branch_point = true;
    origin.singular_distance = 0.8 * dist_to_others(0.0, all_avoid);
    origin.end_radius = 0.5 * origin.singular_distance;
    s.punctures.push_back(origin);
    int idx = 0;
    for (cplx r : end_roots) {
        for (int sheet = 0; sheet < 2; ++sheet) {
            Puncture p;
            p.name = "end" + std::to_string(idx) + "_s" + std::to_string(sheet);
            p.z = r;
            p.sheet = sheet;
            p.singular_distance = 0.8 * dist_to_others(r, all_avoid);
            p.end_radius = 0.5 * p.singular_distance;
            s.punctures.push_back(p);
        }
        ++idx;
    }
    if (h.degree() > k) {
        Puncture inf;
        inf.name = "inf";
        inf.at_infinity = true;
        inf.branch_point = true;
        double far = 0.0;
        for (cplx r : all_avoid) far = std::max(far, std::abs(r));
        inf.singular_distance = 0.8 / far;
        inf.end_radius = 0.5 * inf.singular_distance;
        s.punctures.push_back(inf);
    }
    s.extra_avoid = branch;
    double far = 0.0;
    for (cplx r : all_avoid) far = std::max(far, std::abs(r));
    double W = std::max(2.0, 1.3 * far);
    s.window = {-W, W, -W, W};
    s.basepoint = cplx(0.0, 0.9 * W);
    return s;
}

}  // namespace

std::vector<std::string> catalog_names() {
    return {"horosphere",   "cylinder",        "snowman",
            "hourglass",    "peach",           "fournoid-genus-k",
            "pfront-3end",  "genus2-10end",    "dihedral-caustic",
            "uend-model",   "eend-model"};
}

SceneSpec builtin(const std::string& name,
                  const std::map<std::string, double>& params) {
    SceneSpec s;
    s.name = name;
    if (name == "horosphere") {
        s.route = "g-omega";
        s.G = "z";
        s.omega = "1";
        s.basepoint = 0.0;
        s.window = {-1.0, 1.0, -1.0, 1.0};
        s.totally_umbilic = true;
        s.euler = 2;
        return s;
    }
    if (name == "cylinder") {
        double c = get(params, "c", 1.0);
        double c2 = c * c;
        s.route = "omega-theta";
        s.constants["c2"] = c2;
        s.omega = "1/(c2*z)";
        s.theta = "c2/(4*z)";
        s.G = "z";
        s.Gstar = "-z";
        s.basepoint = 1.0;
        Puncture p0{"origin"};
        p0.z = 0.0;
        p0.singular_distance = 1.0;
        Puncture pi{"inf"};
        pi.at_infinity = true;
        pi.singular_distance = 0.5;
        s.punctures = {p0, pi};
        s.window = {-2.0, 2.0, -2.0, 2.0};
        s.euler = 2;
        s.deg_G = s.deg_Gstar = 1;
        return s;
    }
    if (name == "snowman") {
        double c = get(params, "c", 1.0);
        double k = get(params, "k", 1.0);
        double b = 1.0 / (c * c) + c * c / 4.0;
        double a = c * c / 4.0 - 1.0 / (c * c);
        s.route = "omega-theta";
        s.constants["aa"] = a;
        s.constants["bb"] = b;
        s.constants["kk"] = k;
        s.omega = "-(aa/(2*sqrt(kk)))*pow(z," + std::to_string(-b - 1.0) + ")";
        s.theta = "(aa*sqrt(kk)/2)*pow(z," + std::to_string(b - 1.0) + ")";
        s.G = "z";
        s.Gstar = std::to_string((b - 1.0) / (b + 1.0)) + "*z";
        s.basepoint = 1.0;
        Puncture p0{"origin"};
        p0.z = 0.0;
        p0.singular_distance = 1.0;
        Puncture pi{"inf"};
        pi.at_infinity = true;
        pi.singular_distance = 0.5;
        s.punctures = {p0, pi};
        s.window = {-2.0, 2.0, -2.0, 2.0};
        s.euler = 2;
        s.deg_G = s.deg_Gstar = 1;
        return s;
    }
    if (name == "hourglass") {
        double alpha = get(params, "alpha", -0.5);
        double k = get(params, "k", 1.0);
        s.route = "gauss-pair";
        s.constants["al"] = alpha;
        s.G = "al*z";
        s.Gstar = "z";
        s.c = std::pow(k, 0.25);
        s.xi = to_string(mul(constant(s.c),
                             powr(variable(), alpha / (alpha - 1.0))));
        s.basepoint = 1.0;
        Puncture p0{"origin"};
        p0.z = 0.0;
        p0.singular_distance = 1.0;
        Puncture pi{"inf"};
        pi.at_infinity = true;
        pi.singular_distance = 0.5;
        s.punctures = {p0, pi};
        s.window = {-2.0, 2.0, -2.0, 2.0};
        s.euler = 2;
        s.deg_G = s.deg_Gstar = 1;
        return s;
    }
    if (name == "peach") {
        cplx b(get(params, "b_re", 1.0), get(params, "b_im", 0.0));
        double c = get(params, "c_re", 1.0);
        s.route = "gauss-pair";
        s.constants["b"] = b;
        s.constants["cc"] = c;
        s.G = "z";
        s.Gstar = "z-b";
        s.xi = "cc*exp(z/b)";
        s.c = c;
        s.basepoint = 0.0;
        Puncture pi{"inf"};
        pi.at_infinity = true;
        pi.singular_distance = 0.6;
        s.punctures = {pi};
        s.window = {-1.2, 1.2, -1.2, 1.2};
        s.euler = 2;
        return s;
    }
    if (name == "fournoid-genus-k") {
        int k = int(get(params, "k", 1.0));
        double c = get(params, "c", k >= 2 ? double(k) / double(k - 1) : 0.0);
        // phi = z^{2k} - 2c z^{k-1} - 1
        Poly phi;
        phi.coeff.assign(size_t(2 * k + 1), cplx(0.0));
        phi.coeff[size_t(2 * k)] = 1.0;
        phi.coeff[size_t(k - 1)] += -2.0 * c;
        phi.coeff[0] += -1.0;
        return fournoid_like("fournoid-genus-k", phi, k);
    }
    if (name == "genus2-10end") {
        // phi = (z^2 - 1)(z^2 - 9/4)
        Poly phi = poly_mul(Poly{{-1.0, 0.0, 1.0}}, Poly{{-2.25, 0.0, 1.0}});
        return fournoid_like("genus2-10end", phi, 2);
    }
    if (name == "pfront-3end") {
        double b = get(params, "b", 0.3);
        double c = get(params, "c", std::sqrt(2.0));
        s.route = "gauss-pair";
        s.constants["b"] = b;
        s.constants["cc"] = c;
        s.G = "(z^2+z/b)/(z+b)";
        s.Gstar = "(z^2-z/b)/(b-z)";
        s.xi = "cc*sqrt(z)*pow(z-1," + std::to_string((1.0 - b) / 2.0) +
               ")*pow(z+1," + std::to_string((1.0 + b) / 2.0) + ")/(z+b)";
        s.c = c;
        s.basepoint = 1.5;
        double sd = 0.4 * std::min({1.0, std::abs(b), std::abs(1.0 - b),
                                    std::abs(1.0 + b)});
        Puncture p0{"zero"};
        p0.z = 0.0;
        p0.singular_distance = sd;
        Puncture pp{"plus1"};
        pp.z = 1.0;
        pp.singular_distance = sd;
        Puncture pm{"minus1"};
        pm.z = -1.0;
        pm.singular_distance = sd;
        Puncture pi{"inf"};
        pi.at_infinity = true;
        pi.singular_distance = 0.3 / std::max(1.0, std::abs(b));
        s.punctures = {p0, pp, pm, pi};
        s.extra_avoid = {cplx(b, 0.0), cplx(-b, 0.0)};
        s.window = {-2.2, 2.2, -2.2, 2.2};
        s.euler = 2;       // of the compactified double cover
        s.deg_G = 2;       // cover degrees
        s.deg_Gstar = 2;
        s.tau_radius = 1.5;
        return s;
    }
    if (name == "dihedral-caustic") {
        s.route = "gauss-pair";
        s.G = "z^3";
        s.Gstar = "z^(-5)";
        s.xi = "pow(z^8-1,0.375)";
        s.c = 1.0;
        s.basepoint = 0.5;
        for (int j = 0; j < 8; ++j) {
            Puncture p;
            p.name = "root" + std::to_string(j);
            p.z = std::polar(1.0, 2.0 * kPi * j / 8.0);
            p.singular_distance = 0.3;
            s.punctures.push_back(p);
        }
        s.umbilics = {cplx(0.0, 0.0)};
        s.window = {-2.0, 2.0, -2.0, 2.0};
        s.euler = 2;
        s.deg_G = 3;
        s.deg_Gstar = 5;
        return s;
    }
    if (name == "uend-model") {
        int m = int(get(params, "m", 2.0));
        cplx a0(get(params, "a0", 1.0), 0.0);
        cplx am(get(params, "am", 1.0), 0.0);
        s.route = "gauss-pair";
        s.constants["a0"] = a0;
        s.constants["am"] = am;
        s.G = "a0+am*z^" + std::to_string(m);
        s.Gstar = "z";
        s.c = 1.0;
        s.basepoint = 0.3;
        s.umbilics = {cplx(0.0, 0.0)};
        // front ends: collision roots of G - G* = a0 + am z^m - z
        Poly col;
        col.coeff.assign(size_t(m + 1), cplx(0.0));
        col.coeff[0] = a0;
        col.coeff[1] += -1.0;
        col.coeff[size_t(m)] += am;
        double nearest = 1e300;
        for (cplx r : poly_roots(col)) {
            s.extra_avoid.push_back(r);
            nearest = std::min(nearest, std::abs(r));
        }
        double W = 0.6 * std::min(1.0, nearest);
        s.window = {-W, W, -W, W};
        s.euler = 2;
        return s;
    }
    if (name == "eend-model") {
        int m = int(get(params, "m", 1.0));
        int k = int(get(params, "k", 1.0));
        double am = get(params, "am", 1.0);
        int l = int(get(params, "l", 0.0));
        double al = get(params, "al", 0.5);
        s.route = "gauss-pair";
        s.constants["am"] = am;
        s.Gstar = "z^" + std::to_string(m);
        Expr z = variable();
        double collision_radius = 1.0;
        if (k >= 1) {
            s.G = to_string(mul(constant(am), powi(z, m + k)));
            s.xi = to_string(powr(
                sub(mul(constant(am), powi(z, k)), constant(1.0)),
                double(m + k) / double(k)));
            collision_radius = std::pow(1.0 / std::abs(am), 1.0 / k);
        } else if (std::abs(am - 1.0) > 1e-12) {
            s.G = to_string(mul(constant(am), powi(z, m)));
            s.xi = to_string(powr(z, double(m) * am / (am - 1.0)));
            collision_radius = 1e300;  // G - G* = (am - 1) z^m
        } else {
            if (l <= m || al == 0.0)
                fail(ErrorCode::SpecError,
                     "eend-model with am=1 needs l > m and al != 0");
            s.constants["al"] = al;
            s.G = to_string(add(powi(z, m), mul(constant(al), powi(z, l))));
            s.xi = to_string(mul(
                powi(z, l),
                exp_(mul(constant(double(m) / (al * double(m - l))),
                         powi(z, m - l)))));
            collision_radius = 1e300;  // G - G* = al z^l
        }
        s.c = 1.0;
        double W = 0.5 * std::min(1.0, collision_radius);
        s.basepoint = 0.5 * W;
        if (collision_radius < 1e200) {
            for (int j = 0; j < std::max(k, 1); ++j)
                s.extra_avoid.push_back(
                    std::polar(collision_radius,
                               2.0 * kPi * j / std::max(k, 1)));
        }
        Puncture p0{"origin"};
        p0.z = 0.0;
        p0.singular_distance = 0.8 * W;
        p0.end_radius = 0.4 * W;
        s.punctures = {p0};
        s.window = {-W, W, -W, W};
        s.euler = 2;
        return s;
    }
    fail(ErrorCode::SpecError, "unknown catalog name '" + name + "'");
}

void validate_spec(const SceneSpec& spec) {
    // expressions must parse
    std::map<std::string, Expr> bind;
    if (!spec.hyperelliptic.empty())
        bind["w"] = sqrt_(parse_expr(spec.hyperelliptic, spec.constants));
    for (const std::string* src :
         {&spec.G, &spec.Gstar, &spec.omega, &spec.theta, &spec.xi}) {
        if (!src->empty()) parse_expr(*src, spec.constants, bind);
    }
    if (spec.name == "cylinder" || spec.name == "snowman") {
        auto it = spec.constants.find("c2");
        double c2 = it != spec.constants.end() ? it->second.real() : 0.0;
        if (spec.name == "cylinder" &&
            (c2 == 0.0 || std::abs(c2 * c2 - 4.0) < 1e-9))
            fail(ErrorCode::SpecError,
                 "cylinder needs c != 0 with c^4 != 4");
    }
    if (spec.name == "pfront-3end") {
        double b = spec.constants.at("b").real();
        if (b == 0.0 || std::abs(std::abs(b) - 1.0) < 1e-12)
            fail(ErrorCode::SpecError, "pfront-3end needs b not in {0,+-1}");
    }
    if (!spec.hyperelliptic.empty()) {
        // simple-root conditions by root clustering
        // reconstruct P as a polynomial by sampling (degree from punctures
        // is unknown here, so fit from the declared string instead)
        // The builtins keep the polynomial in expanded form; parse and
        // sample to recover coefficients up to degree 32.
        Expr P = parse_expr(spec.hyperelliptic, spec.constants);
        // Cauchy-integral coefficients on a circle of radius 2
        int M = 256;
        std::vector<cplx> vals;
        vals.reserve(size_t(M));
        for (int j = 0; j < M; ++j)
            vals.push_back(
                eval_principal(P, 2.0 * std::polar(1.0, 2.0 * kPi * j / M)));
        Poly p;
        for (int kk = 0; kk <= 32; ++kk) {
            cplx acc(0.0);
            for (int j = 0; j < M; ++j)
                acc += vals[size_t(j)] *
                       std::polar(1.0, -2.0 * kPi * kk * j / M);
            cplx ck = acc / (double(M) * std::pow(2.0, kk));
            p.coeff.push_back(std::abs(ck) > 1e-9 ? ck : cplx(0.0));
        }
        std::vector<cplx> roots = poly_roots(p);
        if (min_pairwise_distance(roots) < 1e-6)
            fail(ErrorCode::SpecError,
                 "hyperelliptic branch polynomial has clustered roots");
        std::vector<cplx> droots = poly_roots(p.derivative());
        (void)droots;  // (z phi)' simple roots: these are the end points
        if (min_pairwise_distance(droots) < 1e-6)
            fail(ErrorCode::SpecError,
                 "derivative of the branch polynomial has clustered roots");
    }
}

FrontData build_front(const SceneSpec& spec) {
    std::map<std::string, Expr> bind;
    Expr w;
    if (!spec.hyperelliptic.empty()) {
        w = sqrt_(parse_expr(spec.hyperelliptic, spec.constants));
        bind["w"] = w;
    }
    auto parse = [&](const std::string& text) {
        return parse_expr(text, spec.constants, bind);
    };
    FrontData d;
    if (spec.route == "gauss-pair") {
        Expr xi = spec.xi.empty() ? nullptr : parse(spec.xi);
        d = front_from_gauss_pair(parse(spec.G), parse(spec.Gstar), spec.c,
                                  spec.basepoint, xi);
    } else if (spec.route == "g-omega") {
        d = front_from_G_omega(parse(spec.G), parse(spec.omega),
                               spec.basepoint);
    } else if (spec.route == "omega-theta") {
        Expr G = spec.G.empty() ? nullptr : parse(spec.G);
        Expr Gs = spec.Gstar.empty() ? nullptr : parse(spec.Gstar);
        d = front_from_forms(parse(spec.omega), parse(spec.theta),
                             spec.basepoint, G, Gs);
    } else {
        fail(ErrorCode::SpecError, "unknown data route '" + spec.route + "'");
    }
    d.punctures = spec.punctures;
    d.umbilics = spec.umbilics;
    d.clearance = spec.clearance;
    d.w_node = w;
    for (const Puncture& p : spec.punctures)
        if (!p.at_infinity) d.avoid.push_back(p.z);
    for (cplx u : spec.umbilics) d.avoid.push_back(u);
    for (cplx a : spec.extra_avoid) d.avoid.push_back(a);
    for (const cplx& a : d.avoid)
        if (std::abs(a - spec.basepoint) < spec.clearance)
            fail(ErrorCode::SpecError,
                 "basepoint sits on a declared singular point");
    return d;
}

Contour tau_path(const SceneSpec& spec) {
    if (spec.tau_radius <= 0.0)
        fail(ErrorCode::SpecError, "scene has no z -> -z symmetry radius");
    Contour c = Contour::arc(0.0, spec.tau_radius, 0.0, kPi, 24);
    for (const Puncture& p : spec.punctures)
        if (!p.at_infinity) c.avoid.push_back(p.z);
    for (cplx a : spec.extra_avoid) c.avoid.push_back(a);
    c.clearance = spec.clearance;
    return c;
}

// ----------------------------------------------------------------------
// JSON

static json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }
static cplx cplx_from(const json& j) {
    return cplx(j.at(0).get<double>(), j.at(1).get<double>());
}

std::string spec_to_json(const SceneSpec& s) {
    json j;
    j["name"] = s.name;
    json consts = json::object();
    for (const auto& [k, v] : s.constants) consts[k] = cplx_json(v);
    j["constants"] = consts;
    j["route"] = s.route;
    j["G"] = s.G;
    j["Gstar"] = s.Gstar;
    j["omega"] = s.omega;
    j["theta"] = s.theta;
    j["xi"] = s.xi;
    j["hyperelliptic"] = s.hyperelliptic;
    j["c"] = cplx_json(s.c);
    j["basepoint"] = cplx_json(s.basepoint);
    json punct = json::array();
    for (const Puncture& p : s.punctures) {
        punct.push_back(json{{"name", p.name},
                             {"z", cplx_json(p.z)},
                             {"at_infinity", p.at_infinity},
                             {"sheet", p.sheet},
                             {"branch_point", p.branch_point},
                             {"end_radius", p.end_radius},
                             {"singular_distance", p.singular_distance}});
    }
    j["punctures"] = punct;
    json umb = json::array();
    for (cplx u : s.umbilics) umb.push_back(cplx_json(u));
    j["umbilics"] = umb;
    json av = json::array();
    for (cplx a : s.extra_avoid) av.push_back(cplx_json(a));
    j["extra_avoid"] = av;
    j["euler"] = s.euler;
    j["deg_G"] = s.deg_G;
    j["deg_Gstar"] = s.deg_Gstar;
    j["window"] = json{{"x0", s.window.x0},
                       {"x1", s.window.x1},
                       {"y0", s.window.y0},
                       {"y1", s.window.y1}};
    j["clearance"] = s.clearance;
    j["tau_radius"] = s.tau_radius;
    j["totally_umbilic"] = s.totally_umbilic;
    return j.dump(2);
}

SceneSpec spec_from_json(const std::string& text) {
    json j = json::parse(text);
    SceneSpec s;
    s.name = j.value("name", "");
    if (j.contains("constants"))
        for (auto it = j["constants"].begin(); it != j["constants"].end(); ++it)
            s.constants[it.key()] = cplx_from(it.value());
    s.route = j.value("route", "gauss-pair");
    s.G = j.value("G", "");
    s.Gstar = j.value("Gstar", "");
    s.omega = j.value("omega", "");
    s.theta = j.value("theta", "");
    s.xi = j.value("xi", "");
    s.hyperelliptic = j.value("hyperelliptic", "");
    if (j.contains("c")) s.c = cplx_from(j["c"]);
    if (j.contains("basepoint")) s.basepoint = cplx_from(j["basepoint"]);
    if (j.contains("punctures")) {
        for (const json& pj : j["punctures"]) {
            Puncture p;
            p.name = pj.value("name", "");
            if (pj.contains("z")) p.z = cplx_from(pj["z"]);
            p.at_infinity = pj.value("at_infinity", false);
            p.sheet = pj.value("sheet", 0);
            p.branch_point = pj.value("branch_point", false);
            p.end_radius = pj.value("end_radius", 0.25);
            p.singular_distance = pj.value("singular_distance", 0.5);
            s.punctures.push_back(p);
        }
    }
    if (j.contains("umbilics"))
        for (const json& u : j["umbilics"]) s.umbilics.push_back(cplx_from(u));
    if (j.contains("extra_avoid"))
        for (const json& a : j["extra_avoid"])
            s.extra_avoid.push_back(cplx_from(a));
    s.euler = j.value("euler", 2);
    s.deg_G = j.value("deg_G", 0.0);
    s.deg_Gstar = j.value("deg_Gstar", 0.0);
    if (j.contains("window")) {
        s.window.x0 = j["window"].value("x0", -1.0);
        s.window.x1 = j["window"].value("x1", 1.0);
        s.window.y0 = j["window"].value("y0", -1.0);
        s.window.y1 = j["window"].value("y1", 1.0);
    }
    s.clearance = j.value("clearance", 1e-3);
    s.tau_radius = j.value("tau_radius", 0.0);
    s.totally_umbilic = j.value("totally_umbilic", false);
    return s;
}

// ----------------------------------------------------------------------
// degree certification by preimage counting

namespace {

int count_valid_roots(const Poly& p, double cluster_tol = 1e-8) {
    std::vector<cplx> roots = poly_roots(p);
    // reject clustered (non-simple) configurations: counting would be unsafe
    if (roots.size() >= 2 && min_pairwise_distance(roots) < cluster_tol)
        fail(ErrorCode::DegreeUndetermined,
             "preimage roots cluster; pick another probe value");
    return int(roots.size());
}

Poly poly_scale(const Poly& p, cplx s) {
    Poly out = p;
    for (auto& c : out.coeff) c *= s;
    return out;
}

Poly poly_sub(const Poly& a, const Poly& b) {
    Poly out;
    out.coeff.assign(std::max(a.coeff.size(), b.coeff.size()), cplx(0.0));
    for (size_t j = 0; j < a.coeff.size(); ++j) out.coeff[j] += a.coeff[j];
    for (size_t j = 0; j < b.coeff.size(); ++j) out.coeff[j] -= b.coeff[j];
    return out;
}

}  // namespace

DegreeCheck check_degrees(const SceneSpec& spec) {
    DegreeCheck out{spec.deg_G, spec.deg_Gstar, false};
    auto probe_pair = [&](auto&& counter) {
        int c1 = counter(cplx(0.731, 0.294));
        int c2 = counter(cplx(-0.412, 0.553));
        if (c1 != c2)
            fail(ErrorCode::DegreeUndetermined,
                 "preimage counts disagree between probe values");
        return c1;
    };
    if (spec.name == "fournoid-genus-k" || spec.name == "genus2-10end") {
        Expr P = parse_expr(spec.hyperelliptic, spec.constants);
        // recover coefficients (the builtin emits expanded polynomials)
        Poly zphi;
        {
            int M = 128;
            std::vector<cplx> vals;
            for (int j = 0; j < M; ++j)
                vals.push_back(eval_principal(
                    P, 2.0 * std::polar(1.0, 2.0 * kPi * j / M)));
            for (int kk = 0; kk <= 16; ++kk) {
                cplx acc(0.0);
                for (int j = 0; j < M; ++j)
                    acc += vals[size_t(j)] *
                           std::polar(1.0, -2.0 * kPi * kk * j / M);
                cplx ck = acc / (double(M) * std::pow(2.0, kk));
                zphi.coeff.push_back(std::abs(ck) > 1e-8 ? ck : cplx(0.0));
            }
        }
        // h from Gstar = h/w
        std::string hs = spec.Gstar.substr(1, spec.Gstar.rfind(")/w") - 1);
        Expr hE = parse_expr(hs, spec.constants);
        Poly h;
        {
            int M = 128;
            std::vector<cplx> vals;
            for (int j = 0; j < M; ++j)
                vals.push_back(eval_principal(
                    hE, 2.0 * std::polar(1.0, 2.0 * kPi * j / M)));
            for (int kk = 0; kk <= 16; ++kk) {
                cplx acc(0.0);
                for (int j = 0; j < M; ++j)
                    acc += vals[size_t(j)] *
                           std::polar(1.0, -2.0 * kPi * kk * j / M);
                cplx ck = acc / (double(M) * std::pow(2.0, kk));
                h.coeff.push_back(std::abs(ck) > 1e-8 ? ck : cplx(0.0));
            }
        }
        // deg G: roots of z phi(z) - v^2
        int dG = probe_pair([&](cplx v) {
            Poly q = zphi;
            q.coeff[0] -= v * v;
            return count_valid_roots(q);
        });
        // deg G*: roots of h^2 - v^2 z phi with w = h/v != 0
        int dGs = probe_pair([&](cplx v) {
            Poly q = poly_sub(poly_mul(h, h), poly_scale(zphi, v * v));
            int count = 0;
            for (cplx r : poly_roots(q))
                if (std::abs(zphi.eval(r)) > 1e-8) ++count;
            return count;
        });
        out.deg_G = dG;
        out.deg_Gstar = dGs;
        out.certified = (dG == spec.deg_G && dGs == spec.deg_Gstar);
        return out;
    }
    if (spec.name == "pfront-3end") {
        double b = spec.constants.at("b").real();
        int dG = probe_pair([&](cplx v) {
            // z^2 + z/b - v(z + b) = 0
            Poly q{{-v * b, 1.0 / b - v, 1.0}};
            return count_valid_roots(q);
        });
        int dGs = probe_pair([&](cplx v) {
            // z^2 - z/b - v(b - z) = 0
            Poly q{{-v * b, v - 1.0 / b, 1.0}};
            return count_valid_roots(q);
        });
        out.deg_G = dG;
        out.deg_Gstar = dGs;
        out.certified = (dG == spec.deg_G && dGs == spec.deg_Gstar);
        return out;
    }
    if (spec.name == "dihedral-caustic") {
        int dG = probe_pair([&](cplx v) {
            Poly q{{-v, 0.0, 0.0, 1.0}};
            return count_valid_roots(q);
        });
        int dGs = probe_pair([&](cplx v) {
            // z^{-5} = v: v z^5 - 1 = 0
            Poly q{{-1.0, 0.0, 0.0, 0.0, 0.0, v}};
            return count_valid_roots(q);
        });
        out.deg_G = dG;
        out.deg_Gstar = dGs;
        out.certified = (dG == spec.deg_G && dGs == spec.deg_Gstar);
        return out;
    }
    return out;  // declared values pass through uncertified
}

}  // namespace hflat
