#include "hflat/series.hpp"

#include <algorithm>
#include <cmath>

namespace hflat {

namespace {

double pick_radius(const SeriesOptions& opt) {
    double r = opt.radius > 0.0 ? opt.radius : 0.5 * opt.singular_distance;
    return std::max(r, 1e-8);
}

// log of the max modulus on the circle, and the max/min oscillation ratio
struct CircleStats {
    double log_max;
    double log_mean;  // mean of log|f|
    double osc;       // log(max) - log(min)
};

CircleStats circle_stats(const Expr& f, cplx p, double r, int samples) {
    bool closed = false;
    std::vector<cplx> vals = sample_circle(f, p, r, samples, &closed);
    double lmax = -1e300, lmin = 1e300, lsum = 0.0;
    for (const cplx& v : vals) {
        double a = std::abs(v);
        double lg = (a > 0.0) ? std::log(a) : -700.0;
        lmax = std::max(lmax, lg);
        lmin = std::min(lmin, lg);
        lsum += lg;
    }
    return {lmax, lsum / double(vals.size()), lmax - lmin};
}

}  // namespace

std::vector<cplx> sample_circle(const Expr& f, cplx p, double r, int samples,
                                bool* closed) {
    std::vector<cplx> out;
    out.reserve(size_t(samples));
    cplx start = p + cplx(r, 0.0);
    PathEvaluator pe({f}, start);
    out.push_back(pe.value(0));
    for (int j = 1; j < samples; ++j) {
        double ang = 2.0 * kPi * double(j) / double(samples);
        pe.advance_to(p + r * std::polar(1.0, ang));
        out.push_back(pe.value(0));
    }
    pe.advance_to(start);
    cplx back = pe.value(0);
    double scale = std::abs(out.front()) + std::abs(back) + 1e-300;
    if (closed) *closed = std::abs(back - out.front()) / scale < 1e-6;
    return out;
}

LocalSeries local_series(const Expr& f, cplx p, const SeriesOptions& opt) {
    double r0 = pick_radius(opt);

    // Pilot order from modulus slopes over three radii; essential behavior
    // shows up as slopes that keep steepening as the radius shrinks.
    CircleStats s0 = circle_stats(f, p, r0, 64);
    CircleStats s1 = circle_stats(f, p, 0.5 * r0, 64);
    CircleStats s2 = circle_stats(f, p, 0.25 * r0, 64);
    double lr = std::log(2.0);
    double m1 = (s0.log_max - s1.log_max) / lr;   // slope between r0/2 and r0
    double m2 = (s1.log_max - s2.log_max) / lr;
    if (std::abs(m2 - m1) > 0.45 && std::abs(m2) > std::abs(m1) + 0.2)
        fail(ErrorCode::EssentialOrIrregular,
             "modulus slopes do not stabilize near center (essential?)");
    int pilot = int(std::lround(m2));

    double r = 0.5 * r0;
    bool closed = false;
    std::vector<cplx> vals = sample_circle(f, p, r, opt.samples, &closed);
    if (!closed)
        fail(ErrorCode::BranchAmbiguous,
             "function is multivalued around the center; use the double cover");

    LocalSeries out;
    out.center = p;
    out.radius = r;
    out.k_lo = pilot - opt.terms;
    out.k_hi = pilot + opt.terms;
    int M = opt.samples;
    out.coeff.assign(size_t(out.k_hi - out.k_lo + 1), cplx(0.0));
    for (int k = out.k_lo; k <= out.k_hi; ++k) {
        cplx acc(0.0);
        for (int j = 0; j < M; ++j) {
            double ang = -2.0 * kPi * double(k) * double(j) / double(M);
            acc += vals[size_t(j)] * std::polar(1.0, ang);
        }
        out.coeff[size_t(k - out.k_lo)] = acc / (double(M) * std::pow(r, k));
    }

    // significance by contribution at the sample radius
    double best = 0.0;
    for (int k = out.k_lo; k <= out.k_hi; ++k)
        best = std::max(best, std::abs(out.at(k)) * std::pow(r, k));
    if (best == 0.0) {
        out.leading = out.k_hi + 1;  // identically ~0 within window
        return out;
    }
    int lead = out.k_hi + 1;
    for (int k = out.k_lo; k <= out.k_hi; ++k) {
        if (std::abs(out.at(k)) * std::pow(r, k) > opt.rel_thresh * best) {
            lead = k;
            break;
        }
    }
    if (lead == out.k_lo) {
        // window floor is significant: either a deeper pole or essential;
        // retry once with a wider window, then give up
        if (opt.terms < 40) {
            SeriesOptions wider = opt;
            wider.terms = opt.terms + 16;
            return local_series(f, p, wider);
        }
        fail(ErrorCode::EssentialOrIrregular,
             "no leading coefficient within the Laurent window");
    }
    out.leading = lead;

    // cross-radius consistency of the leading coefficient
    std::vector<cplx> vals2 = sample_circle(f, p, 0.5 * r, opt.samples, &closed);
    cplx acc(0.0);
    for (int j = 0; j < M; ++j) {
        double ang = -2.0 * kPi * double(lead) * double(j) / double(M);
        acc += vals2[size_t(j)] * std::polar(1.0, ang);
    }
    cplx lead2 = acc / (double(M) * std::pow(0.5 * r, lead));
    out.trunc_error =
        std::abs(lead2 - out.leading_coeff()) / (std::abs(lead2) + 1e-300);
    if (out.trunc_error > 1e-3)
        fail(ErrorCode::EssentialOrIrregular,
             "leading coefficient is radius-dependent (irregular point)");
    return out;
}

int vanish_order(const Expr& f, cplx p, const SeriesOptions& opt) {
    return local_series(f, p, opt).leading;
}

double metric_order(const Expr& f, cplx p, const SeriesOptions& opt) {
    double r0 = pick_radius(opt);
    double lr = std::log(2.0);
    CircleStats s[4];
    for (int j = 0; j < 4; ++j)
        s[j] = circle_stats(f, p, r0 * std::pow(0.5, j), 64);
    double m1 = (s[1].log_mean - s[2].log_mean) / lr;
    double m2 = (s[2].log_mean - s[3].log_mean) / lr;
    if (!std::isfinite(m1) || !std::isfinite(m2) || std::abs(m2 - m1) > 0.2)
        fail(ErrorCode::EssentialOrIrregular,
             "modulus order does not stabilize");
    // Richardson: slope sequence converges linearly in r for (1+o(1)) data
    return 2.0 * m2 - m1;
}

ModulusLimit modulus_limit(const Expr& f, cplx p, const SeriesOptions& opt) {
    double r0 = pick_radius(opt);
    CircleStats s2 = circle_stats(f, p, 0.25 * r0, 96);
    CircleStats s3 = circle_stats(f, p, 0.125 * r0, 96);
    // oscillation must settle for any limit to exist
    if (s3.osc > 0.05 && s3.osc > 0.8 * s2.osc)
        return {LimitKind::None, 0.0};
    double slope = (s2.log_mean - s3.log_mean) / std::log(2.0);
    if (slope > 0.05) return {LimitKind::Zero, 0.0};
    if (slope < -0.05) return {LimitKind::Infinite, 0.0};
    return {LimitKind::Finite, std::exp(s3.log_mean)};
}

}  // namespace hflat
