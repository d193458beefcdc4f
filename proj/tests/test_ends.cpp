#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hflat/catalog.hpp"
#include "hflat/ends.hpp"

using namespace hflat;

TEST_CASE("ramification numbers") {
    Expr z = variable();
    CHECK(ramification(z) == 1);
    CHECK(ramification(add(constant(2.0), powi(z, 2))) == 2);
    // pole: normalized internally
    CHECK(ramification(div(constant(1.0), powi(z, 3))) == 3);
    // the 3-end scene's G at z = 0: (z^2 + z/b)/(z + b), linear leading term
    Expr G = parse_expr("(z^2+z/b)/(z+b)", {{"b", cplx(0.3)}});
    CHECK(ramification(G, 0.25) == 1);
}

TEST_CASE("gauss ratio values") {
    Expr z = variable();
    // G* = z^2, G = z^3: one map more ramified -> 0
    CHECK(std::abs(gauss_ratio(powi(z, 3), powi(z, 2))) < 1e-9);
    // G* = z, G = -z/2 + z^2 -> -1/2
    Expr G = add(mul(constant(-0.5), z), powi(z, 2));
    CHECK(std::abs(gauss_ratio(G, z) + 0.5) < 1e-9);
    // equal maps with unit ratio -> 1
    Expr G2 = add(z, powi(z, 3));
    CHECK(std::abs(gauss_ratio(G2, z) - 1.0) < 1e-9);
    // ratio of moduli > 1 picks the reciprocal branch
    Expr G3 = mul(constant(-2.0), z);
    CHECK(std::abs(gauss_ratio(G3, z) + 0.5) < 1e-9);
    // complex ratio must be rejected
    Expr G4 = mul(constant(cplx(0.3, 0.4)), z);
    CHECK_THROWS_AS(gauss_ratio(G4, z), Error);
    // non-colliding values: not a regular-end configuration
    Expr G5 = add(constant(1.0), z);
    CHECK_THROWS_AS(gauss_ratio(G5, z), Error);
}

TEST_CASE("alpha trichotomy") {
    CHECK(classify_alpha(-1.0) == EndType::Cylindrical);
    CHECK(classify_alpha(-0.5) == EndType::Hourglass);
    CHECK(classify_alpha(0.0) == EndType::Horospherical);
    CHECK(classify_alpha(0.3) == EndType::Snowman);
    CHECK(classify_alpha(1.0) == EndType::NotFiniteType);
    CHECK(classify_alpha(1.0 - 3e-6) == EndType::Indeterminate);
}

TEST_CASE("classification with the top-coefficient cross-check") {
    // synthetic regular ends G = alpha z (+ higher), G* = z
    for (double alpha : {-0.5, 0.3}) {
        FrontData d = front_from_gauss_pair(
            mul(constant(alpha), variable()), variable(), 1.0, 0.5);
        LocalChart tr = chart_translate(0.0);
        EndType t = classify_end(d.G, d.Gstar, d.Q_hat, 0.5);
        CHECK(t == (alpha > 0 ? EndType::Snowman : EndType::Hourglass));
        // q0 = -alpha m^2/(1-alpha)^2 with m = 1
        SeriesOptions opt;
        opt.singular_distance = 0.5;
        LocalSeries q = local_series(d.Q_hat, 0.0, opt);
        CHECK(q.leading == -2);
        double expect = -alpha / ((1.0 - alpha) * (1.0 - alpha));
        CHECK(std::abs(q.at(-2) - expect) < 1e-8);
        (void)tr;
    }
}

TEST_CASE("alpha is invariant under rigid motions") {
    FrontData d = front_from_gauss_pair(
        mul(constant(0.3), variable()), variable(), 1.0, 0.5);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int k = 0; k < 20; ++k) {
        cplx a(1.0 + 0.3 * u(rng), 0.3 * u(rng)), b(u(rng), u(rng)),
            c(0.2 * u(rng), 0.2 * u(rng));
        cplx dd = (cplx(1.0) + b * c) / a;
        auto act = [&](const Expr& g) {
            return div(add(mul(constant(a), g), constant(b)),
                       add(mul(constant(c), g), constant(dd)));
        };
        double al = gauss_ratio(act(d.G), act(d.Gstar), 0.4);
        CHECK(std::abs(al - 0.3) < 1e-6);
    }
}

TEST_CASE("alpha is invariant under duality") {
    FrontData d = front_from_gauss_pair(
        mul(constant(0.3), variable()), variable(), 1.0, 0.5);
    CHECK(std::abs(gauss_ratio(d.Gstar, d.G, 0.4) -
                   gauss_ratio(d.G, d.Gstar, 0.4)) < 1e-9);
}

TEST_CASE("multiplicity routes") {
    // G* = z^2, G = 1 + z^3: min{3, 2} = 2
    Expr z = variable();
    FrontData d = front_from_gauss_pair(add(constant(1.0), powi(z, 3)),
                                        powi(z, 2), 1.0, 0.4);
    Puncture p{"origin"};
    p.z = 0.0;
    p.singular_distance = 0.4;
    LocalData loc = localize(d, p);
    MultiplicityResult mr = end_multiplicity(loc, 0.4);
    CHECK(mr.value == 2.0);
    CHECK(mr.routes_agree);
    CHECK(std::abs(mr.order_route - 2.0) < 0.05);
}

TEST_CASE("peach end profile at infinity: alpha = 1, not finite type") {
    FrontData d = build_front(builtin("peach"));
    EndProfile ep = end_profile(d, d.punctures[0]);
    CHECK(ep.regular);
    CHECK(std::abs(ep.alpha - 1.0) < 1e-8);
    CHECK(ep.type == EndType::NotFiniteType);
}

TEST_CASE("fournoid k=1: five ends, multiplicity one each, Osserman equality") {
    SceneSpec s = builtin("fournoid-genus-k");
    FrontData d = build_front(s);
    REQUIRE(d.punctures.size() == 5);
    int co = 0;
    for (const Puncture& p : d.punctures) {
        EndProfile ep = end_profile(d, p);
        CHECK(ep.regular);
        CHECK(ep.multiplicity == 1.0);
        CHECK(ep.weakly_complete);
        ++co;
    }
    OssermanReport rep = osserman_report(s.deg_G, s.deg_Gstar, co, 0);
    CHECK(rep.deg_total == 5.0);
    CHECK(rep.rhs == 5.0);
    CHECK(rep.equality);
}

TEST_CASE("fournoid branch end is a snowman-type end") {
    FrontData d = build_front(builtin("fournoid-genus-k"));
    EndProfile ep = end_profile(d, d.punctures[0]);  // z = 0, branch point
    CHECK(ep.ord_Q == -2);
    CHECK(ep.type == EndType::Snowman);
    CHECK(std::abs(ep.alpha - 2.0 / 3.0) < 1e-7);
}

TEST_CASE("strict inequality for a single-end example") {
    OssermanReport rep = osserman_report(2.0, 1.0, 1, 0);
    CHECK(!rep.equality);
    CHECK(rep.holds);
}

TEST_CASE("csv export has one row per end") {
    FrontData d = build_front(builtin("cylinder"));
    std::vector<EndProfile> eps;
    for (const Puncture& p : d.punctures) eps.push_back(end_profile(d, p));
    std::string csv = end_table_csv(eps);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("cylindrical") != std::string::npos);
}
