#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fsd/errors.hpp"
#include "fsd/levy.hpp"

using namespace fsd;

namespace {

LevyDensity symexp() { return make_family("symexp", {{"lambda", 1.0}, {"rate", 1.0}}); }
LevyDensity halfexp() {
    return make_family("half-exp", {{"lambda", 1.0}, {"rate", 1.0}, {"eps", 1e-8}});
}
LevyDensity gauss11() { return make_family("gauss-scaled", {{"a", 1.0}, {"n", 1.0}}); }

LevyDensity monotone_table() {
    return make_table({-4.0, -2.0, -1.0, -0.5}, {0.05, 0.3, 0.6, 0.8},
                      {0.5, 1.0, 2.0, 4.0}, {0.9, 0.7, 0.35, 0.06});
}

}  // namespace

TEST_CASE("family evaluators match their formulas") {
    const auto se = symexp();
    CHECK(se(0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(se(-2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(se.derivative(-0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(se.derivative(0.5) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-14));
    REQUIRE(se.has_second_derivative());
    CHECK(se.second_derivative(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    const auto g = make_family("gauss-scaled", {{"a", 1.0}, {"n", 4.0}});
    CHECK(g(0.25) == doctest::Approx(16.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(g(-0.25) == g(0.25));

    const auto he = halfexp();
    CHECK(he(1.0) == doctest::Approx(std::exp(-1.0) + 1e-8 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(he(-1.0) == doctest::Approx(1e-8 * std::exp(-1.0)).epsilon(1e-14));

    const auto c = make_family("cauchy", {{"scale", 2.0}});
    CHECK(c(2.0) == doctest::Approx(1.0 / 3.14159265358979323846).epsilon(1e-14));
    CHECK(c(-0.5) == doctest::Approx(4.0 / 3.14159265358979323846).epsilon(1e-14));
}

TEST_CASE("family construction rejects bad input") {
    CHECK_THROWS_AS(make_family("nope"), ConfigError);
    CHECK_THROWS_AS(make_family("symexp", {{"lambda", 1.0}, {"bogus", 2.0}}), ConfigError);
    CHECK_THROWS_AS(make_family("symexp", {{"lambda", 0.0}}), ConfigError);
    CHECK_THROWS_AS(make_family("symexp", {{"rate", -1.0}}), ConfigError);
    CHECK_THROWS_AS(
        make_family("gauss-scaled", {{"a", std::numeric_limits<double>::infinity()}}),
        ConfigError);
    CHECK_THROWS_AS(make_family("half-exp", {{"eps", -1e-9}}), ConfigError);
    CHECK_THROWS_AS(make_family("cauchy", {{"scale", 0.0}}), ConfigError);
    CHECK_THROWS_AS(make_family("table"), ConfigError);
    CHECK_THROWS_AS(make_family("mollified"), ConfigError);
}

TEST_CASE("table factors interpolate, clamp inside, extend exponentially") {
    const auto tb = make_table({-2.0, -1.0}, {0.25, 0.5}, {1.0, 2.0}, {1.0, 0.5});
    CHECK(tb(1.5) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(tb(0.5) == doctest::Approx(1.0).epsilon(1e-14));   // held constant inside
    CHECK(tb(-0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tb(-1.5) == doctest::Approx(0.375).epsilon(1e-14));
    // beyond the last knot: value/slope-matched exponential
    CHECK(tb(3.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(tb(-3.0) == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-12));
    // continuity at the outer knots
    CHECK(tb(2.0 + 1e-12) == doctest::Approx(tb(2.0)).epsilon(1e-9));
    CHECK(tb.tail_moment_bound(5.0, 1) < 1.0);
    CHECK(std::isfinite(tb.tail_moment_bound(5.0, 1)));
}

TEST_CASE("table construction errors") {
    CHECK_THROWS_AS(make_table({}, {}, {1.0}, {1.0}), ConfigError);          // one knot
    CHECK_THROWS_AS(make_table({}, {}, {1.0, 2.0}, {1.0}), ConfigError);     // mismatch
    CHECK_THROWS_AS(make_table({}, {}, {2.0, 1.0}, {1.0, 0.5}), ConfigError);  // order
    CHECK_THROWS_AS(make_table({}, {}, {1.0, 2.0}, {1.0, -0.5}), ConfigError); // negative
    CHECK_THROWS_AS(make_table({1.0, 2.0}, {1.0, 0.5}, {}, {}), ConfigError);  // t_neg > 0
    CHECK_THROWS_AS(make_table({}, {}, {}, {}), ConfigError);                  // empty
    // non-monotone data is accepted here and flagged by validation instead
    const auto bad = make_table({}, {}, {0.5, 1.0, 2.0}, {0.2, 0.9, 0.1});
    const auto rep = validate_conditions(bad);
    CHECK_FALSE(rep.all_pass());
    REQUIRE(rep.find("monotone_pos") != nullptr);
    CHECK_FALSE(rep.find("monotone_pos")->pass);
}

TEST_CASE("built-ins pass the defining-condition checks") {
    for (const auto& k : {symexp(), gauss11(), halfexp(), monotone_table()}) {
        const auto rep = validate_conditions(k);
        INFO(k.describe());
        CHECK(rep.all_pass());
    }
}

TEST_CASE("selfdecomposability residual is nonnegative for monotone factors") {
    for (const auto& k : {symexp(), gauss11(), halfexp(), monotone_table()}) {
        for (double c : {0.1, 0.5, 0.9}) {
            INFO(k.describe() << " c=" << c);
            CHECK(selfdecomposability_residual(k, c) >= -1e-12);
        }
    }
    CHECK_THROWS_AS(selfdecomposability_residual(symexp(), 1.5), ConfigError);
}

TEST_CASE("gamma and the lemma drift") {
    CHECK(std::abs(gamma_k(symexp())) <= 1e-10);
    CHECK(gamma_k(halfexp()) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(gamma_k(gauss11())) <= 1e-10);
    CHECK(std::abs(lemma_eta(symexp())) <= 1e-12);
    CHECK(lemma_eta(halfexp()) ==
          doctest::Approx(0.63212055882855768).epsilon(1e-10));  // 1 - 1/e
    // scale/(pi|t|) has a non-integrable folded tail
    CHECK_THROWS_AS(gamma_k(make_family("cauchy")), QuadratureError);
}

TEST_CASE("dilation rescales the factor") {
    const auto kc = dilate(symexp(), 0.5);
    CHECK(kc(1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(kc.derivative(1.0) == doctest::Approx(-2.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(std::isfinite(kc.tail_moment_bound(3.0, 1)));
    CHECK(kc.tail_moment_bound(3.0, 1) > 0.0);
    CHECK_THROWS_AS(dilate(symexp(), 0.0), ConfigError);
    CHECK_THROWS_AS(dilate(symexp(), -2.0), ConfigError);
}

TEST_CASE("sums combine evaluators linearly") {
    const auto s = make_sum({{0.5, symexp()}, {2.0, gauss11()}});
    const double t = 0.7;
    CHECK(s(t) == doctest::Approx(0.5 * symexp()(t) + 2.0 * gauss11()(t)).epsilon(1e-14));
    CHECK(s.derivative(t) ==
          doctest::Approx(0.5 * symexp().derivative(t) + 2.0 * gauss11().derivative(t))
              .epsilon(1e-14));
    CHECK(validate_conditions(s).all_pass());
    CHECK_THROWS_AS(make_sum({}), ConfigError);
    CHECK_THROWS_AS(make_sum({{-1.0, symexp()}}), ConfigError);
}

TEST_CASE("bound queries validate their order") {
    const auto k = symexp();
    CHECK_THROWS_AS(k.envelope_bound(3), ConfigError);
    CHECK_THROWS_AS(k.tail_moment_bound(1.0, 17), ConfigError);
    CHECK(k.envelope_bound(0) > 0.0);
    CHECK(k.envelope_bound(2) > 0.0);
    CHECK(k.tail_moment_bound(10.0, -1) < 1e-2);
}

TEST_CASE("triplet validation and pair round-trip") {
    CHECK_THROWS_AS(FreeTriplet(-1.0, symexp(), 0.0), ConfigError);
    CHECK_THROWS_AS(FreeTriplet(0.0, symexp(), std::nan("")), ConfigError);

    const auto t = lemma_triplet(symexp());
    CHECK(t.a == 0.0);
    CHECK(std::abs(t.eta) <= 1e-12);
    CHECK(validate_triplet(t).all_pass());

    const auto th = lemma_triplet(halfexp());
    const auto pair = triplet_to_pair(th);
    CHECK(pair.sigma_atom == th.a);
    const auto back = pair_to_triplet(pair);
    CHECK(back.eta == doctest::Approx(th.eta).epsilon(1e-9));
    // even factor: compactified and truncation drifts coincide
    CHECK(std::abs(triplet_to_pair(lemma_triplet(symexp())).gamma) <= 1e-9);
    // sigma density vanishes at the atom location and is positive elsewhere
    CHECK(pair.sigma_density(0.0) == 0.0);
    CHECK(pair.sigma_density(1.0) > 0.0);
}

TEST_CASE("descriptions and family names") {
    CHECK(family_name(make_family("half-exp").family()) == "half-exp");
    CHECK(symexp().describe().find("symexp") != std::string::npos);
    CHECK(monotone_table().family() == Family::table);
    const auto copy = symexp();
    const LevyDensity copy2 = copy;  // value semantics
    CHECK(copy2(1.0) == copy(1.0));
}

TEST_CASE("sample grid shape") {
    const auto pts = SampleGrid{}.points();
    REQUIRE(pts.size() == 800);
    CHECK(pts.front() == doctest::Approx(-1e3));
    CHECK(pts.back() == doctest::Approx(1e3));
    for (size_t i = 0; i + 1 < pts.size(); ++i) CHECK(pts[i] < pts[i + 1]);
    const SampleGrid bad{-1.0, 1.0, 10};
    CHECK_THROWS_AS(bad.points(), ConfigError);
}
