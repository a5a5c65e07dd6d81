#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fsd/cumulants.hpp"
#include "fsd/errors.hpp"

using namespace fsd;

namespace {

FreeTriplet sym_triplet() { return lemma_triplet(make_family("symexp")); }

}  // namespace

TEST_CASE("symmetric exponential cumulants are 2*(m-1)! at even orders") {
    const auto kappa = cumulants_from_k(sym_triplet(), 12);
    REQUIRE(kappa.size() == 12);
    CHECK(std::abs(kappa[0]) <= 1e-9);
    CHECK(std::abs(kappa[2]) <= 1e-9);
    CHECK(std::abs(kappa[4]) <= 1e-8);
    CHECK(kappa[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(kappa[3] == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(kappa[5] == doctest::Approx(240.0).epsilon(1e-9));
    CHECK(kappa[7] == doctest::Approx(10080.0).epsilon(1e-8));
    CHECK(kappa[9] == doctest::Approx(725760.0).epsilon(1e-8));
    CHECK(kappa[11] == doctest::Approx(79833600.0).epsilon(1e-7));
}

TEST_CASE("one-sided factor cumulants") {
    // k = e^{-t} on t>0 plus the 1e-8 gaussian floor; with the lemma drift,
    // kappa_1 = gamma = 1 and kappa_m ~ (m-1)!.
    const auto t = lemma_triplet(make_family("half-exp"));
    const auto kappa = cumulants_from_k(t, 4);
    CHECK(kappa[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(kappa[1] == doctest::Approx(1.0 + 1e-8).epsilon(1e-8));
    CHECK(kappa[2] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(kappa[3] == doctest::Approx(6.0 + 1e-8).epsilon(1e-8));

    // explicit drift enters kappa_1 linearly: eta + int_{|t|>1} sign(t) k
    const FreeTriplet shifted(0.0, t.k, 5.0);
    const auto ks = cumulants_from_k(shifted, 1);
    CHECK(ks[0] == doctest::Approx(5.0 + std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("the semicircular weight enters kappa_2 only") {
    const auto g = make_family("gauss-scaled", {{"a", 3.0}, {"n", 2.0}});
    const auto kappa = cumulants_from_k(lemma_triplet(g), 4);
    // int |t| a n^2 e^{-(nt)^2} dt = a exactly; kappa_4 = a/n^2
    CHECK(kappa[1] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(kappa[3] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(std::abs(kappa[0]) <= 1e-10);

    const FreeTriplet with_atom(1.5, make_family("symexp"), 0.0);
    const auto ka = cumulants_from_k(with_atom, 2);
    CHECK(ka[1] == doctest::Approx(3.5).epsilon(1e-9));
}

TEST_CASE("requests outside the supported range are rejected") {
    CHECK_THROWS_AS(cumulants_from_k(sym_triplet(), 13), ConfigError);
    CHECK_THROWS_AS(cumulants_from_k(sym_triplet(), 0), ConfigError);
    CHECK_THROWS_AS(cumulants_from_k(sym_triplet(), 4, -1.0), ConfigError);
    // scale/(pi|t|) has no integrable moments at all
    const FreeTriplet heavy(0.0, make_family("cauchy"), 0.0);
    CHECK_THROWS_AS(cumulants_from_k(heavy, 2), NumericalError);
}

TEST_CASE("moment recursion reproduces closed-form families") {
    // kappa = (0,1,0,...): Catalan moments 1, 0, 1, 0, 2, 0, 5, 0, 14
    const auto cat = moments_from_cumulants({0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, 8);
    const std::vector<double> want{1, 0, 1, 0, 2, 0, 5, 0, 14};
    REQUIRE(cat.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i)
        CHECK(cat[i] == doctest::Approx(want[i]).epsilon(1e-12));

    // all-ones cumulants: free Poisson moments 1, 1, 2, 5, 14
    const auto fp = moments_from_cumulants({1.0, 1.0, 1.0, 1.0}, 4);
    CHECK(fp[1] == doctest::Approx(1.0));
    CHECK(fp[2] == doctest::Approx(2.0));
    CHECK(fp[3] == doctest::Approx(5.0));
    CHECK(fp[4] == doctest::Approx(14.0));

    // symexp: m_2 = kappa_2 = 2, m_4 = kappa_4 + 2 kappa_2^2 = 20
    const auto m = moments_from_cumulants(cumulants_from_k(sym_triplet(), 4), 4);
    CHECK(m[2] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(m[4] == doctest::Approx(20.0).epsilon(1e-9));

    CHECK_THROWS_AS(moments_from_cumulants({1.0}, 2), ConfigError);
    CHECK_THROWS_AS(moments_from_cumulants({}, -1), ConfigError);
}
