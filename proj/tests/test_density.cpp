#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsd/density.hpp"
#include "fsd/errors.hpp"
#include "fsd/vcurve.hpp"

using namespace fsd;

namespace {

TransformContext sym_ctx() { return make_context(make_family("symexp")); }

const DensityCurve& sym_curve() {
    static const DensityCurve curve = [] {
        BuildOptions opt;
        opt.n_points = 257;
        return build_density(sym_ctx(), opt);
    }();
    return curve;
}

}  // namespace

TEST_CASE("the symmetric exponential density normalizes and peaks at 0") {
    const auto& curve = sym_curve();
    CHECK(std::abs(curve.mass - 1.0) <= 1e-2);
    CHECK(curve.drift == 0.0);
    // f(0) from 40-digit evaluation of the parametrization
    CHECK(interp_density(curve, 0.0) ==
          doctest::Approx(0.458344954766275).epsilon(1e-3));
    CHECK(std::abs(curve.mode_location()) <= 0.05);

    const auto mode = refine_mode(sym_ctx(), curve);
    CHECK(std::abs(mode.xi) <= 1e-4);
    CHECK(mode.f == doctest::Approx(0.458344954766275).epsilon(1e-8));

    // second frozen point: xi = P(1), f = v(1)/(pi (1 + v(1)^2))
    CHECK(interp_density(curve, 1.13735482835733) ==
          doctest::Approx(0.154378152989727).epsilon(1e-3));
}

TEST_CASE("unimodality certificates") {
    const auto& curve = sym_curve();
    const auto rep = check_unimodal(curve);
    CHECK(rep.all_pass());
    REQUIRE(rep.find("unimodal") != nullptr);
    REQUIRE(rep.find("crossings_q50") != nullptr);
    for (int i = 1; i <= 5; ++i)
        CHECK(level_crossings(curve, curve.f_max() * i / 6.0) == 2);
    CHECK(level_crossings(curve, 2.0 * curve.f_max()) == 0);
}

TEST_CASE("interpolation, cdf and median") {
    const auto& curve = sym_curve();
    const auto& p = curve.pts;
    CHECK(interp_density(curve, p.front().xi - 1.0) == 0.0);
    CHECK(interp_density(curve, p.back().xi + 1.0) == 0.0);
    const auto& q = p[p.size() / 3];
    CHECK(interp_density(curve, q.xi) == doctest::Approx(q.f).epsilon(1e-14));

    CHECK(cdf_at(curve, p.front().xi) == 0.0);
    CHECK(cdf_at(curve, p.back().xi) == doctest::Approx(curve.mass).epsilon(1e-14));
    CHECK(cdf_at(curve, 1.0) > cdf_at(curve, 0.0));
    const double med = median(curve);
    CHECK(std::abs(med) <= 1e-6);  // even factor
    CHECK(cdf_at(curve, med) == doctest::Approx(0.5 * curve.mass).epsilon(1e-10));
}

TEST_CASE("moments from the density grid") {
    const auto& curve = sym_curve();
    const auto m = moments_from_density(curve, 4);
    REQUIRE(m.size() == 5);
    CHECK(m[0] == doctest::Approx(curve.mass).epsilon(1e-14));
    CHECK(std::abs(m[1]) <= 1e-3);
    CHECK(m[2] == doctest::Approx(2.0).epsilon(5e-3));
    CHECK(std::abs(m[3]) <= 1e-2);
    CHECK(m[4] == doctest::Approx(20.0).epsilon(5e-3));
    CHECK_THROWS_AS(moments_from_density(curve, 9), ConfigError);
    CHECK_THROWS_AS(moments_from_density(curve, -1), ConfigError);
}

TEST_CASE("a truncated domain widens once to recover the mass") {
    BuildOptions opt;
    opt.domain = std::pair{-3.0, 3.0};  // tail mass beyond |x|=3 exceeds 1e-2
    opt.n_points = 129;
    const auto curve = build_density(sym_ctx(), opt);
    CHECK(curve.pts.front().x == doctest::Approx(-12.0).epsilon(1e-12));
    CHECK(curve.pts.back().x == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(std::abs(curve.mass - 1.0) <= 1e-2);

    // an impossible tolerance reports failure rather than looping
    BuildOptions strict;
    strict.domain = std::pair{-2.0, 2.0};
    strict.n_points = 65;
    strict.mass_tol = 1e-6;
    CHECK_THROWS_AS(build_density(sym_ctx(), strict), NumericalError);
    BuildOptions tiny;
    tiny.domain = std::pair{-1.0, 1.0};
    tiny.n_points = 8;
    CHECK_THROWS_AS(build_density(sym_ctx(), tiny), ConfigError);
}

TEST_CASE("drift shifts the abscissa rigidly") {
    BuildOptions opt;
    opt.domain = std::pair{-10.0, 10.0};
    opt.n_points = 65;
    opt.refine = false;
    const auto base = build_density(sym_ctx(), opt);
    opt.drift = 0.7;
    const auto shifted = build_density(sym_ctx(), opt);
    REQUIRE(base.pts.size() == shifted.pts.size());
    CHECK(shifted.drift == 0.7);
    for (size_t i = 0; i < base.pts.size(); ++i) {
        CHECK(shifted.pts[i].xi == doctest::Approx(base.pts[i].xi + 0.7).epsilon(1e-14));
        CHECK(shifted.pts[i].f == base.pts[i].f);
    }
    CHECK(median(shifted) == doctest::Approx(median(base) + 0.7).epsilon(1e-9));
}

TEST_CASE("cross-validation against the inversion oracle") {
    const auto ctx = sym_ctx();
    const auto& curve = sym_curve();
    CrossCheckOptions opt;
    opt.stride = 8;
    const auto cc = crossvalidate(ctx, curve, opt);
    CHECK(cc.samples > 10);
    CHECK(cc.failures == 0);
    CHECK(cc.max_dev <= 1e-3);

    // a single far probe only sees the Poisson-smoothed density; closer
    // probes must strictly improve the agreement
    CrossCheckOptions farp;
    farp.probes = {1e-2};
    farp.stride = 16;
    CrossCheckOptions nearp;
    nearp.probes = {1e-4};
    nearp.stride = 16;
    const double far_dev = crossvalidate(ctx, curve, farp).max_dev;
    const double near_dev = crossvalidate(ctx, curve, nearp).max_dev;
    CHECK(near_dev < far_dev);

    CrossCheckOptions bad;
    bad.probes = {0.5};  // outside (0, 1e-2]
    CHECK_THROWS_AS(crossvalidate(ctx, curve, bad), ConfigError);
    bad = CrossCheckOptions{};
    bad.stride = 0;
    CHECK_THROWS_AS(crossvalidate(ctx, curve, bad), ConfigError);
}

TEST_CASE("csv output is stable and exact") {
    BuildOptions opt;
    opt.domain = std::pair{-10.0, 10.0};
    opt.n_points = 33;
    opt.refine = false;
    opt.mass_tol = 5e-2;  // 33 trapezoid panels; this case is about the csv
    const auto curve = build_density(sym_ctx(), opt);

    std::ostringstream os;
    write_csv(os, curve);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "x,v,xi,f");
    size_t rows = 0;
    while (std::getline(is, line)) {
        double x, v, xi, f;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x, &v, &xi, &f) == 4);
        // 17 significant digits: parsing must reproduce the doubles exactly
        CHECK(x == curve.pts[rows].x);
        CHECK(v == curve.pts[rows].v);
        CHECK(xi == curve.pts[rows].xi);
        CHECK(f == curve.pts[rows].f);
        ++rows;
    }
    CHECK(rows == curve.pts.size());

    const auto path = std::filesystem::temp_directory_path() / "fsd_test_curve.csv";
    write_csv_file(path.string(), curve);
    std::ifstream in(path);
    std::ostringstream file_copy;
    file_copy << in.rdbuf();
    CHECK(file_copy.str() == os.str());
    std::filesystem::remove(path);

    CHECK_THROWS_AS(write_csv_file("/nonexistent_dir_zz/x.csv", curve), ConfigError);
}

TEST_CASE("table factors build sound densities too") {
    const auto tb = make_table({-4.0, -2.0, -1.0, -0.5}, {0.05, 0.3, 0.6, 0.8},
                               {0.5, 1.0, 2.0, 4.0}, {0.9, 0.7, 0.35, 0.06});
    const auto ctx = make_context(tb);
    BuildOptions opt;
    opt.n_points = 97;
    const auto curve = build_density(ctx, opt);
    CHECK(std::abs(curve.mass - 1.0) <= 1e-2);
    CHECK(check_unimodal(curve).all_pass());
}
