#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "fsd/errors.hpp"
#include "fsd/transforms.hpp"

using namespace fsd;
using cplx = std::complex<double>;

namespace {

TransformContext sym_ctx() { return make_context(make_family("symexp")); }
TransformContext half_ctx() { return make_context(make_family("half-exp")); }

}  // namespace

TEST_CASE("context caches gamma") {
    CHECK(std::abs(sym_ctx().gamma) <= 1e-9);
    CHECK(half_ctx().gamma == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("h transform values and preconditions") {
    const auto ctx = sym_ctx();
    const cplx h = h_transform(ctx, {0.0, 10.0});
    CHECK(std::abs(h.real()) <= 1e-9);
    CHECK(h.imag() == doctest::Approx(9.81022921967).epsilon(1e-9));
    CHECK_THROWS_AS(h_transform(ctx, {1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(h_transform(ctx, {1.0, -1.0}), ConfigError);
}

TEST_CASE("h has the cumulant expansion at infinity") {
    // H(z) = z + kappa_1 + kappa_2/z + kappa_3/z^2 + O(z^-3); for the
    // symmetric exponential factor kappa_1 = kappa_3 = 0, kappa_2 = 2.
    const auto ctx = sym_ctx();
    const double Y = 1e3;
    const cplx z(0.0, Y);
    const cplx tail = h_transform(ctx, z) - z - 2.0 / z;
    CHECK(std::abs(tail) <= 5e-8);  // next term kappa_4/z^3 = 12e-9
}

TEST_CASE("f transform equals the poisson integral") {
    const auto ctx = sym_ctx();
    CHECK(f_transform(ctx, {0.7, 1.3}) ==
          doctest::Approx(poisson_integral(ctx.k, 0.7, 1.3, ctx.quad)).epsilon(1e-12));
}

TEST_CASE("h derivative matches finite differences") {
    const auto ctx = half_ctx();
    const cplx z(0.3, 2.0);
    const cplx h(1e-6, 0.0);
    const cplx fd = (h_transform(ctx, z + h) - h_transform(ctx, z - h)) / (2.0 * h);
    CHECK(std::abs(h_derivative(ctx, z) - fd) <= 1e-6);
}

TEST_CASE("invert_h round-trips points above the curve") {
    const auto ctx = sym_ctx();
    for (const cplx z0 : {cplx(0.5, 1.2), cplx(-2.0, 0.9), cplx(0.0, 50.0)}) {
        const cplx zeta = h_transform(ctx, z0);
        const cplx z1 = invert_h(ctx, zeta);
        CHECK(std::abs(z1 - z0) <= 1e-7 * std::max(1.0, std::abs(z0)));
    }
    CHECK_THROWS_AS(invert_h(ctx, {1.0, -0.5}), ConfigError);
}

TEST_CASE("identity residual is tiny above the curve") {
    const auto ctx = sym_ctx();
    CHECK(identity_residual(ctx, {0.5, 1.2}) <= 1e-8);
    CHECK(identity_residual(ctx, {-3.0, 2.5}) <= 1e-8);
    const auto hctx = half_ctx();
    CHECK(identity_residual(hctx, {1.0, 0.8}) <= 1e-8);
}

TEST_CASE("cauchy oracle agrees with the direct transform far from the support") {
    // For Im zeta large, G(zeta) ~ 1/zeta + m1/zeta^2 + ...
    const auto ctx = sym_ctx();
    const cplx zeta(0.0, 100.0);
    const cplx g = cauchy_oracle(ctx, zeta);
    CHECK(std::abs(g - 1.0 / zeta) <= 1e-3 / std::abs(zeta));
}

TEST_CASE("free cumulant transform matches the cumulant series") {
    // C(w) = sum kappa_j w^j; symexp has kappa = (0, 2, 0, 12, 0, 240, ...).
    const auto ctx = sym_ctx();
    const FreeTriplet triplet = lemma_triplet(ctx.k);
    const cplx w(0.01, -0.01);
    const cplx w2 = w * w;
    const cplx series = 2.0 * w2 + 12.0 * w2 * w2 + 240.0 * w2 * w2 * w2;
    const cplx got = free_cumulant_transform(ctx, triplet, w);
    CHECK(std::abs(got - series) <= 1e-10);
    CHECK_THROWS_AS(free_cumulant_transform(ctx, triplet, cplx(0.01, 0.01)),
                    ConfigError);
}

TEST_CASE("semicircular weight enters the transform quadratically") {
    const auto ctx = sym_ctx();
    const FreeTriplet base = lemma_triplet(ctx.k);
    const FreeTriplet shifted(1.5, ctx.k, base.eta);
    const cplx w(0.02, -0.015);
    const cplx diff = free_cumulant_transform(ctx, shifted, w) -
                      free_cumulant_transform(ctx, base, w);
    CHECK(std::abs(diff - 1.5 * w * w) <= 1e-12);
}
