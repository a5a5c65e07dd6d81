#pragma once

// Analytic transforms attached to a density factor k (g(t) = |t| k(t)):
//
//   H(z) = z + gamma_k + int g(t)/(z - t) dt          (upper half-plane)
//   F(x, y) = int g(t) / ((x-t)^2 + y^2) dt           so Im H = y (1 - F)
//   C(w) = eta w + a w^2 + w^2 int_{-1}^{1} g/(1-wt) dt
//            + w int_{|t|>1} sign(t) k/(1-wt) dt      (free cumulant transform)
//
// plus the Cauchy-transform oracle: G(zeta) = 1/z* where H(z*) = zeta, found
// by damped Newton with a subordination fallback. The oracle never touches
// the boundary curve machinery, so it cross-checks it independently.

#include <complex>

#include "fsd/levy.hpp"
#include "fsd/quad.hpp"

namespace fsd {

struct TransformContext {
    LevyDensity k;
    double gamma;  // gamma_k, cached at construction
    QuadSpec quad;
};

TransformContext make_context(LevyDensity k, QuadSpec spec = {});

// Preconditions (ConfigError): Im z > 0 for h/f/h_derivative, Im w < 0 for
// the cumulant transform, Im zeta > 0 for the oracle.
std::complex<double> h_transform(const TransformContext& ctx, std::complex<double> z);
double f_transform(const TransformContext& ctx, std::complex<double> z);
std::complex<double> h_derivative(const TransformContext& ctx, std::complex<double> z);

std::complex<double> free_cumulant_transform(const TransformContext& ctx,
                                             const FreeTriplet& triplet,
                                             std::complex<double> w);

// Solves H(z*) = zeta for Im z* > 0; |H(z*) - zeta| <= 1e-9 * max(1, |zeta|).
std::complex<double> invert_h(const TransformContext& ctx, std::complex<double> zeta);
std::complex<double> cauchy_oracle(const TransformContext& ctx, std::complex<double> zeta);

// |z * G(H(z)) - 1| evaluated through the oracle, i.e. the round-trip
// H^{-1}(H(z)) vs z. Small only where H is injective (above the boundary
// curve), which is exactly what the identity asserts.
double identity_residual(const TransformContext& ctx, std::complex<double> z);

}  // namespace fsd
