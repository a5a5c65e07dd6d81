#pragma once

// Smooth compactly-supported approximants: clamp a density factor to
// [1/n, n] in |t|, average it over an outward shift of size up to 1/n against
// a bump kernel (32-node rule), and add gaussian terms for the semicircular
// weight and the positivity floor. The resulting factor k_n generates a law
// that converges to the one generated by (a, k) as n grows.

#include <vector>

#include "fsd/levy.hpp"

namespace fsd {

// k_n(t) = a n^2 exp(-(n t)^2) + sum_i W_i k0(t + sign(t) u_i / n)
//          + eps exp(-t^2),
// where k0 is `base` held constant inside |t| < 1/n and cut beyond |t| = n,
// and (u_i, W_i) is a normalized 32-node rule for the bump
// exp(-1/(4u(1-u))) on [0, 1]. epsilon_floor < 0 selects the default: 1e-8
// when a == 0 (the shifted clamp alone can vanish on a half-line), 0 when
// a > 0 (the gaussian term already keeps k_n positive).
LevyDensity mollify_k(const LevyDensity& base, double a, int n,
                      double epsilon_floor = -1.0);

// cos-transform of the compactified jump part: a + int cos(st) |t|k(t)/(1+t^2) dt.
double sigma_cos_transform(double a, const LevyDensity& k, double s,
                           double tol = 1e-9);

// max_s |sigma_cos(target) - sigma_cos(0, k_n)| over the probe frequencies;
// the mollified factor carries no atom, so its transform uses a = 0.
double sigma_distance(const FreeTriplet& target, const LevyDensity& k_n,
                      const std::vector<double>& s_values = {0.0, 0.5, 1.0, 2.0, 4.0},
                      double tol = 1e-8);

}  // namespace fsd
