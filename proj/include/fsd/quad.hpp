#pragma once

// Boundary-integral kernels built from a density factor, with g(t) = |t| k(t):
//
//   poisson_integral   F(x, y)  = int g(t) / ((x-t)^2 + y^2) dt
//   poisson_dlog       y dF/dy  = -2 y^2 int g(t) / ((x-t)^2 + y^2)^2 dt
//   cauchy_integral    int g(t) / (z - t) dt,        z = x + i y
//   cauchy_sq_integral int g(t) / (z - t)^2 dt
//
// Panels split at t = 0, the family knots and the kernel peak t = x. The peak
// neighbourhood is re-parametrised by the exact floating-point offset s = t-x
// on a geometric ladder and the leading g(x) * kernel term is added in closed
// form, so y may be taken arbitrarily small (down to ~1e-300) without
// cancellation noise.

#include <complex>
#include <vector>

#include "fsd/levy.hpp"

namespace fsd {

struct QuadSpec {
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;
    int max_depth = 40;
    int max_panels = 60000;
    std::vector<double> extra_splits{};

    void validate() const;  // ConfigError unless abs_tol>=1e-14, rel_tol>=1e-12, max_depth>=10
};

double poisson_integral(const LevyDensity& k, double x, double y,
                        const QuadSpec& spec = {});
double poisson_dlog(const LevyDensity& k, double x, double y,
                    const QuadSpec& spec = {});
std::complex<double> cauchy_integral(const LevyDensity& k, std::complex<double> z,
                                     const QuadSpec& spec = {});
std::complex<double> cauchy_sq_integral(const LevyDensity& k, std::complex<double> z,
                                        const QuadSpec& spec = {});

}  // namespace fsd
