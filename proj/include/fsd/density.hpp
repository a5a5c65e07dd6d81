#pragma once

// Density curve assembly: sweep the boundary curve x -> (v(x), P(x)), map it
// to (xi, f(xi)) with f = v / (pi (x^2 + v^2)), and run shape diagnostics
// (mass, unimodality, level crossings, independent Cauchy-transform
// cross-check).

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsd/report.hpp"
#include "fsd/transforms.hpp"

namespace fsd {

struct DensityPoint {
    double x = 0.0;   // curve parameter
    double v = 0.0;   // boundary height at x
    double xi = 0.0;  // P(x) + drift, the density's abscissa
    double f = 0.0;   // density value at xi
};

struct DensityCurve {
    std::vector<DensityPoint> pts;  // xi strictly increasing
    double mass = 0.0;              // trapezoid integral of f over xi
    double drift = 0.0;             // horizontal shift baked into xi
    int mode_index = 0;             // argmax of f on the grid

    double f_max() const { return pts[static_cast<size_t>(mode_index)].f; }
    double mode_location() const { return pts[static_cast<size_t>(mode_index)].xi; }
};

struct BuildOptions {
    // Curve-parameter domain [x_min, x_max]; chosen automatically when absent.
    std::optional<std::pair<double, double>> domain;
    int n_points = 513;
    bool refine = true;
    int workers = 0;      // 0 = hardware concurrency
    double drift = 0.0;   // added to every xi
    double mass_tol = 1e-2;
    double solve_tol = 1e-12;
};

// Builds the curve, requires strictly increasing xi, and checks
// |mass - 1| <= mass_tol; on a deficit the domain is widened 4x once before
// giving up. Throws NumericalError when the result is not a usable density.
DensityCurve build_density(const TransformContext& ctx, BuildOptions options = {});

// Piecewise-linear evaluation in xi; zero outside the covered interval.
double interp_density(const DensityCurve& curve, double xi);

// Cumulative trapezoid mass up to xi (exact for the piecewise-linear curve).
double cdf_at(const DensityCurve& curve, double xi);

// Abscissa splitting the curve's own mass in half.
double median(const DensityCurve& curve);

// Golden-section polish of the grid mode; returns the refined point.
DensityPoint refine_mode(const TransformContext& ctx, const DensityCurve& curve,
                         double solve_tol = 1e-12);

// Shape certificates: a single rise/fall sign pattern (flat band
// 1e-12 * f_max) and exactly two crossings of each level in
// {0.25, 0.5, 0.75} * f_max.
ValidationReport check_unimodal(const DensityCurve& curve);

// Number of sign changes of f - level along the grid (points exactly on the
// level carry the preceding sign).
int level_crossings(const DensityCurve& curve, double level);

// moments[m] = trapezoid of xi^m f(xi) for m = 0..order (moments[0] = mass).
std::vector<double> moments_from_density(const DensityCurve& curve, int order);

struct CrossCheckOptions {
    std::vector<double> probes = {1e-3, 1e-4};  // each in (0, 1e-2]
    int stride = 1;                             // sample every stride-th point
    int workers = 0;
};

struct CrossCheck {
    double max_dev = 0.0;  // worst |f_curve - f_extrapolated|
    double xi_at_max = 0.0;
    int samples = 0;
    int failures = 0;  // points where the oracle did not converge (non-fatal)
};

// Recomputes the density at sampled xi by evaluating the measure's Cauchy
// transform just above the real axis (through the inverse of H) and
// extrapolating the probe heights to zero; entirely independent of the
// v/P parametrization used to build the curve.
CrossCheck crossvalidate(const TransformContext& ctx, const DensityCurve& curve,
                         CrossCheckOptions options = {});

// Columns exactly "x,v,xi,f", 17 significant digits.
void write_csv(std::ostream& os, const DensityCurve& curve);
void write_csv_file(const std::string& path, const DensityCurve& curve);

}  // namespace fsd
