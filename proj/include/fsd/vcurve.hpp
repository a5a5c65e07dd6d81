#pragma once

// The boundary curve of the region where Im H > 0: for each x, v(x) is the
// unique y > 0 with F(x, y) = 1 (F strictly decreasing in y), and
// P(x) = Re H(x + i v(x)) is the strictly increasing homeomorphism that
// carries the curve parametrisation onto the real line.

#include <utility>
#include <vector>

#include "fsd/transforms.hpp"

namespace fsd {

struct VSolve {
    double v = 0.0;           // root when found
    double residual = 0.0;    // |F(x + iv) - 1| at the returned v
    bool below_range = false; // F stayed < 1 down to y_floor: certifies v < y_floor
    double y_floor = 0.0;
};

// Bracket by scaling from y = 1 (doubling/halving with escalation), then
// log-bisection plus safeguarded Newton using y dF/dy. Never evaluates
// outside [y_floor, 1e300].
VSolve try_solve_v(const TransformContext& ctx, double x, double tol = 1e-12,
                   double y_floor = 1e-300);
double solve_v(const TransformContext& ctx, double x, double tol = 1e-12);

// Re H(x + i v(x)); throws NumericalError if |Im H| at the solved point
// exceeds 1e-8 (the curve definition forces Im H = 0 there).
double p_map(const TransformContext& ctx, double x, double tol = 1e-12);
double p_map_at(const TransformContext& ctx, double x, double v);

struct CurvePoint {
    double x = 0.0;
    double v = 0.0;
    double xi = 0.0;         // P(x)
    double f_residual = 0.0; // |F - 1| from the v solve
};

CurvePoint curve_point(const TransformContext& ctx, double x, double tol = 1e-12);

// Solve the curve on [x_min, x_max]: n_points uniform in x, optionally
// refined by inserting x-midpoints until consecutive xi spacings differ by
// less than a factor 4 between neighbours (capped at 8x the initial count).
std::vector<CurvePoint> curve_grid(const TransformContext& ctx, double x_min,
                                   double x_max, int n_points, bool refine = true,
                                   int workers = 0, double tol = 1e-12);

// Largest |x| per side where v is still solvable and has decayed to
// <= 1e-3 * max v; returns the recommended curve domain [lo, hi].
std::pair<double, double> default_domain(const TransformContext& ctx);

// F sampled along the half-circle z = r sin(theta) e^{i theta} through 0 and
// i r. The defining property of the curve region: exactly one local minimum
// in theta, located where cos(theta) is strictly inside (-sqrt2/2, sqrt2/2).
struct AngularProfile {
    std::vector<double> theta;
    std::vector<double> value;
    int min_index = -1;
    bool single_min = false;
    double cos_at_min = 0.0;
};

AngularProfile angular_profile(const TransformContext& ctx, double r, int n_theta = 101);

}  // namespace fsd
