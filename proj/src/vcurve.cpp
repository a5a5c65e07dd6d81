#include "fsd/vcurve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "fsd/detail/parallel.hpp"
#include "fsd/errors.hpp"

namespace fsd {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

double geo_mid(double a, double b) { return std::sqrt(a) * std::sqrt(b); }

// Loosened budget for the Newton derivative: its accuracy only steers the
// step, never the accepted residual.
QuadSpec derivative_spec(const QuadSpec& base) {
    QuadSpec d = base;
    d.abs_tol = std::max(d.abs_tol, 1e-9);
    d.rel_tol = std::max(d.rel_tol, 1e-6);
    return d;
}

}  // namespace

VSolve try_solve_v(const TransformContext& ctx, double x, double tol, double y_floor) {
    if (!(tol > 0.0) || !std::isfinite(x))
        throw ConfigError("solve_v: requires finite x and tol > 0");
    y_floor = std::max(y_floor, 1e-300);
    auto F = [&](double y) { return poisson_integral(ctx.k, x, y, ctx.quad); };

    // Bracket [ylo, yhi] with F(ylo) >= 1 >= F(yhi), scaling away from y = 1
    // with an escalating factor (F is strictly decreasing in y).
    double ylo = 0.0, yhi = 0.0;
    const double f1 = F(1.0);
    if (f1 >= 1.0) {
        double y = 1.0, fac = 2.0;
        for (int step = 1;; ++step) {
            const double yn = y * fac;
            if (yn > 1e300)
                throw SolverError("solve_v: no root below y=1e300 at x=" + fmt(x));
            if (F(yn) <= 1.0) {
                ylo = y;
                yhi = yn;
                break;
            }
            y = yn;
            if (step % 8 == 0) fac *= 2.0;
        }
    } else {
        double y = 1.0, fac = 0.5;
        for (int step = 1;; ++step) {
            double yn = y * fac;
            const bool at_floor = yn <= y_floor;
            if (at_floor) yn = y_floor;
            const double fn = F(yn);
            if (fn >= 1.0) {
                ylo = yn;
                yhi = y;
                break;
            }
            if (at_floor) {
                // F < 1 on the whole admissible range: v, if any, is below it.
                return {yn, std::abs(fn - 1.0), true, y_floor};
            }
            y = yn;
            if (step % 8 == 0) fac *= 0.5;
        }
    }

    // Log-bisection down to a narrow relative bracket, then safeguarded
    // Newton in u = log y (dF/du = y dF/dy stays O(1) even for tiny v).
    while (yhi > 1.01 * ylo) {
        const double ym = geo_mid(ylo, yhi);
        if (ym <= ylo || ym >= yhi) break;
        (F(ym) >= 1.0 ? ylo : yhi) = ym;
    }
    const QuadSpec dspec = derivative_spec(ctx.quad);
    double y = geo_mid(ylo, yhi);
    double fy = F(y);
    double best_y = y, best_r = std::abs(fy - 1.0);
    for (int it = 0; it < 60 && best_r > tol; ++it) {
        (fy >= 1.0 ? ylo : yhi) = y;
        // Collapse is judged relative to y itself: v spans hundreds of orders
        // of magnitude, so an absolute floor would trip instantly for tiny v.
        const double width = yhi - ylo;
        if (width <= 8.0 * std::numeric_limits<double>::epsilon() * ylo) break;
        const double dfdu = poisson_dlog(ctx.k, x, y, dspec);
        double yn = dfdu < 0.0 ? y * std::exp(-(fy - 1.0) / dfdu)
                               : std::numeric_limits<double>::quiet_NaN();
        if (!(yn > ylo && yn < yhi)) yn = geo_mid(ylo, yhi);
        y = yn;
        fy = F(y);
        const double r = std::abs(fy - 1.0);
        if (r < best_r) {
            best_r = r;
            best_y = y;
        }
    }
    // The residual target is the contract; a small overshoot is accepted when
    // the bracket has collapsed to the quadrature's own granularity.
    if (best_r <= 100.0 * tol) return {best_y, best_r, false, y_floor};
    throw SolverError("solve_v: residual " + fmt(best_r) + " above tolerance at x=" +
                      fmt(x));
}

double solve_v(const TransformContext& ctx, double x, double tol) {
    const VSolve s = try_solve_v(ctx, x, tol);
    if (s.below_range)
        throw SolverError("solve_v: F stays below 1 down to y=" + fmt(s.y_floor) +
                          " at x=" + fmt(x) + " (v underflows the double range)");
    return s.v;
}

double p_map_at(const TransformContext& ctx, double x, double v) {
    const std::complex<double> h = h_transform(ctx, {x, v});
    // H itself is only known to ~rel_tol * |H|, so the on-curve gate has to
    // scale with the magnitude of the point.
    const double gate = 1e-8 * (1.0 + std::abs(x) + std::abs(h.real()));
    if (!(std::abs(h.imag()) <= gate))
        throw NumericalError("p_map: Im H = " + fmt(h.imag()) + " at x=" + fmt(x) +
                             " exceeds " + fmt(gate) +
                             "; the point is off the boundary curve");
    return h.real();
}

double p_map(const TransformContext& ctx, double x, double tol) {
    return p_map_at(ctx, x, solve_v(ctx, x, tol));
}

CurvePoint curve_point(const TransformContext& ctx, double x, double tol) {
    const VSolve s = try_solve_v(ctx, x, tol);
    if (s.below_range)
        throw SolverError("curve_point: v underflows at x=" + fmt(x) +
                          "; shrink the x-domain");
    return {x, s.v, p_map_at(ctx, x, s.v), s.residual};
}

std::vector<CurvePoint> curve_grid(const TransformContext& ctx, double x_min,
                                   double x_max, int n_points, bool refine,
                                   int workers, double tol) {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
        throw ConfigError("curve_grid: requires finite x_min < x_max");
    if (n_points < 16) throw ConfigError("curve_grid: n_points must be >= 16");

    std::vector<double> xs(n_points);
    for (int i = 0; i < n_points; ++i)
        xs[i] = x_min + (x_max - x_min) * i / (n_points - 1.0);

    std::vector<CurvePoint> pts(xs.size());
    auto solve_into = [&](const std::vector<double>& x_new, std::vector<CurvePoint>& out) {
        out.resize(x_new.size());
        detail::parallel_for_index(x_new.size(), workers,
                                   [&](size_t i) { out[i] = curve_point(ctx, x_new[i], tol); });
    };
    solve_into(xs, pts);

    const size_t cap = 8 * static_cast<size_t>(n_points);
    const double span = x_max - x_min;
    for (int round = 0; refine && round < 24 && pts.size() < cap; ++round) {
        // Mark the larger gap of any adjacent pair whose xi spacing ratio
        // exceeds 4; insert the x-midpoint of each marked gap.
        std::set<size_t> marked;
        for (size_t i = 0; i + 2 < pts.size(); ++i) {
            const double a = pts[i + 1].xi - pts[i].xi;
            const double b = pts[i + 2].xi - pts[i + 1].xi;
            if (!(a > 0.0) || !(b > 0.0)) continue;  // builder flags later
            if (std::max(a, b) > 4.0 * std::min(a, b)) marked.insert(a > b ? i : i + 1);
        }
        std::vector<double> x_new;
        for (size_t gap : marked) {
            const double xm = 0.5 * (pts[gap].x + pts[gap + 1].x);
            if (pts[gap + 1].x - pts[gap].x < 1e-9 * span) continue;
            if (pts.size() + x_new.size() >= cap) break;
            x_new.push_back(xm);
        }
        if (x_new.empty()) break;
        std::vector<CurvePoint> fresh;
        solve_into(x_new, fresh);
        pts.insert(pts.end(), fresh.begin(), fresh.end());
        std::sort(pts.begin(), pts.end(),
                  [](const CurvePoint& l, const CurvePoint& r) { return l.x < r.x; });
    }
    return pts;
}

std::pair<double, double> default_domain(const TransformContext& ctx) {
    const double probe_tol = 1e-10;
    const double probe_floor = 1e-280;
    auto probe = [&](double x) { return try_solve_v(ctx, x, probe_tol, probe_floor); };

    double lm = 4.0, lp = 4.0;  // current half-widths, left and right
    double vmax = 0.0;
    for (int round = 0; round < 32; ++round) {
        for (int i = 0; i <= 32; ++i) {
            const double x = -lm + (lp + lm) * i / 32.0;
            const VSolve s = probe(x);
            if (!s.below_range) vmax = std::max(vmax, s.v);
        }
        bool grew = false;
        const VSolve sp = probe(lp);
        if (!sp.below_range && sp.v > 1e-3 * vmax && lp < 1e9) {
            lp *= 2.0;
            grew = true;
        }
        const VSolve sm = probe(-lm);
        if (!sm.below_range && sm.v > 1e-3 * vmax && lm < 1e9) {
            lm *= 2.0;
            grew = true;
        }
        if (!grew) break;
    }
    if (vmax == 0.0)
        throw SolverError("default_domain: v is not solvable anywhere in the scan box");

    // Walk edges inward onto the solvable set (support cliffs underflow v).
    auto shrink = [&](double l, int sign) {
        if (!probe(sign * l).below_range) return l;
        double lo = 0.0, hi = l;
        for (int i = 0; i < 80 && hi - lo > 1e-9 * l; ++i) {
            const double mid = 0.5 * (lo + hi);
            (probe(sign * mid).below_range ? hi : lo) = mid;
        }
        return lo;
    };
    return {-shrink(lm, -1), shrink(lp, +1)};
}

AngularProfile angular_profile(const TransformContext& ctx, double r, int n_theta) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("angular_profile: r must be > 0");
    if (n_theta < 11) throw ConfigError("angular_profile: n_theta must be >= 11");
    const double pi = 3.14159265358979323846;
    AngularProfile prof;
    prof.theta.resize(n_theta);
    prof.value.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) {
        const double th = pi * (j + 1) / (n_theta + 1);
        const double s = std::sin(th);
        prof.theta[j] = th;
        prof.value[j] = poisson_integral(ctx.k, r * s * std::cos(th), r * s * s, ctx.quad);
    }
    prof.min_index = static_cast<int>(
        std::min_element(prof.value.begin(), prof.value.end()) - prof.value.begin());
    prof.cos_at_min = std::cos(prof.theta[prof.min_index]);

    // Sign pattern of consecutive differences with a flatness band; a single
    // minimum means exactly one -,+ transition and no +,- transition.
    const double flat = 1e-12 * (1.0 + std::abs(prof.value[prof.min_index]));
    std::vector<int> signs;
    for (int j = 0; j + 1 < n_theta; ++j) {
        const double d = prof.value[j + 1] - prof.value[j];
        const int s = std::abs(d) <= flat ? 0 : (d > 0.0 ? 1 : -1);
        if (s != 0 && (signs.empty() || signs.back() != s)) signs.push_back(s);
    }
    prof.single_min = signs == std::vector<int>{-1, 1};
    return prof;
}

}  // namespace fsd
