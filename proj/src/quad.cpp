#include "fsd/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsd/detail/adaptive.hpp"
#include "fsd/errors.hpp"

namespace fsd {

namespace {

using cplx = std::complex<double>;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Truncation radius T = |x| + delta such that the remaining tail, bounded by
// tail_scale * int_{|t|>T} |t|k / max(delta, y)^dpow, fits in `tol`.
double choose_radius(const LevyDensity& k, double ax, double y, int dpow,
                     double tail_scale, double tol, const char* what) {
    double delta = 1.0;
    double bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        const double T = ax + delta;
        bound = tail_scale * k.tail_moment_bound(T, 1) /
                std::pow(std::max(delta, y), dpow);
        if (bound <= tol) return T;
        delta *= 2.0;
    }
    throw QuadratureError(std::string(what) + ": tail mass of " + k.describe() +
                              " does not decay fast enough to truncate",
                          0.0, bound);
}

std::vector<double> zone_nodes(double lo, double hi, const LevyDensity& k,
                               const QuadSpec& spec) {
    std::vector<double> nodes{lo, hi};
    auto add = [&](double v) {
        if (v > lo && v < hi) nodes.push_back(v);
    };
    add(0.0);
    for (double b : k.breakpoints()) add(b);
    for (double b : spec.extra_splits) add(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

// Geometric offset ladder s in [sJ, W] (finest panels nearest the peak), with
// family knots that fall inside the zone as extra boundaries.
std::vector<double> ladder_nodes(double W, double sJ, double x, int side,
                                 const LevyDensity& k) {
    std::vector<double> nodes{sJ, W};
    for (double s = 0.5 * W; s > 4.0 * sJ; s *= 0.5) nodes.push_back(s);
    for (double b : k.breakpoints()) {
        const double off = side > 0 ? b - x : x - b;
        if (off > sJ && off < W) nodes.push_back(off);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

// One-sided slope of g(t) = |t| k(t) just to the `dir` side of t0.
double g_side_slope(const LevyDensity& k, double t0, int dir) {
    const double td = t0 + dir * 4.0 * kEps * (1.0 + std::abs(t0));
    return std::copysign(1.0, td) * k(td) + std::abs(td) * k.derivative(td);
}

// 0.5*log(1 + (s/y)^2), overflow-safe.
double half_log1p_sq(double s, double y) {
    const double r = s / y;
    if (r < 1e8) return 0.5 * std::log1p(r * r);
    return std::log(s) - std::log(y);
}

struct PeakGeometry {
    double T;   // truncation radius
    double W;   // peak zone half-width
    double sJ;  // innermost resolved offset; |s| < sJ handled in closed form
};

PeakGeometry make_geometry(const LevyDensity& k, double x, double y,
                           const QuadSpec& spec, int dpow, double tail_scale,
                           const char* what) {
    const double ax = std::abs(x);
    const double T =
        choose_radius(k, ax, y, dpow, tail_scale, 0.25 * spec.abs_tol, what);
    const double W = std::min(0.125 * (1.0 + ax), 0.5 * (T - ax));
    // sJ balances the quadratic error of the closed-form inner zone
    // (~ g'' sJ^3 / y^2) against ladder length; floored at the offset scale
    // below which t = x + s no longer moves in doubles.
    double sJ = std::max(1e-5 * std::cbrt(y * y), 512.0 * kEps * (1.0 + ax));
    sJ = std::min(sJ, 0.25 * W);
    return {T, W, sJ};
}

// Shared evaluation: plain zones in t, peak ladders in exact offsets, plus
// the closed-form model g(x) * int kern + one-sided linear inner-zone terms
// supplied by `local`. `kern(d)` is the kernel as a function of d = x - t.
template <class Val, class Kern, class Local>
Val peak_kernel(const LevyDensity& k, double x, double y, const QuadSpec& spec,
                int dpow, double tail_scale, Kern kern, Local local,
                const char* what) {
    spec.validate();
    if (!std::isfinite(x) || !(y > 0.0) || !std::isfinite(y))
        throw ConfigError(std::string(what) + ": requires finite x and y > 0");

    const PeakGeometry geo = make_geometry(k, x, y, spec, dpow, tail_scale, what);
    auto g = [&k](double t) { return std::abs(t) * k(t); };
    const double g0 = g(x);
    const double gp = g_side_slope(k, x, +1);
    const double gm = g_side_slope(k, x, -1);

    std::vector<detail::Segment<Val>> segs;
    auto plain_f = [g, kern, x](double t) -> Val { return g(t) * kern(x - t); };
    if (-geo.T < x - geo.W)
        segs.push_back({plain_f, zone_nodes(-geo.T, x - geo.W, k, spec)});
    if (x + geo.W < geo.T)
        segs.push_back({plain_f, zone_nodes(x + geo.W, geo.T, k, spec)});
    // Ladders parametrised by the requested offset; the evaluated point is
    // snapped to the exact representable offset so the kernel argument never
    // suffers cancellation against |x|.
    auto right_f = [g, g0, kern, x](double s) -> Val {
        const double t = x + s;
        const double se = t - x;
        if (se == 0.0) return Val{};
        return (g(t) - g0) * kern(-se);
    };
    auto left_f = [g, g0, kern, x](double s) -> Val {
        const double t = x - s;
        const double se = x - t;
        if (se == 0.0) return Val{};
        return (g(t) - g0) * kern(se);
    };
    segs.push_back({right_f, ladder_nodes(geo.W, geo.sJ, x, +1, k)});
    segs.push_back({left_f, ladder_nodes(geo.W, geo.sJ, x, -1, k)});

    // The closed-form part can dominate by hundreds of orders (it carries the
    // pi g(x)/y blow-up), so the segment budget is relative to the whole
    // result, not just the numerically integrated remainder.
    const Val local_val = local(g0, gp, gm, geo.W, geo.sJ);
    detail::PanelBudget budget{
        0.5 * spec.abs_tol + 0.5 * spec.rel_tol * std::abs(local_val),
        0.5 * spec.rel_tol, spec.max_depth, spec.max_panels};
    const auto res = detail::integrate_segments(segs, budget, what);
    return res.value + local_val;
}

}  // namespace

void QuadSpec::validate() const {
    if (!(abs_tol >= 1e-14) || !(rel_tol >= 1e-12) || max_depth < 10 ||
        max_panels < 100)
        throw ConfigError(
            "QuadSpec: needs abs_tol >= 1e-14, rel_tol >= 1e-12, max_depth >= 10, "
            "max_panels >= 100");
    for (double s : extra_splits)
        if (!std::isfinite(s)) throw ConfigError("QuadSpec: non-finite split point");
}

double poisson_integral(const LevyDensity& k, double x, double y,
                        const QuadSpec& spec) {
    auto kern = [y](double d) { return 1.0 / (d * d + y * y); };
    auto local = [y](double g0, double gp, double gm, double W, double sJ) {
        // int_{-W}^{W} ds/(s^2+y^2) = 2 atan(W/y)/y;
        // inner kink term int_{|s|<sJ} (g-g0) kern = (gp-gm) * L(sJ, y).
        double v = (gp - gm) * half_log1p_sq(sJ, y);
        if (g0 > 0.0) v += g0 * 2.0 * std::atan2(W, y) / y;
        return v;
    };
    return peak_kernel<double>(k, x, y, spec, 2, 1.0, kern, local,
                               "poisson_integral");
}

double poisson_dlog(const LevyDensity& k, double x, double y,
                    const QuadSpec& spec) {
    const double y2 = y * y;
    auto kern = [y2](double d) {
        const double q = d * d + y2;
        return -2.0 * y2 / (q * q);
    };
    auto local = [y, y2](double g0, double gp, double gm, double W, double sJ) {
        double v = -(gp - gm) * sJ * sJ / (sJ * sJ + y2);
        if (g0 > 0.0)
            v += -2.0 * (g0 * W / (W * W + y2) + (g0 / y) * std::atan2(W, y));
        return v;
    };
    return peak_kernel<double>(k, x, y, spec, 4, 2.0 * y2, kern, local,
                               "poisson_dlog");
}

std::complex<double> cauchy_integral(const LevyDensity& k, std::complex<double> z,
                                     const QuadSpec& spec) {
    const double y = z.imag();
    auto kern = [y](double d) { return 1.0 / cplx(d, y); };
    auto local = [y](double g0, double gp, double gm, double W, double sJ) -> cplx {
        const cplx liy = std::log(cplx(0.0, y));
        // int_0^{sJ} s/(-s+iy) ds and int_{-sJ}^{0} s/(-s+iy) ds, exactly.
        const cplx right = -sJ - cplx(0.0, y) * (std::log(cplx(-sJ, y)) - liy);
        const cplx left = -(sJ - cplx(0.0, y) * (std::log(cplx(sJ, y)) - liy));
        cplx v = gp * right + gm * left;
        if (g0 > 0.0) v += g0 * std::log(cplx(W, y) / cplx(-W, y));
        return v;
    };
    return peak_kernel<cplx>(k, z.real(), y, spec, 1, 1.0, kern, local,
                             "cauchy_integral");
}

std::complex<double> cauchy_sq_integral(const LevyDensity& k, std::complex<double> z,
                                        const QuadSpec& spec) {
    const double y = z.imag();
    auto kern = [y](double d) {
        const cplx w(d, y);
        return 1.0 / (w * w);
    };
    auto local = [y](double g0, double gp, double gm, double W, double sJ) -> cplx {
        const cplx iy(0.0, y);
        // antiderivative of s/(-s+iy)^2 is log(-s+iy) + iy/(-s+iy)
        const cplx right = std::log(cplx(-sJ, y) / iy) + iy / cplx(-sJ, y) - 1.0;
        const cplx left = std::log(iy / cplx(sJ, y)) + 1.0 - iy / cplx(sJ, y);
        cplx v = gp * right + gm * left;
        if (g0 > 0.0) v += g0 * (1.0 / cplx(-W, y) - 1.0 / cplx(W, y));
        return v;
    };
    return peak_kernel<cplx>(k, z.real(), y, spec, 2, 1.0, kern, local,
                             "cauchy_sq_integral");
}

}  // namespace fsd
