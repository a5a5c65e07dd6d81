#include "fsd/density.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fsd/detail/parallel.hpp"
#include "fsd/errors.hpp"
#include "fsd/vcurve.hpp"

namespace fsd {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

DensityCurve assemble(const TransformContext& ctx, std::pair<double, double> dom,
                      const BuildOptions& opt) {
    const std::vector<CurvePoint> grid =
        curve_grid(ctx, dom.first, dom.second, opt.n_points, opt.refine,
                   opt.workers, opt.solve_tol);
    DensityCurve c;
    c.drift = opt.drift;
    c.pts.reserve(grid.size());
    for (const CurvePoint& p : grid) {
        DensityPoint d;
        d.x = p.x;
        d.v = p.v;
        d.xi = p.xi + opt.drift;
        d.f = p.v / (kPi * (p.x * p.x + p.v * p.v));
        c.pts.push_back(d);
    }
    for (size_t i = 0; i + 1 < c.pts.size(); ++i) {
        if (!(c.pts[i + 1].xi > c.pts[i].xi))
            throw NumericalError("density: xi is not strictly increasing near x=" +
                                 fmt(c.pts[i].x) +
                                 "; the boundary parametrization is unreliable here");
    }
    double mass = 0.0;
    int mode = 0;
    for (size_t i = 0; i + 1 < c.pts.size(); ++i) {
        mass += 0.5 * (c.pts[i].f + c.pts[i + 1].f) * (c.pts[i + 1].xi - c.pts[i].xi);
        if (c.pts[i + 1].f > c.pts[static_cast<size_t>(mode)].f)
            mode = static_cast<int>(i + 1);
    }
    c.mass = mass;
    c.mode_index = mode;
    return c;
}

// Polynomial extrapolation of (y_i, d_i) to y = 0 (Neville's scheme).
double extrapolate_to_zero(const std::vector<double>& y, std::vector<double> d) {
    const size_t n = y.size();
    for (size_t m = 1; m < n; ++m)
        for (size_t i = 0; i + m < n; ++i)
            d[i] = (y[i] * d[i + 1] - y[i + m] * d[i]) / (y[i] - y[i + m]);
    return d[0];
}

}  // namespace

DensityCurve build_density(const TransformContext& ctx, BuildOptions options) {
    if (!(options.mass_tol > 0.0))
        throw ConfigError("build_density: mass_tol must be > 0");
    std::pair<double, double> dom =
        options.domain ? *options.domain : default_domain(ctx);
    DensityCurve first = assemble(ctx, dom, options);
    if (std::abs(first.mass - 1.0) <= options.mass_tol) return first;
    if (first.mass > 1.0)
        throw NumericalError("density: mass " + fmt(first.mass) +
                             " exceeds 1 beyond tolerance; the curve is inconsistent");
    // A deficit means the domain truncated real tails: widen once and retry.
    const double mid = 0.5 * (dom.first + dom.second);
    const double half = 0.5 * (dom.second - dom.first);
    const std::pair<double, double> wide{mid - 4.0 * half, mid + 4.0 * half};
    DensityCurve second;
    try {
        second = assemble(ctx, wide, options);
    } catch (const SolverError&) {
        throw NumericalError("density: mass " + fmt(first.mass) + " on [" +
                             fmt(dom.first) + ", " + fmt(dom.second) +
                             "] and the 4x-widened domain is not solvable");
    }
    if (std::abs(second.mass - 1.0) <= options.mass_tol) return second;
    throw NumericalError("density: mass " + fmt(second.mass) +
                         " still outside tolerance after widening the domain to [" +
                         fmt(wide.first) + ", " + fmt(wide.second) + "]");
}

double interp_density(const DensityCurve& curve, double xi) {
    const auto& p = curve.pts;
    if (p.empty() || xi <= p.front().xi || xi >= p.back().xi) {
        if (!p.empty() && (xi == p.front().xi || xi == p.back().xi))
            return xi == p.front().xi ? p.front().f : p.back().f;
        return 0.0;
    }
    auto it = std::upper_bound(p.begin(), p.end(), xi,
                               [](double a, const DensityPoint& b) { return a < b.xi; });
    const DensityPoint& hi = *it;
    const DensityPoint& lo = *(it - 1);
    const double w = (xi - lo.xi) / (hi.xi - lo.xi);
    return lo.f + w * (hi.f - lo.f);
}

double cdf_at(const DensityCurve& curve, double xi) {
    const auto& p = curve.pts;
    if (p.empty() || xi <= p.front().xi) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        if (xi >= p[i + 1].xi) {
            acc += 0.5 * (p[i].f + p[i + 1].f) * (p[i + 1].xi - p[i].xi);
            continue;
        }
        const double fm = interp_density(curve, xi);
        acc += 0.5 * (p[i].f + fm) * (xi - p[i].xi);
        return acc;
    }
    return acc;
}

double median(const DensityCurve& curve) {
    const auto& p = curve.pts;
    if (p.size() < 2) throw ConfigError("median: curve has fewer than two points");
    const double target = 0.5 * curve.mass;
    double lo = p.front().xi, hi = p.back().xi;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf_at(curve, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DensityPoint refine_mode(const TransformContext& ctx, const DensityCurve& curve,
                         double solve_tol) {
    if (curve.pts.empty()) throw ConfigError("refine_mode: empty curve");
    const int m = curve.mode_index;
    if (m == 0 || m + 1 == static_cast<int>(curve.pts.size())) return curve.pts[m];

    auto fx = [&](double x) {
        const VSolve s = try_solve_v(ctx, x, solve_tol);
        if (s.below_range) return 0.0;
        return s.v / (kPi * (x * x + s.v * s.v));
    };
    const double phi = 0.6180339887498949;
    double a = curve.pts[m - 1].x, b = curve.pts[m + 1].x;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = fx(x1), f2 = fx(x2);
    for (int it = 0; it < 60 && b - a > 1e-10 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = fx(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = fx(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    const double v = solve_v(ctx, xm, solve_tol);
    DensityPoint out;
    out.x = xm;
    out.v = v;
    out.xi = p_map_at(ctx, xm, v) + curve.drift;
    out.f = v / (kPi * (xm * xm + v * v));
    return out;
}

ValidationReport check_unimodal(const DensityCurve& curve) {
    ValidationReport rep;
    const auto& p = curve.pts;
    if (p.size() < 3) {
        rep.add("unimodal", false, 0.0, "curve too short");
        return rep;
    }
    const double fmax = curve.f_max();
    const double flat = 1e-12 * fmax;

    // Collapse consecutive-difference signs (flat band -> no sign); a
    // unimodal curve reads +1 then -1 with no other transitions.
    std::vector<int> signs;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        const double d = p[i + 1].f - p[i].f;
        const int s = std::abs(d) <= flat ? 0 : (d > 0.0 ? 1 : -1);
        if (s != 0 && (signs.empty() || signs.back() != s)) signs.push_back(s);
    }
    const bool uni = signs == std::vector<int>{1, -1};
    std::string pat;
    for (int s : signs) pat += s > 0 ? '+' : '-';
    rep.add("unimodal", uni, uni ? 0.0 : static_cast<double>(signs.size()),
            "sign pattern " + pat);

    for (double q : {0.25, 0.5, 0.75}) {
        const double level = q * fmax;
        const int crossings = level_crossings(curve, level);
        std::ostringstream name;
        name << "crossings_q" << static_cast<int>(q * 100);
        rep.add(name.str(), crossings == 2, std::abs(crossings - 2.0),
                std::to_string(crossings) + " crossings of " + fmt(level));
    }
    return rep;
}

int level_crossings(const DensityCurve& curve, double level) {
    int crossings = 0, prev = 0;
    for (const DensityPoint& pt : curve.pts) {
        const int s = pt.f > level ? 1 : (pt.f < level ? -1 : 0);
        if (s == 0) continue;
        if (prev != 0 && s != prev) ++crossings;
        prev = s;
    }
    return crossings;
}

std::vector<double> moments_from_density(const DensityCurve& curve, int order) {
    if (order < 0 || order > 8)
        throw ConfigError("moments_from_density: order must be in [0, 8]");
    const auto& p = curve.pts;
    std::vector<double> m(static_cast<size_t>(order) + 1, 0.0);
    for (int n = 0; n <= order; ++n) {
        double acc = 0.0;
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            const double ga = std::pow(p[i].xi, n) * p[i].f;
            const double gb = std::pow(p[i + 1].xi, n) * p[i + 1].f;
            acc += 0.5 * (ga + gb) * (p[i + 1].xi - p[i].xi);
        }
        m[static_cast<size_t>(n)] = acc;
    }
    return m;
}

CrossCheck crossvalidate(const TransformContext& ctx, const DensityCurve& curve,
                         CrossCheckOptions options) {
    if (options.probes.empty())
        throw ConfigError("crossvalidate: needs at least one probe height");
    for (double y : options.probes)
        if (!(y > 0.0) || y > 1e-2)
            throw ConfigError("crossvalidate: probe heights must lie in (0, 1e-2]");
    if (options.stride < 1) throw ConfigError("crossvalidate: stride must be >= 1");

    std::vector<size_t> idx;
    for (size_t i = 0; i < curve.pts.size(); i += static_cast<size_t>(options.stride))
        idx.push_back(i);
    std::vector<double> dev(idx.size(), 0.0);
    std::vector<char> failed(idx.size(), 0);
    detail::parallel_for_index(idx.size(), options.workers, [&](size_t j) {
        const DensityPoint& pt = curve.pts[idx[j]];
        std::vector<double> vals(options.probes.size());
        try {
            for (size_t q = 0; q < options.probes.size(); ++q) {
                const std::complex<double> g =
                    cauchy_oracle(ctx, {pt.xi - curve.drift, options.probes[q]});
                vals[q] = -g.imag() / kPi;
            }
        } catch (const SolverError&) {
            failed[j] = 1;  // per-point, non-fatal
            return;
        }
        const double f_oracle = extrapolate_to_zero(options.probes, vals);
        dev[j] = std::abs(pt.f - f_oracle);
    });
    CrossCheck out;
    out.samples = static_cast<int>(idx.size());
    for (size_t j = 0; j < idx.size(); ++j) {
        if (failed[j]) {
            ++out.failures;
            continue;
        }
        if (dev[j] >= out.max_dev) {
            out.max_dev = dev[j];
            out.xi_at_max = curve.pts[idx[j]].xi;
        }
    }
    return out;
}

void write_csv(std::ostream& os, const DensityCurve& curve) {
    os << "x,v,xi,f\n";
    os << std::setprecision(17);
    for (const DensityPoint& p : curve.pts)
        os << p.x << ',' << p.v << ',' << p.xi << ',' << p.f << '\n';
}

void write_csv_file(const std::string& path, const DensityCurve& curve) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file: " + path);
    write_csv(os, curve);
    if (!os.good()) throw NumericalError("write failure on " + path);
}

}  // namespace fsd
