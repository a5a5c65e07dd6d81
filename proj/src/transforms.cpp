#include "fsd/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsd/detail/adaptive.hpp"
#include "fsd/errors.hpp"

namespace fsd {

namespace {

using cplx = std::complex<double>;

void require_upper(cplx z, const char* what) {
    if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ConfigError(std::string(what) + ": requires finite z with Im z > 0");
}

std::string fmt(cplx z) {
    std::ostringstream os;
    os.precision(10);
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

}  // namespace

TransformContext make_context(LevyDensity k, QuadSpec spec) {
    spec.validate();
    const double gamma = gamma_k(k, std::min(1e-10, spec.abs_tol));
    return TransformContext{std::move(k), gamma, std::move(spec)};
}

cplx h_transform(const TransformContext& ctx, cplx z) {
    require_upper(z, "h_transform");
    return z + ctx.gamma + cauchy_integral(ctx.k, z, ctx.quad);
}

double f_transform(const TransformContext& ctx, cplx z) {
    require_upper(z, "f_transform");
    return poisson_integral(ctx.k, z.real(), z.imag(), ctx.quad);
}

cplx h_derivative(const TransformContext& ctx, cplx z) {
    require_upper(z, "h_derivative");
    return 1.0 - cauchy_sq_integral(ctx.k, z, ctx.quad);
}

cplx free_cumulant_transform(const TransformContext& ctx, const FreeTriplet& triplet,
                             cplx w) {
    if (!(w.imag() < 0.0) || !std::isfinite(w.real()) || !std::isfinite(w.imag()))
        throw ConfigError("free_cumulant_transform: requires finite w with Im w < 0");
    const LevyDensity& k = triplet.k;
    const double aw = std::abs(w);

    // Truncation: |sign(t) k/(1-wt)| <= 2 k(t)/(|w||t|) once |t| >= 2/|w|.
    double T = std::max(2.0, 2.0 / aw);
    for (int i = 0; i < 80 && 2.0 / aw * k.tail_moment_bound(T, -1) > 0.25 * ctx.quad.abs_tol;
         ++i)
        T *= 2.0;

    auto denom = [w](double t) { return 1.0 - w * t; };
    std::vector<detail::Segment<cplx>> segs;
    auto add_segment = [&](double lo, double hi, auto f) {
        if (!(lo < hi)) return;
        std::vector<double> nodes{lo, hi};
        auto add = [&](double v) {
            if (v > lo && v < hi) nodes.push_back(v);
        };
        add(0.0);
        for (double b : k.breakpoints()) add(b);
        // cluster around the near-pole t = Re(1/w) when it approaches the axis
        const cplx pole = 1.0 / w;
        const double c = pole.real();
        const double d = std::abs(pole.imag());
        for (double scale = 1.0; scale <= 4096.0; scale *= 4.0) {
            add(c - scale * d);
            add(c);
            add(c + scale * d);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        detail::Segment<cplx> s;
        s.f = std::move(f);
        s.nodes = std::move(nodes);
        segs.push_back(std::move(s));
    };
    add_segment(-1.0, 1.0,
                [&k, denom](double t) { return std::abs(t) * k(t) / denom(t); });
    auto outer = [&k, denom](double t) {
        return std::copysign(1.0, t) * k(t) / denom(t);
    };
    add_segment(-T, -1.0, outer);
    add_segment(1.0, T, outer);

    detail::PanelBudget budget{0.5 * ctx.quad.abs_tol, 0.5 * ctx.quad.rel_tol,
                               ctx.quad.max_depth, ctx.quad.max_panels};
    // Shared budget but separate weights, so integrate piecewise.
    const cplx inner =
        detail::integrate_segments(std::vector<detail::Segment<cplx>>{segs[0]}, budget,
                                   "free_cumulant_transform")
            .value;
    cplx outer_sum = 0.0;
    for (size_t i = 1; i < segs.size(); ++i)
        outer_sum += detail::integrate_segments(std::vector<detail::Segment<cplx>>{segs[i]},
                                                budget, "free_cumulant_transform")
                         .value;
    return triplet.eta * w + triplet.a * w * w + w * w * inner + w * outer_sum;
}

cplx invert_h(const TransformContext& ctx, cplx zeta) {
    require_upper(zeta, "invert_h");
    const double tol = 1e-9 * std::max(1.0, std::abs(zeta));

    cplx z = zeta;
    cplx hz = h_transform(ctx, z);
    double r = std::abs(hz - zeta);
    cplx best_z = z;
    double best_r = r;
    for (int it = 0; it < 160 && r > tol; ++it) {
        // Newton is only trusted when it lands decisively closer: the residual
        // |H(z) - zeta| has a spurious local minimum on the wall Im z = Im zeta
        // (H -> real at real points where g vanishes), and a greedy descent
        // parks there. Any solution has Im z = Im zeta / (1 - F) >= Im zeta,
        // so steps below the wall are rejected outright.
        bool stepped = false;
        const cplx hp = h_derivative(ctx, z);
        if (std::abs(hp) > 1e-12) {
            cplx dz = -(hz - zeta) / hp;
            for (int halving = 0; halving < 12; ++halving, dz *= 0.5) {
                const cplx zt = z + dz;
                if (!(zt.imag() >= zeta.imag())) continue;
                const cplx ht = h_transform(ctx, zt);
                const double rt = std::abs(ht - zeta);
                if (rt < 0.25 * r) {
                    z = zt;
                    hz = ht;
                    r = rt;
                    stepped = true;
                }
                break;
            }
        }
        if (!stepped) {
            // Subordination step z <- zeta - gamma - I(z): maps the upper half
            // plane into {Im >= Im zeta} and its iterates converge globally to
            // the fixed point, even across ridges where the residual grows.
            cplx zn = zeta - ctx.gamma - cauchy_integral(ctx.k, z, ctx.quad);
            if (!(zn.imag() > 0.0)) zn = cplx(zn.real(), zeta.imag());
            z = zn;
            hz = h_transform(ctx, z);
            r = std::abs(hz - zeta);
        }
        if (r < best_r) {
            best_r = r;
            best_z = z;
        }
    }
    if (best_r <= tol) return best_z;
    throw SolverError("invert_h: no convergence at zeta=" + fmt(zeta) +
                      ", best residual " + std::to_string(best_r));
}

cplx cauchy_oracle(const TransformContext& ctx, cplx zeta) {
    return 1.0 / invert_h(ctx, zeta);
}

double identity_residual(const TransformContext& ctx, cplx z) {
    return std::abs(z * cauchy_oracle(ctx, h_transform(ctx, z)) - 1.0);
}

}  // namespace fsd
