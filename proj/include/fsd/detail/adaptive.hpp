#pragma once

// Globally adaptive Gauss7/Kronrod15 integration. A job is a list of
// segments, each with its own integrand and initial panel boundaries; all
// panels share one error budget and the worst panel (across segments) is
// bisected first. Works for real and complex integrands.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fsd/errors.hpp"

namespace fsd::detail {

struct PanelBudget {
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;
    int max_depth = 40;
    int max_panels = 60000;
};

// Kronrod abscissae (non-negative half) and the matching K15/G7 weights.
inline constexpr double gk_nodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813,
};
inline constexpr double k15_weights[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529,
};
inline constexpr double g7_weights[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870,
};

template <class T>
struct PanelEval {
    T value{};
    double err = 0.0;
    double resabs = 0.0;
};

template <class T, class F>
PanelEval<T> gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    PanelEval<T> out;
    T sk{};
    T sg{};
    double ra = 0.0;
    {
        const T fc = f(c);
        sk = k15_weights[0] * fc;
        sg = g7_weights[0] * fc;
        ra = std::abs(fc) * k15_weights[0];
    }
    for (int i = 1; i < 8; ++i) {
        const T lo = f(c - h * gk_nodes[i]);
        const T hi = f(c + h * gk_nodes[i]);
        sk += k15_weights[i] * (lo + hi);
        ra += k15_weights[i] * (std::abs(lo) + std::abs(hi));
        if (i % 2 == 0) sg += g7_weights[i / 2] * (lo + hi);
    }
    out.value = h * sk;
    out.resabs = h * ra;
    out.err = std::abs(h) * std::abs(sk - sg);
    // Floor the estimate at roundoff of the absolute mass so a clean panel is
    // not reported with an impossibly small error.
    out.err = std::max(out.err, 50.0 * std::numeric_limits<double>::epsilon() * out.resabs);
    if (!std::isfinite(out.resabs) || !std::isfinite(out.err))
        out.err = std::numeric_limits<double>::infinity();
    return out;
}

template <class T>
struct Segment {
    std::function<T(double)> f;
    std::vector<double> nodes;  // ascending panel boundaries, >= 2 entries
};

template <class T>
struct AdaptiveResult {
    T value{};
    double error = 0.0;
    int panels = 0;
};

template <class T>
AdaptiveResult<T> integrate_segments(const std::vector<Segment<T>>& segments,
                                     const PanelBudget& budget,
                                     const std::string& what) {
    struct Panel {
        double a, b;
        T value;
        double err;
        int depth;
        int seg;
    };
    std::vector<Panel> panels;
    auto eval_panel = [&](int seg, double a, double b, int depth) {
        PanelEval<T> e{};
        if (b > a) e = gk15_panel<T>(segments[seg].f, a, b);
        return Panel{a, b, e.value, e.err, depth, seg};
    };
    for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
        const auto& nd = segments[s].nodes;
        for (size_t i = 0; i + 1 < nd.size(); ++i)
            if (nd[i + 1] > nd[i]) panels.push_back(eval_panel(s, nd[i], nd[i + 1], 0));
    }
    if (panels.empty()) return {};

    auto splittable = [&](const Panel& p) {
        const double scale = std::max({std::abs(p.a), std::abs(p.b), 1e-290});
        return p.depth < budget.max_depth &&
               (p.b - p.a) > 8.0 * std::numeric_limits<double>::epsilon() * scale;
    };
    // Max-heap of candidate panel indices ordered by error estimate.
    std::vector<size_t> heap;
    auto cmp = [&](size_t i, size_t j) { return panels[i].err < panels[j].err; };
    for (size_t i = 0; i < panels.size(); ++i)
        if (splittable(panels[i])) heap.push_back(i);
    std::make_heap(heap.begin(), heap.end(), cmp);

    auto totals = [&] {
        // Compensated sums keep long panel lists from losing the tolerance.
        T v{};
        T comp{};
        double e = 0.0;
        for (const auto& p : panels) {
            const T y = p.value - comp;
            const T t = v + y;
            comp = (t - v) - y;
            v = t;
            e += p.err;
        }
        return std::pair<T, double>(v, e);
    };

    auto [value, err] = totals();
    auto tol = [&](const T& v) {
        return std::max(budget.abs_tol, budget.rel_tol * std::abs(v));
    };
    int since_resum = 0;
    while (err > tol(value) && !heap.empty() &&
           static_cast<int>(panels.size()) < budget.max_panels) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        const size_t idx = heap.back();
        heap.pop_back();
        Panel parent = panels[idx];
        const double mid = 0.5 * (parent.a + parent.b);
        Panel left = eval_panel(parent.seg, parent.a, mid, parent.depth + 1);
        Panel right = eval_panel(parent.seg, mid, parent.b, parent.depth + 1);
        panels[idx] = left;
        panels.push_back(right);
        if (splittable(left)) {
            heap.push_back(idx);
            std::push_heap(heap.begin(), heap.end(), cmp);
        }
        if (splittable(right)) {
            heap.push_back(panels.size() - 1);
            std::push_heap(heap.begin(), heap.end(), cmp);
        }
        // Cheap incremental bookkeeping between exact resummations. Any
        // non-finite estimate forces an exact pass (inf - inf traps).
        value += left.value + right.value - parent.value;
        err += left.err + right.err - parent.err;
        if (++since_resum >= 64 || !std::isfinite(err) || err <= tol(value)) {
            std::tie(value, err) = totals();
            since_resum = 0;
        }
    }
    std::tie(value, err) = totals();

    if (!(err <= tol(value)) || !std::isfinite(std::abs(value)))
        throw QuadratureError(what + ": tolerance not reached (error estimate " +
                                  std::to_string(err) + ")",
                              std::abs(value), err);
    return {value, err, static_cast<int>(panels.size())};
}

// Convenience wrapper: one real integrand over a pre-split node list.
template <class F>
AdaptiveResult<double> integrate(F&& f, std::vector<double> nodes,
                                 const PanelBudget& budget, const std::string& what) {
    std::vector<Segment<double>> segs(1);
    segs[0].f = std::forward<F>(f);
    segs[0].nodes = std::move(nodes);
    return integrate_segments(segs, budget, what);
}

}  // namespace fsd::detail
