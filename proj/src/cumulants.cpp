#include "fsd/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fsd/detail/adaptive.hpp"
#include "fsd/errors.hpp"

namespace fsd {

namespace {

// Smallest radius whose tail of |t|^m k is within tol, doubling from 2.
double cutoff_radius(const LevyDensity& k, int m, double tol, int order) {
    double T = 2.0;
    for (int i = 0; i < 80; ++i) {
        const double bound = k.tail_moment_bound(T, m);
        if (bound <= tol) return T;
        if (!std::isfinite(bound) && i > 4)
            break;  // bound is +inf at any radius: give up early
        T *= 2.0;
    }
    throw NumericalError("cumulant order " + std::to_string(order) +
                         ": tail of |t|^" + std::to_string(m) +
                         " k(t) is not integrable to the requested tolerance");
}

// int_lo^T t^(m-1) [k(t) + (-1)^m k(-t)] dt with panel boundaries at the
// factor's kinks.
double folded_integral(const LevyDensity& k, int m, double lo, double tol) {
    const double T = cutoff_radius(k, m - 1, 0.25 * tol, m);
    if (T <= lo) return 0.0;
    std::vector<double> nodes{lo, T};
    for (double b : k.breakpoints()) {
        const double ab = std::abs(b);
        if (ab > lo && ab < T) nodes.push_back(ab);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    auto f = [&k, m, sign](double t) {
        return std::pow(t, m - 1) * (k(t) + sign * k(-t));
    };
    // The relative guard lets large high-order cumulants (resabs ~ m!) stop
    // above the absolute target while staying far tighter than the dilation
    // covariance checks need.
    detail::PanelBudget budget;
    budget.abs_tol = 0.25 * tol;
    budget.rel_tol = 1e-11;
    return detail::integrate(f, nodes, budget,
                             "cumulant order " + std::to_string(m))
        .value;
}

}  // namespace

std::vector<double> cumulants_from_k(const FreeTriplet& triplet, int order,
                                     double tol) {
    if (order < 1 || order > 12)
        throw ConfigError("cumulants_from_k: order must be in [1, 12]");
    if (!(tol > 0.0)) throw ConfigError("cumulants_from_k: tol must be > 0");

    std::vector<double> kappa(static_cast<size_t>(order));
    kappa[0] = triplet.eta + folded_integral(triplet.k, 1, 1.0, tol);
    if (order >= 2) kappa[1] = triplet.a + folded_integral(triplet.k, 2, 0.0, tol);
    for (int m = 3; m <= order; ++m)
        kappa[static_cast<size_t>(m - 1)] = folded_integral(triplet.k, m, 0.0, tol);
    return kappa;
}

std::vector<double> moments_from_cumulants(const std::vector<double>& kappa,
                                           int order) {
    if (order < 0) throw ConfigError("moments_from_cumulants: order must be >= 0");
    if (static_cast<int>(kappa.size()) < order)
        throw ConfigError("moments_from_cumulants: needs cumulants up to the "
                          "requested order");
    std::vector<double> m(static_cast<size_t>(order) + 1, 0.0);
    m[0] = 1.0;
    for (int n = 1; n <= order; ++n) {
        // C[s][r]: sum over compositions of r into s nonnegative parts of
        // products of moments (all of index < n, already known).
        std::vector<std::vector<double>> C(static_cast<size_t>(n) + 1,
                                           std::vector<double>(static_cast<size_t>(n), 0.0));
        for (int r = 0; r < n; ++r) C[1][static_cast<size_t>(r)] = m[static_cast<size_t>(r)];
        for (int s = 2; s <= n; ++s)
            for (int r = 0; r + s <= n; ++r)
                for (int j = 0; j <= r; ++j)
                    C[static_cast<size_t>(s)][static_cast<size_t>(r)] +=
                        m[static_cast<size_t>(j)] * C[static_cast<size_t>(s - 1)][static_cast<size_t>(r - j)];
        double acc = 0.0;
        for (int s = 1; s <= n; ++s)
            acc += kappa[static_cast<size_t>(s - 1)] * C[static_cast<size_t>(s)][static_cast<size_t>(n - s)];
        m[static_cast<size_t>(n)] = acc;
    }
    return m;
}

}  // namespace fsd
