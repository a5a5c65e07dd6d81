#include "fsd/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fsd/detail/adaptive.hpp"
#include "fsd/errors.hpp"

namespace fsd {

namespace {

struct Rule {
    std::vector<double> u;  // nodes in (0, 1)
    std::vector<double> w;  // bump-weighted, normalized to sum 1
};

// 32-node Gauss-Legendre rule on [0,1], weighted by the bump
// u -> exp(-1/(4u(1-u))) (the standard C_c-infinity bump rescaled to a unit
// interval) and normalized so the weights form a convex average.
const Rule& bump_rule() {
    static const Rule rule = [] {
        constexpr int n = 32;
        Rule r;
        r.u.resize(n);
        r.w.resize(n);
        for (int i = 0; i < n; ++i) {
            // Newton iteration for the i-th root of the Legendre polynomial.
            double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            r.u[static_cast<size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
            r.w[static_cast<size_t>(n - 1 - i)] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = r.u[static_cast<size_t>(i)];
            r.w[static_cast<size_t>(i)] *= std::exp(-1.0 / (4.0 * u * (1.0 - u)));
            total += r.w[static_cast<size_t>(i)];
        }
        for (double& w : r.w) w /= total;
        return r;
    }();
    return rule;
}

class MollifiedModel final : public detail::FamilyModel {
public:
    MollifiedModel(LevyDensity base, double a, int n, double eps)
        : base_(std::move(base)), n_(n), inv_n_(1.0 / n) {
        clamp_pos_ = base_(inv_n_);
        clamp_neg_ = base_(-inv_n_);
        if (a > 0.0)
            parts_.push_back(make_family(
                "gauss-scaled", {{"a", a}, {"n", static_cast<double>(n)}}));
        if (eps > 0.0)
            parts_.push_back(make_family("gauss-scaled", {{"a", eps}, {"n", 1.0}}));
        std::ostringstream os;
        os << "mollified(n=" << n << ", a=" << a << ", eps=" << eps
           << ", base=" << base_.describe() << ")";
        label_ = os.str();
        breaks = {-(static_cast<double>(n)), -inv_n_, 0.0, inv_n_,
                  static_cast<double>(n)};
        if (n > 1) {
            // The shifted average steps down to zero across [n - 1/n, n]; that
            // band must start on a panel boundary or it can hide entirely
            // inside the edge strip beyond a wide panel's outermost nodes.
            breaks.push_back(static_cast<double>(n) - inv_n_);
            breaks.push_back(inv_n_ - static_cast<double>(n));
            std::sort(breaks.begin(), breaks.end());
        }
        detail::finalize_envelope(*this);
    }

    double k(double t) const override {
        double v = shifted_average(t);
        for (const LevyDensity& p : parts_) v += p(t);
        return v;
    }

    double dk(double t) const override {
        const Rule& r = bump_rule();
        const double dir = t >= 0.0 ? 1.0 : -1.0;
        double v = 0.0;
        for (size_t i = 0; i < r.u.size(); ++i)
            v += r.w[i] * clamp_dk(t + dir * r.u[i] * inv_n_);
        for (const LevyDensity& p : parts_) v += p.derivative(t);
        return v;
    }

    double tail_moment_bound(double T, int m) const override {
        if (m == -1) return tail_moment_bound(T, 0) / T;
        double bound = 0.0;
        for (const LevyDensity& p : parts_) bound += p.tail_moment_bound(T, m);
        if (T < n_) {
            // The shifted average is dominated by the clamp at |t| and
            // vanishes beyond |t| = n.
            const double top = clamp_k(std::max(T, inv_n_)) + clamp_k(-std::max(T, inv_n_));
            bound += top * (n_ - T) * std::pow(static_cast<double>(n_), m);
        }
        return bound;
    }

    Family family() const override { return Family::mollified; }
    std::string describe() const override { return label_; }

private:
    double clamp_k(double t) const {
        const double at = std::abs(t);
        if (at >= static_cast<double>(n_)) return 0.0;
        if (at < inv_n_) return t >= 0.0 ? clamp_pos_ : clamp_neg_;
        return base_(t);
    }

    double clamp_dk(double t) const {
        const double at = std::abs(t);
        if (at >= static_cast<double>(n_) || at <= inv_n_) return 0.0;
        return base_.derivative(t);
    }

    double shifted_average(double t) const {
        const Rule& r = bump_rule();
        const double dir = t >= 0.0 ? 1.0 : -1.0;
        double v = 0.0;
        for (size_t i = 0; i < r.u.size(); ++i)
            v += r.w[i] * clamp_k(t + dir * r.u[i] * inv_n_);
        return v;
    }

    LevyDensity base_;
    int n_;
    double inv_n_;
    double clamp_pos_ = 0.0;
    double clamp_neg_ = 0.0;
    std::vector<LevyDensity> parts_;
    std::string label_;
};

}  // namespace

LevyDensity mollify_k(const LevyDensity& base, double a, int n, double epsilon_floor) {
    if (!(a >= 0.0) || !std::isfinite(a))
        throw ConfigError("mollify_k: a must be finite and >= 0");
    if (n < 1 || n > 65536) throw ConfigError("mollify_k: n must be in [1, 65536]");
    double eps = epsilon_floor;
    if (eps < 0.0) eps = (a == 0.0) ? 1e-8 : 0.0;
    if (!std::isfinite(eps)) throw ConfigError("mollify_k: epsilon_floor must be finite");
    return LevyDensity(std::make_shared<MollifiedModel>(base, a, n, eps));
}

double sigma_cos_transform(double a, const LevyDensity& k, double s, double tol) {
    if (!(tol > 0.0)) throw ConfigError("sigma_cos_transform: tol must be > 0");
    if (!(s >= 0.0) || !std::isfinite(s))
        throw ConfigError("sigma_cos_transform: s must be finite and >= 0");
    auto w_pair = [&k](double t) {
        return (t * k(t) + t * k(-t)) / (1.0 + t * t);  // |t|k(t) folded, t > 0
    };
    double T = 8.0;
    for (int i = 0;; ++i) {
        if (k.tail_moment_bound(T, -1) <= 0.25 * tol) break;
        // Beyond T the folded integrand is monotone, so with s > 0 the
        // alternating tail is bounded by 2 w(T) / s.
        if (s > 0.0 && 2.0 * w_pair(T) / s <= 0.25 * tol) break;
        if (i >= 60)
            throw NumericalError("sigma_cos_transform: tail does not meet tolerance");
        T *= 2.0;
    }
    std::vector<double> nodes{0.0, T};
    for (double b : k.breakpoints()) {
        const double ab = std::abs(b);
        if (ab > 0.0 && ab < T) nodes.push_back(ab);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    detail::PanelBudget budget;
    budget.abs_tol = 0.5 * tol;
    budget.rel_tol = 1e-9;
    const double integral =
        detail::integrate([&](double t) { return std::cos(s * t) * w_pair(t); },
                          nodes, budget, "sigma cos transform")
            .value;
    return a + integral;
}

double sigma_distance(const FreeTriplet& target, const LevyDensity& k_n,
                      const std::vector<double>& s_values, double tol) {
    if (s_values.empty()) throw ConfigError("sigma_distance: needs probe frequencies");
    double worst = 0.0;
    for (double s : s_values) {
        const double d = std::abs(sigma_cos_transform(target.a, target.k, s, tol) -
                                  sigma_cos_transform(0.0, k_n, s, tol));
        worst = std::max(worst, d);
    }
    return worst;
}

}  // namespace fsd
