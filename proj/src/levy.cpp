#include "fsd/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fsd/detail/adaptive.hpp"
#include "fsd/errors.hpp"

namespace fsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_max(T,T0)^inf t^m exp(-beta (t - T0)) dt, m >= 0. Shifted form so the
// exp never overflows for interior T0.
double exp_tail_shifted(double beta, double T0, double T, int m) {
    if (beta <= 0.0) return kInf;
    const double lo = std::max(T, T0);
    double factorial_ratio = 1.0;  // m!/j! accumulated downward
    for (int j = m; j >= 1; --j) factorial_ratio *= j;
    double sum = 0.0;
    double tj = 1.0;  // lo^j
    double fr = factorial_ratio;
    for (int j = 0; j <= m; ++j) {
        sum += fr * tj / std::pow(beta, m + 1 - j);
        if (j < m) {
            fr /= (j + 1);
            tj *= lo;
        }
    }
    return std::exp(-beta * (lo - T0)) * sum;
}

// int_T^inf t^m exp(-beta t) dt for m >= 0; upper bound for m == -1.
double exp_tail(double beta, double T, int m) {
    if (beta <= 0.0) return kInf;
    if (m >= 0) return exp_tail_shifted(beta, 0.0, std::max(T, 0.0), m);
    if (T <= 0.0) return kInf;
    return std::exp(-beta * T) / (beta * T);
}

// Upper bound on J(S, m) = int_S^inf u^m exp(-u^2) du.
double gauss_half_tail(double S, int m) {
    if (S <= 0.0 && m <= -1) return kInf;
    S = std::max(S, 0.0);
    const double x = S * S;
    if (m == -1) return std::exp(-x) / (2.0 * x);
    const double s = 0.5 * (m + 1);
    if (x >= 2.0 * s + 1.0) return std::pow(x, s - 1.0) * std::exp(-x);
    return 0.5 * std::tgamma(s);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

double finite_param(const std::map<std::string, double>& p, const std::string& key,
                    double fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    require(std::isfinite(it->second), "parameter '" + key + "' must be finite");
    return it->second;
}

void reject_unknown(const std::map<std::string, double>& p,
                    std::initializer_list<const char*> known, const std::string& tag) {
    for (const auto& [key, value] : p) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        require(ok, "unknown parameter '" + key + "' for family '" + tag + "'");
    }
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct SymExpModel final : detail::FamilyModel {
    double lambda, rate;
    SymExpModel(double l, double r) : lambda(l), rate(r) { detail::finalize_envelope(*this); }
    double k(double t) const override { return lambda * std::exp(-rate * std::abs(t)); }
    double dk(double t) const override {
        return t == 0.0 ? 0.0 : -rate * std::copysign(k(t), t);
    }
    bool has_ddk() const override { return true; }
    double ddk(double t) const override { return rate * rate * k(t); }
    double tail_moment_bound(double T, int m) const override {
        return 2.0 * lambda * exp_tail(rate, T, m);
    }
    Family family() const override { return Family::symexp; }
    std::string describe() const override {
        return "symexp(lambda=" + num(lambda) + ", rate=" + num(rate) + ")";
    }
};

struct GaussScaledModel final : detail::FamilyModel {
    double a, n;
    GaussScaledModel(double a_, double n_) : a(a_), n(n_) { detail::finalize_envelope(*this); }
    double k(double t) const override {
        const double u = n * t;
        return a * n * n * std::exp(-u * u);
    }
    double dk(double t) const override { return -2.0 * n * n * t * k(t); }
    bool has_ddk() const override { return true; }
    double ddk(double t) const override {
        const double n2 = n * n;
        return (4.0 * n2 * n2 * t * t - 2.0 * n2) * k(t);
    }
    double tail_moment_bound(double T, int m) const override {
        // |t|^m a n^2 e^{-(nt)^2}: substitute u = n t.
        return 2.0 * a * std::pow(n, 1 - m) * gauss_half_tail(n * std::max(T, 0.0), m);
    }
    Family family() const override { return Family::gauss_scaled; }
    std::string describe() const override {
        return "gauss-scaled(a=" + num(a) + ", n=" + num(n) + ")";
    }
};

struct HalfExpModel final : detail::FamilyModel {
    double lambda, rate, eps;
    HalfExpModel(double l, double r, double e) : lambda(l), rate(r), eps(e) {
        detail::finalize_envelope(*this);
    }
    double floor_k(double t) const { return eps * std::exp(-t * t); }
    double k(double t) const override {
        double v = floor_k(t);
        if (t > 0.0) v += lambda * std::exp(-rate * t);
        return v;
    }
    double dk(double t) const override {
        double v = -2.0 * t * floor_k(t);
        if (t > 0.0) v += -rate * lambda * std::exp(-rate * t);
        return v;
    }
    bool has_ddk() const override { return true; }
    double ddk(double t) const override {
        double v = (4.0 * t * t - 2.0) * floor_k(t);
        if (t > 0.0) v += rate * rate * lambda * std::exp(-rate * t);
        return v;
    }
    double tail_moment_bound(double T, int m) const override {
        return lambda * exp_tail(rate, T, m) +
               2.0 * eps * gauss_half_tail(std::max(T, 0.0), m);
    }
    Family family() const override { return Family::half_exp; }
    std::string describe() const override {
        return "half-exp(lambda=" + num(lambda) + ", rate=" + num(rate) +
               ", eps=" + num(eps) + ")";
    }
};

struct CauchyModel final : detail::FamilyModel {
    double scale;
    explicit CauchyModel(double s) : scale(s) { detail::finalize_envelope(*this); }
    double k(double t) const override {
        const double pi = 3.14159265358979323846;
        return t == 0.0 ? kInf : scale / (pi * std::abs(t));
    }
    double dk(double t) const override {
        const double pi = 3.14159265358979323846;
        return t == 0.0 ? 0.0 : -std::copysign(scale / (pi * t * t), t);
    }
    bool has_ddk() const override { return true; }
    double ddk(double t) const override {
        const double pi = 3.14159265358979323846;
        return t == 0.0 ? kInf : 2.0 * scale / (pi * std::abs(t) * t * t);
    }
    double tail_moment_bound(double T, int m) const override {
        const double pi = 3.14159265358979323846;
        if (m >= 0 || T <= 0.0) return kInf;
        return 2.0 * scale / (pi * T);
    }
    Family family() const override { return Family::cauchy; }
    std::string describe() const override { return "cauchy(scale=" + num(scale) + ")"; }
};

// One half-line of a piecewise-linear table, stored with positive abscissae.
struct TableSide {
    std::vector<double> t, k;  // ascending |t|, >= 2 knots when non-empty
    double beta = kInf;        // tail decay rate beyond the last knot

    bool empty() const { return t.empty(); }
    void set_tail() {
        if (empty()) return;
        const size_t m = t.size() - 1;
        const double slope = (k[m] - k[m - 1]) / (t[m] - t[m - 1]);
        beta = k[m] > 0.0 ? -slope / k[m] : kInf;
    }
    double value(double s) const {  // s = |t| > 0
        if (empty()) return 0.0;
        if (s <= t.front()) return k.front();
        if (s >= t.back()) {
            if (k.back() == 0.0) return 0.0;
            if (!std::isfinite(beta)) return 0.0;
            return k.back() * std::exp(-beta * (s - t.back()));
        }
        const auto it = std::upper_bound(t.begin(), t.end(), s);
        const size_t i = static_cast<size_t>(it - t.begin());
        const double w = (s - t[i - 1]) / (t[i] - t[i - 1]);
        return k[i - 1] + w * (k[i] - k[i - 1]);
    }
    double slope(double s) const {
        if (empty() || s <= t.front()) return 0.0;
        if (s >= t.back()) {
            if (k.back() == 0.0 || !std::isfinite(beta)) return 0.0;
            return -beta * k.back() * std::exp(-beta * (s - t.back()));
        }
        const auto it = std::upper_bound(t.begin(), t.end(), s);
        const size_t i = static_cast<size_t>(it - t.begin());
        return (k[i] - k[i - 1]) / (t[i] - t[i - 1]);
    }
    // Upper bound on int_max(T,0)^inf s^m value(s) ds for m >= 0 (the m = -1
    // case is routed through m = 0 by the owning model).
    double tail(double T, int m) const {
        if (empty()) return 0.0;
        T = std::max(T, 0.0);
        double total = 0.0;
        double lo = T;
        if (lo < t.back()) {
            // constant head before the first knot
            if (lo < t.front()) {
                total += segment_mass(lo, t.front(), k.front(), m);
                lo = t.front();
            }
            // piecewise part: bound value by the larger endpoint per segment
            for (size_t i = 0; i + 1 < t.size(); ++i) {
                if (t[i + 1] <= lo) continue;
                const double a = std::max(lo, t[i]);
                const double kmax = std::max(k[i], k[i + 1]);
                total += segment_mass(a, t[i + 1], kmax, m);
            }
            lo = t.back();
        }
        if (k.back() > 0.0) {
            if (!(beta > 0.0)) return kInf;
            total += k.back() * exp_tail_shifted(beta, t.back(), lo, m);
        }
        return total;
    }
    static double segment_mass(double a, double b, double kmax, int m) {
        if (b <= a || kmax <= 0.0) return 0.0;
        if (m == -1) {
            if (a <= 0.0) return kInf;
            return kmax * std::log(b / a);
        }
        return kmax * (std::pow(b, m + 1) - std::pow(a, m + 1)) / (m + 1);
    }
};

struct TableModel final : detail::FamilyModel {
    TableSide neg, pos;  // `neg` holds |t| for t < 0
    TableModel(TableSide n, TableSide p) : neg(std::move(n)), pos(std::move(p)) {
        breaks.clear();
        for (auto it = neg.t.rbegin(); it != neg.t.rend(); ++it) breaks.push_back(-*it);
        breaks.push_back(0.0);
        for (double v : pos.t) breaks.push_back(v);
        detail::finalize_envelope(*this);
    }
    double k(double t) const override {
        return t >= 0.0 ? pos.value(t) : neg.value(-t);
    }
    double dk(double t) const override {
        return t >= 0.0 ? pos.slope(t) : -neg.slope(-t);
    }
    double tail_moment_bound(double T, int m) const override {
        if (m == -1) {
            // bound value(s)/s by value(s)/T on [T, inf)
            if (T <= 0.0) return kInf;
            return (neg.tail(T, 0) + pos.tail(T, 0)) / T;
        }
        return neg.tail(T, m) + pos.tail(T, m);
    }
    Family family() const override { return Family::table; }
    std::string describe() const override {
        return "table(" + std::to_string(neg.t.size()) + "+" +
               std::to_string(pos.t.size()) + " knots)";
    }
};

struct SumModel final : detail::FamilyModel {
    std::vector<std::pair<double, LevyDensity>> terms;
    explicit SumModel(std::vector<std::pair<double, LevyDensity>> ts) : terms(std::move(ts)) {
        std::vector<double> b{0.0};
        for (const auto& [c, part] : terms) {
            (void)c;
            const auto& pb = part.breakpoints();
            b.insert(b.end(), pb.begin(), pb.end());
        }
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        breaks = std::move(b);
        detail::finalize_envelope(*this);
    }
    double k(double t) const override {
        double v = 0.0;
        for (const auto& [c, part] : terms) v += c * part(t);
        return v;
    }
    double dk(double t) const override {
        double v = 0.0;
        for (const auto& [c, part] : terms) v += c * part.derivative(t);
        return v;
    }
    bool has_ddk() const override {
        return std::all_of(terms.begin(), terms.end(),
                           [](const auto& p) { return p.second.has_second_derivative(); });
    }
    double ddk(double t) const override {
        double v = 0.0;
        for (const auto& [c, part] : terms) v += c * part.second_derivative(t);
        return v;
    }
    double tail_moment_bound(double T, int m) const override {
        double v = 0.0;
        for (const auto& [c, part] : terms) v += c * part.tail_moment_bound(T, m);
        return v;
    }
    Family family() const override { return Family::sum; }
    std::string describe() const override {
        std::string s = "sum(";
        for (size_t i = 0; i < terms.size(); ++i) {
            if (i) s += ", ";
            s += num(terms[i].first) + "*" + terms[i].second.describe();
        }
        return s + ")";
    }
};

struct DilatedModel final : detail::FamilyModel {
    LevyDensity base;
    double c;
    DilatedModel(LevyDensity b, double c_) : base(std::move(b)), c(c_) {
        breaks.clear();
        for (double v : base.breakpoints()) breaks.push_back(c * v);
        std::sort(breaks.begin(), breaks.end());
        detail::finalize_envelope(*this);
    }
    double k(double t) const override { return base(t / c); }
    double dk(double t) const override { return base.derivative(t / c) / c; }
    bool has_ddk() const override { return base.has_second_derivative(); }
    double ddk(double t) const override { return base.second_derivative(t / c) / (c * c); }
    double tail_moment_bound(double T, int m) const override {
        return std::pow(c, m + 1) * base.tail_moment_bound(T / c, m);
    }
    Family family() const override { return base.family(); }
    std::string describe() const override {
        return "dilate(c=" + num(c) + ", " + base.describe() + ")";
    }
};

TableSide build_side(std::vector<double> t, std::vector<double> k, bool negative) {
    TableSide side;
    require(t.size() == k.size(), "table: t/k length mismatch");
    if (t.empty()) return side;
    require(t.size() >= 2, "table: each non-empty side needs at least 2 knots");
    if (negative) {
        // input ascending in t (all < 0); store as ascending |t|
        std::reverse(t.begin(), t.end());
        std::reverse(k.begin(), k.end());
        for (double& v : t) {
            require(v < 0.0, "table: negative-side knots must satisfy t < 0");
            v = -v;
        }
    }
    for (size_t i = 0; i < t.size(); ++i) {
        require(std::isfinite(t[i]) && std::isfinite(k[i]), "table: non-finite knot");
        require(!negative ? t[i] > 0.0 : true, "table: positive-side knots must satisfy t > 0");
        require(k[i] >= 0.0, "table: k values must be >= 0");
        if (i) require(t[i] > t[i - 1], "table: knot abscissae must be strictly ascending");
    }
    side.t = std::move(t);
    side.k = std::move(k);
    side.set_tail();
    return side;
}

}  // namespace

namespace detail {

double FamilyModel::ddk(double) const {
    throw std::logic_error("second derivative not available for " + describe());
}

std::vector<double> default_log_grid(double t_min, double t_max, int per_side) {
    std::vector<double> pts;
    pts.reserve(2 * per_side);
    const double lr = std::log(t_max / t_min);
    for (int i = 0; i < per_side; ++i) {
        const double s = t_min * std::exp(lr * i / (per_side - 1));
        pts.push_back(s);
    }
    std::vector<double> out;
    out.reserve(2 * per_side);
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), pts.begin(), pts.end());
    return out;
}

void finalize_envelope(FamilyModel& m) {
    double b = 0.0, b2 = 0.0;
    for (double t : default_log_grid(1e-6, 1e3, 400)) {
        const double w = (1.0 + t * t) * (1.0 + t * t);
        b = std::max(b, w * std::max(m.k(t), std::abs(m.dk(t))));
        if (m.has_ddk()) b2 = std::max(b2, w * std::abs(m.ddk(t)));
    }
    m.bound = 1.02 * b;
    m.bound2 = 1.02 * b2;
}

}  // namespace detail

std::string family_name(Family f) {
    switch (f) {
        case Family::symexp: return "symexp";
        case Family::gauss_scaled: return "gauss-scaled";
        case Family::half_exp: return "half-exp";
        case Family::table: return "table";
        case Family::cauchy: return "cauchy";
        case Family::mollified: return "mollified";
        case Family::sum: return "sum";
    }
    return "?";
}

LevyDensity::LevyDensity(std::shared_ptr<const detail::FamilyModel> model)
    : model_(std::move(model)) {
    if (!model_) throw ConfigError("null density factor model");
}

double LevyDensity::tail_moment_bound(double T, int m) const {
    require(m >= -1 && m <= 16, "tail_moment_bound: order out of range");
    return model_->tail_moment_bound(T, m);
}

double LevyDensity::envelope_bound(int order) const {
    require(order >= 0 && order <= 2, "envelope_bound: order out of range");
    return order == 2 ? model_->bound2 : model_->bound;
}

LevyDensity make_family(const std::string& tag,
                        const std::map<std::string, double>& params) {
    auto is = [&](const char* a, const char* b = nullptr) {
        return tag == a || (b && tag == b);
    };
    if (is("symexp")) {
        reject_unknown(params, {"lambda", "rate"}, tag);
        const double lambda = finite_param(params, "lambda", 1.0);
        const double rate = finite_param(params, "rate", 1.0);
        require(lambda > 0.0 && rate > 0.0, "symexp: lambda and rate must be > 0");
        return LevyDensity(std::make_shared<SymExpModel>(lambda, rate));
    }
    if (is("gauss-scaled", "gauss_scaled")) {
        reject_unknown(params, {"a", "n"}, tag);
        const double a = finite_param(params, "a", 1.0);
        const double n = finite_param(params, "n", 1.0);
        require(a > 0.0 && n > 0.0, "gauss-scaled: a and n must be > 0");
        return LevyDensity(std::make_shared<GaussScaledModel>(a, n));
    }
    if (is("half-exp", "half_exp")) {
        reject_unknown(params, {"lambda", "rate", "eps"}, tag);
        const double lambda = finite_param(params, "lambda", 1.0);
        const double rate = finite_param(params, "rate", 1.0);
        const double eps = finite_param(params, "eps", 1e-8);
        require(lambda > 0.0 && rate > 0.0, "half-exp: lambda and rate must be > 0");
        require(eps >= 0.0, "half-exp: eps must be >= 0");
        return LevyDensity(std::make_shared<HalfExpModel>(lambda, rate, eps));
    }
    if (is("cauchy")) {
        reject_unknown(params, {"scale"}, tag);
        const double scale = finite_param(params, "scale", 1.0);
        require(scale > 0.0, "cauchy: scale must be > 0");
        return LevyDensity(std::make_shared<CauchyModel>(scale));
    }
    if (is("table") || is("sum") || is("mollified"))
        throw ConfigError("family '" + tag + "' is built through its dedicated constructor");
    throw ConfigError("unknown family tag '" + tag + "'");
}

LevyDensity make_table(std::vector<double> t_neg, std::vector<double> k_neg,
                       std::vector<double> t_pos, std::vector<double> k_pos) {
    TableSide neg = build_side(std::move(t_neg), std::move(k_neg), true);
    TableSide pos = build_side(std::move(t_pos), std::move(k_pos), false);
    require(!neg.empty() || !pos.empty(), "table: needs at least one non-empty side");
    return LevyDensity(std::make_shared<TableModel>(std::move(neg), std::move(pos)));
}

LevyDensity make_sum(std::vector<std::pair<double, LevyDensity>> terms) {
    require(!terms.empty(), "sum: needs at least one term");
    for (const auto& [c, part] : terms) {
        (void)part;
        require(std::isfinite(c) && c > 0.0, "sum: coefficients must be finite and > 0");
    }
    return LevyDensity(std::make_shared<SumModel>(std::move(terms)));
}

LevyDensity dilate(const LevyDensity& k, double c) {
    require(std::isfinite(c) && c > 0.0, "dilate: c must be finite and > 0");
    if (c == 1.0) return k;
    return LevyDensity(std::make_shared<DilatedModel>(k, c));
}

std::vector<double> SampleGrid::points() const {
    require(t_min > 0.0 && t_max > t_min && per_side >= 2, "SampleGrid: bad parameters");
    return detail::default_log_grid(t_min, t_max, per_side);
}

ValidationReport validate_conditions(const LevyDensity& k, const SampleGrid& grid) {
    ValidationReport rep;
    const std::vector<double> pts = grid.points();
    const size_t half = pts.size() / 2;

    std::vector<double> kv(pts.size());
    double kmax = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        kv[i] = k(pts[i]);
        if (std::isfinite(kv[i])) kmax = std::max(kmax, kv[i]);
    }

    // Positivity: negative values are violations; zeros are tolerated only as
    // a contiguous outer tail (double underflow of a genuinely positive k).
    {
        bool ok = true;
        double worst = 0.0;
        std::string where;
        auto scan_side = [&](size_t begin, size_t end, int step) {
            bool seen_zero = false;
            for (size_t i = begin; i != end; i += step) {
                const double v = kv[i];
                if (v < 0.0 || !std::isfinite(v)) {
                    ok = false;
                    worst = std::max(worst, std::abs(v));
                    if (where.empty()) where = "k(" + num(pts[i]) + ")=" + num(v);
                    return;
                }
                if (v == 0.0) {
                    if (i == begin) {
                        ok = false;
                        if (where.empty()) where = "k vanishes at innermost t=" + num(pts[i]);
                        return;
                    }
                    seen_zero = true;
                } else if (seen_zero) {
                    ok = false;
                    if (where.empty()) where = "interior zero before t=" + num(pts[i]);
                    return;
                }
            }
        };
        // positive side outward, negative side outward (toward -t_max)
        scan_side(half, pts.size(), 1);
        scan_side(half - 1, static_cast<size_t>(-1), -1);
        rep.add("positivity", ok, worst, where);
    }

    // Monotonicity: non-decreasing toward 0 on t<0, non-increasing on t>0.
    {
        const double tol = 32.0 * std::numeric_limits<double>::epsilon() * kmax;
        double worst_neg = 0.0, worst_pos = 0.0;
        std::string at_neg, at_pos;
        for (size_t i = 0; i + 1 < half; ++i) {
            const double drop = kv[i] - kv[i + 1];
            if (drop > worst_neg) {
                worst_neg = drop;
                at_neg = "t=" + num(pts[i]);
            }
        }
        for (size_t i = half; i + 1 < pts.size(); ++i) {
            const double rise = kv[i + 1] - kv[i];
            if (rise > worst_pos) {
                worst_pos = rise;
                at_pos = "t=" + num(pts[i + 1]);
            }
        }
        rep.add("monotone_neg", worst_neg <= tol, std::max(worst_neg, 0.0), at_neg);
        rep.add("monotone_pos", worst_pos <= tol, std::max(worst_pos, 0.0), at_pos);
    }

    // Envelope boundedness against the declared constants.
    {
        double m0 = 0.0, m2 = 0.0;
        bool finite0 = true, finite2 = true;
        for (size_t i = 0; i < pts.size(); ++i) {
            const double t = pts[i];
            const double w = (1.0 + t * t) * (1.0 + t * t);
            const double v = w * std::max(kv[i], std::abs(k.derivative(t)));
            if (!std::isfinite(v)) finite0 = false;
            m0 = std::max(m0, v);
            if (k.has_second_derivative()) {
                const double v2 = w * std::abs(k.second_derivative(t));
                if (!std::isfinite(v2)) finite2 = false;
                m2 = std::max(m2, v2);
            }
        }
        const double declared = k.envelope_bound(0);
        rep.add("envelope_k_dk", finite0 && m0 <= declared * (1.0 + 1e-9), m0,
                "declared=" + num(declared));
        if (k.has_second_derivative())
            rep.add("envelope_ddk", finite2 && m2 <= k.envelope_bound(2) * (1.0 + 1e-9), m2,
                    "declared=" + num(k.envelope_bound(2)));
    }

    // Spot-check k' against central differences away from breakpoints.
    {
        double worst = 0.0;
        std::string where;
        const auto& brk = k.breakpoints();
        auto rel_dev = [&](double t) {
            const double h = 1e-7 * (1.0 + std::abs(t));
            for (double b : brk)
                if (std::abs(t - b) < 16.0 * h) return 0.0;  // skip: one-sided slope
            const double kp = k(t + h), km = k(t - h);
            const double fd = (kp - km) / (2.0 * h);
            const double dk = k.derivative(t);
            const double diff = std::abs(fd - dk);
            // The difference quotient cannot certify anything below its own
            // cancellation noise (k' can be many orders below k itself).
            const double fd_noise = 100.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(std::abs(kp), std::abs(km)) / h;
            if (diff <= fd_noise) return 0.0;
            const double scale = std::max({std::abs(dk), std::abs(fd), 1e-8 * kmax, 1e-300});
            return diff / scale;
        };
        for (size_t i = 0; i < pts.size(); i += 8) {
            const double t = pts[i];
            double rel = rel_dev(t);
            if (rel > 1e-3) {
                // A sample can straddle fine structure the breakpoint list does
                // not declare (e.g. quadrature-node kinks of averaged models);
                // a wrong derivative stays wrong at staggered offsets too.
                const double h = 1e-7 * (1.0 + std::abs(t));
                rel = std::min({rel, rel_dev(t + 64.0 * h), rel_dev(t - 64.0 * h)});
            }
            if (rel > worst) {
                worst = rel;
                where = "t=" + num(t);
            }
        }
        rep.add("derivative_consistency", worst <= 1e-3, worst, where);
    }
    return rep;
}

double selfdecomposability_residual(const LevyDensity& k, double c, const SampleGrid& grid) {
    require(std::isfinite(c) && c > 0.0 && c < 1.0, "selfdecomposability: c must be in (0,1)");
    double worst = kInf;
    for (double t : grid.points()) worst = std::min(worst, k(t) - k(t / c));
    return worst;
}

namespace {

// Shared tail-truncated integral of h(t) = k(t) - k(-t) weighted by `weight`
// over [lo, hi-or-tail].
std::vector<double> positive_nodes(const LevyDensity& k, double lo, double hi) {
    std::vector<double> nodes{lo};
    for (double b : k.breakpoints()) {
        const double s = std::abs(b);
        if (s > lo && s < hi) nodes.push_back(s);
    }
    nodes.push_back(hi);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

double truncation_radius(const LevyDensity& k, int m, double tol, const char* what) {
    double T = 1.0;
    for (int i = 0; i < 80; ++i) {
        const double b = k.tail_moment_bound(T, m);
        if (b <= tol) return T;
        T *= 2.0;
    }
    throw QuadratureError(std::string(what) + ": tail mass of " + k.describe() +
                              " does not decay within a representable radius",
                          0.0, k.tail_moment_bound(T, m));
}

}  // namespace

double gamma_k(const LevyDensity& k, double abs_tol) {
    require(abs_tol > 0.0, "gamma_k: abs_tol must be > 0");
    const double T = truncation_radius(k, 0, 0.25 * abs_tol, "gamma_k");
    detail::PanelBudget budget{abs_tol, 1e-9, 40, 60000};
    auto h = [&k](double t) { return k(t) - k(-t); };
    return detail::integrate(h, positive_nodes(k, 0.0, T), budget, "gamma_k").value;
}

double lemma_eta(const LevyDensity& k) {
    detail::PanelBudget budget{1e-12, 1e-10, 40, 60000};
    auto h = [&k](double t) { return k(t) - k(-t); };
    return detail::integrate(h, positive_nodes(k, 0.0, 1.0), budget, "lemma_eta").value;
}

FreeTriplet::FreeTriplet(double a_, LevyDensity k_, double eta_)
    : a(a_), k(std::move(k_)), eta(eta_) {
    require(std::isfinite(a) && a >= 0.0, "triplet: a must be finite and >= 0");
    require(std::isfinite(eta), "triplet: eta must be finite");
}

FreeTriplet lemma_triplet(const LevyDensity& k) { return FreeTriplet(0.0, k, lemma_eta(k)); }

ValidationReport validate_triplet(const FreeTriplet& triplet) {
    ValidationReport rep;
    rep.add("a_nonneg", triplet.a >= 0.0, std::min(triplet.a, 0.0));
    rep.add("eta_finite", std::isfinite(triplet.eta), 0.0);
    // Levy integrability int min(1, t^2) k/|t| dt on a log grid (trapezoid).
    const auto pts = SampleGrid{}.points();
    double integral = 0.0;
    bool finite = true;
    auto f = [&](double t) {
        const double v = std::min(1.0, t * t) * triplet.k(t) / std::abs(t);
        if (!std::isfinite(v)) finite = false;
        return v;
    };
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i] < 0.0 && pts[i + 1] > 0.0) continue;
        integral += 0.5 * (f(pts[i]) + f(pts[i + 1])) * (pts[i + 1] - pts[i]);
    }
    rep.add("levy_integrability", finite && std::isfinite(integral), integral);
    return rep;
}

namespace {

// int sign(t) k(t) (1_{[-1,1]}(t) - 1/(1+t^2)) dt, the drift correction
// between the truncation-compensated and compactified conventions.
double pair_correction(const LevyDensity& k) {
    detail::PanelBudget budget{1e-11, 1e-9, 40, 60000};
    auto inner = [&k](double t) {
        return (k(t) - k(-t)) * t * t / (1.0 + t * t);
    };
    const double head =
        detail::integrate(inner, positive_nodes(k, 0.0, 1.0), budget, "pair_correction").value;
    // tail: |integrand| <= (k(t)+k(-t))/t^2 <= (1/T) * |t|^{-1}-tail
    double T = 2.0;
    for (int i = 0; i < 80 && k.tail_moment_bound(T, -1) / T > 0.25e-11; ++i) T *= 2.0;
    auto outer = [&k](double t) { return (k(t) - k(-t)) / (1.0 + t * t); };
    const double tail =
        detail::integrate(outer, positive_nodes(k, 1.0, T), budget, "pair_correction").value;
    return head - tail;
}

}  // namespace

double GeneratingPair::sigma_density(double t) const {
    return t == 0.0 ? 0.0 : std::abs(t) * k(t) / (1.0 + t * t);
}

GeneratingPair triplet_to_pair(const FreeTriplet& triplet) {
    return GeneratingPair{triplet.eta - pair_correction(triplet.k), triplet.a, triplet.k};
}

FreeTriplet pair_to_triplet(const GeneratingPair& pair) {
    return FreeTriplet(pair.sigma_atom, pair.k, pair.gamma + pair_correction(pair.k));
}

}  // namespace fsd
