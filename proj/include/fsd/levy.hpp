#pragma once

// Density factors k : R\{0} -> [0, inf) that are positive, monotone on each
// half-line and decay fast enough that (1+t^2)^2 max(k, |k'|) stays bounded.
// Such a factor fixes the Levy measure k(t)/|t| dt of a freely
// selfdecomposable law; the free characteristic triplet and the compactified
// generating-pair form derived from k live here as well.

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fsd/report.hpp"

namespace fsd {

enum class Family { symexp, gauss_scaled, half_exp, table, cauchy, mollified, sum };

std::string family_name(Family f);

namespace detail {

// Polymorphic backend. `breaks` lists kink/knot abscissae (always contains
// 0); `bound`/`bound2` are declared constants for the (1+t^2)^2-weighted
// envelopes of {k, |k'|} and |k''| used by validate_conditions.
struct FamilyModel {
    virtual ~FamilyModel() = default;
    virtual double k(double t) const = 0;
    virtual double dk(double t) const = 0;
    virtual bool has_ddk() const { return false; }
    virtual double ddk(double t) const;
    // Upper bound on the one-sided-summed tail mass int_{|t|>=T} |t|^m k(t) dt
    // for m >= -1; may legitimately return +inf (divergent tail).
    virtual double tail_moment_bound(double T, int m) const = 0;
    virtual Family family() const = 0;
    virtual std::string describe() const = 0;
    std::vector<double> breaks{0.0};
    double bound = 0.0;
    double bound2 = 0.0;
};

// Scan helpers shared with the mollifier backend.
std::vector<double> default_log_grid(double t_min, double t_max, int per_side);
void finalize_envelope(FamilyModel& m);

}  // namespace detail

// Value-semantic handle to an immutable density factor; cheap to copy and
// safe to share across threads.
class LevyDensity {
public:
    explicit LevyDensity(std::shared_ptr<const detail::FamilyModel> model);

    double operator()(double t) const { return model_->k(t); }
    double derivative(double t) const { return model_->dk(t); }
    bool has_second_derivative() const { return model_->has_ddk(); }
    double second_derivative(double t) const { return model_->ddk(t); }
    double tail_moment_bound(double T, int m = 1) const;
    const std::vector<double>& breakpoints() const { return model_->breaks; }
    double envelope_bound(int order) const;  // order 0/1 -> bound, 2 -> bound2
    Family family() const { return model_->family(); }
    std::string describe() const { return model_->describe(); }

private:
    std::shared_ptr<const detail::FamilyModel> model_;
};

// Built-in families, keyed by tag:
//   "symexp"       lambda * exp(-rate*|t|)            params: lambda, rate
//   "gauss-scaled" a * n^2 * exp(-(n t)^2)            params: a, n
//   "half-exp"     lambda*exp(-rate*t) on t>0, plus eps*exp(-t^2) floor
//                                                     params: lambda, rate, eps
//   "cauchy"       scale / (pi |t|)                   params: scale
// Unknown tags or parameter keys raise ConfigError. "table", "sum" and
// "mollified" are built through their dedicated constructors.
LevyDensity make_family(const std::string& tag,
                        const std::map<std::string, double>& params = {});

// Piecewise-linear factor from per-side knot lists (t ascending, matching k
// values, negative-side ts < 0 < positive-side ts). Beyond the outermost knot
// the factor continues exponentially, matching value and slope; inside the
// innermost knot it is held constant. Structural problems (non-ascending t,
// negative k, length mismatch, one-knot side) raise ConfigError; monotonicity
// is deliberately not enforced here so validate_conditions can flag it.
LevyDensity make_table(std::vector<double> t_neg, std::vector<double> k_neg,
                       std::vector<double> t_pos, std::vector<double> k_pos);

// Positive linear combination sum_i c_i * k_i.
LevyDensity make_sum(std::vector<std::pair<double, LevyDensity>> terms);

// Dilation t -> k(t/c) for c > 0 (the factor of the law scaled by c).
LevyDensity dilate(const LevyDensity& k, double c);

// Signed log-spaced sample grid used by the grid-based validators.
struct SampleGrid {
    double t_min = 1e-6;
    double t_max = 1e3;
    int per_side = 400;
    std::vector<double> points() const;
};

// Grid checks of the defining conditions: positivity (zeros tolerated only as
// a terminal underflow tail), per-half-line monotonicity, finiteness of the
// declared (1+t^2)^2 envelopes, and agreement of k' with finite differences.
ValidationReport validate_conditions(const LevyDensity& k, const SampleGrid& grid = {});

// min over the grid of k(t) - k(t/c), c in (0,1). Nonnegative (up to
// roundoff) iff k is a selfdecomposability factor w.r.t. dilation by c.
double selfdecomposability_residual(const LevyDensity& k, double c,
                                    const SampleGrid& grid = {});

// gamma_k = int sign(t) k(t) dt (the drift that makes H(z) = z + gamma_k +
// int |t|k(t)/(z-t) dt tangent to the identity at infinity).
double gamma_k(const LevyDensity& k, double abs_tol = 1e-10);

// eta choice that zeroes the first cumulant shift: int_{-1}^{1} sign(t) k(t) dt.
double lemma_eta(const LevyDensity& k);

// Free characteristic triplet (a, k-factor, eta): semicircular weight a >= 0,
// Levy measure k(t)/|t| dt, drift eta.
struct FreeTriplet {
    double a;
    LevyDensity k;
    double eta;
    FreeTriplet(double a_, LevyDensity k_, double eta_);
};

FreeTriplet lemma_triplet(const LevyDensity& k);
ValidationReport validate_triplet(const FreeTriplet& triplet);

// Compactified generating pair (gamma, sigma) with sigma split into an atom
// at 0 of mass `sigma_atom` (= a) and the density |t| k(t) / (1 + t^2).
struct GeneratingPair {
    double gamma;
    double sigma_atom;
    LevyDensity k;
    double sigma_density(double t) const;
};

GeneratingPair triplet_to_pair(const FreeTriplet& triplet);
FreeTriplet pair_to_triplet(const GeneratingPair& pair);

}  // namespace fsd
