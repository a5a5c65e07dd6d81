#pragma once

// JSON run configuration:
// {
//   "levy": {"family": "symexp", "params": {"lambda": 1.0}},   // required
//   "a": 0.0,                   // semicircular weight, >= 0
//   "eta": "lemma" | <number>,  // drift convention
//   "epsilon_floor": 0.0,       // adds eps*exp(-t^2) to the base factor
//   "mollify": {"n": 32, "epsilon_floor": -1},                 // optional
//   "grid": {"x_min": -8, "x_max": 8, "n_points": 513, "refine": true},
//   "tolerances": {"solve_v": 1e-12, "quad_abs": 1e-11,
//                  "quad_rel": 1e-9, "mass": 1e-2}
// }
// The "table" family replaces "params" with knot arrays "t_neg", "k_neg",
// "t_pos", "k_pos". Unknown keys anywhere are rejected.

#include <optional>
#include <string>
#include <utility>

#include "fsd/levy.hpp"
#include "fsd/quad.hpp"

namespace fsd {

struct GridConfig {
    std::optional<std::pair<double, double>> domain;  // x_min/x_max, both or neither
    int n_points = 513;
    bool refine = true;
};

struct ToleranceConfig {
    double solve_v = 1e-12;
    double quad_abs = 1e-11;
    double quad_rel = 1e-9;
    double mass = 1e-2;
};

struct MollifyConfig {
    int n = 16;
    double epsilon_floor = -1.0;  // <0: pick the mollifier default
};

struct RunConfig {
    LevyDensity k;  // configured base factor, floor already applied
    double a = 0.0;
    bool eta_is_lemma = true;
    double eta = 0.0;  // meaningful when !eta_is_lemma
    std::optional<MollifyConfig> mollify;
    GridConfig grid;
    ToleranceConfig tol;

    QuadSpec quad_spec() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// The factor the run actually works with: the mollified factor when a
// mollify block is present, otherwise the base. a > 0 without mollification
// has no curve representation (the semicircular part is not a jump density)
// and is rejected here; cumulants handle that case directly from the triplet.
LevyDensity effective_factor(const RunConfig& cfg);

// Horizontal shift applied to xi: eta minus the lemma drift of the run
// factor (zero under the "lemma" convention).
double effective_drift(const RunConfig& cfg, const LevyDensity& run_k);

}  // namespace fsd
