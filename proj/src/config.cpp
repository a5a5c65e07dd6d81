#include "fsd/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "fsd/errors.hpp"
#include "fsd/mollify.hpp"

namespace fsd {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("config: unknown key \"" + item.key() + "\" in " + where);
    }
}

double get_number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(std::string("config: \"") + key + "\" must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(std::string("config: \"") + key + "\" must be an integer");
    return v.get<int>();
}

std::vector<double> get_array(const json& obj, const char* key) {
    if (!obj.contains(key))
        throw ConfigError(std::string("config: table family needs \"") + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_array())
        throw ConfigError(std::string("config: \"") + key + "\" must be an array");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number())
            throw ConfigError(std::string("config: \"") + key +
                              "\" must contain numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

LevyDensity parse_levy(const json& levy) {
    if (!levy.is_object()) throw ConfigError("config: \"levy\" must be an object");
    if (!levy.contains("family") || !levy.at("family").is_string())
        throw ConfigError("config: \"levy.family\" must be a string");
    const std::string family = levy.at("family").get<std::string>();
    if (family == "table") {
        reject_unknown(levy, {"family", "t_neg", "k_neg", "t_pos", "k_pos"}, "levy");
        return make_table(get_array(levy, "t_neg"), get_array(levy, "k_neg"),
                          get_array(levy, "t_pos"), get_array(levy, "k_pos"));
    }
    reject_unknown(levy, {"family", "params"}, "levy");
    std::map<std::string, double> params;
    if (levy.contains("params")) {
        const json& p = levy.at("params");
        if (!p.is_object()) throw ConfigError("config: \"levy.params\" must be an object");
        for (const auto& item : p.items()) {
            if (!item.value().is_number())
                throw ConfigError("config: parameter \"" + item.key() +
                                  "\" must be a number");
            params[item.key()] = item.value().get<double>();
        }
    }
    return make_family(family, params);
}

}  // namespace

QuadSpec RunConfig::quad_spec() const {
    QuadSpec spec;
    spec.abs_tol = tol.quad_abs;
    spec.rel_tol = tol.quad_rel;
    return spec;
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown(root,
                   {"levy", "a", "eta", "epsilon_floor", "mollify", "grid", "tolerances"},
                   "top level");
    if (!root.contains("levy")) throw ConfigError("config: missing \"levy\" block");

    LevyDensity base = parse_levy(root.at("levy"));

    const double floor = get_number(root, "epsilon_floor", 0.0);
    if (floor < 0.0 || !std::isfinite(floor))
        throw ConfigError("config: \"epsilon_floor\" must be finite and >= 0");
    if (floor > 0.0)
        base = make_sum({{1.0, base},
                         {1.0, make_family("gauss-scaled", {{"a", floor}, {"n", 1.0}})}});

    RunConfig cfg{base};
    cfg.a = get_number(root, "a", 0.0);
    if (cfg.a < 0.0 || !std::isfinite(cfg.a))
        throw ConfigError("config: \"a\" must be finite and >= 0");

    if (root.contains("eta")) {
        const json& eta = root.at("eta");
        if (eta.is_string()) {
            if (eta.get<std::string>() != "lemma")
                throw ConfigError("config: \"eta\" must be a number or \"lemma\"");
        } else if (eta.is_number()) {
            cfg.eta_is_lemma = false;
            cfg.eta = eta.get<double>();
            if (!std::isfinite(cfg.eta))
                throw ConfigError("config: \"eta\" must be finite");
        } else {
            throw ConfigError("config: \"eta\" must be a number or \"lemma\"");
        }
    }

    if (root.contains("mollify")) {
        const json& mol = root.at("mollify");
        if (!mol.is_object()) throw ConfigError("config: \"mollify\" must be an object");
        reject_unknown(mol, {"n", "epsilon_floor"}, "mollify");
        MollifyConfig mc;
        mc.n = get_int(mol, "n", mc.n);
        mc.epsilon_floor = get_number(mol, "epsilon_floor", mc.epsilon_floor);
        if (mc.n < 1) throw ConfigError("config: \"mollify.n\" must be >= 1");
        cfg.mollify = mc;
    }

    if (root.contains("grid")) {
        const json& grid = root.at("grid");
        if (!grid.is_object()) throw ConfigError("config: \"grid\" must be an object");
        reject_unknown(grid, {"x_min", "x_max", "n_points", "refine"}, "grid");
        const bool has_min = grid.contains("x_min"), has_max = grid.contains("x_max");
        if (has_min != has_max)
            throw ConfigError("config: \"x_min\" and \"x_max\" must be given together");
        if (has_min) {
            const double lo = get_number(grid, "x_min", 0.0);
            const double hi = get_number(grid, "x_max", 0.0);
            if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
                throw ConfigError("config: grid needs finite x_min < x_max");
            cfg.grid.domain = {lo, hi};
        }
        cfg.grid.n_points = get_int(grid, "n_points", cfg.grid.n_points);
        if (cfg.grid.n_points < 16)
            throw ConfigError("config: \"n_points\" must be >= 16");
        if (grid.contains("refine")) {
            if (!grid.at("refine").is_boolean())
                throw ConfigError("config: \"refine\" must be a boolean");
            cfg.grid.refine = grid.at("refine").get<bool>();
        }
    }

    if (root.contains("tolerances")) {
        const json& tols = root.at("tolerances");
        if (!tols.is_object())
            throw ConfigError("config: \"tolerances\" must be an object");
        reject_unknown(tols, {"solve_v", "quad_abs", "quad_rel", "mass"}, "tolerances");
        cfg.tol.solve_v = get_number(tols, "solve_v", cfg.tol.solve_v);
        cfg.tol.quad_abs = get_number(tols, "quad_abs", cfg.tol.quad_abs);
        cfg.tol.quad_rel = get_number(tols, "quad_rel", cfg.tol.quad_rel);
        cfg.tol.mass = get_number(tols, "mass", cfg.tol.mass);
        for (double v : {cfg.tol.solve_v, cfg.tol.quad_abs, cfg.tol.quad_rel, cfg.tol.mass})
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError("config: tolerances must be positive numbers");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

LevyDensity effective_factor(const RunConfig& cfg) {
    if (cfg.mollify)
        return mollify_k(cfg.k, cfg.a, cfg.mollify->n, cfg.mollify->epsilon_floor);
    if (cfg.a > 0.0)
        throw ConfigError("config: a > 0 needs a \"mollify\" block; the semicircular "
                          "part has no jump-density representation of its own");
    return cfg.k;
}

double effective_drift(const RunConfig& cfg, const LevyDensity& run_k) {
    if (cfg.eta_is_lemma) return 0.0;
    return cfg.eta - lemma_eta(run_k);
}

}  // namespace fsd
