// Command-line surface: density / verify / cumulants / mollify, all driven by
// a JSON config. Exit codes: 0 success, 1 failed verification checks,
// 2 config or validation error, 3 numerical non-convergence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsd/config.hpp"
#include "fsd/cumulants.hpp"
#include "fsd/density.hpp"
#include "fsd/errors.hpp"
#include "fsd/mollify.hpp"
#include "fsd/report.hpp"
#include "fsd/transforms.hpp"
#include "fsd/vcurve.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    int workers = 0;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Shared validation stage: grid checks of the configured base factor.
// A failure here is a config problem (exit 2), not a numerical one.
bool validate_base(const fsd::RunConfig& cfg) {
    const fsd::ValidationReport rep = fsd::validate_conditions(cfg.k);
    fsd::print_report(rep, std::cout);
    if (!rep.all_pass()) {
        std::cerr << "factor validation failed\n";
        return false;
    }
    return true;
}

fsd::BuildOptions build_options(const fsd::RunConfig& cfg, int workers, double drift) {
    fsd::BuildOptions opt;
    opt.domain = cfg.grid.domain;
    opt.n_points = cfg.grid.n_points;
    opt.refine = cfg.grid.refine;
    opt.workers = workers;
    opt.drift = drift;
    opt.mass_tol = cfg.tol.mass;
    opt.solve_tol = cfg.tol.solve_v;
    return opt;
}

int cmd_density(const CommonArgs& args) {
    const fsd::RunConfig cfg = fsd::load_config(args.config_path);
    if (!validate_base(cfg)) return 2;
    const fsd::LevyDensity run_k = fsd::effective_factor(cfg);
    const fsd::TransformContext ctx = fsd::make_context(run_k, cfg.quad_spec());
    const double drift = fsd::effective_drift(cfg, run_k);
    const fsd::DensityCurve curve =
        fsd::build_density(ctx, build_options(cfg, args.workers, drift));
    const fsd::DensityPoint mode = fsd::refine_mode(ctx, curve, cfg.tol.solve_v);
    if (!args.out_path.empty()) fsd::write_csv_file(args.out_path, curve);
    std::cout << "mass=" << fmt(curve.mass) << " mode=" << fmt(mode.xi)
              << " fmax=" << fmt(mode.f) << "\n";
    return 0;
}

int cmd_verify(const CommonArgs& args) {
    const fsd::RunConfig cfg = fsd::load_config(args.config_path);
    if (!validate_base(cfg)) return 2;
    const fsd::LevyDensity run_k = fsd::effective_factor(cfg);
    const fsd::TransformContext ctx = fsd::make_context(run_k, cfg.quad_spec());
    const double drift = fsd::effective_drift(cfg, run_k);
    const fsd::DensityCurve curve =
        fsd::build_density(ctx, build_options(cfg, args.workers, drift));

    fsd::ValidationReport rep;
    rep.add("mass", std::abs(curve.mass - 1.0) <= cfg.tol.mass,
            std::abs(curve.mass - 1.0), "trapezoid over xi");

    // Round-trip identity z G(H(z)) = 1 at deterministic pseudo-random points
    // above the boundary curve.
    std::mt19937_64 rng(20240915ull);
    std::uniform_real_distribution<double> ux(curve.pts.front().x, curve.pts.back().x);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double x = ux(rng);
        const double v = fsd::solve_v(ctx, x, cfg.tol.solve_v);
        const double y = v * (1.0 + 0.05 * std::pow(400.0, u01(rng)));
        worst = std::max(worst, fsd::identity_residual(ctx, {x, y}));
    }
    rep.add("goh_identity", worst <= 1e-8, worst, "64 samples above the curve");

    fsd::CrossCheckOptions cc;
    cc.workers = args.workers;
    const fsd::CrossCheck cross = fsd::crossvalidate(ctx, curve, cc);
    rep.add("crossvalidate", cross.failures == 0 && cross.max_dev <= 1e-3,
            cross.max_dev,
            "probes 1e-3/1e-4, " + std::to_string(cross.failures) + " oracle failures");

    rep.merge(fsd::check_unimodal(curve));

    const fsd::AngularProfile prof = fsd::angular_profile(ctx, 1.0, 101);
    const bool ang_ok =
        prof.single_min && std::abs(prof.cos_at_min) < 0.7071067811865476;
    rep.add("angular_r1", ang_ok, std::abs(prof.cos_at_min),
            "theta_r=" + fmt(prof.theta[static_cast<size_t>(prof.min_index)]));

    fsd::print_report(rep, std::cout);
    return rep.all_pass() ? 0 : 1;
}

int cmd_cumulants(const CommonArgs& args, int order) {
    const fsd::RunConfig cfg = fsd::load_config(args.config_path);
    if (!validate_base(cfg)) return 2;
    fsd::LevyDensity k = cfg.mollify ? fsd::effective_factor(cfg) : cfg.k;
    const double a = cfg.mollify ? 0.0 : cfg.a;
    const double eta = cfg.eta_is_lemma ? fsd::lemma_eta(k) : cfg.eta;
    const fsd::FreeTriplet triplet(a, k, eta);
    const std::vector<double> kappa = fsd::cumulants_from_k(triplet, order);
    const std::vector<double> m = fsd::moments_from_cumulants(kappa, order);

    std::ostringstream table;
    table << std::setw(4) << "n" << std::setw(26) << "kappa_n" << std::setw(26)
          << "m_n" << "\n";
    table << std::setprecision(16);
    for (int n = 1; n <= order; ++n)
        table << std::setw(4) << n << std::setw(26) << kappa[static_cast<size_t>(n - 1)]
              << std::setw(26) << m[static_cast<size_t>(n)] << "\n";
    std::cout << table.str();
    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path);
        if (!out) throw fsd::ConfigError("cannot open output file: " + args.out_path);
        out << table.str();
    }
    return 0;
}

int cmd_mollify(const CommonArgs& args, std::vector<int> n_list) {
    const fsd::RunConfig cfg = fsd::load_config(args.config_path);
    if (!validate_base(cfg)) return 2;
    if (n_list.empty())
        n_list = cfg.mollify ? std::vector<int>{cfg.mollify->n}
                             : std::vector<int>{8, 16, 32};
    const double eps = cfg.mollify ? cfg.mollify->epsilon_floor : -1.0;
    const double target_eta =
        cfg.eta_is_lemma ? fsd::lemma_eta(cfg.k) : cfg.eta;
    const fsd::FreeTriplet target(cfg.a, cfg.k, target_eta);
    if (!args.out_path.empty())
        std::filesystem::create_directories(args.out_path);

    std::optional<fsd::DensityCurve> prev;
    int prev_n = 0;
    for (int n : n_list) {
        const fsd::LevyDensity kn = fsd::mollify_k(cfg.k, cfg.a, n, eps);
        const fsd::TransformContext ctx = fsd::make_context(kn, cfg.quad_spec());
        const double drift = fsd::effective_drift(cfg, kn);
        const fsd::DensityCurve curve =
            fsd::build_density(ctx, build_options(cfg, args.workers, drift));
        const double sd = fsd::sigma_distance(target, kn);
        std::cout << "n=" << n << " sigma_distance=" << fmt(sd)
                  << " mass=" << fmt(curve.mass) << "\n";
        if (!args.out_path.empty())
            fsd::write_csv_file(
                args.out_path + "/density_n" + std::to_string(n) + ".csv", curve);
        if (prev) {
            const double lo = std::max(prev->pts.front().xi, curve.pts.front().xi);
            const double hi = std::min(prev->pts.back().xi, curve.pts.back().xi);
            double sup = 0.0;
            for (int i = 0; i <= 512; ++i) {
                const double xi = lo + (hi - lo) * i / 512.0;
                sup = std::max(sup, std::abs(fsd::interp_density(*prev, xi) -
                                             fsd::interp_density(curve, xi)));
            }
            std::cout << "pair=" << prev_n << ":" << n
                      << " sup_density_delta=" << fmt(sup) << "\n";
        }
        prev = curve;
        prev_n = n;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freely selfdecomposable density curves and diagnostics"};
    app.require_subcommand(1);

    CommonArgs args;
    int order = 4;
    std::vector<int> n_list;

    CLI::App* density = app.add_subcommand("density", "build a density curve, write CSV");
    CLI::App* verify = app.add_subcommand("verify", "run the consistency check suite");
    CLI::App* cumulants = app.add_subcommand("cumulants", "free cumulants and moments");
    CLI::App* mollify = app.add_subcommand("mollify", "mollified approximants per n");
    for (CLI::App* sub : {density, verify, cumulants, mollify}) {
        sub->add_option("--config", args.config_path, "JSON config path")->required();
        sub->add_option("--out", args.out_path,
                        "output CSV/report path (directory for mollify)");
        sub->add_option("--workers", args.workers, "worker threads, 0 = auto");
    }
    cumulants->add_option("--order", order, "highest cumulant order");
    mollify->add_option("--n", n_list, "mollification indices")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (density->parsed()) return cmd_density(args);
        if (verify->parsed()) return cmd_verify(args);
        if (cumulants->parsed()) return cmd_cumulants(args, order);
        if (mollify->parsed()) return cmd_mollify(args, n_list);
    } catch (const fsd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fsd::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
