// weyllab: command-line front end for the Weyl-law laboratory.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "weyl/config.hpp"
#include "weyl/errors.hpp"
#include "weyl/experiments.hpp"
#include "weyl/report.hpp"

namespace fs = std::filesystem;
using namespace weyl;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "weyllab_out";
    std::optional<double> h;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::string> mode;
    std::optional<int> threads;
};

void add_common(CLI::App* sub, Options& opt) {
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_option("-c,--config", opt.config_path, "YAML config file");
    sub->add_option("-o,--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--h", opt.h, "Replace h_list with a single h");
    sub->add_option("--seed", opt.seed, "Override master_seed");
    sub->add_option("--trials", opt.trials, "Override n_trials");
    sub->add_option("--mode", opt.mode, "paper | effective")->check(CLI::IsMember({"paper", "effective"}));
    sub->add_option("--threads", opt.threads, "Worker threads for ensembles");
}

LabConfig resolve(const Options& opt) {
    LabConfig cfg = opt.config_path.empty() ? parse_config("") : load_config(opt.config_path);
    if (opt.h) {
        cfg.experiment.h_list = {*opt.h};
        cfg.line_check.h = *opt.h;
    }
    if (opt.seed) cfg.experiment.master_seed = *opt.seed;
    if (opt.trials) {
        cfg.experiment.n_trials = *opt.trials;
        cfg.line_check.n_trials = *opt.trials;
    }
    if (opt.mode) cfg.experiment.mode = *opt.mode == "paper" ? DeltaMode::paper : DeltaMode::effective;
    if (opt.threads) cfg.experiment.threads = *opt.threads;
    return cfg;
}

fs::path prepare_out(const Options& opt, const LabConfig& cfg) {
    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    std::ofstream(dir / "resolved_config.yaml", std::ios::binary) << config_to_yaml(cfg);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

PlanInputs cli_plan_inputs(const ExperimentConfig& ex, double h) {
    PlanInputs in;
    in.s = ex.s;
    in.eps = ex.eps;
    in.kappa = ex.kappa_value();
    in.h = h;
    in.tau0 = ex.tau0;
    in.mode = ex.mode;
    in.delta_eff = ex.delta_eff;
    return in;
}

int cmd_derive_params(const LabConfig& cfg, const fs::path& out) {
    ojson plans = ojson::array();
    for (double h : cfg.experiment.h_list) {
        PerturbationPlan plan;
        try {
            plan = derive_params(cli_plan_inputs(cfg.experiment, h));
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
        std::cout << "h = " << format_h(h) << "\n"
                  << "  M = " << plan.M << "  (" << plan.M_q << ")\n"
                  << "  M~ = " << plan.M_tilde << "  (" << plan.Mt_q << ")\n"
                  << "  N1 = " << plan.N1 << "  (" << plan.N1_q << ")\n"
                  << "  L = " << plan.L << "  R = " << plan.R << "  D = " << plan.D << "\n"
                  << "  delta_paper = " << plan.delta_paper << "  delta = " << plan.delta << "\n"
                  << "  eps0 = " << plan.eps0 << "\n"
                  << "  windows hold: " << (plan.windows_hold() ? "yes" : "no") << "\n";
        for (const auto& w : plan.warnings) std::cout << "  warning: " << w << "\n";
        plans.push_back(plan_json(plan));
    }
    ojson j;
    j["config"] = config_to_yaml(cfg);
    j["plans"] = plans;
    write_json(out / "params.json", j);
    return 0;
}

int cmd_volume(const LabConfig& cfg, const fs::path& out) {
    const ExperimentConfig& ex = cfg.experiment;
    const PhaseGrid grid = certified_grid(ex.spec, ex.region, ex.quad_n, ex.quad_n);
    const double vol = volume_preimage(ex.spec, ex.region, grid);
    const Region tube = Region::boundary_tube(ex.region, ex.tube_r);
    const double tube_vol = volume_preimage(ex.spec, tube, certified_grid(ex.spec, tube, ex.quad_n, ex.quad_n));
    std::cout << "vol p^-1(region) = " << vol << "\n"
              << "vol p^-1(boundary + D(0," << ex.tube_r << ")) = " << tube_vol << "\n";
    ojson j;
    j["config"] = config_to_yaml(cfg);
    j["volume"] = vol;
    j["tube_volume"] = tube_vol;
    ojson preds = ojson::array();
    for (double h : ex.h_list) {
        const double pred = weyl_prediction(ex.spec, ex.region, h, grid);
        std::cout << "h = " << h << "  prediction = " << pred << "\n";
        preds.push_back({{"h", h}, {"prediction", pred}});
    }
    j["predictions"] = preds;

    std::vector<cplx> points = cfg.volume.kappa_points;
    if (points.empty()) points.push_back(ex.region.center());
    ojson fits = ojson::array();
    for (const auto& z : points) {
        ojson f;
        f["z"] = {z.real(), z.imag()};
        try {
            const KappaFit fit = estimate_kappa(ex.spec, z, cfg.volume.t_lo, cfg.volume.t_hi, cfg.volume.n_points);
            std::cout << "kappa at (" << z.real() << ", " << z.imag() << "): " << fit.kappa_hat << "  r2 = " << fit.r2 << "\n";
            f["kappa_hat"] = fit.kappa_hat;
            f["r2"] = fit.r2;
            f["t"] = fit.t;
            f["volume"] = fit.volume;
        } catch (const NumericError& e) {
            std::cout << "kappa at (" << z.real() << ", " << z.imag() << "): " << e.what() << "\n";
            f["error"] = e.what();
        }
        fits.push_back(f);
    }
    j["kappa_fits"] = fits;
    write_json(out / "volume.json", j);
    return 0;
}

int cmd_spectrum(const LabConfig& cfg, const fs::path& out) {
    const ExperimentConfig& ex = cfg.experiment;
    const double h = ex.h_list.front();
    const HContext ctx = prepare_h(ex, h);
    Eigen::MatrixXcd m = ctx.P.entries;
    const int trial = cfg.spectrum.trial;
    std::uint64_t seed = 0;
    if (trial >= 0) {
        seed = derive_seed(ex.master_seed, static_cast<std::uint64_t>(trial));
        m = build_perturbed(ctx.P, ctx.plan, sample_potential(ctx.plan, seed, ex.real_mode)).matrix.entries;
    }
    const SpectrumResult spec = eigenvalues(m, h);
    const int count = count_in_region(spec, ex.region);

    const Rectangle box = cfg.spectrum.box ? *cfg.spectrum.box : ex.omega.bounding_box();
    const int nr = std::max(cfg.spectrum.n_re, 2), ni = std::max(cfg.spectrum.n_im, 2);
    std::vector<cplx> zs;
    for (int j = 0; j < ni; ++j)
        for (int i = 0; i < nr; ++i)
            zs.emplace_back(box.re_lo + (box.re_hi - box.re_lo) * i / (nr - 1), box.im_lo + (box.im_hi - box.im_lo) * j / (ni - 1));
    const auto ps = pseudospectrum(m, zs);

    const std::string tag = trial >= 0 ? std::to_string(trial) : std::string("baseline");
    {
        std::ofstream f(out / ("eigs_" + format_h(h) + "_" + tag + ".csv"), std::ios::binary);
        write_eigs_csv(f, spec.eigenvalues, cfg);
    }
    {
        std::ofstream f(out / ("pseudospec_" + format_h(h) + ".csv"), std::ios::binary);
        write_pseudospec_csv(f, ps, cfg);
    }
    std::cout << "h = " << h << "  N = " << spec.matrix_dim << "  count = " << count << "  prediction = " << ctx.prediction
              << "  max residual = " << spec.max_residual << "\n";
    ojson j;
    j["config"] = config_to_yaml(cfg);
    j["h"] = h;
    j["trial"] = trial;
    j["seed"] = seed;
    j["dim"] = spec.matrix_dim;
    j["count"] = count;
    j["prediction"] = ctx.prediction;
    j["max_residual"] = spec.max_residual;
    write_json(out / "spectrum.json", j);
    return 0;
}

int cmd_weyl_ensemble(const LabConfig& cfg, const fs::path& out) {
    const WeylReport rep = run_ensemble(cfg.experiment);
    write_json(out / "report.json", report_json(rep, cfg));
    {
        std::ofstream f(out / "trials.csv", std::ios::binary);
        write_trials_csv(f, rep, cfg);
    }
    ojson plans = ojson::array();
    for (const auto& hr : rep.per_h) {
        plans.push_back(plan_json(hr.plan));
        auto eig_file = [&](const TrialResult& t, const std::string& tag) {
            std::ofstream f(out / ("eigs_" + format_h(hr.h) + "_" + tag + ".csv"), std::ios::binary);
            write_eigs_csv(f, t.eigenvalues, cfg);
        };
        eig_file(hr.baseline, "baseline");
        for (const auto& t : hr.trials) eig_file(t, std::to_string(t.trial_index));
        std::cout << "h = " << hr.h << "  N = " << hr.grid.dim() << "  prediction = " << hr.prediction
                  << "  baseline = " << hr.baseline.count << "  median rel. error = " << hr.median_rel_error
                  << "  success(rel) = " << hr.success_fraction_rel << "  success(bound) = " << hr.success_fraction_bound
                  << "\n";
    }
    std::cout << "C_fit = " << rep.c_fit << "\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    ojson pj;
    pj["config"] = config_to_yaml(cfg);
    pj["plans"] = plans;
    write_json(out / "params.json", pj);
    return 0;
}

int cmd_line_check(const LabConfig& cfg, const fs::path& out) {
    const LineCheckSettings& lc = cfg.line_check;
    const GridParams grid{lc.h, lc.K};
    const LineCheckResult res = line_model_check(lc.g, lc.h, lc.k_max, grid);
    double max_res = 0.0;
    for (double r : res.residuals) max_res = std::max(max_res, r);

    PlanInputs in = cli_plan_inputs(cfg.experiment, lc.h);
    in.l_cap = lc.h * lc.K;
    const PerturbationPlan plan = derive_params(in);
    const double line_im = lc.g.mean().imag();
    ojson regions = ojson::array();
    bool all_zero = true;
    for (const auto& region : lc.regions) {
        const Rectangle b = region.bounding_box();
        const double dist = line_im < b.im_lo ? b.im_lo - line_im : (line_im > b.im_hi ? line_im - b.im_hi : 0.0);
        std::vector<int> counts;
        for (int t = 0; t < lc.n_trials; ++t) {
            const RandomPotential pot = sample_potential(plan, derive_seed(cfg.experiment.master_seed, t), cfg.experiment.real_mode);
            const TrigPoly g = lc.g + pot.q * cplx(plan.multiplier_scale());
            counts.push_back(count_in_region(line_model_spectrum(g, lc.h, lc.K), region));
        }
        const bool zero = std::all_of(counts.begin(), counts.end(), [](int c) { return c == 0; });
        if (dist >= 0.1) all_zero = all_zero && zero;
        regions.push_back({{"region", region_to_yaml(region)}, {"distance_to_line", dist}, {"counts", counts}});
    }
    std::cout << "max quasimode residual = " << max_res << "  max tail = " << res.max_tail
              << "  max |Im lambda - <Im g>| = " << res.max_imag_deviation << "\n"
              << "regions off the line have zero count in every trial: " << (all_zero ? "yes" : "no") << "\n";
    ojson j;
    j["config"] = config_to_yaml(cfg);
    j["quasimodes"] = line_check_json(res);
    j["max_residual"] = max_res;
    j["regions"] = regions;
    j["off_line_counts_zero"] = all_zero;
    write_json(out / "line_check.json", j);
    return 0;
}

int cmd_identity_checks(const LabConfig& cfg, const fs::path& out) {
    const IdentityReport rep = run_identity_checks(cfg.identity, cfg.experiment.master_seed);
    double worst_regular = 0.0, worst_singular = 0.0;
    for (const auto& c : rep.factorization) {
        double& slot = c.t1 <= 1e-9 ? worst_singular : worst_regular;
        slot = std::max(slot, c.residual);
    }
    std::cout << "determinant factorization: max residual = " << worst_regular << " (t1 > 1e-9), " << worst_singular
              << " (t1 <= 1e-9, min t1 = " << rep.min_t1 << ")\n"
              << "Grushin block residual: " << rep.max_block_residual << "\n"
              << "singular values of E_-+ vs t_j: " << rep.max_e_minus_plus_error << "\n"
              << "log-det derivative identity: max residual = " << rep.max_deriv_residual << "\n";
    ojson j = identity_json(rep);
    j["config"] = config_to_yaml(cfg);
    write_json(out / "identity_checks.json", j);
    const bool ok = worst_regular <= 1e-8 && worst_singular <= 1e-8 && rep.max_block_residual <= 1e-9 &&
                    rep.max_e_minus_plus_error <= 1e-9 && rep.max_deriv_residual <= 1e-6;
    if (!ok) std::cerr << "weyllab: identity checks exceeded their tolerances\n";
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical Weyl-law laboratory for non-self-adjoint operators on the circle"};
    app.require_subcommand(1);
    Options opt;
    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const LabConfig&, const fs::path&);
    };
    const Sub subs[] = {
        {"derive-params", "Print the perturbation plan for each h", cmd_derive_params},
        {"volume", "Phase-space volumes, predictions and kappa fits", cmd_volume},
        {"spectrum", "Eigenvalues and pseudospectrum of one operator", cmd_spectrum},
        {"weyl-ensemble", "Monte Carlo eigenvalue counts against the Weyl prediction", cmd_weyl_ensemble},
        {"line-check", "Quasimodes and closed-form spectrum of hD + g", cmd_line_check},
        {"identity-checks", "Grushin, determinant and functional-calculus identities", cmd_identity_checks},
    };
    std::vector<std::pair<CLI::App*, const Sub*>> commands;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, opt);
        commands.emplace_back(sub, &s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const LabConfig cfg = resolve(opt);
        for (const auto& [sub, s] : commands)
            if (sub->parsed()) return s->run(cfg, prepare_out(opt, cfg));
    } catch (const ConfigError& e) {
        std::cerr << "weyllab: config error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "weyllab: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "weyllab: numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
