#include "weyl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "weyl/errors.hpp"
#include "weyl/functional.hpp"

namespace weyl {

namespace {

std::string short_num(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

constexpr double kTwoPi = 2 * std::numbers::pi;

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

PlanInputs plan_inputs(const ExperimentConfig& config, double h, const GridParams& grid) {
    PlanInputs in;
    in.s = config.s;
    in.eps = config.eps;
    in.kappa = config.kappa_value();
    in.h = h;
    in.tau0 = config.tau0;
    in.mode = config.mode;
    in.delta_eff = config.delta_eff;
    in.l_cap = h * grid.K;
    return in;
}

GridParams grid_for(const ExperimentConfig& config, double h) {
    if (config.K) {
        GridParams g{h, *config.K};
        g.validate();
        return g;
    }
    return choose_truncation(config.spec, config.region, h, config.k_margin);
}

/// Phase grid covering the zone where p~ differs from p.
PhaseGrid guard_zone_grid(const GuardedSymbol& guard, int quad_n) {
    return certified_grid(guard.spec, Region::disk(guard.z_center, 2 * guard.rho), quad_n, quad_n);
}

double log_pz_integral(const GuardedSymbol& guard, cplx z, double h, int quad_n) {
    const PhaseGrid grid = guard_zone_grid(guard, quad_n);
    const double integral = integrate_phase_space(
        [&](double x, double xi) {
            const cplx p = eval_symbol(guard.spec, x, xi);
            const cplx pt = guard(x, xi);
            return std::log(std::abs(p - z)) - std::log(std::abs(pt - z));
        },
        grid);
    return integral / (kTwoPi * h);
}

}  // namespace

double ExperimentConfig::kappa_value() const {
    if (kappa) return *kappa;
    if (spec.order < 1) throw ConfigError("kappa: auto needs a symbol of positive order");
    return 1.0 / (2.0 * spec.order);
}

std::vector<cplx> ExperimentConfig::probes() const {
    return z_probes.empty() ? region.boundary_points(5) : z_probes;
}

std::vector<std::string> validate_config(const ExperimentConfig& config) {
    std::vector<std::string> warnings;
    try {
        config.spec.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("symbol: ") + e.what());
    }
    if (!check_ellipticity(config.spec).holds) throw ConfigError("symbol: not elliptic (a_m vanishes on the sample grid)");
    if (!check_symmetry(config.spec)) throw ConfigError("symbol: odd powers of xi present; Weyl runs need p(x,-xi) = p(x,xi)");
    if (config.h_list.empty()) throw ConfigError("h_list: empty");
    for (double h : config.h_list)
        if (!(h > 0 && h <= 1)) throw ConfigError("h_list: every h must lie in (0, 1]");
    if (config.n_trials < 1) throw ConfigError("n_trials: must be at least 1");
    if (config.threads < 1) throw ConfigError("threads: must be at least 1");
    if (!(config.tube_r > 0)) throw ConfigError("tube_r: must be positive");
    if (!(config.rel_tol > 0)) throw ConfigError("rel_tol: must be positive");
    if (config.quad_n < 16) throw ConfigError("quad_n: must be at least 16");
    if (!(config.k_margin >= 1)) throw ConfigError("k_margin: must be at least 1");
    if (config.K && *config.K < 1) throw ConfigError("K: must be at least 1");
    if (std::holds_alternative<BoundaryTube>(config.region.variant()))
        throw ConfigError("region: a boundary tube cannot be the counting region");

    for (const auto& z : config.region.boundary_points(256))
        if (!config.omega.contains(z)) throw ConfigError("region: not contained in omega");
    for (const auto& z : config.probes())
        if (!config.omega.contains(z)) throw ConfigError("z_probes: probe outside omega");

    // Omega must leave Sigma(p) somewhere.
    const PhaseGrid sgrid = certified_grid(config.spec, config.omega, 256, 256);
    const SigmaSampler sigma(config.spec, sgrid);
    const Rectangle box = config.omega.bounding_box();
    bool outside = false;
    constexpr int kProbe = 24;
    for (int i = 0; i <= kProbe && !outside; ++i)
        for (int j = 0; j <= kProbe && !outside; ++j) {
            const cplx w(box.re_lo + (box.re_hi - box.re_lo) * i / kProbe, box.im_lo + (box.im_hi - box.im_lo) * j / kProbe);
            if (config.omega.contains(w) && !sigma.contains(w)) outside = true;
        }
    if (!outside) throw ConfigError("omega: contained in Sigma(p) on the sampled grid");

    // Keep the region 2r away from the edge of Sigma(p).
    const double reach = 2 * config.tube_r;
    for (const auto& z : config.region.boundary_points(64)) {
        for (int d = 0; d < 8; ++d) {
            const cplx w = z + std::polar(reach, kTwoPi * d / 8);
            if (!sigma.contains(w)) {
                std::ostringstream msg;
                msg << "region boundary point (" << z.real() << ", " << z.imag()
                    << ") lies within 2r of the edge of Sigma(p)";
                warnings.push_back(msg.str());
                d = 8;
            }
        }
        if (!warnings.empty()) break;
    }

    for (double h : config.h_list) {
        try {
            const GridParams grid = grid_for(config, h);
            const PerturbationPlan plan = derive_params(plan_inputs(config, h, grid));
            for (const auto& w : plan.warnings) warnings.push_back("h=" + short_num(h) + ": " + w);
        } catch (const ParameterError& e) {
            throw ConfigError("plan at h=" + short_num(h) + ": " + e.what());
        }
    }
    return warnings;
}

double weyl_prediction(const SymbolSpec& spec, const Region& region, double h, const PhaseGrid& grid) {
    certify_grid(spec, region, grid);
    return volume_preimage(spec, region, grid) / (kTwoPi * h);
}

HContext prepare_h(const ExperimentConfig& config, double h) {
    HContext ctx;
    ctx.h = h;
    ctx.grid = grid_for(config, h);
    ctx.P = assemble_differential(config.spec, ctx.grid);
    ctx.plan = derive_params(plan_inputs(config, h, ctx.grid));

    const PhaseGrid pgrid = certified_grid(config.spec, config.region, config.quad_n, config.quad_n);
    ctx.volume = volume_preimage(config.spec, config.region, pgrid);
    ctx.prediction = ctx.volume / (kTwoPi * h);

    const Region tube = Region::boundary_tube(config.region, config.tube_r);
    ctx.tube_volume = volume_preimage(config.spec, tube, certified_grid(config.spec, tube, config.quad_n, config.quad_n));

    ctx.probes = config.probes();
    ctx.logdet_tilde.assign(ctx.probes.size(), std::nullopt);
    ctx.logdet_reference.assign(ctx.probes.size(), std::nullopt);
    if (!config.determinant_probes) return ctx;
    try {
        ctx.guard = construct_guard(config.spec, config.region.center(), ctx.probes);
        const GuardedSymbol& guard = *ctx.guard;
        ctx.guard_difference = assemble_toroidal_pdo([&](double x, double xi) { return guard.difference(x, xi); },
                                                     ctx.grid, 4 * ctx.grid.K + 8);
        const Eigen::MatrixXcd tilde = ctx.P.entries + ctx.guard_difference->entries;
        for (std::size_t i = 0; i < ctx.probes.size(); ++i) {
            try {
                ctx.logdet_tilde[i] = log_abs_det(tilde, ctx.probes[i]);
                ctx.logdet_reference[i] = log_pz_integral(guard, ctx.probes[i], h, config.quad_n);
            } catch (const NumericError&) {
                ctx.logdet_tilde[i].reset();
            }
        }
    } catch (const Error& e) {
        ctx.guard.reset();
        ctx.guard_difference.reset();
        ctx.guard_error = e.what();
    }
    return ctx;
}

TrialResult run_trial(const ExperimentConfig& config, const HContext& ctx, int trial_index) {
    const auto start = std::chrono::steady_clock::now();
    TrialResult r;
    r.trial_index = trial_index;
    r.prediction = ctx.prediction;
    try {
        Eigen::MatrixXcd m;
        if (trial_index < 0) {
            m = ctx.P.entries;
        } else {
            r.seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(trial_index));
            const RandomPotential pot = sample_potential(ctx.plan, r.seed, config.real_mode);
            m = build_perturbed(ctx.P, ctx.plan, pot).matrix.entries;
        }
        const SpectrumResult spec = eigenvalues(m, ctx.h);
        r.eigenvalues = spec.eigenvalues;
        r.eigen_residual = spec.max_residual;
        r.count = count_in_region(spec, config.region);
        if (r.prediction > 0)
            r.relative_error = std::abs(r.count - r.prediction) / r.prediction;
        else
            r.relative_error = r.count == 0 ? 0.0 : std::numeric_limits<double>::infinity();

        for (std::size_t i = 0; i < ctx.probes.size(); ++i) {
            const auto sv = singular_values(m, ctx.probes[i]);
            r.sigma_min.push_back(sv.front());
            std::optional<double> ld;
            if (ctx.logdet_tilde[i]) {
                try {
                    ld = log_abs_det(m, ctx.probes[i]) - *ctx.logdet_tilde[i];
                } catch (const NumericError&) {
                }
            }
            r.log_det.push_back(ld);
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

TrialResult run_trial(const ExperimentConfig& config, double h, int trial_index) {
    return run_trial(config, prepare_h(config, h), trial_index);
}

double success_fraction(const std::vector<TrialResult>& trials, double tol) {
    if (trials.empty()) return 0.0;
    const auto ok = std::count_if(trials.begin(), trials.end(), [&](const TrialResult& t) {
        return !t.error && std::abs(t.count - t.prediction) <= tol * t.prediction;
    });
    return static_cast<double>(ok) / static_cast<double>(trials.size());
}

WeylReport run_ensemble(const ExperimentConfig& config) {
    WeylReport report;
    report.warnings = validate_config(config);

    for (double h : config.h_list) {
        const HContext ctx = prepare_h(config, h);
        HReport hr;
        hr.h = h;
        hr.grid = ctx.grid;
        hr.plan = ctx.plan;
        hr.volume = ctx.volume;
        hr.prediction = ctx.prediction;
        hr.tube_volume = ctx.tube_volume;
        hr.eps0 = ctx.plan.eps0;
        hr.guard_error = ctx.guard_error;
        hr.logdet_reference = ctx.logdet_reference;
        hr.baseline = run_trial(config, ctx, -1);

        hr.trials.resize(config.n_trials);
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int i = next++; i < config.n_trials; i = next++) hr.trials[i] = run_trial(config, ctx, i);
        };
        const int n_workers = std::min(config.threads, config.n_trials);
        if (n_workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        std::vector<double> rel;
        std::vector<double> ld_dev;
        for (const auto& t : hr.trials) {
            if (t.error) continue;
            rel.push_back(t.relative_error);
            for (std::size_t i = 0; i < t.log_det.size(); ++i)
                if (t.log_det[i] && hr.logdet_reference[i]) ld_dev.push_back(std::abs(*t.log_det[i] - *hr.logdet_reference[i]));
        }
        hr.median_rel_error = quantile(rel, 0.5);
        hr.q1_rel_error = quantile(rel, 0.25);
        hr.q3_rel_error = quantile(rel, 0.75);
        hr.success_fraction_rel = success_fraction(hr.trials, config.rel_tol);
        if (!ld_dev.empty()) hr.logdet_median_deviation = quantile(ld_dev, 0.5);
        hr.sigma_raised_fraction.assign(hr.baseline.sigma_min.size(), 0.0);
        for (std::size_t i = 0; i < hr.sigma_raised_fraction.size(); ++i) {
            const auto raised = std::count_if(hr.trials.begin(), hr.trials.end(), [&](const TrialResult& t) {
                return !t.error && i < t.sigma_min.size() && t.sigma_min[i] >= hr.baseline.sigma_min[i];
            });
            hr.sigma_raised_fraction[i] = static_cast<double>(raised) / static_cast<double>(hr.trials.size());
        }

        const double r = config.tube_r;
        hr.bound_base = hr.eps0 / r + r + std::log(1.0 / r) * hr.tube_volume;
        for (const auto& t : hr.trials)
            if (t.error) report.warnings.push_back("h=" + short_num(h) + ", trial " + std::to_string(t.trial_index) + ": " + *t.error);
        report.per_h.push_back(std::move(hr));
    }

    // C is fitted at the largest h and then held fixed.
    const auto largest = std::max_element(report.per_h.begin(), report.per_h.end(),
                                          [](const HReport& a, const HReport& b) { return a.h < b.h; });
    double worst = 0.0;
    for (const auto& t : largest->trials)
        if (!t.error) worst = std::max(worst, std::abs(t.count - t.prediction));
    report.c_fit = std::sqrt(worst * largest->h / largest->bound_base);
    if (config.tube_r > 1.0 / std::max(report.c_fit, 1e-300) && report.c_fit > 0)
        report.warnings.push_back("tube_r exceeds 1/C for the fitted C");

    for (auto& hr : report.per_h) {
        hr.bound_rhs = report.c_fit * report.c_fit / hr.h * hr.bound_base;
        const auto ok = std::count_if(hr.trials.begin(), hr.trials.end(), [&](const TrialResult& t) {
            return !t.error && std::abs(t.count - t.prediction) <= hr.bound_rhs;
        });
        hr.success_fraction_bound = static_cast<double>(ok) / static_cast<double>(hr.trials.size());
    }
    return report;
}

LineCheckResult line_model_check(const TrigPoly& g, double h, int k_max, const GridParams& grid) {
    grid.validate();
    if (k_max < 0 || k_max > grid.K) throw ParameterError("k_max must lie in [0, K]");
    if (g.bandwidth() > 2 * grid.K) throw TruncationError("g does not fit the truncation");
    SymbolSpec spec = make_symbol({g, TrigPoly::constant(1.0)});
    const GridParams pg{h, grid.K};
    const Eigen::MatrixXcd P = assemble_differential(spec, pg).entries;

    const TrigPoly G0 = g.antiderivative();
    const cplx mean = g.mean();
    const int n_s = 8 * (grid.K + 1);
    const int n = grid.dim();

    LineCheckResult out;
    for (int k = -k_max; k <= k_max; ++k) {
        // Fourier coefficients of u_k from n_s samples.
        std::vector<cplx> samples(n_s);
        for (int l = 0; l < n_s; ++l) {
            const double x = kTwoPi * l / n_s;
            samples[l] = std::exp(cplx(0, k * x) - cplx(0, 1.0 / h) * G0(x));
        }
        std::vector<cplx> coeff(n_s);  // modes m = -n_s/2 .. n_s/2 - 1
        double total = 0.0, inside = 0.0;
        for (int idx = 0; idx < n_s; ++idx) {
            const int m = idx - n_s / 2;
            cplx c = 0.0;
            for (int l = 0; l < n_s; ++l) c += samples[l] * std::polar(1.0, -kTwoPi * m * l / n_s);
            c /= static_cast<double>(n_s);
            coeff[idx] = c;
            total += std::norm(c);
            if (std::abs(m) <= grid.K) inside += std::norm(c);
        }
        const double tail = total > 0 ? std::sqrt(std::max(0.0, total - inside) / total) : 0.0;
        out.max_tail = std::max(out.max_tail, tail);
        if (tail > 1e-10) {
            std::ostringstream msg;
            msg << "quasimode k=" << k << " has Fourier tail " << tail << " beyond K=" << grid.K << "; increase K";
            throw TruncationError(msg.str());
        }
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = coeff[grid.mode(i) + n_s / 2];
        const cplx lambda = mean + h * static_cast<double>(k);
        const Eigen::VectorXcd res = P * v - lambda * v;
        out.k.push_back(k);
        out.lambda.push_back(lambda);
        out.residuals.push_back(res.norm() / v.norm());
        out.max_imag_deviation = std::max(out.max_imag_deviation, std::abs(lambda.imag() - mean.imag()));
    }
    return out;
}

std::vector<cplx> line_model_spectrum(const TrigPoly& g, double h, int k_range) {
    std::vector<cplx> out;
    for (int k = -k_range; k <= k_range; ++k) out.push_back(g.mean() + h * static_cast<double>(k));
    return out;
}

bool LadderProfile::all_pass() const {
    return std::all_of(rungs.begin(), rungs.end(), [](const LadderRung& r) { return r.pass; });
}

std::vector<int> ladder_sizes(int n0, double theta, int n_theta) {
    if (n0 < 0) throw ParameterError("N(0) must be non-negative");
    if (!(theta > 0 && theta < 1)) throw ParameterError("theta must lie in (0, 1)");
    std::vector<int> sizes;
    if (n0 == 0) return sizes;
    sizes.push_back(n0);
    int cur = n0;
    while (cur > 1) {
        int next = cur >= n_theta ? static_cast<int>(std::floor((1 - theta) * cur)) : cur - 1;
        next = std::clamp(next, 1, cur - 1);
        sizes.push_back(next);
        cur = next;
    }
    return sizes;
}

LadderProfile singular_ladder_profile(const Eigen::MatrixXcd& m, cplx z, const PerturbationPlan& plan, double theta,
                                      int n_theta, double n2_slack, bool baseline) {
    LadderProfile prof;
    prof.singular_values = singular_values(m, z);
    if (baseline) return prof;
    if (!(n2_slack > 0)) throw ParameterError("N2 slack must be positive");

    const double h = plan.h();
    const int n = plan.inputs.n;
    prof.n1_exponent = plan.inputs.mode == DeltaMode::paper ? plan.N1 : std::log(plan.delta / plan.tau0) / std::log(h) - n;
    prof.n2_exponent = 2 * (prof.n1_exponent + n) + n2_slack;

    const auto& t = prof.singular_values;
    prof.n0 = static_cast<int>(std::count_if(t.begin(), t.end(), [&](double v) { return v < plan.tau0; }));
    if (prof.n0 == 0) {
        prof.vacuous = true;
        return prof;
    }
    prof.sizes = ladder_sizes(prof.n0, theta, n_theta);
    const double slack = 1 - std::pow(h, prof.n1_exponent + n);
    const int k1 = static_cast<int>(prof.sizes.size()) - 1;
    for (int k = 1; k <= k1 + 1; ++k) {
        LadderRung rung;
        rung.k = k;
        rung.upper = k <= k1 ? prof.sizes[k - 1] : 1;
        rung.lower = k <= k1 ? prof.sizes[k] : 0;
        rung.threshold = plan.tau0 * std::pow(h, k * prof.n2_exponent);
        rung.observed_min = t[rung.lower];  // nu = lower + 1 is the smallest index on the rung
        rung.pass = rung.observed_min >= slack * rung.threshold;
        prof.rungs.push_back(rung);
    }
    return prof;
}

Eigen::MatrixXcd normalized_operator(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& P_tilde, cplx z) {
    if (P.rows() != P_tilde.rows() || P.cols() != P_tilde.cols()) throw ParameterError("P and P~ differ in shape");
    Eigen::MatrixXcd a = P, b = P_tilde;
    a.diagonal().array() -= z;
    b.diagonal().array() -= z;
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(b).solve(a);
}

TraceComparison compare_trace_formula(const GuardedSymbol& guard, cplx z, double h, double alpha, double chi_c,
                                      double kappa, double k_margin, int quad_n) {
    const Region zone = Region::disk(guard.z_center, 2 * guard.rho + std::abs(z - guard.z_center));
    const GridParams grid = choose_truncation(guard.spec, zone, h, k_margin);
    const Eigen::MatrixXcd P = assemble_differential(guard.spec, grid).entries;
    const Eigen::MatrixXcd Pt = assemble_guarded(guard, grid).entries;
    const Eigen::MatrixXcd Pz = normalized_operator(P, Pt, z);
    Eigen::MatrixXcd S = Pz.adjoint() * Pz;
    S = (0.5 * (S + S.adjoint())).eval();

    const BumpFunction chi{chi_c};
    const FunctionalValues fv = spectral_functional(S, chi, alpha, alpha);

    const PhaseGrid pg = guard_zone_grid(guard, quad_n);
    auto s_at = [&](double x, double xi) {
        return std::norm(eval_symbol(guard.spec, x, xi) - z) / std::norm(guard(x, xi) - z);
    };
    const double chi_int = integrate_phase_space([&](double x, double xi) { return chi(s_at(x, xi) / alpha); }, pg);
    const double log_int = integrate_phase_space([&](double x, double xi) { return std::log(s_at(x, xi)); }, pg);

    TraceComparison out;
    out.h = h;
    out.alpha = alpha;
    out.dim = grid.dim();
    out.trace_val = fv.trace_val;
    out.phase_val = chi_int / (kTwoPi * h);
    out.gap = std::abs(out.trace_val - out.phase_val);
    out.normalized_gap = out.gap / (std::pow(alpha, kappa) / h);
    out.logdet_reg = fv.logdet_reg;
    out.log_phase = log_int / (kTwoPi * h);
    out.logdet_gap = std::abs(out.logdet_reg - out.log_phase);
    return out;
}

}  // namespace weyl
