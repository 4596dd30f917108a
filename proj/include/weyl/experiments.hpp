#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weyl/guard.hpp"
#include "weyl/perturbation.hpp"
#include "weyl/phase_space.hpp"
#include "weyl/spectral.hpp"

namespace weyl {

struct ExperimentConfig {
    SymbolSpec spec;
    Region region = Region::rectangle(-0.5, 0.5, -0.5, 0.5);
    /// User-declared open set containing the region; must leave Sigma(p) somewhere.
    Region omega = Region::rectangle(-2.0, 2.0, -1.5, 1.5);
    std::vector<double> h_list{0.05, 0.02, 0.01};

    double s = 2.0;
    double eps = 0.5;
    std::optional<double> kappa;  // unset: 1/(2m)
    double tau0 = 0.1;
    DeltaMode mode = DeltaMode::effective;
    double delta_eff = 1e-12;
    bool real_mode = false;

    int n_trials = 20;
    std::uint64_t master_seed = 1;
    std::optional<int> K;  // unset: choose_truncation with k_margin
    double k_margin = 1.5;

    /// Empty: 5 points on the region boundary.
    std::vector<cplx> z_probes;
    bool determinant_probes = true;
    double tube_r = 0.1;
    double rel_tol = 0.15;
    int quad_n = 1000;
    int threads = 1;

    [[nodiscard]] double kappa_value() const;
    [[nodiscard]] std::vector<cplx> probes() const;
};

struct TrialResult {
    int trial_index = 0;  // -1 for the unperturbed baseline
    std::uint64_t seed = 0;
    int count = 0;
    double prediction = 0.0;
    double relative_error = 0.0;
    std::vector<double> sigma_min;                 // per z probe
    std::vector<std::optional<double>> log_det;   // ln|det P_{delta,z}| per z probe
    double eigen_residual = 0.0;
    std::vector<cplx> eigenvalues;
    std::optional<std::string> error;
    double runtime_s = 0.0;  // wall clock; never written to reports
};

struct HReport {
    double h = 0.0;
    GridParams grid;
    PerturbationPlan plan;
    double volume = 0.0;
    double prediction = 0.0;
    double tube_volume = 0.0;  // vol p^{-1}(boundary + D(0, r))
    double eps0 = 0.0;
    TrialResult baseline;
    std::vector<TrialResult> trials;
    double median_rel_error = 0.0, q1_rel_error = 0.0, q3_rel_error = 0.0;
    double success_fraction_rel = 0.0;
    double bound_base = 0.0;    // eps0/r + r + ln(1/r) tube_volume
    double bound_rhs = 0.0;     // (C^2/h) bound_base with the fitted C
    double success_fraction_bound = 0.0;
    /// (2 pi h)^{-1} iint ln|p_z| per probe, when the guard succeeded.
    std::vector<std::optional<double>> logdet_reference;
    std::optional<double> logdet_median_deviation;
    /// Per probe: fraction of trials with t_1(P_delta - z) >= t_1(P - z).
    std::vector<double> sigma_raised_fraction;
    std::optional<std::string> guard_error;
};

struct WeylReport {
    std::vector<HReport> per_h;
    double c_fit = 0.0;
    std::vector<std::string> warnings;
};

/// Throws ConfigError when the configuration violates the experiment's
/// hypotheses; returns non-fatal warnings.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// vol(p^{-1}(region)) / (2 pi h).
double weyl_prediction(const SymbolSpec& spec, const Region& region, double h, const PhaseGrid& grid);

/// Everything shared by the trials at one h.
struct HContext {
    double h = 0.0;
    GridParams grid;
    OperatorMatrix P;
    PerturbationPlan plan;
    double volume = 0.0;
    double prediction = 0.0;
    std::vector<cplx> probes;
    std::optional<GuardedSymbol> guard;
    std::optional<OperatorMatrix> guard_difference;  // Op(p~ - p)
    std::optional<std::string> guard_error;
    /// ln|det(P~ - z)| per probe, shared by every trial.
    std::vector<std::optional<double>> logdet_tilde;
    /// (2 pi h)^{-1} iint ln|p_z| per probe.
    std::vector<std::optional<double>> logdet_reference;
    double tube_volume = 0.0;
};

HContext prepare_h(const ExperimentConfig& config, double h);

/// One trial; trial_index -1 is the unperturbed baseline. Errors are recorded
/// in the result rather than thrown.
TrialResult run_trial(const ExperimentConfig& config, const HContext& ctx, int trial_index);
TrialResult run_trial(const ExperimentConfig& config, double h, int trial_index);

/// Fraction of trials with |count - prediction| <= tol * prediction.
double success_fraction(const std::vector<TrialResult>& trials, double tol);

WeylReport run_ensemble(const ExperimentConfig& config);

// Line-spectrum model P = hD + g.

struct LineCheckResult {
    std::vector<int> k;
    std::vector<cplx> lambda;       // <g> + hk
    std::vector<double> residuals;  // ||(P - lambda_k) u_k|| / ||u_k||
    double max_tail = 0.0;          // relative l2 tail outside |m| <= K
    double max_imag_deviation = 0.0;
};

/// Quasimodes u_k = exp(ikx - (i/h) G0) with G0' = g - <g>. Throws
/// TruncationError when a quasimode's Fourier tail beyond K exceeds 1e-10.
LineCheckResult line_model_check(const TrigPoly& g, double h, int k_max, const GridParams& grid);

/// Closed-form spectrum {<g> + hk : |k| <= k_range}.
std::vector<cplx> line_model_spectrum(const TrigPoly& g, double h, int k_range);

// Singular-value ladder.

struct LadderRung {
    int k = 0;
    int upper = 0;  // N^(k-1)
    int lower = 0;  // N^(k)
    double threshold = 0.0;
    double observed_min = 0.0;
    bool pass = true;
};

struct LadderProfile {
    std::vector<double> singular_values;
    int n0 = 0;
    std::vector<int> sizes;  // N^(0), N^(1), ..., 1
    double n1_exponent = 0.0;
    double n2_exponent = 0.0;
    std::vector<LadderRung> rungs;
    bool vacuous = false;
    [[nodiscard]] bool all_pass() const;
};

/// N^(k+1) = floor((1 - theta) N^(k)) while N^(k) >= n_theta, then N^(k+1) = N^(k) - 1 down to 1.
std::vector<int> ladder_sizes(int n0, double theta, int n_theta);

/// Rung thresholds tau0 h^{k N2}, N2 = 2(N1 + n) + n2_slack. In effective mode
/// N1 is replaced by the exponent with delta_eff = tau0 h^{N1 + n}.
/// `baseline` returns only the sorted singular values.
LadderProfile singular_ladder_profile(const Eigen::MatrixXcd& m, cplx z, const PerturbationPlan& plan, double theta,
                                      int n_theta, double n2_slack = 0.5, bool baseline = false);

// Phase-space comparisons for the normalized operator P_z = (P~ - z)^{-1}(P - z).

Eigen::MatrixXcd normalized_operator(const Eigen::MatrixXcd& P, const Eigen::MatrixXcd& P_tilde, cplx z);

struct TraceComparison {
    double h = 0.0, alpha = 0.0;
    int dim = 0;
    double trace_val = 0.0;   // tr chi(S/alpha)
    double phase_val = 0.0;   // (2 pi h)^{-1} iint chi(s/alpha)
    double gap = 0.0;
    double normalized_gap = 0.0;  // gap / (alpha^kappa / h)
    double logdet_reg = 0.0;  // ln det(S + alpha chi(S/alpha))
    double log_phase = 0.0;   // (2 pi h)^{-1} iint ln s
    double logdet_gap = 0.0;
};

/// S = P_z^* P_z and s = |p - z|^2 / |p~ - z|^2.
TraceComparison compare_trace_formula(const GuardedSymbol& guard, cplx z, double h, double alpha, double chi_c,
                                      double kappa, double k_margin = 1.5, int quad_n = 2000);

}  // namespace weyl
