#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "weyl/operator.hpp"
#include "weyl/trig_poly.hpp"

namespace weyl {

using Rational = boost::multiprecision::cpp_rational;

enum class DeltaMode { paper, effective };

struct PlanInputs {
    int n = 1;
    double s = 2.0;
    double eps = 0.5;
    double kappa = 0.5;
    double h = 0.1;
    double tau0 = 0.1;
    DeltaMode mode = DeltaMode::paper;
    double delta_eff = 1e-12;
    /// Desk-scale cap on L (typically h K); L = min(h^{-M}, l_cap).
    std::optional<double> l_cap;
};

/// Every parameter the random perturbation needs, with the window exponents
/// kept as exact rationals.
struct PerturbationPlan {
    PlanInputs inputs;

    Rational s_q, eps_q, kappa_q;  // exact values of the double inputs
    Rational M_q, Mt_q, N1_q;
    /// L >> h^{l_lower_exp}, R >= h^{r_lower_exp}, R <= h^{-Mt}
    Rational l_lower_exp, r_lower_exp;

    double M = 0, M_tilde = 0, N1 = 0;
    double L = 0;           // after the optional cap
    double L_uncapped = 0;
    bool l_capped = false;
    double R = 0;
    long long D = 0;
    double tau0 = 0;
    double delta_paper = 0;  // tau0 h^{N1 + n}
    double delta = 0;        // per mode
    double eps0 = 0;
    /// C = 1 in both windows.
    double window_constant = 1.0;
    std::vector<std::string> warnings;

    [[nodiscard]] double h() const { return inputs.h; }
    /// Coefficient c with P_delta = P + c Conv(q): delta h^{N1} in paper mode,
    /// delta_eff / R in effective mode.
    [[nodiscard]] double multiplier_scale() const;
    /// Exact check of the window inequalities on the exponents.
    [[nodiscard]] bool windows_hold() const;
};

/// (h^kappa + h^n ln(1/h)) (ln(1/tau0) + (ln(1/h))^2)
double epsilon0(double h, double kappa, double tau0, int n = 1);

/// Minimal admissible exponents (equality in both windows), L = h^{-M},
/// R = h^{-Mt}, D = 2 floor(L/h). Throws ParameterError for out-of-range inputs.
PerturbationPlan derive_params(const PlanInputs& in);

/// JSON-ish record with every derived exponent, for reports.
std::string plan_to_json(const PerturbationPlan& plan);

/// Mixes a master seed and a trial index into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

struct RandomPotential {
    TrigPoly q;
    std::vector<int> modes;           // k = -D/2..-1, 1..D/2
    std::vector<cplx> alpha;          // coefficients in the e_k basis
    std::uint64_t seed = 0;
    bool real_mode = false;

    [[nodiscard]] double alpha_norm() const;
    [[nodiscard]] double alpha_l1() const;
};

/// alpha uniform on the radius-R ball of C^D (or R^D in real mode, with the
/// cos/sin basis mapped to conjugate pairs). Deterministic given the seed.
RandomPotential sample_potential(const PerturbationPlan& plan, std::uint64_t seed, bool real_mode);

/// P_0 = P + delta0 (h^{n/2} q1 + q2).
struct BaseShift {
    double delta0 = 0.0;
    TrigPoly q1;
    TrigPoly q2;
};

struct PerturbedOperator {
    OperatorMatrix matrix;
    std::vector<std::string> warnings;
};

/// P + scale Conv(q) with scale = plan.multiplier_scale(), after the optional
/// base shift. Warns when delta0 > h.
PerturbedOperator build_perturbed(const OperatorMatrix& P, const PerturbationPlan& plan, const RandomPotential& q,
                                  const std::optional<BaseShift>& base = std::nullopt);

/// Same, with an explicit multiplier in place of the plan's.
OperatorMatrix add_potential(const OperatorMatrix& P, const TrigPoly& q, cplx scale);

}  // namespace weyl
