#include "weyl/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "weyl/errors.hpp"

namespace weyl {

namespace {

std::string short_num(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

constexpr long long kMaxSampledModes = 1'000'000;

std::string rational_string(const Rational& r) {
    std::ostringstream s;
    s << r;
    return s.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

double epsilon0(double h, double kappa, double tau0, int n) {
    const double log_inv_h = std::log(1.0 / h);
    return (std::pow(h, kappa) + std::pow(h, n) * log_inv_h) * (std::log(1.0 / tau0) + log_inv_h * log_inv_h);
}

PerturbationPlan derive_params(const PlanInputs& in) {
    if (in.n < 1) throw ParameterError("dimension n must be >= 1");
    if (!(in.s > in.n / 2.0)) throw ParameterError("Sobolev index s must exceed n/2");
    if (!(in.eps > 0 && in.eps < in.s - in.n / 2.0))
        throw ParameterError("epsilon must lie in (0, s - n/2)");
    if (!(in.kappa > 0 && in.kappa <= 1)) throw ParameterError("kappa must lie in (0, 1]");
    if (!(in.h > 0 && in.h < 1)) throw ParameterError("h must lie in (0, 1)");
    if (!(in.tau0 > 0 && in.tau0 <= std::sqrt(in.h))) throw ParameterError("tau0 must lie in (0, sqrt(h)]");
    if (in.mode == DeltaMode::effective && !(in.delta_eff > 0))
        throw ParameterError("effective mode needs delta_eff > 0");

    PerturbationPlan p;
    p.inputs = in;
    const Rational n(in.n);
    const Rational half_n = n / 2;
    p.s_q = Rational(in.s);
    p.eps_q = Rational(in.eps);
    p.kappa_q = Rational(in.kappa);
    const Rational gap = p.s_q - half_n - p.eps_q;  // s - n/2 - eps > 0

    p.M_q = (3 * n - p.kappa_q) / gap;
    p.Mt_q = 3 * n / 2 - p.kappa_q + (half_n + p.eps_q) * p.M_q;
    p.N1_q = p.Mt_q + p.s_q * p.M_q + half_n;
    p.l_lower_exp = (p.kappa_q - 3 * n) / gap;
    p.r_lower_exp = -(half_n + p.eps_q) * p.M_q + p.kappa_q - 3 * n / 2;

    p.M = to_double(p.M_q);
    p.M_tilde = to_double(p.Mt_q);
    p.N1 = to_double(p.N1_q);

    const double h = in.h;
    p.L_uncapped = std::pow(h, -p.M);
    p.L = p.L_uncapped;
    if (in.l_cap && *in.l_cap < p.L) {
        p.L = *in.l_cap;
        p.l_capped = true;
        p.warnings.push_back("L capped at " + short_num(p.L) + " (desk scale); below the h^{-M} window");
    }
    p.R = std::pow(h, -p.M_tilde);
    if (in.n == 1) p.D = 2 * static_cast<long long>(std::floor(p.L / h + 1e-9));

    p.tau0 = in.tau0;
    p.delta_paper = in.tau0 * std::pow(h, p.N1 + in.n);
    p.delta = in.mode == DeltaMode::paper ? p.delta_paper : in.delta_eff;
    if (in.mode == DeltaMode::effective && in.delta_eff >= h)
        p.warnings.push_back("delta_eff >= h violates delta0 <= h");
    p.eps0 = epsilon0(h, in.kappa, in.tau0, in.n);

    if (!p.windows_hold()) throw ParameterError("derived exponents violate the parameter windows");
    return p;
}

double PerturbationPlan::multiplier_scale() const {
    if (inputs.mode == DeltaMode::paper) return delta * std::pow(inputs.h, N1);
    return delta / R;
}

bool PerturbationPlan::windows_hold() const {
    const Rational n(inputs.n);
    const Rational gap = s_q - n / 2 - eps_q;
    if (!(gap > 0)) return false;
    const bool m_ok = M_q * gap >= 3 * n - kappa_q;
    const bool mt_ok = Mt_q >= 3 * n / 2 - kappa_q + (n / 2 + eps_q) * M_q;
    const bool n1_ok = N1_q == Mt_q + s_q * M_q + n / 2;
    // h < 1: h^a >= h^b iff a <= b.  L = h^{-M}, R = h^{-Mt}, C = 1.
    const bool l_ok = -M_q <= l_lower_exp;
    const bool r_ok = -Mt_q <= r_lower_exp;
    return m_ok && mt_ok && n1_ok && l_ok && r_ok;
}

std::string plan_to_json(const PerturbationPlan& p) {
    nlohmann::ordered_json j;
    j["n"] = p.inputs.n;
    j["h"] = p.inputs.h;
    j["s"] = p.inputs.s;
    j["eps"] = p.inputs.eps;
    j["kappa"] = p.inputs.kappa;
    j["mode"] = p.inputs.mode == DeltaMode::paper ? "paper" : "effective";
    j["M"] = p.M;
    j["M_exact"] = rational_string(p.M_q);
    j["M_tilde"] = p.M_tilde;
    j["M_tilde_exact"] = rational_string(p.Mt_q);
    j["N1"] = p.N1;
    j["N1_exact"] = rational_string(p.N1_q);
    j["L_lower_exponent"] = rational_string(p.l_lower_exp);
    j["R_lower_exponent"] = rational_string(p.r_lower_exp);
    j["window_constant"] = p.window_constant;
    j["L"] = p.L;
    j["L_uncapped"] = p.L_uncapped;
    j["L_capped"] = p.l_capped;
    j["R"] = p.R;
    j["D"] = p.D;
    j["tau0"] = p.tau0;
    j["delta_paper"] = p.delta_paper;
    j["delta"] = p.delta;
    j["multiplier_scale"] = p.multiplier_scale();
    j["eps0"] = p.eps0;
    j["windows_hold"] = p.windows_hold();
    j["warnings"] = p.warnings;
    return j.dump(2);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

double RandomPotential::alpha_norm() const {
    double s = 0.0;
    for (const auto& a : alpha) s += std::norm(a);
    return std::sqrt(s);
}

double RandomPotential::alpha_l1() const {
    double s = 0.0;
    for (const auto& a : alpha) s += std::abs(a);
    return s;
}

RandomPotential sample_potential(const PerturbationPlan& plan, std::uint64_t seed, bool real_mode) {
    if (plan.inputs.n != 1) throw ParameterError("potential sampling is implemented for the 1-torus only");
    if (plan.D <= 0) throw ParameterError("empty eigenbasis: no modes with 0 < h|k| <= L");
    if (plan.D > kMaxSampledModes)
        throw ParameterError("D = " + std::to_string(plan.D) + " modes is beyond desk scale; cap L");

    const int half = static_cast<int>(plan.D / 2);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    RandomPotential out;
    out.seed = seed;
    out.real_mode = real_mode;
    for (int k = -half; k <= half; ++k)
        if (k != 0) out.modes.push_back(k);

    const std::size_t dims = real_mode ? static_cast<std::size_t>(plan.D) : 2 * static_cast<std::size_t>(plan.D);
    std::vector<double> g(dims);
    double norm2 = 0.0;
    for (auto& v : g) {
        v = gauss(rng);
        norm2 += v * v;
    }
    const double radius = plan.R * std::pow(unif(rng), 1.0 / static_cast<double>(dims));
    const double scale = radius / std::sqrt(norm2);

    std::map<int, cplx> alpha_by_mode;
    if (real_mode) {
        // cos(kx)/sqrt(pi) and sin(kx)/sqrt(pi) coefficients -> conjugate pair
        for (int k = 1; k <= half; ++k) {
            const double bc = scale * g[2 * (k - 1)], bs = scale * g[2 * (k - 1) + 1];
            alpha_by_mode[k] = cplx(bc, -bs) / std::numbers::sqrt2;
            alpha_by_mode[-k] = cplx(bc, bs) / std::numbers::sqrt2;
        }
    } else {
        std::size_t i = 0;
        for (int k : out.modes) {
            alpha_by_mode[k] = scale * cplx(g[i], g[i + 1]);
            i += 2;
        }
    }
    std::map<int, cplx> coeffs;
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2 * std::numbers::pi);
    for (int k : out.modes) {
        out.alpha.push_back(alpha_by_mode[k]);
        coeffs[k] = alpha_by_mode[k] * inv_sqrt_2pi;
    }
    out.q = TrigPoly(std::move(coeffs), real_mode);
    return out;
}

OperatorMatrix add_potential(const OperatorMatrix& P, const TrigPoly& q, cplx scale) {
    OperatorMatrix out = P;
    if (scale != cplx{} && !q.is_zero()) out.entries += scale * assemble_multiplier(q, P.grid).entries;
    return out;
}

PerturbedOperator build_perturbed(const OperatorMatrix& P, const PerturbationPlan& plan, const RandomPotential& q,
                                  const std::optional<BaseShift>& base) {
    PerturbedOperator out{P, {}};
    if (base) {
        if (base->delta0 > plan.h())
            out.warnings.push_back("delta0 = " + short_num(base->delta0) + " exceeds h");
        const double h_half = std::pow(plan.h(), plan.inputs.n / 2.0);
        out.matrix = add_potential(out.matrix, base->q1, base->delta0 * h_half);
        out.matrix = add_potential(out.matrix, base->q2, base->delta0);
    }
    out.matrix = add_potential(out.matrix, q.q, plan.multiplier_scale());
    return out;
}

}  // namespace weyl
