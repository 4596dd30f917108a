#include <doctest.h>

#include <cmath>
#include <numbers>

#include "weyl/errors.hpp"
#include "weyl/experiments.hpp"

using namespace weyl;
using std::numbers::pi;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.spec = make_symbol({TrigPoly::monomial(1), TrigPoly(), TrigPoly::constant(1.0)});
    c.h_list = {0.1};
    c.n_trials = 4;
    c.master_seed = 3;
    c.quad_n = 300;
    return c;
}

}  // namespace

TEST_CASE("Weyl prediction for xi + e^{-ix}") {
    const SymbolSpec p = make_symbol({TrigPoly::monomial(-1), TrigPoly::constant(1.0)});
    const Region gamma = Region::rectangle(-1, 1, 0.1, 0.9);
    const PhaseGrid g = certified_grid(p, gamma, 1000, 1000);
    const double exact = 4 * (std::asin(0.9) - std::asin(0.1)) / (2 * pi * 0.01);
    CHECK(exact == doctest::Approx(64.91).epsilon(1e-3));
    CHECK(weyl_prediction(p, gamma, 0.01, g) == doctest::Approx(exact).epsilon(5e-3));
    CHECK(weyl_prediction(p, gamma, 0.005, g) == 2 * weyl_prediction(p, gamma, 0.01, g));
    const Region empty = Region::rectangle(-1, 1, 2.0, 3.0);
    CHECK(weyl_prediction(p, empty, 0.01, certified_grid(p, empty, 100, 100)) == 0.0);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(validate_config(small_config()));

    ExperimentConfig c = small_config();
    c.spec = make_symbol({TrigPoly::monomial(-1), TrigPoly::constant(1.0)});
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    c = small_config();
    c.region = Region::rectangle(-0.5, 2.5, -0.5, 0.5);
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    c = small_config();
    c.omega = Region::rectangle(-0.5, 0.5, -0.5, 0.5);  // Sigma(p) covers Re w >= -sqrt(1 - Im w^2)
    c.region = Region::rectangle(-0.2, 0.2, -0.2, 0.2);
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    c = small_config();
    c.z_probes = {cplx(5.0, 0.0)};
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    c = small_config();
    c.eps = 1.6;
    CHECK_THROWS_AS(validate_config(c), ConfigError);

    c = small_config();
    c.h_list = {};
    CHECK_THROWS_AS(validate_config(c), ConfigError);
}

TEST_CASE("default probes sit on the region boundary") {
    const ExperimentConfig c = small_config();
    const auto probes = c.probes();
    CHECK(probes.size() == 5);
    for (auto z : probes) CHECK(c.region.boundary_distance(z) < 1e-12);
}

TEST_CASE("trials") {
    const ExperimentConfig c = small_config();
    const HContext ctx = prepare_h(c, 0.1);
    CHECK(ctx.prediction == doctest::Approx(ctx.volume / (2 * pi * 0.1)));

    const TrialResult base = run_trial(c, ctx, -1);
    REQUIRE_FALSE(base.error);
    const SpectrumResult direct = eigenvalues(ctx.P);
    CHECK(base.count == count_in_region(direct, c.region));
    CHECK(base.seed == 0);

    const TrialResult a = run_trial(c, ctx, 2), b = run_trial(c, 0.1, 2);
    REQUIRE_FALSE(a.error);
    CHECK(a.seed == derive_seed(c.master_seed, 2));
    CHECK(a.count == b.count);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.sigma_min == b.sigma_min);
    CHECK(a.sigma_min.size() == 5);
    CHECK(a.count >= 0);
    CHECK(a.relative_error == doctest::Approx(std::abs(a.count - a.prediction) / a.prediction));
}

TEST_CASE("ensembles") {
    ExperimentConfig c = small_config();
    c.n_trials = 1;
    const WeylReport one = run_ensemble(c);
    REQUIRE(one.per_h.size() == 1);
    const TrialResult single = run_trial(c, 0.1, 0);
    CHECK(one.per_h[0].trials[0].count == single.count);
    CHECK(one.per_h[0].trials[0].eigenvalues == single.eigenvalues);
    CHECK(one.per_h[0].median_rel_error == single.relative_error);

    c.n_trials = 6;
    c.threads = 1;
    const WeylReport serial = run_ensemble(c);
    c.threads = 3;
    const WeylReport parallel = run_ensemble(c);
    for (int i = 0; i < 6; ++i) {
        CHECK(serial.per_h[0].trials[i].eigenvalues == parallel.per_h[0].trials[i].eigenvalues);
        CHECK(serial.per_h[0].trials[i].log_det == parallel.per_h[0].trials[i].log_det);
    }
    CHECK(serial.c_fit == parallel.c_fit);

    const HReport& hr = serial.per_h[0];
    double last = 0.0;
    for (double tol : {0.0, 0.05, 0.1, 0.5, 1.0, 10.0}) {
        const double f = success_fraction(hr.trials, tol);
        CHECK(f >= last);
        CHECK(f <= 1.0);
        last = f;
    }
    const double r = c.tube_r;
    CHECK(hr.bound_base == doctest::Approx(hr.eps0 / r + r + std::log(1 / r) * hr.tube_volume));
    CHECK(hr.eps0 == doctest::Approx(epsilon0(0.1, 0.25, c.tau0)));
    CHECK(hr.success_fraction_bound == 1.0);  // C is fitted on this h
}

TEST_CASE("line model hD + g") {
    SUBCASE("g = 0") {
        const auto r = line_model_check(TrigPoly(), 0.1, 3, {0.1, 20});
        for (double res : r.residuals) CHECK(res <= 1e-14);
        for (std::size_t i = 0; i < r.k.size(); ++i) CHECK(r.lambda[i] == cplx(0.1 * r.k[i]));
    }
    SUBCASE("g = e^{-ix}") {
        const auto r = line_model_check(TrigPoly::monomial(-1), 0.1, 5, {0.1, 80});
        CHECK(r.k.size() == 11);
        for (double res : r.residuals) CHECK(res <= 1e-8);
        CHECK(r.max_imag_deviation == 0.0);
        CHECK(r.max_tail <= 1e-10);
    }
    SUBCASE("too few modes") { CHECK_THROWS_AS(line_model_check(TrigPoly::monomial(-1), 0.1, 5, {0.1, 15}), TruncationError); }
    SUBCASE("perturbation moves the line without spreading it") {
        const TrigPoly q = TrigPoly::monomial(0, cplx(0.2, 0.3)) + TrigPoly::cosine(2);
        const TrigPoly g = TrigPoly::monomial(-1) + q * cplx(0.5);
        const auto spec = line_model_spectrum(g, 0.1, 10);
        for (auto z : spec) CHECK(z.imag() == doctest::Approx(0.15));
        const auto r = line_model_check(g, 0.1, 3, {0.1, 80});
        for (double res : r.residuals) CHECK(res <= 1e-8);
    }
}

TEST_CASE("ladder sizes") {
    CHECK(ladder_sizes(16, 0.25, 4) == std::vector<int>{16, 12, 9, 6, 4, 3, 2, 1});
    CHECK(ladder_sizes(1, 0.25, 4) == std::vector<int>{1});
    CHECK(ladder_sizes(0, 0.25, 4).empty());
    CHECK_THROWS_AS(ladder_sizes(5, 1.5, 2), ParameterError);
}

TEST_CASE("singular ladder profile") {
    PlanInputs in;
    in.h = 0.1;
    in.mode = DeltaMode::effective;
    in.delta_eff = 1e-6;
    in.l_cap = 1.0;
    const PerturbationPlan plan = derive_params(in);

    Eigen::VectorXd t(8);
    t << 1e-9, 2e-7, 3e-4, 0.02, 0.05, 0.5, 1.0, 2.0;
    const Eigen::MatrixXcd m = t.cast<cplx>().asDiagonal();

    const LadderProfile base = singular_ladder_profile(m, 0.0, plan, 0.25, 4, 0.5, true);
    CHECK(base.rungs.empty());
    for (int i = 0; i < 8; ++i) CHECK(base.singular_values[i] == doctest::Approx(t(i)));

    const LadderProfile prof = singular_ladder_profile(m, 0.0, plan, 0.25, 4);
    CHECK(prof.n0 == 5);  // t < tau0 = 0.1
    const double n1 = std::log(1e-6 / 0.1) / std::log(0.1) - 1;
    CHECK(prof.n1_exponent == doctest::Approx(n1));
    CHECK(prof.n2_exponent == doctest::Approx(2 * (n1 + 1) + 0.5));
    REQUIRE(prof.sizes == std::vector<int>{5, 3, 2, 1});
    REQUIRE(prof.rungs.size() == 4);
    const int lower[] = {3, 2, 1, 0};
    for (int k = 1; k <= 4; ++k) {
        const LadderRung& r = prof.rungs[k - 1];
        CHECK(r.lower == lower[k - 1]);
        CHECK(r.threshold == doctest::Approx(0.1 * std::pow(0.1, k * prof.n2_exponent)));
        CHECK(r.observed_min == t(lower[k - 1]));
        CHECK(r.pass == (t(lower[k - 1]) >= (1 - std::pow(0.1, n1 + 1)) * r.threshold));
    }

    const Eigen::MatrixXcd big = Eigen::MatrixXcd::Identity(4, 4);
    const LadderProfile vac = singular_ladder_profile(big, 0.0, plan, 0.25, 4);
    CHECK(vac.vacuous);
    CHECK(vac.all_pass());
}

TEST_CASE("normalized operator") {
    const Eigen::MatrixXcd P = Eigen::MatrixXcd::Random(6, 6);
    CHECK((normalized_operator(P, P, {0.1, 0.2}) - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace comparison is finite and consistent") {
    const SymbolSpec p = make_symbol({TrigPoly::monomial(1), TrigPoly(), TrigPoly::constant(1.0)});
    const GuardedSymbol guard = construct_guard(p, 0.0, {cplx(0.0)});
    const TraceComparison tc = compare_trace_formula(guard, 0.0, 0.1, 0.1, 1.0, 0.5, 1.5, 400);
    CHECK(tc.trace_val >= 0.0);
    CHECK(tc.phase_val >= 0.0);
    CHECK(tc.gap == doctest::Approx(std::abs(tc.trace_val - tc.phase_val)));
    CHECK(tc.normalized_gap == doctest::Approx(tc.gap * 0.1 / std::sqrt(0.1)));
    CHECK(std::isfinite(tc.logdet_gap));
}

TEST_CASE("perturbation raises the smallest singular value at interior points") {
    ExperimentConfig c = small_config();
    c.h_list = {0.05};
    c.n_trials = 50;
    c.master_seed = 5;
    c.delta_eff = 1e-8;
    c.z_probes = {cplx(0.1, 0.2), cplx(-0.3, 0.0), cplx(0.2, -0.3)};
    c.determinant_probes = false;
    const WeylReport rep = run_ensemble(c);
    const HReport& hr = rep.per_h[0];
    REQUIRE(hr.sigma_raised_fraction.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(hr.sigma_raised_fraction[i] >= 0.9);
        int raised = 0;
        for (const auto& t : hr.trials) raised += t.sigma_min[i] >= hr.baseline.sigma_min[i];
        CHECK(hr.sigma_raised_fraction[i] == raised / 50.0);
    }
}
