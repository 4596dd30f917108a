#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "weyl/errors.hpp"
#include "weyl/phase_space.hpp"
#include "weyl/region.hpp"
#include "weyl/symbol.hpp"

using namespace weyl;
using std::numbers::pi;

namespace {

SymbolSpec xi2_plus_eix() { return make_symbol({TrigPoly::monomial(1), TrigPoly(), TrigPoly::constant(1.0)}); }
SymbolSpec xi_plus_emix() { return make_symbol({TrigPoly::monomial(-1), TrigPoly::constant(1.0)}); }
SymbolSpec pure_xi() { return make_symbol({TrigPoly(), TrigPoly::constant(1.0)}); }

// Cells of `grid` where membership of p in `region` is not constant over the
// corners and centre.
double boundary_cell_measure(const SymbolSpec& spec, const Region& region, const PhaseGrid& grid) {
    int mixed = 0;
    for (int i = 0; i < grid.n_x; ++i)
        for (int j = 0; j < grid.n_xi; ++j) {
            const double x0 = grid.x_at(i) - grid.dx() / 2, xi0 = grid.xi_at(j) - grid.dxi() / 2;
            int inside = 0;
            const double pts[5][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0.5}};
            for (const auto& p : pts)
                inside += region.contains(eval_symbol(spec, x0 + p[0] * grid.dx(), xi0 + p[1] * grid.dxi()));
            if (inside != 0 && inside != 5) ++mixed;
        }
    return mixed * grid.cell_area();
}

}  // namespace

TEST_CASE("trig polynomial basics") {
    const TrigPoly u(std::map<int, cplx>{{-2, {1, 2}}, {0, 3.0}, {3, {0, -1}}});
    const double x = 0.7;
    const cplx direct = cplx(1, 2) * std::exp(cplx(0, -2 * x)) + 3.0 + cplx(0, -1) * std::exp(cplx(0, 3 * x));
    CHECK(std::abs(u(x) - direct) < 1e-14);
    CHECK(u.bandwidth() == 3);
    CHECK(TrigPoly().is_zero());
    CHECK(TrigPoly(std::map<int, cplx>{{1, 0.0}}).is_zero());
    CHECK_THROWS_AS(TrigPoly(std::map<int, cplx>{{1, 1.0}, {-1, 2.0}}, true), ParameterError);

    const TrigPoly c = TrigPoly::cosine(2, 3.0);
    CHECK(c.real());
    for (double t : {0.0, 0.3, 2.0}) CHECK(std::abs(c(t) - 3.0 * std::cos(2 * t)) < 1e-14);
    const TrigPoly s = TrigPoly::sine(1);
    CHECK(std::abs(s(0.4) - std::sin(0.4)) < 1e-14);

    const TrigPoly prod = u * c;
    CHECK(std::abs(prod(1.1) - u(1.1) * c(1.1)) < 1e-12);
    const TrigPoly g = u.antiderivative();
    const double step = 1e-6;
    CHECK(std::abs((g(x + step) - g(x - step)) / (2 * step) - (u(x) - u.mean())) < 1e-8);
}

TEST_CASE("eval_symbol on xi^2 + e^{ix}") {
    const SymbolSpec p = xi2_plus_eix();
    CHECK(std::abs(eval_symbol(p, 0.0, 1.0) - cplx(2.0)) < 1e-15);
    CHECK(std::abs(eval_symbol(p, pi / 2, 0.0) - cplx(0, 1)) < 1e-15);
    for (double x : {0.0, 1.0, 4.0}) CHECK(eval_symbol(p, x, 2.0, SymbolPart::degree_m) == cplx(4.0));
}

TEST_CASE("ellipticity") {
    auto r = check_ellipticity(make_symbol({TrigPoly(), TrigPoly(), TrigPoly::constant(1.0)}));
    CHECK(r.holds);
    CHECK(r.best_constant == doctest::Approx(1.0));

    r = check_ellipticity(make_symbol({TrigPoly(), TrigPoly::cosine(1)}));
    CHECK_FALSE(r.holds);
    CHECK(std::isinf(r.best_constant));

    r = check_ellipticity(make_symbol({TrigPoly(), TrigPoly(), TrigPoly::constant(2.0) + TrigPoly::cosine(1)}));
    CHECK(r.holds);
    CHECK(r.best_constant == doctest::Approx(1.0));
}

TEST_CASE("symmetry") {
    CHECK(check_symmetry(xi2_plus_eix()));
    CHECK_FALSE(check_symmetry(xi_plus_emix()));
    CHECK_FALSE(check_symmetry(make_symbol({TrigPoly::constant(1.0), TrigPoly(), TrigPoly(), TrigPoly::constant(1.0)})));

    const SymbolSpec p =
        make_symbol({TrigPoly::monomial(2, {0.3, -1}), TrigPoly(), TrigPoly::cosine(1), TrigPoly(), TrigPoly::constant(1.0)});
    REQUIRE(check_symmetry(p));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(0, 2 * pi), uxi(-5, 5);
    for (int i = 0; i < 200; ++i) {
        const double x = ux(rng), xi = uxi(rng);
        CHECK(eval_symbol(p, x, -xi) == eval_symbol(p, x, xi));
    }
}

TEST_CASE("symbol validation") {
    SymbolSpec bad = xi2_plus_eix();
    bad.h_corrections = {TrigPoly(), TrigPoly(), TrigPoly::constant(1.0)};
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    SymbolSpec ok = xi2_plus_eix();
    ok.h_corrections = {TrigPoly::constant(0.5), TrigPoly(), TrigPoly()};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.has_corrections());
}

TEST_CASE("symbol and region text round trip") {
    SymbolSpec p = xi2_plus_eix();
    p.h_corrections = {TrigPoly::monomial(-1, {0.25, 0.5}), TrigPoly(), TrigPoly()};
    const SymbolSpec back = symbol_from_yaml(symbol_to_yaml(p));
    CHECK(back.order == 2);
    for (int a = 0; a <= 2; ++a) CHECK(back.a[a] == p.a[a]);
    CHECK(back.h_corrections[0] == p.h_corrections[0]);

    for (const Region& r : {Region::rectangle(-1, 1, 0.1, 0.9), Region::disk({0.5, -0.25}, 0.3),
                            Region::boundary_tube(Region::rectangle(0, 1, 0, 1), 0.1)}) {
        const Region b = region_from_yaml(region_to_yaml(r));
        CHECK(region_to_yaml(b) == region_to_yaml(r));
    }
}

TEST_CASE("regions are closed") {
    const Region rect = Region::rectangle(0, 1, 0, 1);
    CHECK(rect.contains({1.0, 1.0}));
    CHECK_FALSE(rect.contains({1.0 + 1e-12, 0.5}));
    const Region d = Region::disk({0, 0}, 2.0);
    CHECK(d.contains({2.0, 0.0}));
    const Region tube = Region::boundary_tube(rect, 0.1);
    CHECK(tube.contains({0.5, 0.1}));
    CHECK_FALSE(tube.contains({0.5, 0.5}));
    CHECK(tube.contains({1.09, 0.5}));
    CHECK_FALSE(tube.contains({1.2, 0.5}));
    CHECK_THROWS_AS(Region::boundary_tube(rect, 0.0), ParameterError);
}

TEST_CASE("volume of p^{-1} of a rectangle for xi + e^{-ix}") {
    const SymbolSpec p = xi_plus_emix();
    const Region gamma = Region::rectangle(-1, 1, 0.1, 0.9);
    const double exact = 4 * (std::asin(0.9) - std::asin(0.1));
    CHECK(exact == doctest::Approx(4.0784).epsilon(1e-4));
    const double coarse = volume_preimage(p, gamma, certified_grid(p, gamma, 500, 500));
    const double fine = volume_preimage(p, gamma, certified_grid(p, gamma, 1000, 1000));
    CHECK(std::abs(coarse - exact) / exact < 1e-2);
    CHECK(std::abs(fine - exact) / exact < 5e-3);
}

TEST_CASE("volume of a disk preimage for p = xi") {
    const SymbolSpec p = pure_xi();
    const double t = 0.04;
    const Region disk = Region::disk(0.0, std::sqrt(t));
    const double v = volume_preimage(p, disk, certified_grid(p, disk, 64, 2000));
    CHECK(v == doctest::Approx(4 * pi * std::sqrt(t)).epsilon(2e-3));
    CHECK(sublevel_volume(p, 0.0, t, 1e-3) == doctest::Approx(4 * pi * std::sqrt(t)).epsilon(2e-3));
}

TEST_CASE("empty preimage has zero volume") {
    const SymbolSpec p = xi2_plus_eix();
    const Region far = Region::rectangle(-3, -2, 2, 3);  // Re p >= -1 everywhere
    CHECK(volume_preimage(p, far, certified_grid(p, far, 200, 200)) == 0.0);
}

TEST_CASE("uncertified grid is rejected") {
    const SymbolSpec p = xi2_plus_eix();
    const Region gamma = Region::rectangle(-0.5, 0.5, -0.5, 0.5);
    PhaseGrid g{100, -0.5, 0.5, 100};
    CHECK_THROWS_AS(certify_grid(p, gamma, g), ContainmentError);
    CHECK_THROWS_AS(volume_preimage(p, gamma, g), ContainmentError);
}

TEST_CASE("certified xi bound holds") {
    const SymbolSpec p = make_symbol({TrigPoly::monomial(2, 0.7), TrigPoly::cosine(1, 0.4), TrigPoly::constant(1.0)});
    const double modulus = 1.3;
    const double b = certified_xi_bound(p, modulus);
    for (int i = 0; i < 64; ++i)
        for (double xi : {b, -b, 1.5 * b, -3 * b}) CHECK(std::abs(eval_symbol(p, 2 * pi * i / 64, xi)) > modulus);
}

TEST_CASE("volume is additive over disjoint regions") {
    const SymbolSpec p = xi2_plus_eix();
    const Region whole = Region::rectangle(-0.5, 0.5, -0.5, 0.5);
    const Region left = Region::rectangle(-0.5, 0.0, -0.5, 0.5);
    const Region right = Region::rectangle(1e-9, 0.5, -0.5, 0.5);
    const PhaseGrid g = certified_grid(p, whole, 400, 400);
    const double sum = volume_preimage(p, left, g) + volume_preimage(p, right, g);
    CHECK(std::abs(volume_preimage(p, whole, g) - sum) <= 2 * g.cell_area());
}

TEST_CASE("refinement moves the volume by less than the boundary-cell measure") {
    for (const auto& [p, gamma] : {std::pair{xi2_plus_eix(), Region::rectangle(-0.5, 0.5, -0.5, 0.5)},
                                   std::pair{xi_plus_emix(), Region::rectangle(-1, 1, 0.1, 0.9)}}) {
        const PhaseGrid coarse = certified_grid(p, gamma, 200, 200);
        PhaseGrid fine = coarse;
        fine.n_x *= 2;
        fine.n_xi *= 2;
        const double delta = std::abs(volume_preimage(p, gamma, fine) - volume_preimage(p, gamma, coarse));
        CHECK(delta < boundary_cell_measure(p, gamma, coarse));
    }
}

TEST_CASE("kappa estimates") {
    SUBCASE("p = xi at 0") {
        const KappaFit f = estimate_kappa(pure_xi(), 0.0, 1e-4, 1e-1, 7);
        CHECK(f.kappa_hat == doctest::Approx(0.5).epsilon(0.02));
        CHECK(f.r2 > 0.999);
    }
    SUBCASE("xi + e^{-ix} at an interior point") {
        const KappaFit f = estimate_kappa(xi_plus_emix(), {0, 0.5}, 1e-4, 1e-1, 7);
        CHECK(f.kappa_hat == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("empty sublevel sets") {
        CHECK_THROWS_AS(estimate_kappa(xi_plus_emix(), {0, 3.0}, 1e-4, 1e-1, 7), NumericError);
    }
}

TEST_CASE("V_z(t) / t^{1/(2m)} is bounded on the kappa grid") {
    const SymbolSpec p = xi_plus_emix();
    for (cplx z : {cplx(0, 0.5), cplx(0.3, -0.2)}) {
        const KappaFit f = estimate_kappa(p, z, 1e-4, 1e-1, 7);
        for (std::size_t i = 0; i < f.t.size(); ++i) CHECK(f.volume[i] / std::pow(f.t[i], 0.5) < 4 * pi);
    }
}

TEST_CASE("Sigma sampler") {
    const SymbolSpec p = xi2_plus_eix();
    const Region box = Region::rectangle(-3, 3, -3, 3);
    const SigmaSampler sigma(p, certified_grid(p, box, 256, 256));
    CHECK(sigma.contains({0.2, 0.3}));
    CHECK(sigma.contains({4.0, 0.5}));
    CHECK_FALSE(sigma.contains({-2.0, 0.0}));
    CHECK(sigma.distance({-2.0, 0.0}) == doctest::Approx(1.0).epsilon(0.02));
}
