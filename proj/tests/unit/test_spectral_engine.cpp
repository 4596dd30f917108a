#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "weyl/errors.hpp"
#include "weyl/functional.hpp"
#include "weyl/identities.hpp"
#include "weyl/spectral.hpp"

using namespace weyl;
using std::numbers::pi;
using Eigen::MatrixXcd;

namespace {

std::vector<double> sorted_abs(std::vector<cplx> v) {
    std::vector<double> out;
    for (auto z : v) out.push_back(z.real());
    std::sort(out.begin(), out.end());
    return out;
}

MatrixXcd shift3() {
    MatrixXcd m = MatrixXcd::Zero(3, 3);
    m(1, 0) = m(2, 1) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("eigenvalues of small operators") {
    const double h = 0.2;
    MatrixXcd d = MatrixXcd::Zero(3, 3);
    d.diagonal() << -h, 0, h;
    const SpectrumResult r = eigenvalues(d, h);
    CHECK(r.matrix_dim == 3);
    const auto re = sorted_abs(r.eigenvalues);
    CHECK(re[0] == doctest::Approx(-h));
    CHECK(std::abs(re[1]) < 1e-15);
    CHECK(re[2] == doctest::Approx(h));

    for (auto z : eigenvalues(shift3()).eigenvalues) CHECK(std::abs(z) < 1e-12);

    MatrixXcd a = random_gaussian_matrix(30, 4);
    const MatrixXcd herm = (a + a.adjoint()) / 2;
    const Eigen::SelfAdjointEigenSolver<MatrixXcd> oracle(herm);
    const SpectrumResult hr = eigenvalues(herm);
    CHECK(hr.max_residual < 1e-12);
    auto got = sorted_abs(hr.eigenvalues);
    for (int i = 0; i < 30; ++i) CHECK(std::abs(got[i] - oracle.eigenvalues()(i)) < 1e-10);
    for (auto z : hr.eigenvalues) CHECK(std::abs(z.imag()) < 1e-10);

    CHECK_THROWS_AS(eigenvalues(MatrixXcd::Identity(5, 5), 0.1, 4), ParameterError);
}

TEST_CASE("region counts") {
    CHECK(count_in_region(std::vector<cplx>{}, Region::rectangle(0, 1, 0, 1)) == 0);
    CHECK(count_in_region(std::vector<cplx>{{0.5, 0.5}}, Region::rectangle(0, 1, 0, 1)) == 1);
    CHECK(count_in_region(std::vector<cplx>{{1.0, 0.5}, {0.0, 0.0}}, Region::rectangle(0, 1, 0, 1)) == 2);

    const SpectrumResult r = eigenvalues(random_gaussian_matrix(40, 2) / std::sqrt(40.0));
    const Region small = Region::rectangle(-0.3, 0.3, -0.3, 0.3), big = Region::rectangle(-0.6, 0.6, -0.4, 0.5);
    CHECK(count_in_region(r, small) <= count_in_region(r, big));
    CHECK(count_in_region(r, Region::disk(0.0, 0.2)) <= count_in_region(r, Region::disk(0.0, 0.5)));
}

TEST_CASE("singular values") {
    MatrixXcd u = random_gaussian_matrix(6, 1).householderQr().householderQ();
    for (double t : singular_values(u, 0.0)) CHECK(t == doctest::Approx(1.0).epsilon(1e-13));

    MatrixXcd d = MatrixXcd::Zero(4, 4);
    const cplx diag[] = {{1, 1}, {-2, 0}, {0.5, 0}, {0, 3}};
    for (int i = 0; i < 4; ++i) d(i, i) = diag[i];
    const cplx z(0.2, 0.1);
    std::vector<double> expected;
    for (auto v : diag) expected.push_back(std::abs(v - z));
    std::sort(expected.begin(), expected.end());
    const auto got = singular_values(d, z);
    for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-14));

    const MatrixXcd m = random_gaussian_matrix(25, 6);
    const MatrixXcd mz = m - z * MatrixXcd::Identity(25, 25);
    const Eigen::SelfAdjointEigenSolver<MatrixXcd> gram(mz.adjoint() * mz);
    const auto t = singular_values(m, z);
    for (int i = 0; i < 25; ++i) CHECK(std::abs(t[i] * t[i] - gram.eigenvalues()(i)) <= 1e-10 * gram.eigenvalues()(24));
}

TEST_CASE("log determinants") {
    CHECK(log_abs_det(MatrixXcd::Identity(4, 4), 0.0) == 0.0);
    MatrixXcd d = MatrixXcd::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    CHECK(log_abs_det(d, 0.0) == doctest::Approx(std::log(6.0)));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MatrixXcd m = random_gaussian_matrix(30, seed);
        double sum = 0.0;
        for (double t : singular_values(m, {0.3, 0.0})) sum += std::log(t);
        const double ld = log_abs_det(m, {0.3, 0.0});
        CHECK(std::abs(ld - sum) <= 1e-8 * std::abs(sum));
    }

    try {
        log_abs_det(shift3(), 0.0);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("smallest singular value") != std::string::npos);
    }
}

TEST_CASE("Grushin problem") {
    SUBCASE("diagonal M - z") {
        MatrixXcd d = MatrixXcd::Zero(5, 5);
        d.diagonal() << cplx(0.1, 0.2), 3.0, cplx(0, -0.5), 2.0, 1.5;
        const GrushinSolution g = grushin_solve(d, 0.0, 2);
        REQUIRE(g.E_minus_plus.rows() == 2);
        const double t1 = std::abs(cplx(0.1, 0.2)), t2 = 0.5;
        CHECK(std::abs(g.E_minus_plus(0, 0)) == doctest::Approx(t1));
        CHECK(std::abs(g.E_minus_plus(1, 1)) == doctest::Approx(t2));
        CHECK(std::abs(g.E_minus_plus(0, 1)) < 1e-15);
        CHECK(std::abs(g.E_minus_plus(1, 0)) < 1e-15);
    }
    SUBCASE("E_-+ = -diag(t) in the singular bases") {
        const MatrixXcd m = random_gaussian_matrix(12, 3);
        const GrushinSolution g = grushin_solve(m, {0.1, -0.2}, 3);
        MatrixXcd expected = MatrixXcd::Zero(3, 3);
        for (int j = 0; j < 3; ++j) expected(j, j) = -g.t[j];
        CHECK((g.E_minus_plus - expected).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::JacobiSVD<MatrixXcd> sv(g.E_minus_plus);
        for (int j = 0; j < 3; ++j) CHECK(sv.singularValues()(2 - j) == doctest::Approx(g.t[j]).epsilon(1e-9));
        CHECK(g.residual <= 1e-9);
    }
    SUBCASE("the block inverse reproduces its inputs") {
        const MatrixXcd m = random_gaussian_matrix(15, 8);
        const cplx z(0.3, 0.3);
        const GrushinSolution g = grushin_solve(m, z, 2);
        std::mt19937_64 rng(1);
        std::normal_distribution<double> nd;
        Eigen::VectorXcd v(15), vp(2);
        for (auto& x : v) x = {nd(rng), nd(rng)};
        for (auto& x : vp) x = {nd(rng), nd(rng)};
        // (u, u_-) = [[E, E_+], [E_-, E_-+]] (v, v_+)
        const Eigen::VectorXcd u = g.E * v + g.E_plus * vp;
        const Eigen::VectorXcd um = g.E_minus * v + g.E_minus_plus * vp;
        const MatrixXcd mz = m - z * MatrixXcd::Identity(15, 15);
        const Eigen::VectorXcd r1 = mz * u + g.f_vectors * um - v;
        const Eigen::VectorXcd r2 = g.e_vectors.adjoint() * u - vp;
        CHECK(r1.cwiseAbs().maxCoeff() < 1e-9);
        CHECK(r2.cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("singular 2 x 2") {
        MatrixXcd m = MatrixXcd::Zero(2, 2);
        m(1, 1) = 2.0;
        const GrushinSolution g = grushin_solve(m, 0.0, 1);
        CHECK(g.t[0] == 0.0);
        CHECK(std::abs(g.E_minus_plus(0, 0)) < 1e-15);
    }
    SUBCASE("gap violation") {
        CHECK_THROWS_AS(grushin_solve(MatrixXcd::Identity(4, 4), 0.0, 2), NumericError);
        CHECK_THROWS_AS(grushin_solve(MatrixXcd::Identity(4, 4), 0.0, 5), ParameterError);
    }
}

TEST_CASE("determinant factorization") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int i = 0; i < 10; ++i) {
        std::vector<double> t(20);
        for (auto& x : t) x = u(rng);
        const MatrixXcd m = matrix_with_singular_values(t, 100 + i);
        CHECK(det_factorization_residual(m, 0.0, 3) <= 1e-8);
    }
    CHECK(det_factorization_residual(random_gaussian_matrix(10, 1), 0.0, 0) == 0.0);

    std::vector<double> t(20);
    for (auto& x : t) x = u(rng);
    t[0] = 1e-10;
    const MatrixXcd near = matrix_with_singular_values(t, 7);
    CHECK(singular_values(near, 0.0)[0] == doctest::Approx(1e-10).epsilon(1e-4));
    CHECK(det_factorization_residual(near, 0.0, 1) <= 1e-8);
}

TEST_CASE("coupling matrices") {
    const MatrixXcd e = random_gaussian_matrix(21, 12).householderQr().householderQ();
    const MatrixXcd e4 = e.leftCols(4);
    CHECK((coupling_matrix(TrigPoly::constant(1.0), e4, e4) - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

    const TrigPoly q = TrigPoly::monomial(2, {0.3, 0.1}) + TrigPoly::cosine(1) + TrigPoly::constant(cplx(0.2, -0.7));
    const MatrixXcd mq = coupling_matrix(q, e4, conjugate_functions(e4));
    CHECK((mq - mq.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    // Direct quadrature of <q e_k, f_j> with the functions evaluated pointwise.
    const int k0 = 3;
    const TrigPoly single = TrigPoly::monomial(k0, 1.0 / std::sqrt(2 * pi));
    const MatrixXcd f = e.middleCols(4, 2);
    const MatrixXcd ek = e.leftCols(2);
    const MatrixXcd got = coupling_matrix(single, ek, f);
    auto eval = [](const Eigen::VectorXcd& v, double x) {
        cplx s = 0;
        const int K = static_cast<int>(v.size() - 1) / 2;
        for (int m = -K; m <= K; ++m) s += v(m + K) * std::exp(cplx(0, m * x));
        return s / std::sqrt(2 * pi);
    };
    const int nq = 256;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            cplx acc = 0;
            for (int l = 0; l < nq; ++l) {
                const double x = 2 * pi * l / nq;
                acc += single(x) * eval(ek.col(k), x) * std::conj(eval(f.col(j), x));
            }
            acc *= 2 * pi / nq;
            CHECK(std::abs(got(j, k) - acc) < 1e-12);
        }

    CHECK_THROWS_AS(coupling_matrix(q, e4, e.leftCols(3)), ParameterError);
}

TEST_CASE("pseudospectrum") {
    Eigen::VectorXcd d(4);
    d << cplx(0, 0), cplx(1, 0), cplx(0, 1), cplx(-1, -1);
    const MatrixXcd normal = d.asDiagonal();
    std::vector<cplx> zs{{0.3, 0.2}, {2, 2}, {-0.5, -0.4}};
    const auto ps = pseudospectrum(normal, zs);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        double dist = 1e300;
        for (auto l : d) dist = std::min(dist, std::abs(zs[i] - l));
        CHECK(ps[i].sigma_min == doctest::Approx(dist).epsilon(1e-13));
    }

    const MatrixXcd m = random_gaussian_matrix(20, 3) / std::sqrt(20.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<cplx> pts;
    for (int i = 0; i < 40; ++i) pts.emplace_back(u(rng), u(rng));
    const auto v = pseudospectrum(m, pts);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) CHECK(std::abs(v[i].sigma_min - v[j].sigma_min) <= std::abs(pts[i] - pts[j]) + 1e-12);

    const auto nil = pseudospectrum(shift3(), {cplx(0.5, 0)});
    const Eigen::JacobiSVD<MatrixXcd> oracle(shift3() - 0.5 * MatrixXcd::Identity(3, 3));
    CHECK(nil[0].sigma_min == doctest::Approx(oracle.singularValues()(2)).epsilon(1e-12));
}

TEST_CASE("functional calculus") {
    const BumpFunction chi{1.0};
    CHECK(chi(0.0) == 1.0);
    CHECK(chi(1.0) == 0.0);
    CHECK(chi(1.5) == 0.0);
    const double e = 0.4, step = 1e-6;
    CHECK(chi.derivative(e) == doctest::Approx((chi(e + step) - chi(e - step)) / (2 * step)).epsilon(1e-7));
    CHECK(chi.psi(e) == doctest::Approx((chi(e) - e * chi.derivative(e)) / (e + chi(e))));

    const double alpha = 0.1;
    const int n = 7;
    FunctionalValues zero = spectral_functional(MatrixXcd(MatrixXcd::Zero(n, n)), chi, alpha, 0.3);
    CHECK(zero.trace_val == doctest::Approx(n * chi(0.0)));
    CHECK(zero.logdet_reg == doctest::Approx(n * std::log(alpha * chi(0.0))));

    FunctionalValues id = spectral_functional(MatrixXcd(MatrixXcd::Identity(n, n)), chi, alpha, 0.3);
    CHECK(id.trace_val == 0.0);
    CHECK(id.logdet_reg == 0.0);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const FunctionalValues f = spectral_functional(random_psd_matrix(50, seed), chi, alpha, 0.3);
        CHECK(f.deriv_residual <= 1e-6);
    }

    MatrixXcd bad = random_psd_matrix(5, 1);
    bad(0, 1) += 1e-6;
    CHECK_THROWS_AS(spectral_functional(bad, chi, alpha, 0.3), NumericError);
    CHECK_THROWS_AS(spectral_functional(MatrixXcd(MatrixXcd::Zero(2, 2)), chi, 1.5, 0.3), ParameterError);
}

TEST_CASE("derivative identity for a single eigenvalue") {
    // d/dt ln(E + t chi(E/t)) = psi(E/t)/t, checked by a high-order difference.
    const BumpFunction chi{1.0};
    for (double lam : {0.0, 0.05, 0.2, 0.29}) {
        const double t = 0.3, d = 1e-4;
        auto f = [&](double s) { return std::log(lam + s * chi(lam / s)); };
        const double fd = (-f(t + 2 * d) + 8 * f(t + d) - 8 * f(t - d) + f(t - 2 * d)) / (12 * d);
        CHECK(fd == doctest::Approx(chi.psi(lam / t) / t).epsilon(1e-8));
    }
}

TEST_CASE("identity checks report") {
    IdentitySettings s;
    s.n_matrices = 10;
    s.n_psd = 4;
    const IdentityReport r = run_identity_checks(s, 5);
    CHECK(r.factorization.size() == 10);
    CHECK(r.derivative.size() == 4);
    CHECK(r.min_t1 <= 1e-10 * (1 + 1e-4));
    for (const auto& c : r.factorization) CHECK(c.n_small == 1 + c.index % 3);
    CHECK(r.max_factorization_residual <= 1e-8);
    CHECK(r.max_block_residual <= 1e-9);
    CHECK(r.max_e_minus_plus_error <= 1e-9);
    CHECK(r.max_deriv_residual <= 1e-6);
    const IdentityReport again = run_identity_checks(s, 5);
    CHECK(again.max_factorization_residual == r.max_factorization_residual);
}
