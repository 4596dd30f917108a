#include "weyl/identities.hpp"

#include <algorithm>
#include <random>

#include "weyl/functional.hpp"
#include "weyl/perturbation.hpp"
#include "weyl/spectral.hpp"

namespace weyl {

namespace {

Eigen::MatrixXcd gaussian(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            const double re = nd(rng);
            m(i, j) = cplx(re, nd(rng));
        }
    return m;
}

Eigen::MatrixXcd unitary(int dim, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian(dim, dim, rng));
    return qr.householderQ() * Eigen::MatrixXcd::Identity(dim, dim);
}

}  // namespace

Eigen::MatrixXcd random_gaussian_matrix(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return gaussian(dim, dim, rng);
}

Eigen::MatrixXcd matrix_with_singular_values(const std::vector<double>& t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int n = static_cast<int>(t.size());
    const Eigen::MatrixXcd U = unitary(n, rng);
    const Eigen::MatrixXcd V = unitary(n, rng);
    Eigen::VectorXcd d(n);
    for (int i = 0; i < n; ++i) d(i) = t[i];
    return U * d.asDiagonal() * V.adjoint();
}

Eigen::MatrixXcd random_psd_matrix(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Eigen::MatrixXcd a = gaussian(dim, dim, rng);
    Eigen::MatrixXcd s = a * a.adjoint() / static_cast<double>(dim);
    return (0.5 * (s + s.adjoint())).eval();
}

IdentityReport run_identity_checks(const IdentitySettings& settings, std::uint64_t master_seed) {
    IdentityReport rep;
    rep.min_t1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < settings.n_matrices; ++i) {
        const std::uint64_t seed = derive_seed(master_seed, 1000000 + static_cast<std::uint64_t>(i));
        FactorizationCase fc;
        fc.index = i;
        fc.n_small = 1 + i % 3;
        Eigen::MatrixXcd m;
        if (i % 5 == 4) {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> ud(0.5, 2.0);
            std::vector<double> t(settings.dim);
            for (auto& v : t) v = ud(rng);
            t[0] = 1e-10;
            m = matrix_with_singular_values(t, seed + 1);
        } else {
            m = random_gaussian_matrix(settings.dim, seed);
        }
        const GrushinSolution g = grushin_solve(m, 0.0, fc.n_small);
        fc.t1 = g.t[0];
        fc.block_residual = g.residual;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g.E_minus_plus);
        std::vector<double> sv(svd.singularValues().data(), svd.singularValues().data() + fc.n_small);
        std::sort(sv.begin(), sv.end());
        for (int j = 0; j < fc.n_small; ++j) fc.e_minus_plus_error = std::max(fc.e_minus_plus_error, std::abs(sv[j] - g.t[j]));
        fc.residual = det_factorization_residual(m, 0.0, fc.n_small);

        rep.max_factorization_residual = std::max(rep.max_factorization_residual, fc.residual);
        rep.max_block_residual = std::max(rep.max_block_residual, fc.block_residual);
        rep.max_e_minus_plus_error = std::max(rep.max_e_minus_plus_error, fc.e_minus_plus_error);
        rep.min_t1 = std::min(rep.min_t1, fc.t1);
        rep.factorization.push_back(fc);
    }
    const BumpFunction chi{settings.chi_c};
    for (int i = 0; i < settings.n_psd; ++i) {
        const Eigen::MatrixXcd s = random_psd_matrix(settings.psd_dim, derive_seed(master_seed, 2000000 + static_cast<std::uint64_t>(i)));
        DerivativeCase dc;
        dc.index = i;
        dc.deriv_residual = spectral_functional(s, chi, settings.alpha, settings.t_probe).deriv_residual;
        rep.max_deriv_residual = std::max(rep.max_deriv_residual, dc.deriv_residual);
        rep.derivative.push_back(dc);
    }
    return rep;
}

}  // namespace weyl
