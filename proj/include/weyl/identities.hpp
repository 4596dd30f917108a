#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "weyl/config.hpp"

namespace weyl {

/// Complex Gaussian matrix with unit-variance entries.
Eigen::MatrixXcd random_gaussian_matrix(int dim, std::uint64_t seed);

/// U diag(t) V^* with Haar-like U, V from QR of Gaussian matrices.
Eigen::MatrixXcd matrix_with_singular_values(const std::vector<double>& t, std::uint64_t seed);

/// A A^* / dim for Gaussian A: Hermitian positive semidefinite.
Eigen::MatrixXcd random_psd_matrix(int dim, std::uint64_t seed);

struct FactorizationCase {
    int index = 0;
    int n_small = 0;
    double t1 = 0.0;
    double residual = 0.0;          // determinant factorization
    double block_residual = 0.0;    // ||P P^{-1} - I||
    double e_minus_plus_error = 0.0;  // max |sv(E_-+) - t_j|
};

struct DerivativeCase {
    int index = 0;
    double deriv_residual = 0.0;
};

struct IdentityReport {
    std::vector<FactorizationCase> factorization;
    std::vector<DerivativeCase> derivative;
    double max_factorization_residual = 0.0;
    double max_block_residual = 0.0;
    double max_e_minus_plus_error = 0.0;
    double max_deriv_residual = 0.0;
    double min_t1 = 0.0;
};

/// Every fifth matrix has t_1 = 1e-10; N_small cycles through 1, 2, 3.
IdentityReport run_identity_checks(const IdentitySettings& settings, std::uint64_t master_seed);

}  // namespace weyl
