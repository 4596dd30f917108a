#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weyl/operator.hpp"
#include "weyl/errors.hpp"
#include "weyl/region.hpp"

namespace weyl {

struct SpectrumResult {
    std::vector<cplx> eigenvalues;
    int matrix_dim = 0;
    double h = 0.0;
    /// max_j ||(M - lambda_j) v_j|| over unit eigenvectors.
    double max_residual = 0.0;
};

/// Raised when the dense eigensolver does not converge; carries whatever
/// eigenvalues it produced.
class EigenSolveError : public NumericError {
public:
    EigenSolveError(const std::string& what, std::vector<cplx> partial)
        : NumericError(what), partial_(std::move(partial)) {}
    [[nodiscard]] const std::vector<cplx>& partial() const { return partial_; }

private:
    std::vector<cplx> partial_;
};

inline constexpr int kDefaultDimCap = 4096;

SpectrumResult eigenvalues(const OperatorMatrix& m, int dim_cap = kDefaultDimCap);
SpectrumResult eigenvalues(const Eigen::MatrixXcd& m, double h = 0.0, int dim_cap = kDefaultDimCap);

/// Eigenvalues on the boundary count as inside.
int count_in_region(const SpectrumResult& spectrum, const Region& region);
int count_in_region(const std::vector<cplx>& values, const Region& region);

/// Singular values of M - z, ascending.
std::vector<double> singular_values(const Eigen::MatrixXcd& m, cplx z);
inline std::vector<double> singular_values(const OperatorMatrix& m, cplx z) { return singular_values(m.entries, z); }

/// ln|det(M - z)| from the pivots of a partially pivoted LU factorization.
/// Throws NumericError (with the smallest singular value) when
/// sigma_min(M - z) <= 1e-14 ||M - z||.
double log_abs_det(const Eigen::MatrixXcd& m, cplx z);
inline double log_abs_det(const OperatorMatrix& m, cplx z) { return log_abs_det(m.entries, z); }

struct PseudospectrumPoint {
    cplx z;
    double sigma_min = 0.0;
    std::optional<std::string> error;
};

std::vector<PseudospectrumPoint> pseudospectrum(const Eigen::MatrixXcd& m, const std::vector<cplx>& z_grid);

/// Solution of the bordered problem
///   (M - z) u + R_- u_- = v,   R_+ u = v_+
/// with R_+ u = (<u, e_j>)_j and R_- u_- = sum_j u_-(j) f_j built from the
/// N_small lowest singular pairs (M - z) e_j = t_j f_j.
struct GrushinSolution {
    int n_small = 0;
    std::vector<double> t;      // all singular values of M - z, ascending
    Eigen::MatrixXcd e_vectors;  // N x n_small, right singular vectors
    Eigen::MatrixXcd f_vectors;  // N x n_small, left singular vectors
    Eigen::MatrixXcd bordered;   // (N + n_small)^2 block matrix
    Eigen::MatrixXcd E, E_plus, E_minus, E_minus_plus;
    /// ||bordered * inverse - I||_max
    double residual = 0.0;
};

/// Throws NumericError when t_{N_small+1} - t_{N_small} <= 1e-12 and
/// ParameterError when N_small is out of range.
GrushinSolution grushin_solve(const Eigen::MatrixXcd& m, cplx z, int n_small);

/// |ln|det(M-z)| - (ln|det P| + ln|det E_-+|)| / |ln|det(M-z)||, with P the
/// bordered matrix. Zero by convention for N_small = 0. Evaluated in long double.
double det_factorization_residual(const Eigen::MatrixXcd& m, cplx z, int n_small);

/// M_{jk} = <Conv(q) e_k, f_j> for vectors in the Fourier basis.
Eigen::MatrixXcd coupling_matrix(const TrigPoly& q, const Eigen::MatrixXcd& e_vectors,
                                 const Eigen::MatrixXcd& f_vectors);

/// Fourier vector of the complex conjugate function: (J conj(v))_k = conj(v_{-k}).
Eigen::MatrixXcd conjugate_functions(const Eigen::MatrixXcd& vectors);

}  // namespace weyl
