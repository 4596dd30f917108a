#pragma once

#include <Eigen/Dense>

namespace weyl {

/// chi_c(t) = exp(1 - 1/(1 - (t/c)^2)) for |t| < c, else 0. chi_c(0) = 1.
struct BumpFunction {
    double c = 1.0;

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double derivative(double t) const;
    /// psi(E) = (chi(E) - E chi'(E)) / (E + chi(E)), so that
    /// d/dt ln(E + t chi(E/t)) = psi(E/t) / t.
    [[nodiscard]] double psi(double e) const;
};

struct FunctionalValues {
    double trace_val = 0.0;    // tr chi(S/alpha)
    double logdet_reg = 0.0;   // ln det(S + alpha chi(S/alpha))
    double deriv_residual = 0.0;
};

/// Functional calculus on a Hermitian positive semidefinite S through its
/// eigenvalues. The derivative residual compares a central difference
/// (step 1e-5 t_probe) of t -> ln det(S + t chi(S/t)) with tr psi(S/t)/t.
/// Throws NumericError if ||S - S^*|| > 1e-12 max(1, ||S||).
FunctionalValues spectral_functional(const Eigen::MatrixXcd& S, const BumpFunction& chi, double alpha,
                                     double t_probe);

/// Same computation from precomputed eigenvalues.
FunctionalValues spectral_functional(const Eigen::VectorXd& eigenvalues, const BumpFunction& chi, double alpha,
                                     double t_probe);

}  // namespace weyl
