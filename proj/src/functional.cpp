#include "weyl/functional.hpp"

#include <algorithm>
#include <cmath>

#include "weyl/errors.hpp"

namespace weyl {

double BumpFunction::operator()(double t) const {
    const double u = t / c;
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double BumpFunction::derivative(double t) const {
    const double u = t / c;
    if (std::abs(u) >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return (*this)(t) * (-2.0 * u / (c * w * w));
}

double BumpFunction::psi(double e) const {
    const double ch = (*this)(e);
    return (ch - e * derivative(e)) / (e + ch);
}

FunctionalValues spectral_functional(const Eigen::VectorXd& lambda, const BumpFunction& chi, double alpha,
                                     double t_probe) {
    if (!(alpha > 0 && alpha < 1) || !(t_probe > 0 && t_probe < 1))
        throw ParameterError("alpha and t_probe must lie in (0, 1)");
    if (!(chi(0.0) > 0)) throw ParameterError("bump must satisfy chi(0) > 0");

    FunctionalValues out;
    auto logdet_at = [&](double t) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < lambda.size(); ++j) s += std::log(lambda(j) + t * chi(lambda(j) / t));
        return s;
    };
    for (Eigen::Index j = 0; j < lambda.size(); ++j) out.trace_val += chi(lambda(j) / alpha);
    out.logdet_reg = logdet_at(alpha);

    const double step = 1e-5 * t_probe;
    const double fd = (logdet_at(t_probe + step) - logdet_at(t_probe - step)) / (2 * step);
    double exact = 0.0;
    for (Eigen::Index j = 0; j < lambda.size(); ++j) exact += chi.psi(lambda(j) / t_probe) / t_probe;
    out.deriv_residual = std::abs(fd - exact);
    return out;
}

FunctionalValues spectral_functional(const Eigen::MatrixXcd& S, const BumpFunction& chi, double alpha,
                                     double t_probe) {
    if (S.rows() != S.cols()) throw ParameterError("spectral functional needs a square matrix");
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if ((S - S.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericError("spectral functional input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
    return spectral_functional(es.eigenvalues(), chi, alpha, t_probe);
}

}  // namespace weyl
