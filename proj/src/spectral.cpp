#include "weyl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "weyl/errors.hpp"

namespace weyl {

namespace {

Eigen::MatrixXcd shifted(const Eigen::MatrixXcd& m, cplx z) {
    Eigen::MatrixXcd a = m;
    a.diagonal().array() -= z;
    return a;
}

double log_abs_det_lu(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu) {
    const auto& lu_m = lu.matrixLU();
    double s = 0.0;
    for (Eigen::Index i = 0; i < lu_m.rows(); ++i) s += std::log(std::abs(lu_m(i, i)));
    return s;
}

}  // namespace

SpectrumResult eigenvalues(const Eigen::MatrixXcd& m, double h, int dim_cap) {
    if (m.rows() != m.cols()) throw ParameterError("eigenvalues need a square matrix");
    if (m.rows() > dim_cap)
        throw ParameterError("matrix dimension " + std::to_string(m.rows()) + " exceeds the cap " +
                             std::to_string(dim_cap));
    SpectrumResult out;
    out.matrix_dim = static_cast<int>(m.rows());
    out.h = h;
    if (m.rows() == 0) return out;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
    const Eigen::VectorXcd vals = solver.eigenvalues();
    out.eigenvalues.assign(vals.data(), vals.data() + vals.size());
    if (solver.info() != Eigen::Success) throw EigenSolveError("complex eigensolver did not converge", out.eigenvalues);

    const Eigen::MatrixXcd& vecs = solver.eigenvectors();
    const Eigen::MatrixXcd res = m * vecs - vecs * vals.asDiagonal();
    for (Eigen::Index j = 0; j < res.cols(); ++j) {
        const double nv = vecs.col(j).norm();
        out.max_residual = std::max(out.max_residual, nv > 0 ? res.col(j).norm() / nv : 0.0);
    }
    if (!std::isfinite(out.max_residual)) throw EigenSolveError("non-finite eigen residual", out.eigenvalues);
    return out;
}

SpectrumResult eigenvalues(const OperatorMatrix& m, int dim_cap) { return eigenvalues(m.entries, m.grid.h, dim_cap); }

int count_in_region(const std::vector<cplx>& values, const Region& region) {
    return static_cast<int>(std::count_if(values.begin(), values.end(), [&](cplx z) { return region.contains(z); }));
}

int count_in_region(const SpectrumResult& spectrum, const Region& region) {
    return count_in_region(spectrum.eigenvalues, region);
}

std::vector<double> singular_values(const Eigen::MatrixXcd& m, cplx z) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted(m, z));
    const Eigen::VectorXd s = svd.singularValues();
    std::vector<double> out(s.data(), s.data() + s.size());
    std::sort(out.begin(), out.end());
    return out;
}

double log_abs_det(const Eigen::MatrixXcd& m, cplx z) {
    const Eigen::MatrixXcd a = shifted(m, z);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    if (!(lu.rcond() >= 1e-14)) {
        const auto sv = singular_values(m, z);
        if (sv.empty() || sv.front() <= 1e-14 * sv.back()) {
            std::ostringstream msg;
            msg << "M - z is numerically singular: smallest singular value " << (sv.empty() ? 0.0 : sv.front());
            throw NumericError(msg.str());
        }
    }
    return log_abs_det_lu(lu);
}

std::vector<PseudospectrumPoint> pseudospectrum(const Eigen::MatrixXcd& m, const std::vector<cplx>& z_grid) {
    std::vector<PseudospectrumPoint> out;
    out.reserve(z_grid.size());
    for (const auto& z : z_grid) {
        PseudospectrumPoint p{z, 0.0, std::nullopt};
        try {
            const auto sv = singular_values(m, z);
            p.sigma_min = sv.empty() ? 0.0 : sv.front();
            if (!std::isfinite(p.sigma_min)) p.error = "non-finite singular value";
        } catch (const std::exception& e) {
            p.error = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

GrushinSolution grushin_solve(const Eigen::MatrixXcd& m, cplx z, int n_small) {
    const int n = static_cast<int>(m.rows());
    if (n_small < 1 || n_small > n) throw ParameterError("N_small must lie in [1, N]");
    const Eigen::MatrixXcd a = shifted(m, z);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();  // descending

    GrushinSolution g;
    g.n_small = n_small;
    g.t.resize(n);
    for (int i = 0; i < n; ++i) g.t[i] = sv(n - 1 - i);
    if (n_small < n && !(g.t[n_small] - g.t[n_small - 1] > 1e-12)) {
        std::ostringstream msg;
        msg << "degenerate Grushin projection: t_" << n_small + 1 << " - t_" << n_small << " = "
            << g.t[n_small] - g.t[n_small - 1];
        throw NumericError(msg.str());
    }
    g.e_vectors.resize(n, n_small);
    g.f_vectors.resize(n, n_small);
    for (int j = 0; j < n_small; ++j) {
        g.e_vectors.col(j) = svd.matrixV().col(n - 1 - j);
        g.f_vectors.col(j) = svd.matrixU().col(n - 1 - j);
    }

    const int nb = n + n_small;
    g.bordered = Eigen::MatrixXcd::Zero(nb, nb);
    g.bordered.topLeftCorner(n, n) = a;
    g.bordered.topRightCorner(n, n_small) = g.f_vectors;
    g.bordered.bottomLeftCorner(n_small, n) = g.e_vectors.adjoint();

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(g.bordered);
    const Eigen::MatrixXcd inv = lu.inverse();
    g.E = inv.topLeftCorner(n, n);
    g.E_plus = inv.topRightCorner(n, n_small);
    g.E_minus = inv.bottomLeftCorner(n_small, n);
    g.E_minus_plus = inv.bottomRightCorner(n_small, n_small);
    g.residual = (g.bordered * inv - Eigen::MatrixXcd::Identity(nb, nb)).cwiseAbs().maxCoeff();
    return g;
}

double det_factorization_residual(const Eigen::MatrixXcd& m, cplx z, int n_small) {
    if (n_small == 0) return 0.0;
    const int n = static_cast<int>(m.rows());
    if (n_small < 1 || n_small > n) throw ParameterError("N_small must lie in [1, N]");
    // ln|det| of a matrix with condition number c carries an error near eps * c, so the
    // identity is evaluated in extended precision to stay meaningful for t_1 ~ 1e-10.
    using Mat = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
    Mat a = m.cast<std::complex<long double>>();
    a.diagonal().array() -= std::complex<long double>(z);
    const auto log_det = [](const Mat& x) {
        const Eigen::PartialPivLU<Mat> lu(x);
        long double s = 0.0L;
        for (Eigen::Index i = 0; i < x.rows(); ++i) s += std::log(std::abs(lu.matrixLU()(i, i)));
        return s;
    };
    const Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat bordered = Mat::Zero(n + n_small, n + n_small);
    bordered.topLeftCorner(n, n) = a;
    for (int j = 0; j < n_small; ++j) {
        bordered.block(0, n + j, n, 1) = svd.matrixU().col(n - 1 - j);
        bordered.block(n + j, 0, 1, n) = svd.matrixV().col(n - 1 - j).adjoint();
    }
    const Mat e_mp = Eigen::PartialPivLU<Mat>(bordered).inverse().bottomRightCorner(n_small, n_small);
    const long double ln_a = log_det(a);
    const long double diff = std::abs(ln_a - (log_det(bordered) + log_det(e_mp)));
    if (!std::isfinite(static_cast<double>(ln_a))) throw NumericError("M - z is numerically singular");
    return static_cast<double>(ln_a != 0.0L ? diff / std::abs(ln_a) : diff);
}

Eigen::MatrixXcd coupling_matrix(const TrigPoly& q, const Eigen::MatrixXcd& e_vectors,
                                 const Eigen::MatrixXcd& f_vectors) {
    if (e_vectors.rows() != f_vectors.rows() || e_vectors.cols() != f_vectors.cols())
        throw ParameterError("coupling matrix: e and f families differ in shape");
    if (e_vectors.rows() % 2 == 0) throw ParameterError("coupling matrix: Fourier vectors must have odd length");
    const GridParams grid{1.0, static_cast<int>(e_vectors.rows() - 1) / 2};
    return f_vectors.adjoint() * convolution_matrix(q, grid) * e_vectors;
}

Eigen::MatrixXcd conjugate_functions(const Eigen::MatrixXcd& vectors) {
    return vectors.colwise().reverse().conjugate();
}

}  // namespace weyl
