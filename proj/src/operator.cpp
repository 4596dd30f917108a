#include "weyl/operator.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "weyl/errors.hpp"
#include "weyl/phase_space.hpp"

namespace weyl {

void GridParams::validate() const {
    if (K < 1) throw ParameterError("Fourier truncation needs K >= 1");
    if (!(h > 0 && h <= 1)) throw ParameterError("semiclassical parameter must lie in (0, 1]");
}

GridParams choose_truncation(const SymbolSpec& spec, const Region& region, double h, double margin) {
    const double xi = certified_xi_bound(spec, region.sup_modulus());
    int K = static_cast<int>(std::ceil(margin * xi / h));
    K = std::max({K, 1, (spec.bandwidth() + 1) / 2});
    GridParams g{h, K};
    g.validate();
    return g;
}

Eigen::MatrixXcd convolution_matrix(const TrigPoly& u, const GridParams& grid) {
    const int n = grid.dim();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [k, c] : u.coeffs()) {
        // entries (j, j - k)
        for (int j = std::max(0, k); j < std::min(n, n + k); ++j) m(j, j - k) = c;
    }
    return m;
}

namespace {

void check_bandwidth(const TrigPoly& poly, const GridParams& grid, const std::string& label) {
    if (poly.bandwidth() > 2 * grid.K)
        throw TruncationError(label + " has bandwidth " + std::to_string(poly.bandwidth()) +
                              " > 2K = " + std::to_string(2 * grid.K));
}

void accumulate(Eigen::MatrixXcd& m, const TrigPoly& coeff, int alpha, double factor, const GridParams& grid) {
    if (coeff.is_zero()) return;
    const Eigen::MatrixXcd conv = convolution_matrix(coeff, grid);
    for (int col = 0; col < grid.dim(); ++col) {
        const double weight = factor * std::pow(grid.h * grid.mode(col), alpha);
        if (weight != 0.0) m.col(col) += weight * conv.col(col);
    }
}

}  // namespace

OperatorMatrix assemble_differential(const SymbolSpec& spec, const GridParams& grid) {
    grid.validate();
    spec.validate();
    for (int alpha = 0; alpha <= spec.order; ++alpha)
        check_bandwidth(spec.a[alpha], grid, "coefficient a_" + std::to_string(alpha));
    for (std::size_t alpha = 0; alpha < spec.h_corrections.size(); ++alpha)
        check_bandwidth(spec.h_corrections[alpha], grid, "h-correction of a_" + std::to_string(alpha));

    OperatorMatrix out{Eigen::MatrixXcd::Zero(grid.dim(), grid.dim()), grid};
    for (int alpha = 0; alpha <= spec.order; ++alpha) accumulate(out.entries, spec.a[alpha], alpha, 1.0, grid);
    for (std::size_t alpha = 0; alpha < spec.h_corrections.size(); ++alpha)
        accumulate(out.entries, spec.h_corrections[alpha], static_cast<int>(alpha), grid.h, grid);
    return out;
}

OperatorMatrix assemble_multiplier(const TrigPoly& q, const GridParams& grid) {
    grid.validate();
    check_bandwidth(q, grid, "multiplier");
    return {convolution_matrix(q, grid), grid};
}

OperatorMatrix assemble_toroidal_pdo(const PhaseFunction& symbol, const GridParams& grid, int n_x) {
    grid.validate();
    if (n_x < 4 * grid.K + 4) throw ParameterError("toroidal quantization needs n_x >= 4K + 4");
    const int n = grid.dim();
    const int n_freq = 4 * grid.K + 1;  // j - k in [-2K, 2K]
    Eigen::MatrixXcd samples(n_x, n);
    for (int l = 0; l < n_x; ++l) {
        const double x = 2 * std::numbers::pi * l / n_x;
        for (int col = 0; col < n; ++col) samples(l, col) = symbol(x, grid.h * grid.mode(col));
    }
    Eigen::MatrixXcd dft(n_freq, n_x);
    for (int f = 0; f < n_freq; ++f) {
        const int m = f - 2 * grid.K;
        for (int l = 0; l < n_x; ++l) {
            // reduce m*l mod n_x so the phase stays exact for large arguments
            const long long r = ((static_cast<long long>(m) * l) % n_x + n_x) % n_x;
            dft(f, l) = std::polar(1.0 / n_x, -2 * std::numbers::pi * static_cast<double>(r) / n_x);
        }
    }
    const Eigen::MatrixXcd coeffs = dft * samples;  // coeffs(m + 2K, col)
    OperatorMatrix out{Eigen::MatrixXcd(n, n), grid};
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col) out.entries(row, col) = coeffs(row - col + 2 * grid.K, col);
    return out;
}

Eigen::MatrixXcd flip_matrix(int dim) {
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) j(i, dim - 1 - i) = 1.0;
    return j;
}

void write_matrix_text(std::ostream& out, const OperatorMatrix& m) {
    out.precision(17);
    out << m.dim() << ' ' << m.grid.h << ' ' << m.grid.K << '\n';
    for (int r = 0; r < m.dim(); ++r) {
        for (int c = 0; c < m.dim(); ++c) {
            if (c) out << ' ';
            out << m.entries(r, c).real() << ' ' << m.entries(r, c).imag();
        }
        out << '\n';
    }
}

OperatorMatrix read_matrix_text(std::istream& in) {
    int n = 0;
    OperatorMatrix m;
    if (!(in >> n >> m.grid.h >> m.grid.K) || n != m.grid.dim()) throw ParameterError("malformed matrix header");
    m.entries.resize(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double re = 0, im = 0;
            if (!(in >> re >> im)) throw ParameterError("truncated matrix body");
            m.entries(r, c) = {re, im};
        }
    return m;
}

}  // namespace weyl
