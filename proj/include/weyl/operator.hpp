#pragma once

#include <functional>
#include <iosfwd>

#include <Eigen/Dense>

#include "weyl/region.hpp"
#include "weyl/symbol.hpp"

namespace weyl {

/// Fourier truncation: modes k = -K..K, dimension N = 2K + 1.
struct GridParams {
    double h = 0.1;
    int K = 1;

    [[nodiscard]] int dim() const { return 2 * K + 1; }
    /// Index of mode k in the basis ordering.
    [[nodiscard]] int index(int k) const { return k + K; }
    [[nodiscard]] int mode(int i) const { return i - K; }
    void validate() const;
};

/// Dense matrix in the orthonormal basis e_k(x) = e^{ikx}/sqrt(2pi), k = -K..K.
struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    GridParams grid;

    [[nodiscard]] int dim() const { return static_cast<int>(entries.rows()); }
};

/// Truncation rule: smallest K with h K >= margin * certified xi bound for
/// `region`, and never below half the spec's bandwidth.
GridParams choose_truncation(const SymbolSpec& spec, const Region& region, double h, double margin = 1.5);

/// Toeplitz matrix Conv(u)_{jk} = c_{j-k}.
Eigen::MatrixXcd convolution_matrix(const TrigPoly& u, const GridParams& grid);

/// sum_alpha Conv(a_alpha) Diag((hk)^alpha), plus h times the same sum over
/// the corrections. Throws TruncationError when a coefficient's bandwidth
/// exceeds 2K.
OperatorMatrix assemble_differential(const SymbolSpec& spec, const GridParams& grid);

OperatorMatrix assemble_multiplier(const TrigPoly& q, const GridParams& grid);

using PhaseFunction = std::function<cplx(double x, double xi)>;

/// Left (Kohn-Nirenberg) toroidal quantization sampled on n_x points:
///   entry (j,k) = (1/n_x) sum_l symbol(x_l, hk) e^{-i(j-k)x_l}.
/// Requires n_x >= 4K + 4 so band-limited multipliers are reproduced exactly.
OperatorMatrix assemble_toroidal_pdo(const PhaseFunction& symbol, const GridParams& grid, int n_x);

/// The k -> -k flip J.
Eigen::MatrixXcd flip_matrix(int dim);

/// Writes "N h K" then N rows of 2N whitespace-separated reals (re im pairs).
void write_matrix_text(std::ostream& out, const OperatorMatrix& m);
OperatorMatrix read_matrix_text(std::istream& in);

}  // namespace weyl
