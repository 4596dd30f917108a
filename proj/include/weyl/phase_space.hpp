#pragma once

#include <functional>

#include "weyl/region.hpp"
#include "weyl/symbol.hpp"

namespace weyl {

/// Midpoint-rule tensor grid on [0, 2pi) x [xi_lo, xi_hi].
struct PhaseGrid {
    int n_x = 256;
    double xi_lo = -1.0;
    double xi_hi = 1.0;
    int n_xi = 256;

    [[nodiscard]] double dx() const;
    [[nodiscard]] double dxi() const;
    [[nodiscard]] double cell_area() const { return dx() * dxi(); }
    [[nodiscard]] double x_at(int i) const;
    [[nodiscard]] double xi_at(int j) const;
};

/// Smallest |xi| beyond which |p(x, xi)| > `modulus` for every x, from
///   |p| >= |xi|^m / C - sum_{alpha<m} sup|a_alpha| |xi|^alpha.
/// The right-hand side minus `modulus` has exactly one positive root, so the
/// bound holds for all larger |xi| as well. Throws ParameterError for
/// non-elliptic specs.
double certified_xi_bound(const SymbolSpec& spec, double modulus);

/// Grid symmetric in xi whose bounds are 1.05x the certified bound for `region`.
PhaseGrid certified_grid(const SymbolSpec& spec, const Region& region, int n_x, int n_xi);

/// Throws ContainmentError naming the violated bound if `grid` does not
/// certifiably contain p^{-1}(region).
void certify_grid(const SymbolSpec& spec, const Region& region, const PhaseGrid& grid);

/// Midpoint-rule measure of {(x, xi) : p(x, xi) in region}.
double volume_preimage(const SymbolSpec& spec, const Region& region, const PhaseGrid& grid);

/// V_z(t) = vol{|p - z|^2 <= t} on a fine midpoint grid with cell sizes at most
/// `cell` in both directions. Cells whose Lipschitz lower bound already
/// exceeds sqrt(t) are skipped wholesale, which does not change the result.
double sublevel_volume(const SymbolSpec& spec, cplx z, double t, double cell);

struct KappaFit {
    double kappa_hat = 0.0;
    double r2 = 0.0;
    std::vector<double> t;
    std::vector<double> volume;
};

/// Least-squares slope of log V_z(t) against log t on a geometric t-grid.
/// Throws NumericError when some V_z(t) vanishes.
KappaFit estimate_kappa(const SymbolSpec& spec, cplx z, double t_lo, double t_hi, int n_points);

/// Midpoint rule for the integral of f(x, xi) over the grid.
double integrate_phase_space(const std::function<double(double, double)>& f, const PhaseGrid& grid);

/// Sampled range of p, used to decide membership in Sigma(p) = closure p(T*X).
class SigmaSampler {
public:
    SigmaSampler(const SymbolSpec& spec, const PhaseGrid& grid);

    /// Distance from w to the nearest sampled value of p.
    [[nodiscard]] double distance(cplx w) const;
    /// distance(w) <= tolerance(): w is in Sigma(p) up to sampling resolution.
    [[nodiscard]] bool contains(cplx w) const { return distance(w) <= tolerance_; }
    [[nodiscard]] double tolerance() const { return tolerance_; }

private:
    std::vector<cplx> values_;
    double tolerance_ = 0.0;
};

}  // namespace weyl
