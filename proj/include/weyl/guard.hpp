#pragma once

#include <vector>

#include "weyl/operator.hpp"
#include "weyl/phase_space.hpp"

namespace weyl {

/// Smooth cutoff: 1 on [0,1], 0 on [2, inf).
double plateau_cutoff(double r);

/// Modified symbol p~ = p + i shift * phi(|p - z_c| / rho). It equals p
/// outside p^{-1}(D(z_c, 2 rho)).
struct GuardedSymbol {
    SymbolSpec spec;
    cplx z_center;
    double rho = 1.0;
    double shift = 2.0;
    /// min |p~ - z| over the validation grid and test points.
    double margin = 0.0;

    [[nodiscard]] cplx operator()(double x, double xi) const;
    /// p~ - p, compactly supported in phase space.
    [[nodiscard]] cplx difference(double x, double xi) const;
};

/// Grid search over (rho, shift) for the first pair with min |p~ - z| >= min_margin
/// for every z in `test_points`, checked on a certified grid that covers the
/// modified zone. Throws NumericError when no candidate passes.
GuardedSymbol construct_guard(const SymbolSpec& spec, cplx z_center, const std::vector<cplx>& test_points,
                              double min_margin = 0.1, int n_grid = 400);

/// P~ = P + Op(p~ - p) on the given truncation.
OperatorMatrix assemble_guarded(const GuardedSymbol& guard, const GridParams& grid);

}  // namespace weyl
