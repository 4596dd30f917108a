#include "weyl/guard.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "weyl/errors.hpp"

namespace weyl {

namespace {

double smooth_step_kernel(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }

}  // namespace

double plateau_cutoff(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double a = smooth_step_kernel(2.0 - r), b = smooth_step_kernel(r - 1.0);
    return a / (a + b);
}

cplx GuardedSymbol::difference(double x, double xi) const {
    const cplx p = eval_symbol(spec, x, xi);
    return cplx(0, shift * plateau_cutoff(std::abs(p - z_center) / rho));
}

cplx GuardedSymbol::operator()(double x, double xi) const { return eval_symbol(spec, x, xi) + difference(x, xi); }

GuardedSymbol construct_guard(const SymbolSpec& spec, cplx z_center, const std::vector<cplx>& test_points,
                              double min_margin, int n_grid) {
    std::vector<cplx> points = test_points;
    if (points.empty()) points.push_back(z_center);
    double reach = 0.0;
    for (const auto& z : points) reach = std::max(reach, std::abs(z - z_center));

    for (double rho = 0.5; rho <= 4.0 + 1e-12; rho += 0.25) {
        if (rho <= reach + min_margin) continue;
        for (double factor : {1.5, 2.0, 2.5, 3.0, 4.0}) {
            GuardedSymbol g{spec, z_center, rho, factor * rho, 0.0};
            // p~ = p outside p^{-1}(D(z_c, 2 rho)); check a grid that covers that zone
            const auto zone = Region::disk(z_center, 2 * rho + reach + min_margin);
            const PhaseGrid grid = certified_grid(spec, zone, n_grid, 2 * n_grid);
            double margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < grid.n_x && margin >= min_margin; ++i)
                for (int j = 0; j < grid.n_xi; ++j) {
                    const cplx v = g(grid.x_at(i), grid.xi_at(j));
                    for (const auto& z : points) margin = std::min(margin, std::abs(v - z));
                }
            if (margin >= min_margin) {
                g.margin = margin;
                return g;
            }
        }
    }
    std::ostringstream msg;
    msg << "no (rho, shift) candidate keeps |p~ - z| >= " << min_margin << " around z_c = " << z_center;
    throw NumericError(msg.str());
}

OperatorMatrix assemble_guarded(const GuardedSymbol& guard, const GridParams& grid) {
    OperatorMatrix P = assemble_differential(guard.spec, grid);
    const OperatorMatrix diff =
        assemble_toroidal_pdo([&](double x, double xi) { return guard.difference(x, xi); }, grid, 4 * grid.K + 8);
    P.entries += diff.entries;
    return P;
}

}  // namespace weyl
