#include "weyl/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "weyl/errors.hpp"

namespace weyl {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

/// Rigorous lower bound for min_x |a_m(x)|: sampled minimum minus the
/// derivative bound times half the sample spacing.
double top_coefficient_floor(const SymbolSpec& spec) {
    const auto& am = spec.a[spec.order];
    constexpr int n = 1024;
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) lo = std::min(lo, std::abs(am(kTwoPi * i / n)));
    return lo - am.derivative_l1_norm() * std::numbers::pi / n;
}

/// |xi|^m floor - sum_{alpha<m} sup|a_alpha| |xi|^alpha - modulus
double ellipticity_margin(const SymbolSpec& spec, double floor, double r, double modulus) {
    double lower = 0.0;
    for (int alpha = 0; alpha < spec.order; ++alpha) lower += spec.a[alpha].l1_norm() * std::pow(r, alpha);
    return std::pow(r, spec.order) * floor - lower - modulus;
}

struct CoeffColumn {
    std::vector<cplx> a;
};

CoeffColumn column_at(const SymbolSpec& spec, double x) {
    CoeffColumn c;
    c.a.reserve(spec.order + 1);
    for (const auto& poly : spec.a) c.a.push_back(poly(x));
    return c;
}

cplx horner(const CoeffColumn& c, double xi) {
    cplx sum{};
    for (int alpha = static_cast<int>(c.a.size()) - 1; alpha >= 0; --alpha) sum = sum * xi + c.a[alpha];
    return sum;
}

/// Bounds for sup |dp/dx| and sup |dp/dxi| over |xi| <= xi_max.
std::pair<double, double> lipschitz_bounds(const SymbolSpec& spec, double xi_max) {
    double lx = 0.0, lxi = 0.0;
    for (int alpha = 0; alpha <= spec.order; ++alpha) {
        lx += spec.a[alpha].derivative_l1_norm() * std::pow(xi_max, alpha);
        if (alpha > 0) lxi += alpha * spec.a[alpha].l1_norm() * std::pow(xi_max, alpha - 1);
    }
    return {lx, lxi};
}

double pairwise_sum(std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace

double PhaseGrid::dx() const { return kTwoPi / n_x; }
double PhaseGrid::dxi() const { return (xi_hi - xi_lo) / n_xi; }
double PhaseGrid::x_at(int i) const { return (i + 0.5) * dx(); }
double PhaseGrid::xi_at(int j) const { return xi_lo + (j + 0.5) * dxi(); }

double certified_xi_bound(const SymbolSpec& spec, double modulus) {
    spec.validate();
    if (spec.order == 0) throw ParameterError("order-0 symbols have non-compact preimages");
    const double floor = top_coefficient_floor(spec);
    if (!(floor > 0)) throw ParameterError("symbol is not elliptic: the top coefficient vanishes");
    if (ellipticity_margin(spec, floor, 0.0, modulus) > 0) return 0.0;
    double hi = 1.0;
    while (ellipticity_margin(spec, floor, hi, modulus) <= 0) hi *= 2;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ellipticity_margin(spec, floor, mid, modulus) > 0 ? hi : lo) = mid;
    }
    return hi;
}

PhaseGrid certified_grid(const SymbolSpec& spec, const Region& region, int n_x, int n_xi) {
    const double b = 1.05 * certified_xi_bound(spec, region.sup_modulus()) + 1e-9;
    return PhaseGrid{n_x, -b, b, n_xi};
}

void certify_grid(const SymbolSpec& spec, const Region& region, const PhaseGrid& grid) {
    if (grid.n_x < 1 || grid.n_xi < 1) throw ParameterError("phase grid needs positive resolution");
    if (!(grid.xi_lo < 0 && grid.xi_hi > 0)) throw ContainmentError("phase grid must straddle xi = 0");
    if (spec.order == 0) throw ContainmentError("order-0 symbols have non-compact preimages");
    const double floor = top_coefficient_floor(spec);
    const double modulus = region.sup_modulus();
    for (double bound : {grid.xi_lo, grid.xi_hi}) {
        const double m = ellipticity_margin(spec, floor, std::abs(bound), modulus);
        if (!(m > 0)) {
            std::ostringstream msg;
            msg << "phase grid bound xi = " << bound << " is not certified: |xi|^m/C - lower-order sup = "
                << m + modulus << " does not exceed sup|z| = " << modulus << " over the region";
            throw ContainmentError(msg.str());
        }
    }
}

double volume_preimage(const SymbolSpec& spec, const Region& region, const PhaseGrid& grid) {
    certify_grid(spec, region, grid);
    long long hits = 0;
    for (int i = 0; i < grid.n_x; ++i) {
        const auto col = column_at(spec, grid.x_at(i));
        for (int j = 0; j < grid.n_xi; ++j)
            if (region.contains(horner(col, grid.xi_at(j)))) ++hits;
    }
    return static_cast<double>(hits) * grid.cell_area();
}

namespace {

struct SublevelWalker {
    const SymbolSpec& spec;
    cplx z;
    double radius;
    PhaseGrid grid;

    long long count(int i0, int i1, int j0, int j1) const {
        const double x_lo = i0 * grid.dx(), x_hi = i1 * grid.dx();
        const double xi_lo = grid.xi_lo + j0 * grid.dxi(), xi_hi = grid.xi_lo + j1 * grid.dxi();
        const double xc = 0.5 * (x_lo + x_hi), xic = 0.5 * (xi_lo + xi_hi);
        const auto [lx, lxi] = lipschitz_bounds(spec, std::max(std::abs(xi_lo), std::abs(xi_hi)));
        const double slack = 0.5 * (lx * (x_hi - x_lo) + lxi * (xi_hi - xi_lo));
        if (std::abs(eval_symbol(spec, xc, xic) - z) - slack > radius) return 0;
        if (i1 - i0 <= 8 && j1 - j0 <= 8) {
            long long hits = 0;
            for (int i = i0; i < i1; ++i) {
                const auto col = column_at(spec, grid.x_at(i));
                for (int j = j0; j < j1; ++j)
                    if (std::norm(horner(col, grid.xi_at(j)) - z) <= radius * radius) ++hits;
            }
            return hits;
        }
        if (i1 - i0 >= j1 - j0) {
            const int mid = i0 + (i1 - i0) / 2;
            return count(i0, mid, j0, j1) + count(mid, i1, j0, j1);
        }
        const int mid = j0 + (j1 - j0) / 2;
        return count(i0, i1, j0, mid) + count(i0, i1, mid, j1);
    }
};

}  // namespace

double sublevel_volume(const SymbolSpec& spec, cplx z, double t, double cell) {
    if (!(t > 0) || !(cell > 0)) throw ParameterError("sublevel_volume needs t > 0 and cell > 0");
    const double radius = std::sqrt(t);
    const double b = 1.05 * certified_xi_bound(spec, std::abs(z) + radius) + 1e-9;
    PhaseGrid grid{static_cast<int>(std::ceil(kTwoPi / cell)), -b, b, static_cast<int>(std::ceil(2 * b / cell))};
    SublevelWalker walker{spec, z, radius, grid};
    return static_cast<double>(walker.count(0, grid.n_x, 0, grid.n_xi)) * grid.cell_area();
}

KappaFit estimate_kappa(const SymbolSpec& spec, cplx z, double t_lo, double t_hi, int n_points) {
    if (!(t_lo > 0 && t_lo < t_hi)) throw ParameterError("estimate_kappa needs 0 < t_lo < t_hi");
    if (n_points < 4) throw ParameterError("estimate_kappa needs at least 4 points");
    KappaFit fit;
    const double cell = std::sqrt(t_lo) / 16;
    for (int i = 0; i < n_points; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, double(i) / (n_points - 1));
        const double v = sublevel_volume(spec, z, t, cell);
        if (v <= 0) {
            std::ostringstream msg;
            msg << "degenerate kappa fit: V_z(t) = 0 at t = " << t << " (z outside Sigma(p) at this scale)";
            throw NumericError(msg.str());
        }
        fit.t.push_back(t);
        fit.volume.push_back(v);
    }
    double mx = 0, my = 0;
    for (int i = 0; i < n_points; ++i) {
        mx += std::log(fit.t[i]);
        my += std::log(fit.volume[i]);
    }
    mx /= n_points;
    my /= n_points;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n_points; ++i) {
        const double dx = std::log(fit.t[i]) - mx, dy = std::log(fit.volume[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    fit.kappa_hat = sxy / sxx;
    const double ss_res = syy - fit.kappa_hat * sxy;
    fit.r2 = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

double integrate_phase_space(const std::function<double(double, double)>& f, const PhaseGrid& grid) {
    std::vector<double> slices(grid.n_x);
    for (int i = 0; i < grid.n_x; ++i) {
        const double x = grid.x_at(i);
        double s = 0.0;
        for (int j = 0; j < grid.n_xi; ++j) s += f(x, grid.xi_at(j));
        slices[i] = s;
    }
    return pairwise_sum(slices, 0, slices.size()) * grid.cell_area();
}

SigmaSampler::SigmaSampler(const SymbolSpec& spec, const PhaseGrid& grid) {
    values_.reserve(static_cast<std::size_t>(grid.n_x) * grid.n_xi);
    for (int i = 0; i < grid.n_x; ++i) {
        const auto col = column_at(spec, grid.x_at(i));
        for (int j = 0; j < grid.n_xi; ++j) values_.push_back(horner(col, grid.xi_at(j)));
    }
    const auto [lx, lxi] = lipschitz_bounds(spec, std::max(std::abs(grid.xi_lo), std::abs(grid.xi_hi)));
    tolerance_ = 0.5 * (lx * grid.dx() + lxi * grid.dxi());
}

double SigmaSampler::distance(cplx w) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : values_) best = std::min(best, std::norm(v - w));
    return std::sqrt(best);
}

}  // namespace weyl
