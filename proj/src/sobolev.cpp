#include "weyl/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace weyl {

double hs_norm(const TrigPoly& q, double s, double h, SobolevMode mode) {
    const double hh = mode == SobolevMode::classical ? 1.0 : h;
    double sum = 0.0;
    for (const auto& [k, c] : q.coeffs()) {
        const double hk = hh * k;
        sum += std::pow(1.0 + hk * hk, s) * 2 * std::numbers::pi * std::norm(c);
    }
    return std::sqrt(sum);
}

double sup_norm(const TrigPoly& u, int oversample) {
    const int n = std::max(64, oversample * std::max(1, u.bandwidth()));
    double best = 0.0;
    for (int i = 0; i < n; ++i) best = std::max(best, std::abs(u(2 * std::numbers::pi * i / n)));
    return best;
}

}  // namespace weyl
