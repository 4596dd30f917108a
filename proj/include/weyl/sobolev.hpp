#pragma once

#include "weyl/trig_poly.hpp"

namespace weyl {

enum class SobolevMode { semiclassical, classical };

/// (sum_k (1 + (hk)^2)^s |<q, e_k>|^2)^{1/2} with <q, e_k> = sqrt(2pi) c_k.
/// Classical mode uses h = 1.
double hs_norm(const TrigPoly& q, double s, double h, SobolevMode mode = SobolevMode::semiclassical);

/// max_x |u(x)| sampled on `oversample` x bandwidth points (at least 64).
double sup_norm(const TrigPoly& u, int oversample = 16);

}  // namespace weyl
