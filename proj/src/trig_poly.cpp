#include "weyl/trig_poly.hpp"

#include <cmath>
#include <numbers>

#include "weyl/errors.hpp"

namespace weyl {

namespace {

void prune(std::map<int, cplx>& coeffs) {
    std::erase_if(coeffs, [](const auto& kv) { return kv.second == cplx{}; });
}

}  // namespace

TrigPoly::TrigPoly(std::map<int, cplx> coeffs, bool real) : coeffs_(std::move(coeffs)), real_(real) {
    prune(coeffs_);
    if (real_) {
        double scale = 0.0;
        for (const auto& [k, c] : coeffs_) scale = std::max(scale, std::abs(c));
        for (const auto& [k, c] : coeffs_) {
            if (std::abs(c - std::conj(coeff(-k))) > 1e-14 * scale)
                throw ParameterError("TrigPoly flagged real but c_{-k} != conj(c_k) at k = " + std::to_string(k));
        }
    }
}

TrigPoly TrigPoly::constant(cplx c) { return TrigPoly({{0, c}}, c.imag() == 0.0); }

TrigPoly TrigPoly::monomial(int k, cplx c) { return TrigPoly({{k, c}}); }

TrigPoly TrigPoly::cosine(int k, double amplitude) {
    if (k == 0) return constant(amplitude);
    return TrigPoly({{k, 0.5 * amplitude}, {-k, 0.5 * amplitude}}, true);
}

TrigPoly TrigPoly::sine(int k, double amplitude) {
    if (k == 0) return {};
    return TrigPoly({{k, cplx(0, -0.5 * amplitude)}, {-k, cplx(0, 0.5 * amplitude)}}, true);
}

cplx TrigPoly::coeff(int k) const {
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? cplx{} : it->second;
}

int TrigPoly::bandwidth() const {
    int b = 0;
    for (const auto& [k, c] : coeffs_) b = std::max(b, std::abs(k));
    return b;
}

cplx TrigPoly::operator()(double x) const {
    cplx sum{};
    for (const auto& [k, c] : coeffs_) sum += c * std::polar(1.0, k * x);
    return sum;
}

cplx TrigPoly::derivative_at(double x) const {
    cplx sum{};
    for (const auto& [k, c] : coeffs_) sum += cplx(0, k) * c * std::polar(1.0, k * x);
    return sum;
}

double TrigPoly::l1_norm() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) s += std::abs(c);
    return s;
}

double TrigPoly::derivative_l1_norm() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) s += std::abs(k) * std::abs(c);
    return s;
}

TrigPoly TrigPoly::antiderivative() const {
    std::map<int, cplx> out;
    for (const auto& [k, c] : coeffs_)
        if (k != 0) out[k] = c / cplx(0, k);
    TrigPoly r;
    r.coeffs_ = std::move(out);
    r.real_ = real_;
    return r;
}

TrigPoly TrigPoly::conj() const {
    TrigPoly r;
    for (const auto& [k, c] : coeffs_) r.coeffs_[-k] = std::conj(c);
    r.real_ = real_;
    return r;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& other) {
    for (const auto& [k, c] : other.coeffs_) coeffs_[k] += c;
    prune(coeffs_);
    real_ = real_ && other.real_;
    return *this;
}

TrigPoly& TrigPoly::operator*=(cplx scale) {
    for (auto& [k, c] : coeffs_) c *= scale;
    prune(coeffs_);
    real_ = real_ && scale.imag() == 0.0;
    return *this;
}

TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    std::map<int, cplx> out;
    for (const auto& [ka, ca] : a.coeffs_)
        for (const auto& [kb, cb] : b.coeffs_) out[ka + kb] += ca * cb;
    prune(out);
    TrigPoly r;
    r.coeffs_ = std::move(out);
    r.real_ = a.real_ && b.real_;
    return r;
}

}  // namespace weyl
