#pragma once

#include <complex>
#include <map>
#include <vector>

namespace weyl {

using cplx = std::complex<double>;

/// Finite Fourier series on the torus R/2piZ,
///   u(x) = sum_k c_k e^{ikx}.
///
/// Zero coefficients are never stored, so the zero polynomial has an empty
/// map. A polynomial flagged `real` satisfies c_{-k} = conj(c_k).
class TrigPoly {
public:
    TrigPoly() = default;

    /// Throws ParameterError if `real` is requested but the coefficients are
    /// not conjugate-symmetric (to 1e-14 relative).
    explicit TrigPoly(std::map<int, cplx> coeffs, bool real = false);

    static TrigPoly constant(cplx c);
    /// c * e^{ikx}
    static TrigPoly monomial(int k, cplx c = 1.0);
    static TrigPoly cosine(int k, double amplitude = 1.0);
    static TrigPoly sine(int k, double amplitude = 1.0);

    [[nodiscard]] const std::map<int, cplx>& coeffs() const { return coeffs_; }
    [[nodiscard]] cplx coeff(int k) const;
    [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
    [[nodiscard]] bool real() const { return real_; }
    /// max |k| over stored coefficients (0 for the zero polynomial).
    [[nodiscard]] int bandwidth() const;

    [[nodiscard]] cplx operator()(double x) const;
    [[nodiscard]] cplx derivative_at(double x) const;
    /// sum_k |c_k|, an upper bound for sup |u|.
    [[nodiscard]] double l1_norm() const;
    /// sum_k |k||c_k|, an upper bound for sup |u'|.
    [[nodiscard]] double derivative_l1_norm() const;
    /// c_0, the mean value over the torus.
    [[nodiscard]] cplx mean() const { return coeff(0); }

    /// Antiderivative of u - mean(u); has zero mean.
    [[nodiscard]] TrigPoly antiderivative() const;
    [[nodiscard]] TrigPoly conj() const;

    TrigPoly& operator+=(const TrigPoly& other);
    TrigPoly& operator*=(cplx scale);
    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator*(TrigPoly a, cplx s) { return a *= s; }
    friend TrigPoly operator*(cplx s, TrigPoly a) { return a *= s; }
    /// Pointwise product (coefficient convolution).
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b);

    friend bool operator==(const TrigPoly& a, const TrigPoly& b) { return a.coeffs_ == b.coeffs_; }

private:
    std::map<int, cplx> coeffs_;
    bool real_ = false;
};

}  // namespace weyl
