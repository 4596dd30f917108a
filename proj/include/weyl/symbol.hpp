#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "weyl/trig_poly.hpp"

namespace weyl {

/// h-differential symbol p(x, xi) = sum_{alpha <= m} a_alpha(x) xi^alpha on T*(T^1).
///
/// `a[alpha]` holds the h-independent part a^0_alpha; `h_corrections[alpha]`
/// holds the O(h) term, so the full coefficient is a^0_alpha + h * corr_alpha.
/// The top coefficient never carries a correction.
struct SymbolSpec {
    int order = 0;
    std::vector<TrigPoly> a;
    std::vector<TrigPoly> h_corrections;

    /// Throws ParameterError when the invariants do not hold.
    void validate() const;
    /// Largest coefficient bandwidth, corrections included.
    [[nodiscard]] int bandwidth() const;
    /// True when some coefficient carries a nonzero O(h) correction.
    [[nodiscard]] bool has_corrections() const;
};

/// Builds a spec from its principal coefficients (index = power of xi).
SymbolSpec make_symbol(std::vector<TrigPoly> coefficients);

enum class SymbolPart { principal, degree_m };

cplx eval_symbol(const SymbolSpec& spec, double x, double xi, SymbolPart which = SymbolPart::principal);

/// d/dx and d/dxi of the principal symbol.
cplx eval_symbol_dx(const SymbolSpec& spec, double x, double xi);
cplx eval_symbol_dxi(const SymbolSpec& spec, double x, double xi);

struct EllipticityResult {
    bool holds = false;
    /// 1 / min |a_m| on the sample grid, +inf when a_m vanishes there.
    double best_constant = 0.0;
};

EllipticityResult check_ellipticity(const SymbolSpec& spec, int x_samples = 256);

/// Coefficient-level test: every odd power of xi has a zero coefficient.
bool check_symmetry(const SymbolSpec& spec);

// Structured-text (YAML) serialization:
//   order: 2
//   coefficients:
//     - alpha: 0
//       terms: [[1, 1.0, 0.0]]     # (k, re, im)
//   h_corrections: ...             # same layout, optional
std::string symbol_to_yaml(const SymbolSpec& spec);
SymbolSpec symbol_from_yaml(const std::string& text);

}  // namespace weyl
