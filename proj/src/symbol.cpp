#include "weyl/symbol.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "weyl/errors.hpp"
#include "yaml_nodes.hpp"

namespace weyl {

void SymbolSpec::validate() const {
    if (order < 0) throw ParameterError("symbol order must be non-negative");
    if (static_cast<int>(a.size()) != order + 1)
        throw ParameterError("symbol of order " + std::to_string(order) + " needs " + std::to_string(order + 1) +
                             " coefficients, got " + std::to_string(a.size()));
    if (static_cast<int>(h_corrections.size()) > order + 1)
        throw ParameterError("more h-corrections than coefficients");
    if (static_cast<int>(h_corrections.size()) == order + 1 && !h_corrections[order].is_zero())
        throw ParameterError("the degree-m coefficient must be h-independent");
    if (a[order].is_zero()) throw ParameterError("top coefficient a_m is identically zero");
}

int SymbolSpec::bandwidth() const {
    int b = 0;
    for (const auto& c : a) b = std::max(b, c.bandwidth());
    for (const auto& c : h_corrections) b = std::max(b, c.bandwidth());
    return b;
}

bool SymbolSpec::has_corrections() const {
    for (const auto& c : h_corrections)
        if (!c.is_zero()) return true;
    return false;
}

SymbolSpec make_symbol(std::vector<TrigPoly> coefficients) {
    SymbolSpec spec;
    spec.order = static_cast<int>(coefficients.size()) - 1;
    spec.a = std::move(coefficients);
    spec.validate();
    return spec;
}

cplx eval_symbol(const SymbolSpec& spec, double x, double xi, SymbolPart which) {
    if (which == SymbolPart::degree_m) return spec.a[spec.order](x) * std::pow(xi, spec.order);
    // Horner in xi
    cplx sum{};
    for (int alpha = spec.order; alpha >= 0; --alpha) sum = sum * xi + spec.a[alpha](x);
    return sum;
}

cplx eval_symbol_dx(const SymbolSpec& spec, double x, double xi) {
    cplx sum{};
    for (int alpha = spec.order; alpha >= 0; --alpha) sum = sum * xi + spec.a[alpha].derivative_at(x);
    return sum;
}

cplx eval_symbol_dxi(const SymbolSpec& spec, double x, double xi) {
    cplx sum{};
    for (int alpha = spec.order; alpha >= 1; --alpha) sum = sum * xi + double(alpha) * spec.a[alpha](x);
    return sum;
}

EllipticityResult check_ellipticity(const SymbolSpec& spec, int x_samples) {
    if (x_samples < 16) throw ParameterError("check_ellipticity needs at least 16 x samples");
    const auto& am = spec.a[spec.order];
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < x_samples; ++i) lo = std::min(lo, std::abs(am(2 * std::numbers::pi * i / x_samples)));
    if (lo <= 1e-12 * std::max(1.0, am.l1_norm()))
        return {false, std::numeric_limits<double>::infinity()};
    return {true, 1.0 / lo};
}

bool check_symmetry(const SymbolSpec& spec) {
    for (int alpha = 1; alpha <= spec.order; alpha += 2) {
        if (!spec.a[alpha].is_zero()) return false;
        if (alpha < static_cast<int>(spec.h_corrections.size()) && !spec.h_corrections[alpha].is_zero()) return false;
    }
    return true;
}

namespace {

void emit_coefficients(YAML::Emitter& out, const std::vector<TrigPoly>& list) {
    out << YAML::BeginSeq;
    for (std::size_t alpha = 0; alpha < list.size(); ++alpha) {
        out << YAML::BeginMap << YAML::Key << "alpha" << YAML::Value << alpha;
        out << YAML::Key << "real" << YAML::Value << list[alpha].real();
        out << YAML::Key << "terms" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& [k, c] : list[alpha].coeffs())
            out << YAML::Flow << YAML::BeginSeq << k << c.real() << c.imag() << YAML::EndSeq;
        out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
}

std::vector<TrigPoly> parse_coefficients(const YAML::Node& node, int count) {
    std::vector<TrigPoly> list(count);
    for (const auto& entry : node) {
        int alpha = entry["alpha"].as<int>();
        if (alpha < 0 || alpha >= count)
            throw ConfigError("coefficient alpha = " + std::to_string(alpha) + " out of range (line " +
                              std::to_string(entry.Mark().line + 1) + ")");
        std::map<int, cplx> coeffs;
        for (const auto& term : entry["terms"]) {
            if (!term.IsSequence() || term.size() != 3)
                throw ConfigError("coefficient term must be [k, re, im] (line " +
                                  std::to_string(term.Mark().line + 1) + ")");
            coeffs[term[0].as<int>()] += cplx(term[1].as<double>(), term[2].as<double>());
        }
        bool real = entry["real"] ? entry["real"].as<bool>() : false;
        list[alpha] = TrigPoly(std::move(coeffs), real);
    }
    return list;
}

}  // namespace

std::string symbol_to_yaml(const SymbolSpec& spec) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap << YAML::Key << "order" << YAML::Value << spec.order;
    out << YAML::Key << "coefficients" << YAML::Value;
    emit_coefficients(out, spec.a);
    if (spec.has_corrections()) {
        out << YAML::Key << "h_corrections" << YAML::Value;
        emit_coefficients(out, spec.h_corrections);
    }
    out << YAML::EndMap;
    return out.c_str();
}

SymbolSpec symbol_from_node(const YAML::Node& root) {
    try {
        SymbolSpec spec;
        spec.order = root["order"].as<int>();
        spec.a = parse_coefficients(root["coefficients"], spec.order + 1);
        if (root["h_corrections"]) spec.h_corrections = parse_coefficients(root["h_corrections"], spec.order + 1);
        spec.validate();
        return spec;
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("symbol document: ") + e.what());
    }
}

SymbolSpec symbol_from_yaml(const std::string& text) {
    try {
        return symbol_from_node(YAML::Load(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("symbol document: ") + e.what());
    }
}

}  // namespace weyl
