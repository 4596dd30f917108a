#include "weyl/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <yaml-cpp/yaml.h>

#include "weyl/errors.hpp"
#include "yaml_nodes.hpp"

namespace weyl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double rectangle_boundary_distance(const Rectangle& r, cplx z) {
    const double x = z.real(), y = z.imag();
    const double dx = std::max({r.re_lo - x, 0.0, x - r.re_hi});
    const double dy = std::max({r.im_lo - y, 0.0, y - r.im_hi});
    if (dx > 0 || dy > 0) return std::hypot(dx, dy);
    return std::min({x - r.re_lo, r.re_hi - x, y - r.im_lo, r.im_hi - y});
}

}  // namespace

Region::Region(Rectangle rect) : v_(rect) {
    if (!(rect.re_lo <= rect.re_hi && rect.im_lo <= rect.im_hi))
        throw ParameterError("rectangle bounds are inverted");
}

Region::Region(Disk disk) : v_(disk) {
    if (!(disk.radius >= 0)) throw ParameterError("disk radius must be non-negative");
}

Region::Region(BoundaryTube tube) : v_(tube) {
    if (!(tube.r > 0)) throw ParameterError("boundary tube needs r > 0");
    if (!tube.base || std::holds_alternative<BoundaryTube>(tube.base->variant()))
        throw ParameterError("boundary tube base must be a rectangle or a disk");
}

Region Region::rectangle(double re_lo, double re_hi, double im_lo, double im_hi) {
    return Region(Rectangle{re_lo, re_hi, im_lo, im_hi});
}

Region Region::disk(cplx center, double radius) { return Region(Disk{center, radius}); }

Region Region::boundary_tube(const Region& base, double r) {
    return Region(BoundaryTube{std::make_shared<const Region>(base), r});
}

bool Region::contains(cplx z) const {
    return std::visit(overloaded{
                          [&](const Rectangle& r) {
                              return z.real() >= r.re_lo && z.real() <= r.re_hi && z.imag() >= r.im_lo &&
                                     z.imag() <= r.im_hi;
                          },
                          [&](const Disk& d) { return std::abs(z - d.center) <= d.radius; },
                          [&](const BoundaryTube& t) { return t.base->boundary_distance(z) <= t.r; },
                      },
                      v_);
}

double Region::boundary_distance(cplx z) const {
    return std::visit(overloaded{
                          [&](const Rectangle& r) { return rectangle_boundary_distance(r, z); },
                          [&](const Disk& d) { return std::abs(std::abs(z - d.center) - d.radius); },
                          [&](const BoundaryTube&) -> double {
                              throw ParameterError("boundary distance of a tube is not supported");
                          },
                      },
                      v_);
}

Rectangle Region::bounding_box() const {
    return std::visit(overloaded{
                          [](const Rectangle& r) { return r; },
                          [](const Disk& d) {
                              return Rectangle{d.center.real() - d.radius, d.center.real() + d.radius,
                                               d.center.imag() - d.radius, d.center.imag() + d.radius};
                          },
                          [](const BoundaryTube& t) {
                              Rectangle b = t.base->bounding_box();
                              return Rectangle{b.re_lo - t.r, b.re_hi + t.r, b.im_lo - t.r, b.im_hi + t.r};
                          },
                      },
                      v_);
}

double Region::sup_modulus() const {
    if (const auto* d = std::get_if<Disk>(&v_)) return std::abs(d->center) + d->radius;
    if (const auto* t = std::get_if<BoundaryTube>(&v_)) {
        if (const auto* d = std::get_if<Disk>(&t->base->variant())) return std::abs(d->center) + d->radius + t->r;
    }
    const Rectangle b = bounding_box();
    return std::max({std::abs(cplx(b.re_lo, b.im_lo)), std::abs(cplx(b.re_lo, b.im_hi)),
                     std::abs(cplx(b.re_hi, b.im_lo)), std::abs(cplx(b.re_hi, b.im_hi))});
}

cplx Region::center() const {
    if (const auto* d = std::get_if<Disk>(&v_)) return d->center;
    const Rectangle b = bounding_box();
    return {0.5 * (b.re_lo + b.re_hi), 0.5 * (b.im_lo + b.im_hi)};
}

std::vector<cplx> Region::boundary_points(int count) const {
    std::vector<cplx> pts;
    if (count <= 0) return pts;
    if (const auto* d = std::get_if<Disk>(&v_)) {
        for (int i = 0; i < count; ++i)
            pts.push_back(d->center + std::polar(d->radius, 2 * std::numbers::pi * i / count));
        return pts;
    }
    if (std::holds_alternative<BoundaryTube>(v_)) throw ParameterError("boundary points of a tube are not supported");
    const Rectangle r = std::get<Rectangle>(v_);
    const double w = r.re_hi - r.re_lo, hgt = r.im_hi - r.im_lo;
    const double perimeter = 2 * (w + hgt);
    for (int i = 0; i < count; ++i) {
        double s = perimeter * (i + 0.5) / count;
        if (s < w) pts.emplace_back(r.re_lo + s, r.im_lo);
        else if ((s -= w) < hgt) pts.emplace_back(r.re_hi, r.im_lo + s);
        else if ((s -= hgt) < w) pts.emplace_back(r.re_hi - s, r.im_hi);
        else pts.emplace_back(r.re_lo, r.im_hi - (s - w));
    }
    return pts;
}

namespace {

void emit_region(YAML::Emitter& out, const Region& region) {
    out << YAML::Flow << YAML::BeginMap;
    std::visit(overloaded{
                   [&](const Rectangle& r) {
                       out << YAML::Key << "type" << YAML::Value << "rectangle";
                       out << YAML::Key << "re_lo" << YAML::Value << r.re_lo << YAML::Key << "re_hi" << YAML::Value
                           << r.re_hi << YAML::Key << "im_lo" << YAML::Value << r.im_lo << YAML::Key << "im_hi"
                           << YAML::Value << r.im_hi;
                   },
                   [&](const Disk& d) {
                       out << YAML::Key << "type" << YAML::Value << "disk";
                       out << YAML::Key << "center" << YAML::Value << YAML::Flow << YAML::BeginSeq
                           << d.center.real() << d.center.imag() << YAML::EndSeq;
                       out << YAML::Key << "radius" << YAML::Value << d.radius;
                   },
                   [&](const BoundaryTube& t) {
                       out << YAML::Key << "type" << YAML::Value << "boundary_tube";
                       out << YAML::Key << "r" << YAML::Value << t.r;
                       out << YAML::Key << "base" << YAML::Value;
                       emit_region(out, *t.base);
                   },
               },
               region.variant());
    out << YAML::EndMap;
}

Region parse_region(const YAML::Node& node);

}  // namespace

std::string region_to_yaml(const Region& region) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    emit_region(out, region);
    return out.c_str();
}

namespace {

Region parse_region(const YAML::Node& node) {
    const auto type = node["type"].as<std::string>();
    if (type == "rectangle")
        return Region::rectangle(node["re_lo"].as<double>(), node["re_hi"].as<double>(), node["im_lo"].as<double>(),
                                 node["im_hi"].as<double>());
    if (type == "disk") {
        const auto c = node["center"];
        return Region::disk(cplx(c[0].as<double>(), c[1].as<double>()), node["radius"].as<double>());
    }
    if (type == "boundary_tube") return Region::boundary_tube(parse_region(node["base"]), node["r"].as<double>());
    throw ConfigError("unknown region type '" + type + "' (line " + std::to_string(node.Mark().line + 1) + ")");
}

}  // namespace

Region region_from_node(const YAML::Node& node) {
    try {
        return parse_region(node);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("region record: ") + e.what());
    }
}

Region region_from_yaml(const std::string& text) {
    try {
        return region_from_node(YAML::Load(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("region record: ") + e.what());
    }
}

}  // namespace weyl
