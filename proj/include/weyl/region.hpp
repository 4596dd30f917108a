#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "weyl/trig_poly.hpp"

namespace weyl {

struct Rectangle {
    double re_lo, re_hi, im_lo, im_hi;
};

struct Disk {
    cplx center;
    double radius;
};

class Region;

/// {z : dist(z, boundary(base)) <= r}
struct BoundaryTube {
    std::shared_ptr<const Region> base;
    double r;
};

/// Closed region of the complex spectral plane. Membership is closed: points
/// on the boundary belong to the region.
class Region {
public:
    using Variant = std::variant<Rectangle, Disk, BoundaryTube>;

    Region(Rectangle rect);
    Region(Disk disk);
    Region(BoundaryTube tube);

    static Region rectangle(double re_lo, double re_hi, double im_lo, double im_hi);
    static Region disk(cplx center, double radius);
    static Region boundary_tube(const Region& base, double r);

    [[nodiscard]] bool contains(cplx z) const;
    /// Distance to the boundary; only defined for rectangles and disks.
    [[nodiscard]] double boundary_distance(cplx z) const;
    [[nodiscard]] double sup_modulus() const;
    [[nodiscard]] Rectangle bounding_box() const;
    /// Representative point (centre of the bounding box).
    [[nodiscard]] cplx center() const;
    /// `count` equally spaced points on the boundary.
    [[nodiscard]] std::vector<cplx> boundary_points(int count) const;

    [[nodiscard]] const Variant& variant() const { return v_; }

private:
    Variant v_;
};

/// Tagged record, e.g. "{type: rectangle, re_lo: -1, re_hi: 1, im_lo: 0.1, im_hi: 0.9}".
std::string region_to_yaml(const Region& region);
Region region_from_yaml(const std::string& text);

}  // namespace weyl
