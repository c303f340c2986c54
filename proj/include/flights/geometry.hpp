#pragma once

#include "flights/dyadic_cube.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace flights {

template <int Dim>
struct AlignedBox {
    Point<Dim> lo;
    Point<Dim> hi;

    Point<Dim> extent() const { return hi - lo; }
    bool contains(const Point<Dim>& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
};

// Signed distance to a domain boundary: positive inside, negative outside.
template <int Dim>
class SignedDistanceField {
public:
    virtual ~SignedDistanceField() = default;
    virtual double operator()(const Point<Dim>& p) const = 0;

    // Same value as operator(), given a caller-supplied bound with
    // |s(p)| <= abs_bound. Implementations may use it to prune the search.
    virtual double within(const Point<Dim>& p, double abs_bound) const {
        (void)abs_bound;
        return (*this)(p);
    }
};

namespace shapes {
struct Square { double side = 1.0; };
struct Rectangle { double a = 1.0; double b = 1.0; };
struct Disk { double radius = 1.0; };
struct Box3d { double a = 1.0; double b = 1.0; double c = 1.0; };
struct KochSnowflake { int generation = 0; double side = 1.0; };
} // namespace shapes

using ShapeSpec = std::variant<shapes::Square, shapes::Rectangle, shapes::Disk, shapes::Box3d,
                               shapes::KochSnowflake>;

// A test domain in its canonical frame, translated by `offset`.
//   square / rectangle / box3d: lower corner at the origin
//   disk: centered at the origin
//   koch_snowflake: base triangle centroid at the origin, one edge horizontal below
struct DomainSpec {
    ShapeSpec shape = shapes::Square{};
    std::vector<double> offset;  // empty means no translation

    int dimension() const;
    std::string type_name() const;
};

template <int Dim>
class Domain {
public:
    Domain(std::shared_ptr<const SignedDistanceField<Dim>> field, AlignedBox<Dim> box,
           std::optional<double> boundary_dimension, std::string name, DomainSpec spec)
        : field_(std::move(field)), box_(box), boundary_dimension_(boundary_dimension),
          name_(std::move(name)), spec_(std::move(spec)) {}

    static constexpr int dimension = Dim;

    double signed_distance(const Point<Dim>& p) const { return (*field_)(p); }
    double signed_distance(const Point<Dim>& p, double abs_bound) const {
        return field_->within(p, abs_bound);
    }
    bool contains(const Point<Dim>& p) const { return signed_distance(p) > 0.0; }

    const AlignedBox<Dim>& bounding_box() const { return box_; }
    const std::optional<double>& known_boundary_dimension() const { return boundary_dimension_; }
    const std::string& name() const { return name_; }
    const DomainSpec& spec() const { return spec_; }

private:
    std::shared_ptr<const SignedDistanceField<Dim>> field_;
    AlignedBox<Dim> box_;
    std::optional<double> boundary_dimension_;
    std::string name_;
    DomainSpec spec_;
};

// Throws ConfigError for invalid parameters or a dimension mismatch.
template <int Dim>
Domain<Dim> make_domain(const DomainSpec& spec);

struct DistanceInterval {
    double lo = 0.0;  // <= inf of s over the closed cube
    double hi = 0.0;  // >= sup of s over the closed cube
    double sampled_min = 0.0;  // min of s over center and corners (>= inf)
    double sampled_max = 0.0;  // max of s over center and corners (<= sup)
};

// Certified bounds on the signed distance over a cube. Starts from
// center +- half-diagonal and tightens with corner samples, using the
// covering radius of {center, corners} and the 1-Lipschitz property.
template <int Dim>
DistanceInterval distance_interval_on_cube(const Domain<Dim>& domain, const DyadicCube<Dim>& cube);

// Largest distance from a point of the cube to the nearest of its center
// and corners, in units of the side length.
double sample_covering_radius(int dim);

extern template Domain<2> make_domain<2>(const DomainSpec&);
extern template Domain<3> make_domain<3>(const DomainSpec&);
extern template DistanceInterval distance_interval_on_cube<2>(const Domain<2>&, const DyadicCube<2>&);
extern template DistanceInterval distance_interval_on_cube<3>(const Domain<3>&, const DyadicCube<3>&);

} // namespace flights
