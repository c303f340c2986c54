#include "flights/geometry.hpp"

#include "flights/errors.hpp"
#include "flights/polygon.hpp"

#include <cmath>
#include <limits>

namespace flights {

namespace {

template <int Dim>
class BoxField final : public SignedDistanceField<Dim> {
public:
    BoxField(const Point<Dim>& center, const Point<Dim>& half) : center_(center), half_(half) {}

    double operator()(const Point<Dim>& p) const override {
        const Point<Dim> q = (p - center_).cwiseAbs() - half_;
        const double outside = q.cwiseMax(0.0).norm();
        const double inside = std::min(q.maxCoeff(), 0.0);
        return -(outside + inside);
    }

private:
    Point<Dim> center_;
    Point<Dim> half_;
};

class DiskField final : public SignedDistanceField<2> {
public:
    DiskField(const Point<2>& center, double radius) : center_(center), radius_(radius) {}
    double operator()(const Point<2>& p) const override { return radius_ - (p - center_).norm(); }

private:
    Point<2> center_;
    double radius_;
};

// Translates the argument before delegating to the canonical-frame field.
template <int Dim>
class ShiftedField final : public SignedDistanceField<Dim> {
public:
    ShiftedField(std::shared_ptr<const SignedDistanceField<Dim>> inner, const Point<Dim>& offset)
        : inner_(std::move(inner)), offset_(offset) {}
    double operator()(const Point<Dim>& p) const override { return (*inner_)(p - offset_); }
    double within(const Point<Dim>& p, double abs_bound) const override {
        return inner_->within(p - offset_, abs_bound);
    }

private:
    std::shared_ptr<const SignedDistanceField<Dim>> inner_;
    Point<Dim> offset_;
};

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be a positive finite number");
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Canonical2 {
    std::shared_ptr<const SignedDistanceField<2>> field;
    AlignedBox<2> box;
    double boundary_dimension;
};

template <int Dim>
AlignedBox<Dim> padded(const AlignedBox<Dim>& box) {
    const Point<Dim> pad = box.extent() / 8.0;
    return {box.lo - pad, box.hi + pad};
}

} // namespace

int DomainSpec::dimension() const { return std::holds_alternative<shapes::Box3d>(shape) ? 3 : 2; }

std::string DomainSpec::type_name() const {
    return std::visit(Overloaded{[](const shapes::Square&) { return std::string("square"); },
                                 [](const shapes::Rectangle&) { return std::string("rectangle"); },
                                 [](const shapes::Disk&) { return std::string("disk"); },
                                 [](const shapes::Box3d&) { return std::string("box3d"); },
                                 [](const shapes::KochSnowflake&) { return std::string("koch_snowflake"); }},
                      shape);
}

template <int Dim>
Domain<Dim> make_domain(const DomainSpec& spec) {
    if (spec.dimension() != Dim)
        throw ConfigError("domain '" + spec.type_name() + "' has dimension " + std::to_string(spec.dimension()) +
                          ", requested " + std::to_string(Dim));
    if (!spec.offset.empty() && spec.offset.size() != static_cast<std::size_t>(Dim))
        throw ConfigError("domain offset must have " + std::to_string(Dim) + " components");

    Point<Dim> offset = Point<Dim>::Zero();
    for (std::size_t i = 0; i < spec.offset.size(); ++i) {
        if (!std::isfinite(spec.offset[i])) throw ConfigError("domain offset must be finite");
        offset[static_cast<Eigen::Index>(i)] = spec.offset[i];
    }

    std::shared_ptr<const SignedDistanceField<Dim>> field;
    AlignedBox<Dim> box;
    double boundary_dimension = Dim - 1;
    std::string name = spec.type_name();

    auto make_box = [&](const Point<Dim>& sides) {
        field = std::make_shared<BoxField<Dim>>(sides / 2.0, sides / 2.0);
        box = {Point<Dim>::Zero(), sides};
    };

    if constexpr (Dim == 2) {
        std::visit(Overloaded{
                       [&](const shapes::Square& s) {
                           require_positive(s.side, "square side");
                           make_box(Point<2>(s.side, s.side));
                       },
                       [&](const shapes::Rectangle& r) {
                           require_positive(r.a, "rectangle a");
                           require_positive(r.b, "rectangle b");
                           make_box(Point<2>(r.a, r.b));
                       },
                       [&](const shapes::Disk& d) {
                           require_positive(d.radius, "disk radius");
                           field = std::make_shared<DiskField>(Point<2>::Zero(), d.radius);
                           box = {Point<2>::Constant(-d.radius), Point<2>::Constant(d.radius)};
                       },
                       [&](const shapes::KochSnowflake& k) {
                           auto poly = std::make_shared<PolygonField>(koch_snowflake_vertices(k.generation, k.side));
                           box = poly->bounds();
                           field = std::move(poly);
                           boundary_dimension = std::log(4.0) / std::log(3.0);
                           name += "(g=" + std::to_string(k.generation) + ")";
                       },
                       [&](const shapes::Box3d&) { throw InternalError("unreachable"); },
                   },
                   spec.shape);
    } else {
        const auto& b = std::get<shapes::Box3d>(spec.shape);
        require_positive(b.a, "box3d a");
        require_positive(b.b, "box3d b");
        require_positive(b.c, "box3d c");
        make_box(Point<3>(b.a, b.b, b.c));
    }

    if (!offset.isZero(0.0)) {
        field = std::make_shared<ShiftedField<Dim>>(std::move(field), offset);
        box = {box.lo + offset, box.hi + offset};
    }
    return Domain<Dim>(std::move(field), padded(box), boundary_dimension, std::move(name), spec);
}

double sample_covering_radius(int dim) {
    // Worst point: half of the coordinates on a face, half at mid-range.
    const int whole = dim / 2;
    const double frac = 0.5 * dim - whole;
    return 0.5 * std::sqrt(whole + frac * frac);
}

template <int Dim>
DistanceInterval distance_interval_on_cube(const Domain<Dim>& domain, const DyadicCube<Dim>& cube) {
    const double center = domain.signed_distance(cube.center());
    const double half_diag = cube.half_diagonal();
    double smin = center, smax = center;
    for (unsigned mask = 0; mask < (1u << Dim); ++mask) {
        // Corners are within half_diag of the center.
        const double v = domain.signed_distance(cube.corner(mask), std::abs(center) + half_diag);
        smin = std::min(smin, v);
        smax = std::max(smax, v);
    }
    const double rho = sample_covering_radius(Dim) * cube.side();
    DistanceInterval out;
    out.lo = std::max(center - half_diag, smin - rho);
    out.hi = std::min(center + half_diag, smax + rho);
    out.sampled_min = smin;
    out.sampled_max = smax;
    return out;
}

template Domain<2> make_domain<2>(const DomainSpec&);
template Domain<3> make_domain<3>(const DomainSpec&);
template DistanceInterval distance_interval_on_cube<2>(const Domain<2>&, const DyadicCube<2>&);
template DistanceInterval distance_interval_on_cube<3>(const Domain<3>&, const DyadicCube<3>&);

} // namespace flights
