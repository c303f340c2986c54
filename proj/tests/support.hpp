#pragma once

#include "flights/geometry.hpp"

#include <random>

namespace flights::testing {

inline DomainSpec square(double side = 1.0) { return {shapes::Square{side}, {}}; }
inline DomainSpec disk(double radius = 1.0) { return {shapes::Disk{radius}, {}}; }
inline DomainSpec koch(int generation, double side = 1.0) { return {shapes::KochSnowflake{generation, side}, {}}; }
inline DomainSpec box3d(double a = 1.0, double b = 1.0, double c = 1.0) { return {shapes::Box3d{a, b, c}, {}}; }

// Uniform points in the bounding box with 0 < distance < max_distance.
template <int Dim>
std::vector<Point<Dim>> near_boundary_points(const Domain<Dim>& domain, std::size_t n, double min_distance,
                                             double max_distance, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto& box = domain.bounding_box();
    std::vector<Point<Dim>> out;
    while (out.size() < n) {
        Point<Dim> p;
        for (int i = 0; i < Dim; ++i) p[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
        const double s = domain.signed_distance(p);
        if (s > min_distance && s < max_distance) out.push_back(p);
    }
    return out;
}

} // namespace flights::testing
