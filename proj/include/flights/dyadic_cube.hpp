#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace flights {

template <int Dim>
using Point = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
using GridIndex = Eigen::Matrix<std::int64_t, Dim, 1>;

// Closed dyadic cube prod_i [index_i * 2^k, (index_i + 1) * 2^k] on the
// grid anchored at the origin. All corners and the center are exact doubles.
template <int Dim>
struct DyadicCube {
    int generation = 0;
    GridIndex<Dim> index = GridIndex<Dim>::Zero();

    double side() const { return std::ldexp(1.0, generation); }
    double half_diagonal() const { return 0.5 * std::sqrt(double(Dim)) * side(); }

    Point<Dim> lower() const { return index.template cast<double>() * side(); }
    Point<Dim> center() const {
        return (index.template cast<double>().array() + 0.5).matrix() * side();
    }
    // Bit i of mask selects the upper face along axis i.
    Point<Dim> corner(unsigned mask) const {
        Point<Dim> p = lower();
        for (int i = 0; i < Dim; ++i)
            if (mask & (1u << i)) p[i] += side();
        return p;
    }
    DyadicCube child(unsigned mask) const {
        DyadicCube c{generation - 1, index * 2};
        for (int i = 0; i < Dim; ++i)
            if (mask & (1u << i)) c.index[i] += 1;
        return c;
    }
    // Ancestor at a coarser generation (floor division on every axis).
    DyadicCube ancestor(int coarser_generation) const {
        DyadicCube a{coarser_generation, index};
        const int shift = coarser_generation - generation;
        for (int i = 0; i < Dim; ++i) a.index[i] = index[i] >> shift;
        return a;
    }

    friend bool operator==(const DyadicCube& a, const DyadicCube& b) {
        return a.generation == b.generation && a.index == b.index;
    }
    // Coarse cubes first, then lexicographic index.
    friend bool operator<(const DyadicCube& a, const DyadicCube& b) {
        if (a.generation != b.generation) return a.generation > b.generation;
        for (int i = 0; i < Dim; ++i)
            if (a.index[i] != b.index[i]) return a.index[i] < b.index[i];
        return false;
    }
};

template <int Dim>
struct DyadicCubeHash {
    std::size_t operator()(const DyadicCube<Dim>& c) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(c.generation);
        for (int i = 0; i < Dim; ++i) {
            h ^= static_cast<std::uint64_t>(c.index[i]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace flights
