#pragma once

#include "flights/geometry.hpp"


#include <vector>

namespace flights {

using Vec2 = Point<2>;

// Closed simple polygon with an exact signed distance. Nearest-edge
// queries go through a bounding-volume hierarchy built over contiguous
// runs of edges; the sign comes from the pseudonormal of the nearest
// feature, which agrees with the winding number for simple polygons.
class PolygonField final : public SignedDistanceField<2> {
public:
    // Vertices in counter-clockwise order; the closing edge is implicit.
    explicit PolygonField(std::vector<Vec2> vertices);

    double operator()(const Vec2& p) const override;
    double within(const Vec2& p, double abs_bound) const override;

    const std::vector<Vec2>& vertices() const { return vertices_; }
    std::size_t edge_count() const { return vertices_.size(); }
    AlignedBox<2> bounds() const;

private:
    struct Node {
        Eigen::Vector2d lo, hi;
        std::uint32_t first = 0;  // first edge (leaf) or left child (inner)
        std::uint32_t count = 0;  // edges in leaf; 0 for inner nodes
    };

    std::uint32_t build(std::uint32_t first, std::uint32_t count);
    double query(const Vec2& p, double best_sq) const;

    std::vector<Vec2> vertices_;
    std::vector<Vec2> outward_edge_normals_;
    std::vector<Vec2> vertex_pseudonormals_;
    std::vector<Node> nodes_;
};

// Reference implementations: O(n) scans used by tests. The brute-force
// distance is signed by the winding number.
double brute_force_polygon_distance(const std::vector<Vec2>& vertices, const Vec2& p);
int winding_number(const std::vector<Vec2>& vertices, const Vec2& p);

// Vertices of the Koch prefractal of the given generation, counter-clockwise,
// 3 * 4^generation of them.
std::vector<Vec2> koch_snowflake_vertices(int generation, double side);

} // namespace flights
