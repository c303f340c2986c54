#include "flights/polygon.hpp"

#include "flights/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace flights {

namespace {

constexpr std::uint32_t kLeafSize = 4;

struct SegmentHit {
    double dist_sq;
    double t;
};

inline SegmentHit segment_distance_sq(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len_sq = d.squaredNorm();
    double t = len_sq > 0.0 ? (p - a).dot(d) / len_sq : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return {(p - (a + t * d)).squaredNorm(), t};
}

inline double box_distance_sq(const Vec2& p, const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
    const Eigen::Array2d gap = (lo.array() - p.array()).max(p.array() - hi.array()).max(0.0);
    return gap.square().sum();
}

inline Vec2 right_normal(const Vec2& d) { return Vec2(d.y(), -d.x()).normalized(); }

} // namespace

PolygonField::PolygonField(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw ConfigError("polygon needs at least 3 vertices");
    if (n > std::numeric_limits<std::uint32_t>::max() / 4) throw ConfigError("polygon too large");

    // Counter-clockwise traversal puts the exterior on the right of every edge.
    outward_edge_normals_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        outward_edge_normals_[i] = right_normal(vertices_[(i + 1) % n] - vertices_[i]);
    vertex_pseudonormals_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 sum = outward_edge_normals_[(i + n - 1) % n] + outward_edge_normals_[i];
        vertex_pseudonormals_[i] = sum.squaredNorm() > 0.0 ? Vec2(sum.normalized()) : outward_edge_normals_[i];
    }

    nodes_.reserve(2 * (n / kLeafSize + 1));
    nodes_.emplace_back();
    std::vector<std::array<std::uint32_t, 3>> work{{0, 0, static_cast<std::uint32_t>(n)}};
    while (!work.empty()) {
        const auto [idx, first, count] = work.back();
        work.pop_back();
        Eigen::Vector2d lo = vertices_[first], hi = vertices_[first];
        for (std::uint32_t e = first; e < first + count; ++e) {
            const Vec2& b = vertices_[(e + 1) % n];
            lo = lo.cwiseMin(b);
            hi = hi.cwiseMax(b);
        }
        nodes_[idx].lo = lo;
        nodes_[idx].hi = hi;
        if (count <= kLeafSize) {
            nodes_[idx].first = first;
            nodes_[idx].count = count;
            continue;
        }
        const auto left = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        nodes_.emplace_back();
        nodes_[idx].first = left;
        nodes_[idx].count = 0;
        const std::uint32_t half = count / 2;
        work.push_back({left, first, half});
        work.push_back({left + 1, first + half, count - half});
    }
}

AlignedBox<2> PolygonField::bounds() const { return {nodes_[0].lo, nodes_[0].hi}; }

double PolygonField::query(const Vec2& p, double best_sq) const {
    const std::size_t n = vertices_.size();
    std::uint32_t best_edge = std::numeric_limits<std::uint32_t>::max();
    double best_t = 0.0;

    std::array<std::uint32_t, 64> stack;
    std::size_t top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (box_distance_sq(p, node.lo, node.hi) >= best_sq) continue;
        if (node.count > 0) {
            for (std::uint32_t e = node.first; e < node.first + node.count; ++e) {
                const SegmentHit hit = segment_distance_sq(p, vertices_[e], vertices_[(e + 1) % n]);
                if (hit.dist_sq < best_sq) {
                    best_sq = hit.dist_sq;
                    best_edge = e;
                    best_t = hit.t;
                }
            }
            continue;
        }
        const std::uint32_t l = node.first, r = node.first + 1;
        const double dl = box_distance_sq(p, nodes_[l].lo, nodes_[l].hi);
        const double dr = box_distance_sq(p, nodes_[r].lo, nodes_[r].hi);
        // Push the farther child first so the nearer one is popped next.
        if (dl < dr) {
            stack[top++] = r;
            stack[top++] = l;
        } else {
            stack[top++] = l;
            stack[top++] = r;
        }
    }
    if (best_edge == std::numeric_limits<std::uint32_t>::max()) return std::numeric_limits<double>::quiet_NaN();

    const double dist = std::sqrt(best_sq);
    Vec2 normal;
    Vec2 anchor;
    if (best_t <= 0.0) {
        anchor = vertices_[best_edge];
        normal = vertex_pseudonormals_[best_edge];
    } else if (best_t >= 1.0) {
        const std::size_t v = (best_edge + 1) % n;
        anchor = vertices_[v];
        normal = vertex_pseudonormals_[v];
    } else {
        anchor = vertices_[best_edge];
        normal = outward_edge_normals_[best_edge];
    }
    return (p - anchor).dot(normal) > 0.0 ? -dist : dist;
}

double PolygonField::operator()(const Vec2& p) const {
    return query(p, std::numeric_limits<double>::infinity());
}

double PolygonField::within(const Vec2& p, double abs_bound) const {
    const double slack = abs_bound * (1.0 + 1e-12) + 1e-300;
    const double s = query(p, slack * slack);
    return std::isnan(s) ? (*this)(p) : s;
}

double brute_force_polygon_distance(const std::vector<Vec2>& vertices, const Vec2& p) {
    const std::size_t n = vertices.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        best = std::min(best, segment_distance_sq(p, vertices[i], vertices[(i + 1) % n]).dist_sq);
    const double dist = std::sqrt(best);
    return winding_number(vertices, p) != 0 ? dist : -dist;
}

int winding_number(const std::vector<Vec2>& vertices, const Vec2& p) {
    const std::size_t n = vertices.size();
    int wn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        const double is_left = (b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y());
        if (a.y() <= p.y()) {
            if (b.y() > p.y() && is_left > 0.0) ++wn;
        } else if (b.y() <= p.y() && is_left < 0.0) {
            --wn;
        }
    }
    return wn;
}

std::vector<Vec2> koch_snowflake_vertices(int generation, double side) {
    if (generation < 0) throw ConfigError("koch_snowflake: generation must be >= 0");
    if (generation > 10) throw ConfigError("koch_snowflake: generation must be <= 10");
    if (!(side > 0.0) || !std::isfinite(side)) throw ConfigError("koch_snowflake: side must be positive");

    const double h = side / (2.0 * std::sqrt(3.0));
    std::vector<Vec2> poly{Vec2(-side / 2, -h), Vec2(side / 2, -h), Vec2(0.0, 2.0 * h)};
    const double c = 0.5, s = std::sqrt(3.0) / 2.0;
    for (int g = 0; g < generation; ++g) {
        std::vector<Vec2> next;
        next.reserve(poly.size() * 4);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[(i + 1) % poly.size()];
            const Vec2 u = (b - a) / 3.0;
            // Rotate by -60 degrees: the bump points to the exterior (right side).
            const Vec2 bump(c * u.x() + s * u.y(), -s * u.x() + c * u.y());
            next.push_back(a);
            next.push_back(a + u);
            next.push_back(a + u + bump);
            next.push_back(a + 2.0 * u);
        }
        poly = std::move(next);
    }
    return poly;
}

} // namespace flights
