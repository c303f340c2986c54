#include "flights/whitney.hpp"

#include "flights/errors.hpp"
#include "flights/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace flights {

template <int Dim>
WhitneyDecomposition<Dim>::WhitneyDecomposition(std::map<int, std::vector<WhitneyCube<Dim>>> by_generation,
                                                int min_generation, std::string domain_name)
    : by_generation_(std::move(by_generation)), min_generation_(min_generation),
      domain_name_(std::move(domain_name)) {
    for (auto it = by_generation_.begin(); it != by_generation_.end();) {
        if (it->second.empty()) {
            it = by_generation_.erase(it);
            continue;
        }
        size_ += it->second.size();
        ++it;
    }
}

template <int Dim>
const std::vector<WhitneyCube<Dim>>& WhitneyDecomposition<Dim>::generation(int k) const {
    static const std::vector<WhitneyCube<Dim>> none;
    const auto it = by_generation_.find(k);
    return it == by_generation_.end() ? none : it->second;
}

template <int Dim>
std::vector<WhitneyCube<Dim>> WhitneyDecomposition<Dim>::cubes() const {
    std::vector<WhitneyCube<Dim>> all;
    all.reserve(size_);
    for (auto it = by_generation_.rbegin(); it != by_generation_.rend(); ++it)
        all.insert(all.end(), it->second.begin(), it->second.end());
    return all;
}

namespace {

template <int Dim>
std::vector<DyadicCube<Dim>> covering_cubes(const AlignedBox<Dim>& box) {
    const double extent = box.extent().maxCoeff();
    const int k0 = static_cast<int>(std::ceil(std::log2(extent)));
    const double side = std::ldexp(1.0, k0);
    GridIndex<Dim> lo, count;
    for (int i = 0; i < Dim; ++i) {
        lo[i] = static_cast<std::int64_t>(std::floor(box.lo[i] / side));
        count[i] = static_cast<std::int64_t>(std::floor(box.hi[i] / side)) - lo[i] + 1;
    }
    std::vector<DyadicCube<Dim>> out;
    GridIndex<Dim> offset = GridIndex<Dim>::Zero();
    while (true) {
        out.push_back({k0, lo + offset});
        int axis = 0;
        while (axis < Dim && ++offset[axis] == count[axis]) offset[axis++] = 0;
        if (axis == Dim) break;
    }
    return out;
}

template <int Dim>
bool cube_less(const WhitneyCube<Dim>& a, const WhitneyCube<Dim>& b) {
    return a.cube < b.cube;
}

} // namespace

template <int Dim>
WhitneyDecomposition<Dim> decompose(const Domain<Dim>& domain, int min_generation) {
    const double sqrt_d = std::sqrt(double(Dim));
    std::map<int, std::vector<WhitneyCube<Dim>>> accepted;
    std::vector<DyadicCube<Dim>> frontier = covering_cubes(domain.bounding_box());
    if (frontier.front().generation < min_generation)
        throw PreconditionError("decompose: min_generation " + std::to_string(min_generation) +
                                " is coarser than the bounding box");

    while (!frontier.empty()) {
        std::vector<DyadicCube<Dim>> next;
        for (const auto& cube : frontier) {
            const DistanceInterval bounds = distance_interval_on_cube(domain, cube);
            if (bounds.hi <= 0.0) continue;
            if (bounds.lo >= sqrt_d * cube.side()) {
                accepted[cube.generation].push_back({cube, bounds});
                continue;
            }
            if (cube.generation <= min_generation) continue;
            for (unsigned mask = 0; mask < (1u << Dim); ++mask) next.push_back(cube.child(mask));
        }
        frontier = std::move(next);
    }
    for (auto& [k, cubes] : accepted) std::sort(cubes.begin(), cubes.end(), cube_less<Dim>);

    WhitneyDecomposition<Dim> out(std::move(accepted), min_generation, domain.name());
    if (out.empty())
        throw PreconditionError("decompose: no Whitney cube accepted down to generation " +
                                std::to_string(min_generation));
    out.set_inradius_cap(r_omega(domain, out));
    return out;
}

template <int Dim>
double r_omega(const Domain<Dim>& domain, const WhitneyDecomposition<Dim>& decomposition) {
    if (decomposition.empty()) throw PreconditionError("r_omega: empty decomposition");
    const double tol = std::max(std::ldexp(1.0, decomposition.min_generation()), 1e-6);

    double best = 0.0;
    std::vector<WhitneyCube<Dim>> open;
    for (const auto& [k, cubes] : decomposition.by_generation())
        for (const auto& wc : cubes) best = std::max(best, wc.bounds.sampled_max);
    for (const auto& [k, cubes] : decomposition.by_generation())
        for (const auto& wc : cubes)
            if (wc.bounds.hi > best + tol) open.push_back(wc);

    while (!open.empty()) {
        std::vector<WhitneyCube<Dim>> children;
        for (const auto& wc : open) {
            for (unsigned mask = 0; mask < (1u << Dim); ++mask) {
                const DyadicCube<Dim> c = wc.cube.child(mask);
                const DistanceInterval b = distance_interval_on_cube(domain, c);
                best = std::max(best, b.sampled_max);
                children.push_back({c, b});
            }
        }
        open.clear();
        for (const auto& wc : children)
            if (wc.bounds.hi > best + tol) open.push_back(wc);
    }
    return std::min(1.0, best);
}

template <int Dim>
std::size_t layer_size(const WhitneyDecomposition<Dim>& decomposition, double r) {
    std::size_t count = 0;
    for (const auto& [k, cubes] : decomposition.by_generation())
        for (const auto& wc : cubes)
            if (wc.bounds.lo <= r && r <= wc.bounds.hi) ++count;
    return count;
}

template <int Dim>
std::vector<DyadicCube<Dim>> layer(const WhitneyDecomposition<Dim>& decomposition, const Domain<Dim>& domain,
                                   double r) {
    (void)domain;
    const double floor_r = std::ldexp(1.0, decomposition.min_generation());
    if (!(r >= floor_r && r <= decomposition.inradius_cap()))
        throw PreconditionError("layer: r = " + std::to_string(r) + " outside [" + std::to_string(floor_r) + ", " +
                                std::to_string(decomposition.inradius_cap()) + "]");
    std::vector<DyadicCube<Dim>> out;
    for (auto it = decomposition.by_generation().rbegin(); it != decomposition.by_generation().rend(); ++it)
        for (const auto& wc : it->second)
            if (wc.bounds.lo <= r && r <= wc.bounds.hi) out.push_back(wc.cube);
    return out;
}

template <int Dim>
std::map<int, std::size_t> layer_counts(const WhitneyDecomposition<Dim>& decomposition) {
    std::map<int, std::size_t> counts;
    for (const auto& [k, cubes] : decomposition.by_generation()) counts[k] = cubes.size();
    return counts;
}

template <int Dim>
HypothesisReport check_self_similarity_hypothesis(const WhitneyDecomposition<Dim>& decomposition,
                                                  const Domain<Dim>& domain) {
    (void)domain;
    if (decomposition.by_generation().size() < 4)
        throw PreconditionError("self-similarity check needs at least 4 generations, got " +
                                std::to_string(decomposition.by_generation().size()));
    HypothesisReport report;
    // Layers at r close to R_Omega shrink with the domain itself; stop at R_Omega / 4.
    const int k_hi = static_cast<int>(std::floor(std::log2(decomposition.inradius_cap() / 4.0)));
    for (int k = decomposition.min_generation() + 3; k <= k_hi; ++k) {
        const std::size_t n = layer_size(decomposition, std::ldexp(1.0, k));
        if (n == 0) continue;
        report.scale_exponents.push_back(k);
        report.layer_sizes.push_back(n);
    }
    if (report.scale_exponents.size() < 4)
        throw PreconditionError("self-similarity check needs at least 4 populated scales");

    std::vector<double> x, y;
    for (std::size_t i = 0; i < report.scale_exponents.size(); ++i) {
        x.push_back(-report.scale_exponents[i]);
        y.push_back(std::log2(double(report.layer_sizes[i])));
    }
    report.fitted_dimension = fit_line(x, y).slope;
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double normalized = std::exp2(y[i] - report.fitted_dimension * x[i]);
        lo = std::min(lo, normalized);
        hi = std::max(hi, normalized);
    }
    report.spread = hi / lo;
    report.holds = report.spread <= HypothesisReport::kSpreadLimit;
    return report;
}

template <int Dim>
WhitneyAudit audit_whitney(const WhitneyDecomposition<Dim>& decomposition) {
    const double sqrt_d = std::sqrt(double(Dim));
    std::unordered_map<DyadicCube<Dim>, std::size_t, DyadicCubeHash<Dim>> slot;
    std::vector<WhitneyCube<Dim>> all = decomposition.cubes();
    for (std::size_t i = 0; i < all.size(); ++i) slot.emplace(all[i].cube, i);
    std::vector<int> generations;
    for (const auto& [k, cubes] : decomposition.by_generation()) generations.push_back(k);

    WhitneyAudit audit;
    audit.cubes = all.size();
    std::vector<std::size_t> neighbors(all.size(), 0);
    const std::size_t neighbor_limit = static_cast<std::size_t>(std::pow(12.0, Dim));

    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& [cube, bounds] = all[i];
        const double side = cube.side();
        if (!(bounds.lo >= sqrt_d * side) || !(bounds.sampled_min <= 4.0 * sqrt_d * side)) ++audit.distance_violations;

        for (int k : generations) {
            if (k < cube.generation) continue;
            const int shift = k - cube.generation;
            if (shift > 0 && slot.count(cube.ancestor(k))) ++audit.overlapping_pairs;

            // Cells of generation k whose closed box meets the closed cube.
            GridIndex<Dim> lo, hi;
            for (int a = 0; a < Dim; ++a) {
                lo[a] = -((-cube.index[a]) >> shift) - 1;
                hi[a] = (cube.index[a] + 1) >> shift;
            }
            GridIndex<Dim> idx = lo;
            while (true) {
                const DyadicCube<Dim> other{k, idx};
                const bool is_self_or_ancestor = shift == 0 ? other == cube : other == cube.ancestor(k);
                if (!is_self_or_ancestor) {
                    if (auto it = slot.find(other); it != slot.end()) {
                        ++neighbors[i];
                        if (shift > 0) ++neighbors[it->second];
                        const int ratio = 1 << std::min(shift, 30);
                        audit.max_side_ratio = std::max(audit.max_side_ratio, ratio);
                        if (shift > 2) ++audit.ratio_violations;
                    }
                }
                int a = 0;
                while (a < Dim && idx[a] == hi[a]) idx[a] = lo[a], ++a;
                if (a == Dim) break;
                ++idx[a];
            }
        }
    }
    for (std::size_t n : neighbors) {
        audit.max_neighbors = std::max(audit.max_neighbors, n);
        if (n > neighbor_limit) ++audit.neighbor_violations;
    }
    return audit;
}

#define FLIGHTS_WHITNEY_INSTANTIATE(D)                                                                     \
    template class WhitneyDecomposition<D>;                                                                \
    template WhitneyDecomposition<D> decompose<D>(const Domain<D>&, int);                                  \
    template double r_omega<D>(const Domain<D>&, const WhitneyDecomposition<D>&);                          \
    template std::vector<DyadicCube<D>> layer<D>(const WhitneyDecomposition<D>&, const Domain<D>&, double); \
    template std::size_t layer_size<D>(const WhitneyDecomposition<D>&, double);                            \
    template std::map<int, std::size_t> layer_counts<D>(const WhitneyDecomposition<D>&);                   \
    template HypothesisReport check_self_similarity_hypothesis<D>(const WhitneyDecomposition<D>&,          \
                                                                  const Domain<D>&);                       \
    template WhitneyAudit audit_whitney<D>(const WhitneyDecomposition<D>&);
FLIGHTS_WHITNEY_INSTANTIATE(2)
FLIGHTS_WHITNEY_INSTANTIATE(3)

} // namespace flights
