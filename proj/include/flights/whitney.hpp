#pragma once

#include "flights/geometry.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace flights {

template <int Dim>
struct WhitneyCube {
    DyadicCube<Dim> cube;
    DistanceInterval bounds;
};

// Truncated Whitney decomposition: every accepted cube of generation
// >= min_generation, grouped by generation (side 2^k, k <= 0 for sub-unit
// cubes). Immutable once built.
template <int Dim>
class WhitneyDecomposition {
public:
    WhitneyDecomposition() = default;
    WhitneyDecomposition(std::map<int, std::vector<WhitneyCube<Dim>>> by_generation, int min_generation,
                         std::string domain_name);

    const std::map<int, std::vector<WhitneyCube<Dim>>>& by_generation() const { return by_generation_; }
    // Q_k; empty when generation k holds no cube.
    const std::vector<WhitneyCube<Dim>>& generation(int k) const;
    std::vector<WhitneyCube<Dim>> cubes() const;

    int min_generation() const { return min_generation_; }
    const std::string& domain_name() const { return domain_name_; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    int finest_generation() const { return by_generation_.begin()->first; }
    // R_Omega, filled in by decompose().
    double inradius_cap() const { return inradius_cap_; }
    void set_inradius_cap(double r) { inradius_cap_ = r; }
    int coarsest_generation() const { return by_generation_.rbegin()->first; }

private:
    std::map<int, std::vector<WhitneyCube<Dim>>> by_generation_;
    int min_generation_ = 0;
    std::string domain_name_;
    std::size_t size_ = 0;
    double inradius_cap_ = 0.0;
};

// Top-down dyadic refinement from cubes covering the bounding box. A cube
// is accepted once its certified lower distance bound reaches sqrt(d)*side;
// cubes outside the domain are dropped, the rest split down to
// min_generation. Throws PreconditionError when nothing is accepted.
template <int Dim>
WhitneyDecomposition<Dim> decompose(const Domain<Dim>& domain, int min_generation);

// min(1, sup of the distance to the boundary), by branch and bound seeded
// with the decomposition's cubes. The returned value is a sampled distance
// within 2^min_generation of the supremum.
template <int Dim>
double r_omega(const Domain<Dim>& domain, const WhitneyDecomposition<Dim>& decomposition);

// S_r: cubes whose certified distance interval contains r. Requires
// 2^min_generation <= r <= R_Omega.
template <int Dim>
std::vector<DyadicCube<Dim>> layer(const WhitneyDecomposition<Dim>& decomposition, const Domain<Dim>& domain,
                                   double r);

// Unchecked count of S_r, used by diagnostics that sweep r.
template <int Dim>
std::size_t layer_size(const WhitneyDecomposition<Dim>& decomposition, double r);

template <int Dim>
std::map<int, std::size_t> layer_counts(const WhitneyDecomposition<Dim>& decomposition);

struct HypothesisReport {
    std::vector<int> scale_exponents;   // k with r = 2^k
    std::vector<std::size_t> layer_sizes;  // #S_{2^k}
    double fitted_dimension = 0.0;
    double spread = 0.0;  // max/min of #S_{2^k} * 2^{k d}
    bool holds = false;   // spread <= kSpreadLimit
    std::string unavailable;  // why the check could not run, if it did not
    static constexpr double kSpreadLimit = 10.0;
};

// Fits #S_r ~ r^(-d_M) over r = 2^k, 2^(min_generation + 3) <= r <= R_Omega / 4.
template <int Dim>
HypothesisReport check_self_similarity_hypothesis(const WhitneyDecomposition<Dim>& decomposition,
                                                  const Domain<Dim>& domain);

// Exhaustive audit of the Whitney properties, used by tests and `verify`.
struct WhitneyAudit {
    std::size_t cubes = 0;
    std::size_t overlapping_pairs = 0;
    std::size_t distance_violations = 0;
    std::size_t ratio_violations = 0;
    std::size_t neighbor_violations = 0;
    std::size_t max_neighbors = 0;
    int max_side_ratio = 1;
    bool ok() const {
        return overlapping_pairs == 0 && distance_violations == 0 && ratio_violations == 0 &&
               neighbor_violations == 0;
    }
};

template <int Dim>
WhitneyAudit audit_whitney(const WhitneyDecomposition<Dim>& decomposition);

#define FLIGHTS_WHITNEY_EXTERN(D)                                                                               \
    extern template class WhitneyDecomposition<D>;                                                              \
    extern template WhitneyDecomposition<D> decompose<D>(const Domain<D>&, int);                                \
    extern template double r_omega<D>(const Domain<D>&, const WhitneyDecomposition<D>&);                        \
    extern template std::vector<DyadicCube<D>> layer<D>(const WhitneyDecomposition<D>&, const Domain<D>&, double); \
    extern template std::size_t layer_size<D>(const WhitneyDecomposition<D>&, double);                          \
    extern template std::map<int, std::size_t> layer_counts<D>(const WhitneyDecomposition<D>&);                 \
    extern template HypothesisReport check_self_similarity_hypothesis<D>(const WhitneyDecomposition<D>&,        \
                                                                         const Domain<D>&);                     \
    extern template WhitneyAudit audit_whitney<D>(const WhitneyDecomposition<D>&);
FLIGHTS_WHITNEY_EXTERN(2)
FLIGHTS_WHITNEY_EXTERN(3)
#undef FLIGHTS_WHITNEY_EXTERN

} // namespace flights
