#pragma once

#include "flights/geometry.hpp"
#include "flights/whitney.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace flights {

// Time stepping for the killed Brownian motion. Each step lasts
// min(dt_max, (c_step * distance)^2).
struct StepPolicy {
    double c_step = 0.1;
    double dt_max = 0.0;
    double delta_abs = 0.0;  // absorption distance
    double t_max = 0.0;      // censoring time
    bool bridge_correction = true;

    // dt_max = R^2 / 100, delta_abs = eps / 100, t_max = 4 R^2.
    static StepPolicy defaults(double epsilon, double r_omega);
    void validate() const;
};

template <int Dim>
struct FlightRecord {
    std::uint64_t flight_id = 0;
    DyadicCube<Dim> start_cube;
    Point<Dim> start = Point<Dim>::Zero();
    double tau = 0.0;
    Point<Dim> exit_point = Point<Dim>::Zero();
    double displacement = 0.0;
    bool censored = false;
    // Time spent at distances in [2^(k-1), 2^k), keyed by k.
    std::map<int, double> shell_occupation;

    // Time spent within distance s of the boundary, counted by whole
    // dyadic shells (shells with 2^k <= s).
    double occupation_within(double s) const;
};

template <int Dim>
struct PathOutcome {
    double tau = 0.0;
    Point<Dim> exit_point = Point<Dim>::Zero();
    bool censored = false;
    std::map<int, double> shell_occupation;
};

// Per-flight random stream, a pure function of (seed, flight_id).
std::mt19937_64 flight_stream(std::uint64_t seed, std::uint64_t flight_id);

// Runs one killed Brownian path from `start` (which must be inside).
template <int Dim>
PathOutcome<Dim> run_path(const Domain<Dim>& domain, const Point<Dim>& start, const StepPolicy& policy,
                          std::mt19937_64& rng);

// Draws start cubes uniformly from S_epsilon, computed once.
template <int Dim>
class FlightSampler {
public:
    FlightSampler(const Domain<Dim>& domain, const WhitneyDecomposition<Dim>& decomposition, double epsilon,
                  StepPolicy policy);

    FlightRecord<Dim> sample(std::uint64_t seed, std::uint64_t flight_id) const;

    const std::vector<DyadicCube<Dim>>& start_layer() const { return layer_; }
    const StepPolicy& policy() const { return policy_; }

private:
    const Domain<Dim>* domain_;
    StepPolicy policy_;
    std::vector<DyadicCube<Dim>> layer_;
};

template <int Dim>
FlightRecord<Dim> sample_flight(const Domain<Dim>& domain, const WhitneyDecomposition<Dim>& decomposition,
                                double epsilon, const StepPolicy& policy, std::uint64_t seed,
                                std::uint64_t flight_id);

// n_flights records ordered by flight_id; record i uses stream (master_seed, i).
// The output does not depend on `workers`.
template <int Dim>
std::vector<FlightRecord<Dim>> run_campaign(const Domain<Dim>& domain, const WhitneyDecomposition<Dim>& decomposition,
                                            double epsilon, const StepPolicy& policy, std::int64_t n_flights,
                                            std::uint64_t master_seed, int workers);

template <int Dim>
struct HarmonicEstimate {
    Point<Dim> point;
    double distance = 0.0;
    double fraction = 0.0;  // share of paths absorbed on the domain boundary
    double std_error = 0.0;
};

template <int Dim>
struct DeltaRegReport {
    std::vector<HarmonicEstimate<Dim>> points;
    double lower_bound = 0.0;  // min over points
};

// Monte Carlo harmonic measure of the boundary seen from x inside
// B(x, 2 d_x) intersected with the domain. Requires 0 < d_x < r_omega.
template <int Dim>
DeltaRegReport<Dim> estimate_delta_regularity(const Domain<Dim>& domain, const std::vector<Point<Dim>>& points,
                                              int n_paths, const StepPolicy& policy, std::uint64_t seed,
                                              double r_omega);

#define FLIGHTS_FLIGHT_EXTERN(D)                                                                                    \
    extern template struct FlightRecord<D>;                                                                         \
    extern template PathOutcome<D> run_path<D>(const Domain<D>&, const Point<D>&, const StepPolicy&,                \
                                               std::mt19937_64&);                                                   \
    extern template class FlightSampler<D>;                                                                         \
    extern template FlightRecord<D> sample_flight<D>(const Domain<D>&, const WhitneyDecomposition<D>&, double,      \
                                                     const StepPolicy&, std::uint64_t, std::uint64_t);              \
    extern template std::vector<FlightRecord<D>> run_campaign<D>(const Domain<D>&, const WhitneyDecomposition<D>&, \
                                                                 double, const StepPolicy&, std::int64_t,           \
                                                                 std::uint64_t, int);                               \
    extern template DeltaRegReport<D> estimate_delta_regularity<D>(const Domain<D>&, const std::vector<Point<D>>&, \
                                                                   int, const StepPolicy&, std::uint64_t, double);
FLIGHTS_FLIGHT_EXTERN(2)
FLIGHTS_FLIGHT_EXTERN(3)
#undef FLIGHTS_FLIGHT_EXTERN

} // namespace flights
