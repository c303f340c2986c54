#pragma once

#include "flights/flight.hpp"
#include "flights/whitney.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flights {

// The per-flight quantities the statistics need.
struct FlightSample {
    double tau = 0.0;
    double displacement = 0.0;
    bool censored = false;
};

template <int Dim>
std::vector<FlightSample> to_samples(const std::vector<FlightRecord<Dim>>& records) {
    std::vector<FlightSample> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.tau, r.displacement, r.censored});
    return out;
}

// Log-spaced grid t_min * 10^(i / points_per_decade) up to t_max.
struct GridSpec {
    double t_min = 0.0;
    double t_max = 0.0;
    int points_per_decade = 16;
};

std::vector<double> log_grid(const GridSpec& spec);

struct SurvivalCurve {
    std::vector<double> grid;
    std::vector<double> survival;
    std::vector<double> std_error;
    std::size_t n_samples = 0;
    double epsilon = 0.0;
    double censor_time = 0.0;
    std::vector<double> durations;  // sorted; censored flights sit at censor_time
};

// Fraction of flights with tau > t on the grid; grid points at or past the
// censoring time are dropped. Needs at least 100 uncensored flights.
SurvivalCurve empirical_survival(const std::vector<FlightSample>& samples, const GridSpec& grid, double epsilon,
                                 double censor_time);

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

struct FitOptions {
    int bootstrap_resamples = 200;
    std::uint64_t seed = 0x5eed;
};

struct ExponentFit {
    double exponent = 0.0;
    double intercept = 0.0;  // of log tail against log t (or log r)
    Window window;
    std::pair<double, double> ci_90{0.0, 0.0};
    double r_squared = 0.0;
    std::size_t points = 0;
    int valid_resamples = 0;
};

// Least-squares line through (log t, log survival) on the window;
// exponent = -2 * slope, matching survival ~ C (eps / sqrt t)^exponent.
// Bootstrap CI resamples flights.
ExponentFit fit_exponent(const SurvivalCurve& curve, const Window& window, const FitOptions& options = {});

// Tail of the hitting distance, P(displacement > r) ~ C (eps / r)^exponent,
// over uncensored flights.
ExponentFit fit_length_exponent(const std::vector<FlightSample>& samples, double epsilon, const Window& window_r,
                                const FitOptions& options = {}, int points_per_decade = 24);

struct NestedWindows {
    Window narrow;  // [10 eps^2, 100 eps^2]
    Window middle;  // [10 eps^2, R^2 / 10], used for acceptance
    Window wide;    // [10 eps^2, R^2]
};

NestedWindows theorem_windows(double epsilon, double r_omega);
Window default_length_window(double epsilon, double r_omega);

struct DimensionEstimate {
    double dimension = 0.0;
    double r_squared = 0.0;
    int j_first = 0;  // finest-to-coarsest range actually fitted, j = -k
    int j_last = 0;
    std::vector<std::pair<int, double>> step_slopes;  // log2(W_{j+1} / W_j) per j
};

// Slope of log2 W_j against j = -k over the middle generations
// (coarsest and finest dropped).
DimensionEstimate whitney_dimension(const std::map<int, std::size_t>& layer_counts);

struct NonSelfSimilarBound {
    std::vector<double> t;
    std::vector<double> bound;
    std::vector<double> empirical;
};

struct TheoremInputs {
    std::string domain_name;
    int dimension = 2;
    double epsilon = 0.0;
    double r_omega = 0.0;
    std::optional<double> known_boundary_dimension;
    std::optional<double> target_dimension;  // explicit override
    SurvivalCurve curve;
    NestedWindows windows;
    std::vector<ExponentFit> time_fits;  // narrow, middle, wide
    ExponentFit length_fit;
    DimensionEstimate dimension_estimate;
    HypothesisReport hypothesis;
    std::function<std::size_t(double)> layer_size;  // #S_r
};

struct VerificationReport {
    std::string domain_name;
    int dimension = 2;
    double epsilon = 0.0;
    double r_omega = 0.0;
    double measured_dimension = 0.0;
    std::optional<double> known_dimension;
    double target_dimension = 0.0;
    std::string target_source;
    double predicted_exponent_measured = 0.0;  // measured d_M + 2 - d
    double target_time_exponent = 0.0;
    double target_length_exponent = 0.0;
    double tolerance = 0.0;
    std::vector<std::pair<std::string, ExponentFit>> time_fits;
    ExponentFit length_fit;
    bool time_pass = false;
    bool length_pass = false;
    bool pass = false;
    HypothesisReport hypothesis;
    std::optional<NonSelfSimilarBound> non_self_similar_bound;
};

// Target dimension: explicit override, else the analytic value, else the
// measured Whitney dimension. Tolerance is 0.15 when the target is d - 1
// and 0.2 otherwise.
VerificationReport theorem_report(const TheoremInputs& inputs);

NonSelfSimilarBound non_self_similar_bound(const SurvivalCurve& curve, int dimension, double epsilon,
                                           double r_omega, const std::function<std::size_t(double)>& layer_size);

} // namespace flights
