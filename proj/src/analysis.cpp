#include "flights/analysis.hpp"

#include "flights/errors.hpp"
#include "flights/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace flights {

std::vector<double> log_grid(const GridSpec& spec) {
    if (!(spec.t_min > 0.0) || !(spec.t_max > spec.t_min) || spec.points_per_decade < 1)
        throw PreconditionError("log_grid: need 0 < t_min < t_max and points_per_decade >= 1");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double t = spec.t_min * std::pow(10.0, double(i) / spec.points_per_decade);
        if (t > spec.t_max * (1.0 + 1e-12)) break;
        grid.push_back(t);
    }
    return grid;
}

SurvivalCurve empirical_survival(const std::vector<FlightSample>& samples, const GridSpec& grid_spec, double epsilon,
                                 double censor_time) {
    if (samples.empty()) throw PreconditionError("empirical_survival: no flights");
    const auto uncensored = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return !s.censored; });
    if (uncensored < 100)
        throw PreconditionError("empirical_survival: need >= 100 uncensored flights, got " +
                                std::to_string(uncensored));

    SurvivalCurve curve;
    curve.n_samples = samples.size();
    curve.epsilon = epsilon;
    curve.censor_time = censor_time;
    curve.durations.reserve(samples.size());
    for (const auto& s : samples) curve.durations.push_back(s.censored ? censor_time : s.tau);
    std::sort(curve.durations.begin(), curve.durations.end());

    const double n = double(samples.size());
    for (double t : log_grid(grid_spec)) {
        if (t >= censor_time) break;
        const auto above = curve.durations.end() - std::upper_bound(curve.durations.begin(), curve.durations.end(), t);
        const double s = double(above) / n;
        curve.grid.push_back(t);
        curve.survival.push_back(s);
        curve.std_error.push_back(std::sqrt(s * (1.0 - s) / n));
    }
    return curve;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * double(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - double(i);
    return i + 1 < v.size() ? v[i] * (1.0 - frac) + v[i + 1] * frac : v[i];
}

// Fits log tail(x) = a + slope log x over `grid`; exponent = -factor * slope.
// `values` sorted ascending.
ExponentFit fit_tail(const std::vector<double>& values, const std::vector<double>& grid,
                     double factor, const Window& window, const FitOptions& options, const char* what) {
    if (grid.size() < 3)
        throw FitError(std::string(what) + ": fewer than 3 grid points in window [" + std::to_string(window.lo) +
                       ", " + std::to_string(window.hi) + "]");
    std::vector<double> log_x(grid.size()), log_s(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto above = values.end() - std::upper_bound(values.begin(), values.end(), grid[j]);
        if (above == 0)
            throw FitError(std::string(what) + ": empirical tail is zero at " + std::to_string(grid[j]) +
                           "; shrink the window or add flights");
        log_x[j] = std::log(grid[j]);
        log_s[j] = std::log(double(above) / double(values.size()));
    }
    const LineFit line = fit_line(log_x, log_s);
    const std::size_t n = values.size();

    ExponentFit fit;
    fit.exponent = -factor * line.slope;
    fit.intercept = line.intercept;
    fit.window = window;
    fit.r_squared = line.r_squared;
    fit.points = grid.size();

    // bin[i] = number of grid points strictly below values[i].
    std::vector<std::uint32_t> bin(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        bin[i] = static_cast<std::uint32_t>(std::lower_bound(grid.begin(), grid.end(), values[i]) - grid.begin());

    std::vector<double> boot;
    std::vector<std::size_t> hist(grid.size() + 1);
    for (int b = 0; b < options.bootstrap_resamples; ++b) {
        std::mt19937_64 rng = flight_stream(options.seed, static_cast<std::uint64_t>(b));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::fill(hist.begin(), hist.end(), 0);
        for (std::size_t i = 0; i < n; ++i) ++hist[bin[pick(rng)]];
        std::size_t exceed = 0;
        std::vector<double> ls(grid.size());
        bool ok = true;
        for (std::size_t j = grid.size(); j-- > 0;) {
            exceed += hist[j + 1];
            if (exceed == 0) {
                ok = false;
                break;
            }
            ls[j] = std::log(double(exceed) / double(n));
        }
        if (!ok) continue;
        boot.push_back(-factor * fit_line(log_x, ls).slope);
    }
    fit.valid_resamples = static_cast<int>(boot.size());
    if (!boot.empty()) fit.ci_90 = {quantile(boot, 0.05), quantile(boot, 0.95)};
    else fit.ci_90 = {fit.exponent, fit.exponent};
    return fit;
}

std::vector<double> grid_in_window(const std::vector<double>& grid, const Window& w) {
    std::vector<double> out;
    for (double t : grid)
        if (t >= w.lo * (1.0 - 1e-9) && t <= w.hi * (1.0 + 1e-9)) out.push_back(t);
    return out;
}

} // namespace

ExponentFit fit_exponent(const SurvivalCurve& curve, const Window& window, const FitOptions& options) {
    if (curve.grid.empty()) throw PreconditionError("fit_exponent: empty curve");
    if (!(window.lo < window.hi) || window.lo < curve.grid.front() * (1.0 - 1e-9) ||
        window.hi > curve.grid.back() * (1.0 + 1e-9))
        throw PreconditionError("fit_exponent: window [" + std::to_string(window.lo) + ", " +
                                std::to_string(window.hi) + "] outside curve support [" +
                                std::to_string(curve.grid.front()) + ", " + std::to_string(curve.grid.back()) + "]");
    return fit_tail(curve.durations, grid_in_window(curve.grid, window), 2.0, window, options,
                    "fit_exponent");
}

ExponentFit fit_length_exponent(const std::vector<FlightSample>& samples, double epsilon, const Window& window_r,
                                const FitOptions& options, int points_per_decade) {
    (void)epsilon;
    if (samples.empty()) throw PreconditionError("fit_length_exponent: no flights");
    if (!(window_r.lo > 0.0 && window_r.lo < window_r.hi))
        throw PreconditionError("fit_length_exponent: window must satisfy 0 < lo < hi");
    std::vector<double> lengths;
    for (const auto& s : samples)
        if (!s.censored) lengths.push_back(s.displacement);
    if (lengths.empty()) throw PreconditionError("fit_length_exponent: every flight is censored");
    std::sort(lengths.begin(), lengths.end());

    // Grid hits both window ends.
    const double decades = std::log10(window_r.hi / window_r.lo);
    const int steps = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)));
    std::vector<double> grid;
    for (int i = 0; i <= steps; ++i) grid.push_back(window_r.lo * std::pow(window_r.hi / window_r.lo, double(i) / steps));
    return fit_tail(lengths, grid, 1.0, window_r, options, "fit_length_exponent");
}

NestedWindows theorem_windows(double epsilon, double r_omega) {
    const double e2 = epsilon * epsilon, r2 = r_omega * r_omega;
    NestedWindows w{{10.0 * e2, 100.0 * e2}, {10.0 * e2, r2 / 10.0}, {10.0 * e2, r2}};
    if (w.middle.hi < 10.0 * w.middle.lo * (1.0 - 1e-9))
        throw PreconditionError("fit window [10 eps^2, R^2/10] spans less than a decade; decrease epsilon");
    return w;
}

Window default_length_window(double epsilon, double r_omega) { return {4.0 * epsilon, r_omega / 4.0}; }

DimensionEstimate whitney_dimension(const std::map<int, std::size_t>& layer_counts) {
    std::vector<std::pair<int, std::size_t>> by_j;  // ascending j = -k
    for (auto it = layer_counts.rbegin(); it != layer_counts.rend(); ++it)
        if (it->second > 0) by_j.emplace_back(-it->first, it->second);
    if (by_j.size() < 4)
        throw PreconditionError("whitney_dimension: need >= 4 populated generations, got " +
                                std::to_string(by_j.size()));

    DimensionEstimate est;
    for (std::size_t i = 0; i + 1 < by_j.size(); ++i)
        est.step_slopes.emplace_back(by_j[i].first,
                                     std::log2(double(by_j[i + 1].second) / double(by_j[i].second)) /
                                         double(by_j[i + 1].first - by_j[i].first));
    std::vector<double> x, y;
    for (std::size_t i = 1; i + 1 < by_j.size(); ++i) {
        x.push_back(by_j[i].first);
        y.push_back(std::log2(double(by_j[i].second)));
    }
    const LineFit line = fit_line(x, y);
    est.dimension = line.slope;
    est.r_squared = line.r_squared;
    est.j_first = by_j[1].first;
    est.j_last = by_j[by_j.size() - 2].first;
    return est;
}

NonSelfSimilarBound non_self_similar_bound(const SurvivalCurve& curve, int dimension, double epsilon,
                                           double r_omega, const std::function<std::size_t(double)>& layer_size) {
    NonSelfSimilarBound out;
    const double s_eps = double(layer_size(epsilon));
    if (s_eps == 0.0) return out;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        const double t = curve.grid[i];
        const double root = std::sqrt(t);
        if (root < epsilon || root > r_omega) continue;
        const int n_max = static_cast<int>(std::floor(std::log2(root / epsilon) + 1e-12));
        double best = 0.0, partial = 0.0;
        for (int k = 0; k <= n_max; ++k) {
            const double r = std::ldexp(root, -k);
            partial += double(layer_size(r)) / s_eps * std::pow(r / epsilon, dimension - 2);
            best = std::max(best, std::ldexp(1.0, -k * dimension) + partial);
        }
        out.t.push_back(t);
        out.bound.push_back(best);
        out.empirical.push_back(curve.survival[i]);
    }
    return out;
}

VerificationReport theorem_report(const TheoremInputs& in) {
    VerificationReport rep;
    rep.domain_name = in.domain_name;
    rep.dimension = in.dimension;
    rep.epsilon = in.epsilon;
    rep.r_omega = in.r_omega;
    rep.measured_dimension = in.dimension_estimate.dimension;
    rep.known_dimension = in.known_boundary_dimension;
    if (in.target_dimension) {
        rep.target_dimension = *in.target_dimension;
        rep.target_source = "config";
    } else if (in.known_boundary_dimension) {
        rep.target_dimension = *in.known_boundary_dimension;
        rep.target_source = "analytic";
    } else {
        rep.target_dimension = rep.measured_dimension;
        rep.target_source = "measured";
    }
    rep.predicted_exponent_measured = rep.measured_dimension + 2.0 - in.dimension;
    rep.target_time_exponent = rep.target_dimension + 2.0 - in.dimension;
    rep.target_length_exponent = rep.target_dimension - (in.dimension - 2.0);
    const bool smooth = std::abs(rep.target_dimension - (in.dimension - 1.0)) < 0.05;
    rep.tolerance = smooth ? 0.15 : 0.2;

    static const char* names[] = {"narrow", "middle", "wide"};
    for (std::size_t i = 0; i < in.time_fits.size() && i < 3; ++i) rep.time_fits.emplace_back(names[i], in.time_fits[i]);
    rep.length_fit = in.length_fit;

    const ExponentFit* middle = in.time_fits.size() >= 2 ? &in.time_fits[1] : nullptr;
    rep.time_pass = middle && std::abs(middle->exponent - rep.target_time_exponent) <= rep.tolerance;
    rep.length_pass = std::abs(in.length_fit.exponent - rep.target_length_exponent) <= rep.tolerance;
    rep.pass = rep.time_pass && rep.length_pass;
    rep.hypothesis = in.hypothesis;
    if (!in.hypothesis.holds && in.layer_size)
        rep.non_self_similar_bound = non_self_similar_bound(in.curve, in.dimension, in.epsilon, in.r_omega, in.layer_size);
    return rep;
}

} // namespace flights
