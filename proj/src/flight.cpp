#include "flights/flight.hpp"

#include "flights/errors.hpp"
#include "flights/parallel.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace flights {

StepPolicy StepPolicy::defaults(double epsilon, double r_omega) {
    StepPolicy p;
    p.dt_max = r_omega * r_omega / 100.0;
    p.delta_abs = epsilon / 100.0;
    p.t_max = 4.0 * r_omega * r_omega;
    return p;
}

void StepPolicy::validate() const {
    if (!(c_step > 0.0 && c_step < 1.0)) throw ConfigError("policy: c_step must lie in (0, 1)");
    if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw ConfigError("policy: dt_max must be positive");
    if (!(delta_abs > 0.0) || !std::isfinite(delta_abs)) throw ConfigError("policy: delta_abs must be positive");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("policy: t_max must be positive");
}

template <int Dim>
double FlightRecord<Dim>::occupation_within(double s) const {
    double total = 0.0;
    for (const auto& [k, time] : shell_occupation)
        if (std::ldexp(1.0, k) <= s) total += time;
    return total;
}

std::mt19937_64 flight_stream(std::uint64_t seed, std::uint64_t flight_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(flight_id), static_cast<std::uint32_t>(flight_id >> 32),
                      0x6a09e667u};
    return std::mt19937_64(seq);
}

namespace {

// Dense accumulator for dyadic shells; k outside the table spills to a map.
class ShellTally {
public:
    void add(double distance, double dt) {
        const int k = std::ilogb(distance) + 1;
        const int slot = k + kOffset;
        if (slot >= 0 && slot < static_cast<int>(table_.size())) {
            table_[static_cast<std::size_t>(slot)] += dt;
            touched_lo_ = std::min(touched_lo_, slot);
            touched_hi_ = std::max(touched_hi_, slot);
        } else {
            spill_[k] += dt;
        }
    }
    std::map<int, double> finish() const {
        std::map<int, double> out = spill_;
        for (int s = touched_lo_; s <= touched_hi_; ++s)
            if (table_[static_cast<std::size_t>(s)] > 0.0) out[s - kOffset] += table_[static_cast<std::size_t>(s)];
        return out;
    }

private:
    static constexpr int kOffset = 120;
    std::array<double, 160> table_{};
    int touched_lo_ = 160;
    int touched_hi_ = -1;
    std::map<int, double> spill_;
};

enum class WalkEnd { Outside, Bridge, Absorbed, Censored };

template <int Dim>
struct WalkState {
    WalkEnd end = WalkEnd::Censored;
    double tau = 0.0;
    Point<Dim> previous;  // last position strictly inside
    Point<Dim> last;      // position at termination
    double last_distance = 0.0;
};

// Euler stepping of standard Brownian motion with distance-adaptive steps,
// a half-space Brownian-bridge crossing test and an absorption layer.
template <int Dim, class DistanceFn>
WalkState<Dim> walk(const DistanceFn& distance, const Point<Dim>& start, double d0, const StepPolicy& policy,
                    std::mt19937_64& rng, ShellTally* tally) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    WalkState<Dim> state;
    Point<Dim> x = start;
    double d = d0;
    double t = 0.0;
    while (true) {
        double dt = std::min(policy.dt_max, (policy.c_step * d) * (policy.c_step * d));
        bool final_step = false;
        if (t + dt >= policy.t_max) {
            dt = policy.t_max - t;
            final_step = true;
        }
        Point<Dim> step;
        for (int i = 0; i < Dim; ++i) step[i] = normal(rng);
        step *= std::sqrt(dt);
        const Point<Dim> y = x + step;
        const double dy = distance(y, d + step.norm());
        if (!std::isfinite(dy) || !y.allFinite()) throw InternalError("non-finite state in Brownian walk");

        if (tally) tally->add(d, dt);
        t = final_step ? policy.t_max : t + dt;

        WalkEnd end = WalkEnd::Censored;
        bool stop = false;
        if (dy <= 0.0) {
            end = WalkEnd::Outside;
            stop = true;
        } else {
            if (policy.bridge_correction) {
                const double a = 2.0 * d * dy / dt;
                // exp(-a) underflows past 745; skip the draw entirely there.
                if (a < 745.0 && uniform(rng) < std::exp(-a)) {
                    end = WalkEnd::Bridge;
                    stop = true;
                }
            }
            if (!stop && dy < policy.delta_abs) {
                end = WalkEnd::Absorbed;
                stop = true;
            }
        }
        if (!stop && final_step) stop = true;
        if (stop) {
            state.end = end;
            state.tau = t;
            state.previous = x;
            state.last = y;
            state.last_distance = dy;
            return state;
        }
        x = y;
        d = dy;
    }
}

template <int Dim>
Point<Dim> bisect_to_boundary(const Domain<Dim>& domain, Point<Dim> inside, Point<Dim> outside, double tol) {
    Point<Dim> mid = outside;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (inside + outside);
        const double s = domain.signed_distance(mid);
        if (std::abs(s) <= tol) return mid;
        (s > 0.0 ? inside : outside) = mid;
    }
    return mid;
}

// Moves an interior point onto the boundary along the distance gradient.
template <int Dim>
Point<Dim> project_to_boundary(const Domain<Dim>& domain, Point<Dim> p, double s, double tol) {
    for (int it = 0; it < 32 && s > tol; ++it) {
        const double h = std::max(1e-3 * s, 1e-14);
        Point<Dim> grad;
        for (int i = 0; i < Dim; ++i) {
            Point<Dim> e = Point<Dim>::Zero();
            e[i] = h;
            grad[i] = (domain.signed_distance(p + e) - domain.signed_distance(p - e)) / (2.0 * h);
        }
        const double norm = grad.norm();
        if (!(norm > 0.0)) break;
        const Point<Dim> q = p - s * grad / norm;
        const double sq = domain.signed_distance(q);
        if (std::abs(sq) <= tol) return q;
        if (sq < 0.0) return bisect_to_boundary(domain, p, q, tol);
        if (sq >= s) break;
        p = q;
        s = sq;
    }
    return p;
}

} // namespace

template <int Dim>
PathOutcome<Dim> run_path(const Domain<Dim>& domain, const Point<Dim>& start, const StepPolicy& policy,
                          std::mt19937_64& rng) {
    const double d0 = domain.signed_distance(start);
    if (!(d0 > 0.0)) throw PreconditionError("run_path: start point is not inside the domain");
    ShellTally tally;
    auto distance = [&domain](const Point<Dim>& p, double bound) { return domain.signed_distance(p, bound); };
    const WalkState<Dim> state = walk<Dim>(distance, start, d0, policy, rng, &tally);

    PathOutcome<Dim> out;
    out.tau = state.tau;
    out.shell_occupation = tally.finish();
    const double tol = policy.delta_abs / 10.0;
    switch (state.end) {
    case WalkEnd::Censored:
        out.censored = true;
        out.exit_point = state.last;
        break;
    case WalkEnd::Outside:
        out.exit_point = bisect_to_boundary(domain, state.previous, state.last, tol);
        break;
    case WalkEnd::Bridge:
    case WalkEnd::Absorbed:
        out.exit_point = project_to_boundary(domain, state.last, state.last_distance, tol);
        break;
    }
    return out;
}

template <int Dim>
FlightSampler<Dim>::FlightSampler(const Domain<Dim>& domain, const WhitneyDecomposition<Dim>& decomposition,
                                  double epsilon, StepPolicy policy)
    : domain_(&domain), policy_(policy) {
    policy_.validate();
    const double floor_eps = std::ldexp(1.0, decomposition.min_generation() + 3);
    if (!(epsilon >= floor_eps && epsilon < decomposition.inradius_cap()))
        throw PreconditionError("epsilon " + std::to_string(epsilon) + " outside [" + std::to_string(floor_eps) +
                                ", R_Omega)");
    layer_ = layer(decomposition, domain, epsilon);
    if (layer_.empty()) throw PreconditionError("empty layer S_epsilon");
}

template <int Dim>
FlightRecord<Dim> FlightSampler<Dim>::sample(std::uint64_t seed, std::uint64_t flight_id) const {
    std::mt19937_64 rng = flight_stream(seed, flight_id);
    std::uniform_int_distribution<std::size_t> pick(0, layer_.size() - 1);
    FlightRecord<Dim> rec;
    rec.flight_id = flight_id;
    rec.start_cube = layer_[pick(rng)];
    rec.start = rec.start_cube.center();
    PathOutcome<Dim> path = run_path(*domain_, rec.start, policy_, rng);
    rec.tau = path.tau;
    rec.exit_point = path.exit_point;
    rec.censored = path.censored;
    rec.displacement = (rec.exit_point - rec.start).norm();
    rec.shell_occupation = std::move(path.shell_occupation);
    return rec;
}

template <int Dim>
FlightRecord<Dim> sample_flight(const Domain<Dim>& domain, const WhitneyDecomposition<Dim>& decomposition,
                                double epsilon, const StepPolicy& policy, std::uint64_t seed,
                                std::uint64_t flight_id) {
    return FlightSampler<Dim>(domain, decomposition, epsilon, policy).sample(seed, flight_id);
}


template <int Dim>
std::vector<FlightRecord<Dim>> run_campaign(const Domain<Dim>& domain, const WhitneyDecomposition<Dim>& decomposition,
                                            double epsilon, const StepPolicy& policy, std::int64_t n_flights,
                                            std::uint64_t master_seed, int workers) {
    if (n_flights < 1) throw PreconditionError("run_campaign: n_flights must be >= 1");
    if (workers < 1) throw PreconditionError("run_campaign: workers must be >= 1");
    const FlightSampler<Dim> sampler(domain, decomposition, epsilon, policy);
    std::vector<FlightRecord<Dim>> records(static_cast<std::size_t>(n_flights));
    parallel_for(records.size(), workers, [&](std::size_t i) { records[i] = sampler.sample(master_seed, i); });
    return records;
}

template <int Dim>
DeltaRegReport<Dim> estimate_delta_regularity(const Domain<Dim>& domain, const std::vector<Point<Dim>>& points,
                                              int n_paths, const StepPolicy& policy, std::uint64_t seed,
                                              double r_omega) {
    if (n_paths < 1) throw PreconditionError("estimate_delta_regularity: n_paths must be >= 1");
    if (points.empty()) throw PreconditionError("estimate_delta_regularity: no points");
    DeltaRegReport<Dim> report;
    report.lower_bound = 1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point<Dim>& x = points[i];
        const double dx = domain.signed_distance(x);
        if (!(dx > 0.0 && dx < r_omega))
            throw PreconditionError("estimate_delta_regularity: point " + std::to_string(i) +
                                    " must satisfy 0 < d_x < R_Omega");
        StepPolicy local = policy;
        local.delta_abs = std::min(policy.delta_abs, dx / 100.0);
        local.dt_max = std::min(policy.dt_max, dx * dx);
        local.t_max = std::numeric_limits<double>::max();

        const double radius = 2.0 * dx;
        auto distance = [&](const Point<Dim>& p, double) {
            return std::min(domain.signed_distance(p), radius - (p - x).norm());
        };
        std::mt19937_64 rng = flight_stream(seed, i);
        int absorbed = 0;
        for (int path = 0; path < n_paths; ++path) {
            const WalkState<Dim> state = walk<Dim>(distance, x, dx, local, rng, nullptr);
            const Point<Dim>& y = state.last;
            if (domain.signed_distance(y) < radius - (y - x).norm()) ++absorbed;
        }
        HarmonicEstimate<Dim> est;
        est.point = x;
        est.distance = dx;
        est.fraction = double(absorbed) / n_paths;
        est.std_error = std::sqrt(est.fraction * (1.0 - est.fraction) / n_paths);
        report.lower_bound = std::min(report.lower_bound, est.fraction);
        report.points.push_back(est);
    }
    return report;
}

#define FLIGHTS_FLIGHT_INSTANTIATE(D)                                                                              \
    template struct FlightRecord<D>;                                                                               \
    template PathOutcome<D> run_path<D>(const Domain<D>&, const Point<D>&, const StepPolicy&, std::mt19937_64&);   \
    template class FlightSampler<D>;                                                                               \
    template FlightRecord<D> sample_flight<D>(const Domain<D>&, const WhitneyDecomposition<D>&, double,            \
                                              const StepPolicy&, std::uint64_t, std::uint64_t);                    \
    template std::vector<FlightRecord<D>> run_campaign<D>(const Domain<D>&, const WhitneyDecomposition<D>&, double, \
                                                          const StepPolicy&, std::int64_t, std::uint64_t, int);     \
    template DeltaRegReport<D> estimate_delta_regularity<D>(const Domain<D>&, const std::vector<Point<D>>&, int,   \
                                                            const StepPolicy&, std::uint64_t, double);
FLIGHTS_FLIGHT_INSTANTIATE(2)
FLIGHTS_FLIGHT_INSTANTIATE(3)

} // namespace flights
