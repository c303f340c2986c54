#include "flights/oracles.hpp"

#include "flights/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace flights {

namespace {

void validate(const IntervalSurvivalQuery& q, int n_terms) {
    if (!(q.a > 0.0) || !std::isfinite(q.a)) throw PreconditionError("interval length must be positive");
    if (!(q.x > 0.0 && q.x < q.a)) throw PreconditionError("start must lie strictly inside (0, a)");
    if (!(q.t >= 0.0) || !std::isfinite(q.t)) throw PreconditionError("time must be finite and >= 0");
    if (n_terms < 1) throw PreconditionError("n_terms must be >= 1, got " + std::to_string(n_terms));
}

} // namespace

double gaussian_mass(double lo, double hi) {
    constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    if (lo >= 0.0) return 0.5 * (std::erfc(lo * inv_sqrt2) - std::erfc(hi * inv_sqrt2));
    if (hi <= 0.0) return 0.5 * (std::erfc(-hi * inv_sqrt2) - std::erfc(-lo * inv_sqrt2));
    return 1.0 - 0.5 * std::erfc(-lo * inv_sqrt2) - 0.5 * std::erfc(hi * inv_sqrt2);
}

double interval_survival_reflection(const IntervalSurvivalQuery& q, int n_terms) {
    validate(q, n_terms);
    if (q.t == 0.0) return 1.0;
    const double s = std::sqrt(q.t);
    // Killed transition density sum_k [phi(y - x - 2ka) - phi(y + x - 2ka)]
    // integrated over y in (0, a).
    double sum = 0.0;
    for (int k = -n_terms; k <= n_terms; ++k) {
        const double shift = 2.0 * k * q.a;
        const double direct = gaussian_mass((-q.x - shift) / s, (q.a - q.x - shift) / s);
        const double image = gaussian_mass((q.x - shift) / s, (q.a + q.x - shift) / s);
        sum += direct - image;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double interval_survival_eigen(const IntervalSurvivalQuery& q, int n_terms) {
    validate(q, n_terms);
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int n = 0; n < n_terms; ++n) {
        const double m = 2.0 * n + 1.0;
        sum += std::exp(-m * m * pi * pi * q.t / (2.0 * q.a * q.a)) * std::sin(m * pi * q.x / q.a) / m;
    }
    return std::clamp(4.0 / pi * sum, 0.0, 1.0);
}

double interval_survival(const IntervalSurvivalQuery& q, int n_terms) {
    return q.t <= q.a * q.a ? interval_survival_reflection(q, n_terms) : interval_survival_eigen(q, n_terms);
}

double cube_survival(double side, int d, double t, int n_terms) {
    if (d < 1) throw PreconditionError("cube_survival: dimension must be >= 1");
    const double p = interval_survival({side / 2.0, side, t}, n_terms);
    return std::pow(p, d);
}

} // namespace flights
