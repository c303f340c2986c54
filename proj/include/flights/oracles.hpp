#pragma once

namespace flights {

// Brownian motion with per-coordinate variance t started at x in (0, a).
struct IntervalSurvivalQuery {
    double x = 0.5;
    double a = 1.0;
    double t = 0.0;
};

// P(tau_x > t) from the method-of-images series, |k| <= n_terms.
// Returns exactly 1 at t = 0. Throws PreconditionError on invalid queries.
double interval_survival_reflection(const IntervalSurvivalQuery& q, int n_terms);

// P(tau_x > t) from the sine (eigenfunction) series with n_terms terms,
// clamped to [0, 1].
double interval_survival_eigen(const IntervalSurvivalQuery& q, int n_terms);

// Picks the image series for t <= a^2 and the sine series otherwise.
double interval_survival(const IntervalSurvivalQuery& q, int n_terms = 64);

// Survival of the exit time from a cube of the given side started at its
// center: the d-th power of the interval survival from side / 2.
double cube_survival(double side, int d, double t, int n_terms = 64);

// Standard normal mass of [lo, hi], evaluated on the tail side with erfc.
double gaussian_mass(double lo, double hi);

} // namespace flights
