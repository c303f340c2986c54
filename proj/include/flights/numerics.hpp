#pragma once

#include <Eigen/Dense>

#include <span>

namespace flights {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = x[static_cast<std::size_t>(i)];
        rhs[i] = y[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd residual = rhs - design * coef;
    const double centered = (rhs.array() - rhs.mean()).square().sum();
    LineFit fit;
    fit.intercept = coef[0];
    fit.slope = coef[1];
    fit.r_squared = centered > 0.0 ? 1.0 - residual.squaredNorm() / centered : 1.0;
    return fit;
}

} // namespace flights
