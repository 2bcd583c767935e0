#pragma once

#include <span>

namespace spinclt {

/// Least-squares fit of log y = log c + p log x.
struct PowerFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    /// root-mean-square residual in log space
    double residual = 0.0;
    int points = 0;
    bool valid() const noexcept { return points >= 2; }
};

/// Points with non-positive x or y are skipped (exact zeros carry no rate information).
PowerFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// True if y is non-increasing from index `from` on, allowing `slack` relative upticks.
bool monotone_decreasing(std::span<const double> y, std::size_t from = 0, double slack = 0.0);

}  // namespace spinclt
