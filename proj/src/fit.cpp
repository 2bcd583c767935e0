#include "spinclt/fit.hpp"

#include "spinclt/types.hpp"

#include <cmath>
#include <vector>

namespace spinclt {

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ContractViolation("fit_power_law: x and y differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    PowerFit fit;
    fit.points = static_cast<int>(lx.size());
    if (fit.points < 2) return fit;
    const double n = fit.points;
    double mx = 0, my = 0;
    for (int i = 0; i < fit.points; ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (int i = 0; i < fit.points; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) {
        fit.points = 1;  // all x equal, no slope
        return fit;
    }
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.prefactor = std::exp(intercept);
    double ss = 0;
    for (int i = 0; i < fit.points; ++i) {
        const double r = ly[i] - (intercept + fit.exponent * lx[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

bool monotone_decreasing(std::span<const double> y, std::size_t from, double slack) {
    for (std::size_t i = from + 1; i < y.size(); ++i) {
        if (y[i] > y[i - 1] * (1.0 + slack)) return false;
    }
    return true;
}

}  // namespace spinclt
