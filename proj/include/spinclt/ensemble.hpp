#pragma once

#include "spinclt/fock.hpp"

#include <vector>

namespace spinclt {

/// N independent spin-1/2 copies, each in the coherent state along u.
struct EnsembleConfig {
    int n = 1;
    Direction u;
};

inline constexpr int kMaxEnsembleSites = 10;

struct CollectiveChar {
    /// omega(exp((i/2) v.sigma))^N from the 2x2 matrix exponential
    cplx product{0.0, 0.0};
    /// closed form at J = N/2 on one site
    cplx collective{0.0, 0.0};
};

CollectiveChar collective_char_routes(const EnsembleConfig& config, const Vec3& v);
/// omega_N(exp(i v.S_N)); throws std::logic_error if the two routes differ by more than 1e-12.
cplx collective_char(const EnsembleConfig& config, const Vec3& v);

/// F_N(v) = N^{-1/2} sum_i [v.sigma_i - omega(v.sigma)] on (C^2)^{(x)N}. Requires N <= 10.
CMatrix ensemble_fluctuation(const EnsembleConfig& config, const Vec3& v, std::size_t budget = kDefaultDimensionBudget);
/// The same operator as F_J(v) at J = N/2 on a single site.
CMatrix collective_fluctuation(const EnsembleConfig& config, const Vec3& v, std::size_t budget = kDefaultDimensionBudget);

struct EnsembleCheck {
    /// max over all words of length <= max_order in the fields
    double moment_difference = 0.0;
    int words = 0;
    /// convergence checks at J = N/2 on the collective route
    std::vector<BoundReport> reports;
};

/// Mixed moments of the two representations up to `max_order`, then the single-site
/// convergence checks at J = N/2.
EnsembleCheck ensemble_fluctuation_check(const EnsembleConfig& config, std::span<const Vec3> fields, int max_order = 4,
                                         std::size_t budget = kDefaultDimensionBudget);

struct KuperbergTable {
    std::vector<int> n;
    std::vector<cplx> values;
    cplx limit{0.0, 0.0};
    int limit_cap = 0;
    bool limit_converged = false;
    std::vector<double> differences;
    /// first index from which the differences are non-increasing
    std::size_t monotone_from = 0;
    bool tail_monotone() const noexcept { return monotone_from <= differences.size() / 2; }
};

/// omega_N(exp(i p[F_N(v_1), ..., F_N(v_k)])) over `ns` against the one-mode Fock value.
KuperbergTable kuperberg_clt(const Direction& u, const NoncommPoly& p, std::span<const Vec3> fields,
                             std::span<const int> ns, int cap = 40, std::size_t budget = kDefaultDimensionBudget);

}  // namespace spinclt
