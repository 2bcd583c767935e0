#pragma once

#include "spinclt/linalg.hpp"
#include "spinclt/spin.hpp"
#include "spinclt/types.hpp"

#include <vector>

namespace spinclt {

/// Product of spin-J coherent states, one direction per site.
class CoherentState {
public:
    CoherentState(std::vector<Direction> directions, HalfInt j);
    static CoherentState uniform(std::size_t sites, const Direction& u, HalfInt j);

    std::size_t sites() const noexcept { return directions_.size(); }
    HalfInt spin() const noexcept { return j_; }
    const std::vector<Direction>& directions() const noexcept { return directions_; }
    const CVector& site_vector(std::size_t x) const { return site_vectors_.at(x); }

    /// Omega_J as a vector in the Kronecker-ordered lattice space.
    CVector product_vector(std::size_t budget = kDefaultDimensionBudget) const;
    /// <Omega|A|Omega> for a lattice operator of matching dimension.
    cplx expectation(const CMatrix& op) const;

    TangentField tangent(const Vec3Field& v) const { return project_tangent(v, directions_); }

private:
    std::vector<Direction> directions_;
    HalfInt j_;
    std::vector<CVector> site_vectors_;
};

/// omega(exp(i sum_x v_x.S_x)) from the per-site product formula.
cplx char_closed_form(const Vec3Field& v, const CoherentState& state);

/// omega(exp(i t F_J(v))) from the same product formula with the mean phase removed.
cplx fluctuation_char(const Vec3Field& v, const CoherentState& state, double t = 1.0);

/// J sum_x v_x.u_x
double mean(const Vec3Field& v, const CoherentState& state);

/// sum_x [v.w - (v.u)(w.u) + i (v x w).u], the two-point function of the fluctuations.
cplx covariance(const Vec3Field& v, const Vec3Field& w, const CoherentState& state);

/// |omega(exp((i/J) sum v.S)) - exp(i sum v.u)| against (1/J) exp(|v|_1 + 2 exp(|v|_1)).
BoundReport classical_limit_check(const Vec3Field& v, const CoherentState& state);

struct CumulantValue {
    int order = 0;
    double value = 0.0;
    /// 2^{k/2} |v|_2^k / J^{k/2 - 1}
    double bound = 0.0;
    BoundReport report;
};

/// The displayed closed-form expression for the k-point truncated function of F_J(v).
/// Coincides with the true cumulant for k <= 3; see exact_cumulant for higher orders.
CumulantValue truncated_cumulant(int k, const Vec3Field& v, const CoherentState& state);

/// k-th cumulant of F_J(v) in the product state, from the per-site two-point spectral
/// law via the moment-cumulant recursion.
double exact_cumulant(int k, const Vec3Field& v, const CoherentState& state);

}  // namespace spinclt
