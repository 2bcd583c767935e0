#pragma once

#include "spinclt/fit.hpp"
#include "spinclt/fock.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spinclt {

using Coupling = Eigen::Matrix3d;

/// H = - sum_{x,y} sum_{ij} h_ij(x,y) S^i_x S^j_y - J sum_x g(x).S_x
class SpinHamiltonianSpec {
public:
    explicit SpinHamiltonianSpec(std::size_t sites);

    std::size_t sites() const noexcept { return sites_; }
    /// Adds to h(x,y).
    SpinHamiltonianSpec& add_pair(std::size_t x, std::size_t y, const Coupling& h);
    SpinHamiltonianSpec& set_field(std::size_t x, const Vec3& g);
    SpinHamiltonianSpec& set_uniform_field(const Vec3& g);

    const Coupling& coupling(std::size_t x, std::size_t y) const { return h_.at(x * sites_ + y); }
    const Vec3& field(std::size_t x) const { return g_.at(x); }

private:
    std::size_t sites_;
    std::vector<Coupling> h_;
    std::vector<Vec3> g_;
};

/// Dense H_{J,Lambda} in the S^3-diagonal product basis.
CMatrix hamiltonian_matrix(const SpinHamiltonianSpec& spec, HalfInt j, std::size_t budget = kDefaultDimensionBudget);

/// Couplings in the frames {f^i_x}, plus their ladder combinations.
struct RotatedCoefficients {
    struct Violation {
        /// "h_i3 row", "h_3i row", "h_--", "g_i"
        std::string kind;
        int component = 0;
        std::size_t site = 0;
        double value = 0.0;
    };

    std::size_t sites = 0;
    std::vector<Direction> directions;
    std::vector<Coupling> h;
    std::vector<Vec3> g;
    /// coefficients of S~^-_x S~^+_y, S~^+_x S~^-_y and S~^-_x S~^-_y
    std::vector<cplx> h_mp, h_pm, h_mm;

    std::vector<Violation> violations;
    /// max over the probed spins of ||H Omega - <H> Omega||, empty when no probe fit the budget
    std::optional<double> residual;
    bool admissible = false;

    double h33(std::size_t x, std::size_t y) const { return h.at(x * sites + y)(2, 2); }
    cplx mp(std::size_t x, std::size_t y) const { return h_mp.at(x * sites + y); }
    cplx pm(std::size_t x, std::size_t y) const { return h_pm.at(x * sites + y); }
};

inline constexpr double kEigenResidualTolerance = 1e-10;

/// Frame rotation and the coherent-eigenstate conditions. Violations are reported, not
/// thrown. Admissible means no violation and an eigenvector residual below 1e-10 (scaled
/// by the coupling size) at every probe spin 2J = 1, 2 that fits the budget.
RotatedCoefficients rotate_hamiltonian(const SpinHamiltonianSpec& spec, std::span<const Direction> directions,
                                       std::size_t budget = kDefaultDimensionBudget);

struct RenormalizedHamiltonian {
    HalfInt spin{1};
    CMatrix matrix;
    /// <Omega|H|Omega>, subtracted from the raw matrix
    double shift = 0.0;
    /// ||H Omega|| after the shift
    double residual = 0.0;
    double min_eigenvalue = 0.0;
    bool positive_semidefinite = false;
};

/// H_J - <Omega|H_J|Omega>, with the eigenvector residual and a positivity report.
RenormalizedHamiltonian renormalize(const SpinHamiltonianSpec& spec, const RotatedCoefficients& rotated, HalfInt j,
                                    std::size_t budget = kDefaultDimensionBudget);

/// (Hv)_x = [E(x) + g~3(x)] v_x - 2 sum_y [h~-+(x,y) + h~+-(y,x)] v_y
CMatrix one_particle_operator(const RotatedCoefficients& rotated);

struct BosonLimit {
    CMatrix one_particle;
    /// normal-ordered second quantization of one_particle on the given Fock space
    CMatrix fock;
};

BosonLimit build_boson_limit(const RotatedCoefficients& rotated, const FockSpace& fock);

/// -(1/J) sum h~33(x,y) n_x n_y on the Fock space.
CMatrix quartic_remainder(const RotatedCoefficients& rotated, const FockSpace& fock, HalfInt j);

struct SpectralRow {
    HalfInt spin{1};
    int level = 0;
    double spin_value = 0.0;
    double boson_value = 0.0;
    double error = 0.0;
};

struct SpectralTable {
    std::vector<SpectralRow> rows;
    std::vector<double> boson_levels;
    /// per J, number of spin eigenvalues within 1e-9 of the ground value
    std::vector<int> ground_degeneracy;
    /// per level, fit of error against J (invalid when the errors vanish)
    std::vector<PowerFit> fits;
    /// per level, errors non-increasing along the J list
    std::vector<bool> monotone;
};

/// Lowest m eigenvalues of (1/J)H_J against those of H~ on sectors <= m.
SpectralTable spectral_compare(const SpinHamiltonianSpec& spec, const RotatedCoefficients& rotated,
                               std::span<const HalfInt> spins, int m, std::size_t budget = kDefaultDimensionBudget);

/// v~^t = int_0^t e^{isH} v~ ds
CVector evolved_tangent(const CMatrix& h, const CVector& v, double t);
/// -(1/2) int_0^t sigma(v~, v~^s) ds
double evolution_phase(const CMatrix& h, const CVector& v, double t);
/// e^{i theta} e^{iF(v~^t)} Omega~ on `fock`.
CVector boson_prediction(const CMatrix& h, const CVector& v, double t, const FockSpace& fock);

struct EvolutionRow {
    double time = 0.0;
    HalfInt spin{1};
    double fidelity = 0.0;
    /// boson norm lost to the n_x <= 2J restriction
    double truncation = 0.0;
};

struct EvolutionTable {
    std::vector<EvolutionRow> rows;
    /// max over rows of (1 - fidelity) J
    double constant = 0.0;
    /// per time, fidelity non-decreasing along the J list
    std::vector<bool> monotone;
    /// max |(v~^{t+h} - v~^{t-h})/2h - e^{itH} v~| over the time grid, h = 1e-4
    double derivative_defect = 0.0;
};

EvolutionTable perturbed_evolution(const SpinHamiltonianSpec& spec, const RotatedCoefficients& rotated,
                                   const Vec3Field& v, std::span<const double> times, std::span<const HalfInt> spins,
                                   std::size_t budget = kDefaultDimensionBudget);

}  // namespace spinclt
