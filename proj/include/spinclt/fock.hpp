#pragma once

#include "spinclt/correlators.hpp"
#include "spinclt/polynomial.hpp"

#include <functional>
#include <random>
#include <span>
#include <vector>

namespace spinclt {

/// Bosonic Fock space with every site truncated at occupation `cap`. Basis vectors are
/// occupation tuples in mixed radix cap+1, site 0 most significant (same order as the
/// spin lattice).
class FockSpace {
public:
    FockSpace(std::size_t sites, int cap, std::size_t budget = kDefaultDimensionBudget);

    std::size_t sites() const noexcept { return sites_; }
    int cap() const noexcept { return cap_; }
    Eigen::Index dim() const noexcept { return dim_; }

    const std::vector<int>& occupations(Eigen::Index i) const { return occ_.at(i); }
    int total(Eigen::Index i) const { return total_.at(i); }
    Eigen::Index index(std::span<const int> n) const;

    /// Annihilation operator on site x; creation is its adjoint.
    const CMatrix& a(std::size_t x) const { return a_.at(x); }
    CMatrix adag(std::size_t x) const { return a_.at(x).adjoint(); }
    CMatrix number(std::size_t x) const;

    CVector vacuum() const;
    CVector basis_vector(std::span<const int> n) const;

    /// Diagonal of g_J(n_x)^{1/2} and of P_J (all n_y <= 2J).
    RVector g_sqrt_diag(HalfInt j, std::size_t x) const;
    RVector projector_diag(HalfInt j) const;

    /// Norm of the component supported on states with some n_x = cap.
    double cap_leakage(const CVector& psi) const;
    /// Norm of the component outside total occupation n.
    double off_sector_norm(const CVector& psi, int n) const;

private:
    std::size_t sites_;
    int cap_;
    Eigen::Index dim_;
    std::vector<std::vector<int>> occ_;
    std::vector<int> total_;
    std::vector<CMatrix> a_;
};

/// g_J(n) = 1 - n/(2J) for n <= 2J, 0 beyond.
double g_factor(HalfInt j, int n);

/// Fock vector supported on total occupation n.
struct SectorVector {
    CVector vec;
    int n = 0;
};

/// Gaussian random coefficients on sector n, normalized.
SectorVector random_sector_vector(const FockSpace& fock, int n, std::mt19937_64& rng);
/// Tags `psi` with sector n after checking its support (tolerance 1e-12 relative).
SectorVector make_sector_vector(const FockSpace& fock, const CVector& psi, int n);

/// F(v~) = sum_x v~+_x a*_x + v~-_x a_x
CMatrix boson_field(const TangentField& t, const FockSpace& fock);

/// Fock images of S~^-/sqrt(2J), S~^+/sqrt(2J) and J - S~^3 per site.
struct DysonSpinOps {
    std::vector<CMatrix> lower;
    std::vector<CMatrix> raise;
    std::vector<CMatrix> number;
};

DysonSpinOps dyson_spin_ops(HalfInt j, const FockSpace& fock);

/// P_J {sum v~+ a* g^{1/2} + v~- g^{1/2} a - sqrt(2/J) v~3 n} P_J
CMatrix dyson_fluctuation(const Vec3Field& v, const CoherentState& state, const FockSpace& fock);

/// Kronecker product of the per-site spin-wave bases; column k is phi_{n(k)} with n(k)
/// the radix-(2J+1) digits of k.
CMatrix spin_wave_frame(const CoherentState& state, std::size_t budget = kDefaultDimensionBudget);
CVector spin_to_fock(const CVector& psi, const CoherentState& state, const FockSpace& fock);
CVector fock_to_spin(const CVector& phi, const CoherentState& state, const FockSpace& fock);
/// Spin operator written in the phi basis and placed in the n_x <= 2J block of the Fock space.
CMatrix spin_operator_to_fock(const CMatrix& op, const CoherentState& state, const FockSpace& fock);

/// ||F(v~) psi_n|| <= 2 |v~|_2 (n+1)^{1/2} ||psi_n||
BoundReport petz_bound_check(const TangentField& t, const SectorVector& psi, const FockSpace& fock);
/// ||F_J(v) psi_n|| <= 4 |v|_1 (n+1)^{1/2} ||psi_n||, requires 2J > n
BoundReport petzJ_bound_check(const Vec3Field& v, const CoherentState& state, const SectorVector& psi,
                              const FockSpace& fock);
/// ||[F(v~) - F_J(v)] psi_n|| <= 4 |v|_1 n (2J)^{-1/2} ||psi_n||, requires 2J > n+1
BoundReport convergence_single(const Vec3Field& v, const CoherentState& state, const SectorVector& psi,
                               const FockSpace& fock);
/// Product version, factors applied right to left, requires 2J > n+k.
BoundReport convergence_product(std::span<const Vec3Field> fields, const CoherentState& state,
                                const SectorVector& psi, const FockSpace& fock);

/// |omega(prod F_J(v_j)) - omega~(prod F(v~_j))| against the moments envelope, requires 2J > k.
BoundReport moments_check(std::span<const Vec3Field> fields, const CoherentState& state,
                          std::size_t budget = kDefaultDimensionBudget);

struct BosonPolyValue {
    cplx value{0.0, 0.0};
    int cap = 0;
    double leakage = 0.0;
    /// |value(cap) - value(previous cap)|
    double change = 0.0;
    bool converged = false;
};

/// omega~(exp(i p[F(v~_1), ..., F(v~_k)])), raising the cap in steps of `step` until two
/// successive values differ by less than `tol`.
BosonPolyValue poly_char_boson(const NoncommPoly& p, std::span<const TangentField> fields, int initial_cap = 20,
                               double tol = 1e-8, int step = 10, std::size_t budget = kDefaultDimensionBudget);

/// f(A) psi for Hermitian A through its eigendecomposition.
CVector spectral_function_apply(const std::function<double(double)>& f, const CMatrix& op, const CVector& psi);

/// Atoms and weights of the spectral measure of a Hermitian operator in a vector state.
struct SpectralMeasure {
    std::vector<double> atoms;
    std::vector<double> weights;
};

SpectralMeasure spectral_measure(const CMatrix& op, const CVector& psi);
/// sup_x |mu((-inf, x]) - Phi(x / sigma)| with Phi the standard normal CDF.
double kolmogorov_to_gaussian(const SpectralMeasure& mu, double sigma);

}  // namespace spinclt
