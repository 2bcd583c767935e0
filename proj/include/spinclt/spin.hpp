#pragma once

#include "spinclt/linalg.hpp"
#include "spinclt/types.hpp"

#include <span>
#include <vector>

namespace spinclt {

/// Spin-J matrices in the S^3-diagonal basis. Basis index k holds m = J - k, so
/// index 0 is the highest-weight vector |J>.
struct SpinMatrices {
    CMatrix s1, s2, s3;
    CMatrix plus, minus;

    const CMatrix& component(int i) const;
    /// v . S = v^1 S^1 + v^2 S^2 + v^3 S^3.
    CMatrix along(const Vec3& v) const;
};

SpinMatrices spin_matrices(HalfInt j);

/// Coherent vector |(theta, phi)> from its binomial expansion.
CVector coherent_vector(HalfInt j, const Direction& u);

/// U = exp[(theta/2)(S^- e^{i phi} - S^+ e^{-i phi})]; U|J> is the coherent vector.
CMatrix coherent_rotation(HalfInt j, const Direction& u);

/// Orthonormal right-handed triad with f3 = u.
struct RotatedFrame {
    Vec3 f1, f2, f3;
    const Vec3& axis(int i) const;
};

RotatedFrame rotated_frame(const Direction& u);

/// S~^i = f^i . S and S~^{+-} = S~^1 +- i S~^2.
SpinMatrices rotated_spin_ops(HalfInt j, const Direction& u);

/// Orthonormal basis phi_n = (n!)^{-1} C(2J, n)^{-1/2} (S~^-)^n |(theta,phi)>, n = 0..2J,
/// returned as the columns of a (2J+1)x(2J+1) unitary.
CMatrix spin_wave_basis(HalfInt j, const Direction& u);

/// Components of v in the rotated frames: tangential part v~^+ = v~^1 + i v~^2 and
/// axial part v~^3.
struct TangentField {
    std::vector<cplx> plus;
    std::vector<double> axial;

    std::size_t size() const noexcept { return plus.size(); }
    cplx minus(std::size_t x) const { return std::conj(plus[x]); }
    /// |v~|_2 over the tangential components only.
    double norm2() const;
    double norm2_squared() const;

    TangentField operator+(const TangentField& other) const;
    TangentField operator-() const;
    static TangentField zeros(std::size_t n);
};

TangentField project_tangent(const Vec3Field& v, std::span<const Direction> directions);

/// sigma(a, b) = 2 Im <a, b> with <a, b> = sum_x conj(a_x) b_x.
double symplectic_form(const TangentField& a, const TangentField& b);
cplx inner(const TangentField& a, const TangentField& b);

/// Finite lattice of spin-J sites with Kronecker-ordered operator assembly.
class SpinSystem {
public:
    SpinSystem(std::size_t sites, HalfInt j, std::size_t budget = kDefaultDimensionBudget);

    std::size_t sites() const noexcept { return sites_; }
    HalfInt spin() const noexcept { return j_; }
    std::size_t dim() const noexcept { return dim_; }
    const SpinMatrices& local() const noexcept { return local_; }

    /// 1 (x) ... (x) op (x) ... (x) 1 with op in slot `site`.
    CMatrix embed(const CMatrix& op, std::size_t site) const;
    /// sum_x v_x . S_x
    CMatrix sum_field_operator(const Vec3Field& v) const;
    CMatrix identity() const { return CMatrix::Identity(dim_, dim_); }

private:
    std::size_t sites_;
    HalfInt j_;
    std::size_t dim_;
    SpinMatrices local_;
};

}  // namespace spinclt
