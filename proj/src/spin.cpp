#include "spinclt/spin.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace spinclt {

const CMatrix& SpinMatrices::component(int i) const {
    switch (i) {
        case 0: return s1;
        case 1: return s2;
        case 2: return s3;
        default: throw std::out_of_range("SpinMatrices::component: index must be 0, 1 or 2");
    }
}

CMatrix SpinMatrices::along(const Vec3& v) const { return v[0] * s1 + v[1] * s2 + v[2] * s3; }

SpinMatrices spin_matrices(HalfInt j) {
    const int d = j.dim();
    const double jj = j.value();
    SpinMatrices s;
    s.s3 = CMatrix::Zero(d, d);
    s.plus = CMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = jj - k;
        s.s3(k, k) = m;
        // S^+ |m> = sqrt(J(J+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
        if (k > 0) s.plus(k - 1, k) = std::sqrt(jj * (jj + 1.0) - m * (m + 1.0));
    }
    s.minus = s.plus.adjoint();
    s.s1 = 0.5 * (s.plus + s.minus);
    s.s2 = (s.plus - s.minus) / (2.0 * kI);
    return s;
}

CVector coherent_vector(HalfInt j, const Direction& u) {
    const int two_j = j.twice();
    const double c = std::cos(0.5 * u.theta());
    const double s = std::sin(0.5 * u.theta());
    CVector out(two_j + 1);
    double binom = 1.0;  // C(2J, k)
    for (int k = 0; k <= two_j; ++k) {
        // index k <-> m = J - k, so J + m = 2J - k and J - m = k
        if (k > 0) binom *= static_cast<double>(two_j - k + 1) / k;
        const double mag = std::sqrt(binom) * std::pow(c, two_j - k) * std::pow(s, k);
        out[k] = mag * std::exp(kI * (k * u.phi()));
    }
    return out;
}

CMatrix coherent_rotation(HalfInt j, const Direction& u) {
    const SpinMatrices s = spin_matrices(j);
    const CMatrix gen =
        0.5 * u.theta() * (s.minus * std::exp(kI * u.phi()) - s.plus * std::exp(-kI * u.phi()));
    return linalg::expm(gen);
}

const Vec3& RotatedFrame::axis(int i) const {
    switch (i) {
        case 0: return f1;
        case 1: return f2;
        case 2: return f3;
        default: throw std::out_of_range("RotatedFrame::axis: index must be 0, 1 or 2");
    }
}

RotatedFrame rotated_frame(const Direction& u) {
    const double ct = std::cos(u.theta()), st = std::sin(u.theta());
    const double cp = std::cos(u.phi()), sp = std::sin(u.phi());
    RotatedFrame f;
    f.f1 = {ct * cp, ct * sp, -st};
    f.f2 = {-sp, cp, 0.0};
    f.f3 = {st * cp, st * sp, ct};
    return f;
}

SpinMatrices rotated_spin_ops(HalfInt j, const Direction& u) {
    const SpinMatrices s = spin_matrices(j);
    const RotatedFrame f = rotated_frame(u);
    SpinMatrices r;
    r.s1 = s.along(f.f1);
    r.s2 = s.along(f.f2);
    r.s3 = s.along(f.f3);
    r.plus = r.s1 + kI * r.s2;
    r.minus = r.s1 - kI * r.s2;
    return r;
}

CMatrix spin_wave_basis(HalfInt j, const Direction& u) {
    const int two_j = j.twice();
    const SpinMatrices r = rotated_spin_ops(j, u);
    CMatrix basis(two_j + 1, two_j + 1);
    basis.col(0) = coherent_vector(j, u);
    for (int n = 0; n < two_j; ++n) {
        // ||S~^- phi_n|| = sqrt((n+1)(2J-n))
        basis.col(n + 1) = r.minus * basis.col(n) / std::sqrt(static_cast<double>((n + 1) * (two_j - n)));
    }
    return basis;
}

double TangentField::norm2_squared() const {
    double acc = 0.0;
    for (const auto& p : plus) acc += std::norm(p);
    return acc;
}

double TangentField::norm2() const { return std::sqrt(norm2_squared()); }

TangentField TangentField::operator+(const TangentField& other) const {
    if (other.size() != size()) throw ContractViolation("TangentField: size mismatch in addition");
    TangentField out = *this;
    for (std::size_t x = 0; x < size(); ++x) {
        out.plus[x] += other.plus[x];
        out.axial[x] += other.axial[x];
    }
    return out;
}

TangentField TangentField::operator-() const {
    TangentField out = *this;
    for (auto& p : out.plus) p = -p;
    for (auto& a : out.axial) a = -a;
    return out;
}

TangentField TangentField::zeros(std::size_t n) {
    TangentField t;
    t.plus.assign(n, cplx{0.0, 0.0});
    t.axial.assign(n, 0.0);
    return t;
}

TangentField project_tangent(const Vec3Field& v, std::span<const Direction> directions) {
    if (v.size() != directions.size()) {
        throw ContractViolation("project_tangent: field and direction lists differ in length");
    }
    TangentField t = TangentField::zeros(v.size());
    for (std::size_t x = 0; x < v.size(); ++x) {
        const RotatedFrame f = rotated_frame(directions[x]);
        t.plus[x] = cplx{dot(f.f1, v[x]), dot(f.f2, v[x])};
        t.axial[x] = dot(f.f3, v[x]);
    }
    return t;
}

cplx inner(const TangentField& a, const TangentField& b) {
    if (a.size() != b.size()) throw ContractViolation("inner: size mismatch");
    cplx acc{0.0, 0.0};
    for (std::size_t x = 0; x < a.size(); ++x) acc += std::conj(a.plus[x]) * b.plus[x];
    return acc;
}

double symplectic_form(const TangentField& a, const TangentField& b) { return 2.0 * inner(a, b).imag(); }

SpinSystem::SpinSystem(std::size_t sites, HalfInt j, std::size_t budget)
    : sites_(sites), j_(j), dim_(1), local_(spin_matrices(j)) {
    if (sites == 0) throw ContractViolation("SpinSystem: at least one site required");
    const std::size_t d = static_cast<std::size_t>(j.dim());
    for (std::size_t i = 0; i < sites; ++i) {
        // saturate instead of overflowing; anything this large fails the budget anyway
        dim_ = dim_ > SIZE_MAX / d ? SIZE_MAX : dim_ * d;
    }
    check_budget(dim_, budget,
                 "spin lattice (2J+1)^sites with 2J+1=" + std::to_string(d) + ", sites=" + std::to_string(sites));
}

CMatrix SpinSystem::embed(const CMatrix& op, std::size_t site) const {
    const Eigen::Index d = j_.dim();
    if (op.rows() != d || op.cols() != d) throw ContractViolation("SpinSystem::embed: operator has wrong dimension");
    if (site >= sites_) throw ContractViolation("SpinSystem::embed: site index out of range");
    Eigen::Index left = 1, right = 1;
    for (std::size_t i = 0; i < site; ++i) left *= d;
    for (std::size_t i = site + 1; i < sites_; ++i) right *= d;
    CMatrix out = linalg::kron(CMatrix::Identity(left, left), op);
    return linalg::kron(out, CMatrix::Identity(right, right));
}

CMatrix SpinSystem::sum_field_operator(const Vec3Field& v) const {
    if (v.size() != sites_) throw ContractViolation("sum_field_operator: field size differs from site count");
    CMatrix out = CMatrix::Zero(dim_, dim_);
    for (std::size_t x = 0; x < sites_; ++x) {
        if (length(v[x]) == 0.0) continue;
        out += embed(local_.along(v[x]), x);
    }
    return out;
}

}  // namespace spinclt
