#include "spinclt/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace spinclt::linalg {

namespace {

double norm1(const CMatrix& a) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) best = std::max(best, a.col(j).cwiseAbs().sum());
    return best;
}

// Pade coefficients b_0..b_m and the 1-norm thresholds theta_m for m = 3, 5, 7, 9, 13.
constexpr std::array<double, 4> kPade3{120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                       25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                                        2162160.0,     110880.0,     3960.0,       90.0,        1.0};
constexpr std::array<double, 14> kPade13{64764752532480000.0,
                                         32382376266240000.0,
                                         7771770303897600.0,
                                         1187353796428800.0,
                                         129060195264000.0,
                                         10559470521600.0,
                                         670442572800.0,
                                         33522128640.0,
                                         1323241920.0,
                                         40840800.0,
                                         960960.0,
                                         16380.0,
                                         182.0,
                                         1.0};

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
CMatrix pade_low(const CMatrix& a, const std::array<double, N>& b) {
    const Eigen::Index n = a.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix a2 = a * a;
    CMatrix u_inner = b[1] * id;
    CMatrix v = b[0] * id;
    CMatrix power = id;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * a2;
        v += b[k] * power;
        if (k + 1 < N) u_inner += b[k + 1] * power;
    }
    const CMatrix u = a * u_inner;
    return (v - u).partialPivLu().solve(v + u);
}

CMatrix pade13(const CMatrix& a) {
    const auto& b = kPade13;
    const Eigen::Index n = a.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix a2 = a * a;
    const CMatrix a4 = a2 * a2;
    const CMatrix a6 = a4 * a2;
    const CMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
    const CMatrix u = a * u_inner;
    const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

CMatrix expm(const CMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("expm: square matrix required");
    if (a.size() == 0) return a;
    const double nrm = norm1(a);
    if (nrm <= kTheta3) return pade_low(a, kPade3);
    if (nrm <= kTheta5) return pade_low(a, kPade5);
    if (nrm <= kTheta7) return pade_low(a, kPade7);
    if (nrm <= kTheta9) return pade_low(a, kPade9);
    int s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
    CMatrix r = pade13(a / std::ldexp(1.0, s));
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

CMatrix expm_i_hermitian(const CMatrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const RVector& w = es.eigenvalues();
    CVector phases(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) phases[i] = std::exp(kI * (t * w[i]));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double op_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()[0];
}

double hermiticity_defect(const CMatrix& a) { return (a - a.adjoint()).norm(); }

bool is_hermitian(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.norm());
    return hermiticity_defect(a) <= tol * scale;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CVector kron(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

CMatrix kron_all(std::span<const CMatrix> factors) {
    if (factors.empty()) return CMatrix::Identity(1, 1);
    CMatrix out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

CVector kron_all(std::span<const CVector> factors) {
    if (factors.empty()) return CVector::Ones(1);
    CVector out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

CVector apply_kron(std::span<const CMatrix> factors, const CVector& psi) {
    Eigen::Index total = 1;
    for (const auto& f : factors) {
        if (f.rows() != f.cols()) throw std::invalid_argument("apply_kron: factors must be square");
        total *= f.rows();
    }
    if (total != psi.size()) throw std::invalid_argument("apply_kron: vector length does not match factors");
    CVector cur = psi;
    Eigen::Index left = 1;
    for (const auto& f : factors) {
        const Eigen::Index d = f.rows();
        const Eigen::Index right = total / (left * d);
        CVector next(total);
        // index = (l * d + i) * right + r
        for (Eigen::Index l = 0; l < left; ++l) {
            Eigen::Map<const CMatrix, 0, Eigen::OuterStride<>> in(cur.data() + l * d * right, right, d,
                                                                   Eigen::OuterStride<>(right));
            Eigen::Map<CMatrix, 0, Eigen::OuterStride<>> out(next.data() + l * d * right, right, d,
                                                              Eigen::OuterStride<>(right));
            out.noalias() = in * f.transpose();
        }
        cur.swap(next);
        left *= d;
    }
    return cur;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

RVector eigvalsh(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace spinclt::linalg
