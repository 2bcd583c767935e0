#include "doctest.h"
#include "helpers.hpp"

#include "spinclt/linalg.hpp"

using namespace spinclt;

TEST_CASE("expm matches eigendecomposition for i*Hermitian across Pade branches") {
    std::mt19937_64 rng(11);
    for (double scale : {1e-3, 0.05, 0.4, 1.5, 4.0, 40.0}) {
        const CMatrix h = testing::random_hermitian(rng, 7, scale);
        const CMatrix viaPade = linalg::expm(kI * h);
        const CMatrix viaEig = linalg::expm_i_hermitian(h);
        CHECK(linalg::max_abs_diff(viaPade, viaEig) < 1e-12);
    }
}

TEST_CASE("expm of a nilpotent matrix is the truncated series") {
    CMatrix n = CMatrix::Zero(3, 3);
    n(0, 1) = 2.0;
    n(1, 2) = 3.0;
    CMatrix expected = CMatrix::Identity(3, 3) + n + 0.5 * n * n;
    CHECK(linalg::max_abs_diff(linalg::expm(n), expected) < 1e-14);
}

TEST_CASE("expm of a diagonal matrix") {
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 10.0;
    d(1, 1) = cplx(-1.0, 2.0);
    const CMatrix e = linalg::expm(d);
    CHECK(std::abs(e(0, 0) - std::exp(10.0)) < 1e-12 * std::exp(10.0));
    CHECK(std::abs(e(1, 1) - std::exp(cplx(-1.0, 2.0))) < 1e-14);
}

TEST_CASE("op_norm and kron") {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 1) = 3.0;
    a(1, 0) = 4.0;
    CHECK(linalg::op_norm(a) == doctest::Approx(4.0));
    const CMatrix k = linalg::kron(a, CMatrix::Identity(2, 2));
    CHECK(k.rows() == 4);
    CHECK(k(0, 2) == cplx(3.0));
    CHECK(k(3, 1) == cplx(4.0));
    CHECK(linalg::op_norm(k) == doctest::Approx(4.0));
}

TEST_CASE("apply_kron matches the assembled Kronecker product") {
    std::mt19937_64 rng(17);
    const std::vector<CMatrix> factors{testing::random_hermitian(rng, 3), testing::random_hermitian(rng, 2),
                                       testing::random_hermitian(rng, 4)};
    CVector psi(24);
    for (int i = 0; i < 24; ++i) psi[i] = cplx(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1));
    const CVector direct = linalg::kron_all(std::span<const CMatrix>(factors)) * psi;
    CHECK((linalg::apply_kron(factors, psi) - direct).norm() < 1e-13);
}
