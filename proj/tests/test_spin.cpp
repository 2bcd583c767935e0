#include "doctest.h"
#include "helpers.hpp"

#include "spinclt/spin.hpp"

#include <numbers>

using namespace spinclt;
using std::numbers::pi;

namespace {

double su2_defect(const SpinMatrices& s) {
    double worst = 0.0;
    worst = std::max(worst, linalg::max_abs_diff(linalg::commutator(s.s1, s.s2), kI * s.s3));
    worst = std::max(worst, linalg::max_abs_diff(linalg::commutator(s.s2, s.s3), kI * s.s1));
    worst = std::max(worst, linalg::max_abs_diff(linalg::commutator(s.s3, s.s1), kI * s.s2));
    return worst;
}

}  // namespace

TEST_CASE("spin-1/2 matrices are half the Pauli matrices") {
    const SpinMatrices s = spin_matrices(HalfInt(1));
    CHECK(s.s3(0, 0) == cplx(0.5));
    CHECK(s.s3(1, 1) == cplx(-0.5));
    CHECK(s.s1(0, 1) == cplx(0.5));
    CHECK(s.s1(1, 0) == cplx(0.5));
    CHECK(s.s2(0, 1) == cplx(0.0, -0.5));
    const CMatrix casimir = s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3;
    CHECK(linalg::max_abs_diff(casimir, 0.75 * CMatrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("SU(2) relations and Casimir for every J up to 15/2") {
    for (int tj = 1; tj <= 15; ++tj) {
        const HalfInt j(tj);
        const SpinMatrices s = spin_matrices(j);
        CAPTURE(tj);
        CHECK(su2_defect(s) < 1e-13);
        const CMatrix casimir = s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3;
        const double jj = j.value();
        CHECK(linalg::max_abs_diff(casimir, jj * (jj + 1) * CMatrix::Identity(j.dim(), j.dim())) < 1e-13);
        CHECK(linalg::max_abs_diff(s.plus, s.s1 + kI * s.s2) < 1e-15);
    }
}

TEST_CASE("coherent vector special angles") {
    const HalfInt j(5);
    const CVector north = coherent_vector(j, Direction(0.0, 1.3));
    CHECK(std::abs(north[0] - 1.0) < 1e-15);
    CHECK(north.tail(5).norm() < 1e-15);

    const double phi = 0.9;
    const CVector south = coherent_vector(j, Direction(pi, phi));
    CHECK(std::abs(south[5] - std::exp(kI * (5.0 * phi))) < 1e-14);
    CHECK(south.head(5).norm() < 1e-14);
}

TEST_CASE("coherent expansion equals exponential construction") {
    const HalfInt j(6);
    const Direction u(1.1, 0.7);
    const CVector expansion = coherent_vector(j, u);
    const CVector viaExp = coherent_rotation(j, u).col(0);
    CHECK((expansion - viaExp).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const HalfInt jj(1 + trial % 15);
        const Direction d = testing::random_direction(rng);
        const CVector a = coherent_vector(jj, d);
        CHECK(std::abs(a.norm() - 1.0) < 1e-14);
        CHECK((a - coherent_rotation(jj, d).col(0)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("phi = 2pi normalizes and theta out of range is rejected") {
    CHECK(Direction(0.3, 2 * pi).phi() == 0.0);
    CHECK_THROWS_AS(Direction(-0.1, 0.0), ContractViolation);
    CHECK_THROWS_AS(Direction(pi + 1e-9, 0.0), ContractViolation);
    CHECK_THROWS_AS(HalfInt(0), ContractViolation);
}

TEST_CASE("rotated frame") {
    const RotatedFrame id = rotated_frame(Direction(0.0, 0.0));
    CHECK(id.f1 == Vec3{1, 0, 0});
    CHECK(id.f3 == Vec3{0, 0, 1});

    const RotatedFrame eq = rotated_frame(Direction(pi / 2, 0.0));
    CHECK(std::abs(eq.f3[0] - 1.0) < 1e-15);
    const SpinMatrices r = rotated_spin_ops(HalfInt(3), Direction(pi / 2, 0.0));
    CHECK(linalg::max_abs_diff(r.s3, spin_matrices(HalfInt(3)).s1) < 1e-15);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const RotatedFrame f = rotated_frame(testing::random_direction(rng));
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(std::abs(dot(f.axis(a), f.axis(b)) - (a == b ? 1.0 : 0.0)) < 1e-14);
        const Vec3 c = cross(f.f1, f.f2);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(c[i] - f.f3[i]) < 1e-14);
    }
}

TEST_CASE("rotated spin operators are unitary conjugates and keep SU(2) relations") {
    std::mt19937_64 rng(8);
    for (int tj : {1, 2, 3, 5, 8}) {
        const HalfInt j(tj);
        const Direction u = testing::random_direction(rng);
        const SpinMatrices s = spin_matrices(j);
        const SpinMatrices r = rotated_spin_ops(j, u);
        const CMatrix U = coherent_rotation(j, u);
        CHECK(linalg::max_abs_diff(r.s3, U * s.s3 * U.adjoint()) < 1e-12);
        // U alone fixes f3 only; the in-plane axes need an extra turn about e3 by -phi
        const CMatrix W = U * linalg::expm_i_hermitian(s.s3, -u.phi());
        CHECK(linalg::max_abs_diff(r.s1, W * s.s1 * W.adjoint()) < 1e-12);
        CHECK(linalg::max_abs_diff(r.s2, W * s.s2 * W.adjoint()) < 1e-12);
        CHECK(su2_defect(r) < 1e-13);
        const CVector omega = coherent_vector(j, u);
        CHECK((r.s3 * omega - j.value() * omega).norm() < 1e-12);
    }
}

TEST_CASE("spin-wave basis is orthonormal and equals e^{i n phi} U|J-n>") {
    std::mt19937_64 rng(21);
    for (int tj : {1, 2, 4, 7}) {
        const HalfInt j(tj);
        const Direction u = testing::random_direction(rng);
        const CMatrix phi = spin_wave_basis(j, u);
        CHECK(linalg::max_abs_diff(phi.adjoint() * phi, CMatrix::Identity(tj + 1, tj + 1)) < 1e-12);
        CMatrix expected = coherent_rotation(j, u);
        for (int n = 0; n <= tj; ++n) expected.col(n) *= std::exp(kI * (n * u.phi()));
        CHECK(linalg::max_abs_diff(phi, expected) < 1e-12);
        CHECK((phi.col(0) - coherent_vector(j, u)).norm() < 1e-12);
    }
}

TEST_CASE("project_tangent") {
    const Vec3Field v(std::vector<Vec3>{{0.3, -1.2, 0.7}});
    const std::vector<Direction> north{Direction(0.0, 0.0)};
    const TangentField t = project_tangent(v, north);
    CHECK(t.plus[0] == cplx(0.3, -1.2));
    CHECK(t.axial[0] == 0.7);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const auto dirs = testing::random_directions(rng, 3);
        const Vec3Field w = testing::random_field(rng, 3);
        const TangentField tw = project_tangent(w, dirs);
        for (std::size_t x = 0; x < 3; ++x)
            CHECK(std::abs(std::norm(tw.plus[x]) + tw.axial[x] * tw.axial[x] - dot(w[x], w[x])) < 1e-14);
        CHECK(tw.norm2() <= w.norm2() + 1e-15);

        // normal component only
        const Vec3 u0 = dirs[0].unit();
        const Vec3Field normal(std::vector<Vec3>{{2 * u0[0], 2 * u0[1], 2 * u0[2]}});
        const std::vector<Direction> d0{dirs[0]};
        CHECK(std::abs(project_tangent(normal, d0).plus[0]) < 1e-14);
    }
}

TEST_CASE("embedding and field operators") {
    const SpinSystem one(1, HalfInt(3));
    const CMatrix op = one.local().s2;
    CHECK(linalg::max_abs_diff(one.embed(op, 0), op) == 0.0);

    const SpinSystem two(2, HalfInt(2));
    const Vec3Field v(std::vector<Vec3>{{0, 0, 1}, {0, 0, 0}});
    const CMatrix expected = linalg::kron(two.local().s3, CMatrix::Identity(3, 3));
    CHECK(linalg::max_abs_diff(two.sum_field_operator(v), expected) == 0.0);

    std::mt19937_64 rng(9);
    const auto dirs = testing::random_directions(rng, 2);
    const Vec3Field w = testing::random_field(rng, 2);
    const CMatrix a = two.sum_field_operator(w);
    CHECK(linalg::is_hermitian(a, 1e-14));
    const CVector omega = linalg::kron(coherent_vector(HalfInt(2), dirs[0]), coherent_vector(HalfInt(2), dirs[1]));
    const double mean = (omega.adjoint() * a * omega)(0, 0).real();
    const double expectedMean = 1.0 * (dot(w[0], dirs[0].unit()) + dot(w[1], dirs[1].unit()));
    CHECK(std::abs(mean - expectedMean) < 1e-12);
}

TEST_CASE("dimension budget") {
    CHECK_THROWS_AS(SpinSystem(8, HalfInt(2), 4096), ResourceError);
    try {
        SpinSystem(8, HalfInt(2), 4096);
    } catch (const ResourceError& e) {
        CHECK(e.dimension() == 6561);
    }
    CHECK_NOTHROW(SpinSystem(7, HalfInt(2), 4096));
}
