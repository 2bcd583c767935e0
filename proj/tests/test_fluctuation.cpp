#include "doctest.h"
#include "helpers.hpp"

#include "spinclt/fit.hpp"
#include "spinclt/fluctuation.hpp"

#include <numbers>

using namespace spinclt;

namespace {

const Direction kNorth(0.0, 0.0);

Vec3Field single(const Vec3& v) { return Vec3Field(std::vector<Vec3>{v}); }

}  // namespace

TEST_CASE("fluctuation operator on the 2x2 example attains the norm bound") {
    const CoherentState s = CoherentState::uniform(1, kNorth, HalfInt(1));
    const FluctuationOperator f(single({0, 0, 1}), s);
    CMatrix expected = CMatrix::Zero(2, 2);
    expected(1, 1) = -2.0;
    CHECK(linalg::max_abs_diff(f.matrix(), expected) < 1e-15);
    CHECK(f.op_norm() == doctest::Approx(2.0));
    CHECK(f.norm_bound() == doctest::Approx(2.0));

    const FluctuationOperator zero(Vec3Field::zeros(1), s);
    CHECK(zero.matrix().isZero(0.0));
}

TEST_CASE("fluctuation operator invariants on random inputs") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t sites = 1 + trial % 2;
        const CoherentState s(testing::random_directions(rng, sites), HalfInt(2 + trial % 5));
        const Vec3Field v = testing::random_field(rng, sites);
        const FluctuationOperator f(v, s);
        CHECK(linalg::is_hermitian(f.matrix(), 1e-14));
        CHECK(std::abs(s.expectation(f.matrix())) < 1e-12);
        CHECK(f.op_norm() == doctest::Approx(linalg::op_norm(f.matrix())).epsilon(1e-10));
        CHECK(f.op_norm() <= f.norm_bound());
        CHECK(linalg::max_abs_diff(f.exp_matrix(0.7), linalg::expm(kI * 0.7 * f.matrix())) < 1e-11);
        // closed-form generating function
        CHECK(std::abs(s.expectation(f.exp_matrix()) - fluctuation_char(v, s)) < 1e-11);
    }
}

TEST_CASE("commutator of fluctuations is (2i/J) sum (v x w).S") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const CoherentState s(testing::random_directions(rng, 2), HalfInt(1 + trial % 4));
        const Vec3Field v = testing::random_field(rng, 2), w = testing::random_field(rng, 2);
        const FluctuationOperator fv(v, s), fw(w, s);
        Vec3Field cr = Vec3Field::zeros(2);
        for (std::size_t x = 0; x < 2; ++x) cr[x] = cross(v[x], w[x]);
        const SpinSystem sys(2, s.spin());
        const CMatrix expected = (2.0 * kI / s.spin().value()) * sys.sum_field_operator(cr);
        CHECK(linalg::max_abs_diff(linalg::commutator(fv.matrix(), fw.matrix()), expected) < 1e-12);
    }
}

TEST_CASE("single CLT check") {
    for (int tj : {1, 4, 9}) {
        const CoherentState s = CoherentState::uniform(1, Direction(0.4, 1.0), HalfInt(tj));
        const BoundReport r = clt_single_check(Vec3Field::zeros(1), s);
        CHECK(r.lhs == 0.0);
        CHECK(r.rhs * std::sqrt(s.spin().value()) == doctest::Approx(4.1133).epsilon(1e-4));
        CHECK(r.rhs * std::sqrt(s.spin().value()) == doctest::Approx(std::exp(std::sqrt(2.0))));
    }
    const CoherentState north = CoherentState::uniform(1, kNorth, HalfInt(6));
    CHECK(clt_single_check(single({0, 0, 1.3}), north).lhs < 1e-14);

    // |v|_2 = 1 generic direction, J = 1/2 .. 25/2
    std::vector<double> js, lhs;
    const Vec3 v{0.6, 0.0, 0.8};
    for (int tj = 1; tj <= 25; ++tj) {
        const CoherentState s = CoherentState::uniform(1, Direction(1.2, 0.3), HalfInt(tj));
        const BoundReport r = clt_single_check(single(v), s);
        CHECK(r.satisfied);
        js.push_back(s.spin().value());
        lhs.push_back(r.lhs);
    }
    const PowerFit fit = fit_power_law(js, lhs);
    CHECK(fit.exponent >= -1.2);
    CHECK(fit.exponent <= -0.4);
}

TEST_CASE("b and a constants saturate instead of overflowing") {
    const Constant b = clt_constant_b(single({0, 0, 10.0}));
    CHECK(b.saturated);
    const BoundReport r = BoundReport::make("x", 1.0, b.value, b.saturated);
    CHECK(r.saturated);
    CHECK(r.satisfied);
    CHECK_FALSE(clt_constant_a(single({1, 0, 0}), single({0, 1, 0})).saturated);
    const Constant a = clt_constant_a(single({1, 0, 0}), single({0, 1, 0}));
    CHECK(a.value == doctest::Approx(2.0 / 3.0 + std::sqrt(2.0) * std::exp(0.5 + std::exp(1.0))));
}

TEST_CASE("Weyl product expectation") {
    std::mt19937_64 rng(9);
    const auto dirs = testing::random_directions(rng, 2);
    const TangentField t = project_tangent(testing::random_field(rng, 2), dirs);
    const std::vector<TangentField> one{t};
    CHECK(std::abs(weyl_product_expectation(one) - std::exp(-0.5 * t.norm2_squared())) < 1e-15);
    const std::vector<TangentField> pair{t, -t};
    CHECK(std::abs(weyl_product_expectation(pair) - 1.0) < 1e-15);
    CHECK(std::abs(weyl_product_expectation(std::vector<TangentField>{}) - 1.0) == 0.0);
}

TEST_CASE("multi-factor CLT check") {
    std::mt19937_64 rng(10);
    const CoherentState s(testing::random_directions(rng, 2), HalfInt(3));
    const Vec3Field v = testing::random_field(rng, 2);
    const std::vector<Vec3Field> one{v};
    const BoundReport a = clt_multi_check(one, s), b = clt_single_check(v, s);
    CHECK(a.lhs == b.lhs);
    CHECK(a.rhs == b.rhs);

    const std::vector<Vec3Field> zeros(3, Vec3Field::zeros(2));
    CHECK(clt_multi_check(zeros, s).lhs < 1e-15);

    for (std::size_t n : {2u, 3u}) {
        std::vector<Vec3Field> fields;
        for (std::size_t i = 0; i < n; ++i) fields.push_back(testing::random_field(rng, 2, 0.7));
        const auto dirs = testing::random_directions(rng, 2);
        std::vector<double> js, lhs;
        for (int tj = 1; tj <= 25; ++tj) {
            const CoherentState st(dirs, HalfInt(tj));
            const BoundReport r = clt_multi_check(fields, st);
            CHECK(r.satisfied);
            js.push_back(st.spin().value());
            lhs.push_back(r.lhs);
        }
        CHECK(lhs.back() < lhs.front());
        CHECK(fit_power_law(js, lhs).exponent < -0.3);
    }
}

TEST_CASE("BCH defect") {
    std::mt19937_64 rng(12);
    const CoherentState s(testing::random_directions(rng, 2), HalfInt(3));
    const Vec3Field v = testing::random_field(rng, 2);
    CHECK(bch_defect(v, v, s).report.lhs < 1e-12);
    CHECK(bch_defect(v, v * -1.7, s).report.lhs < 1e-12);

    std::vector<double> js, lhs;
    for (int tj = 1; tj <= 25; ++tj) {
        const CoherentState st = CoherentState::uniform(1, kNorth, HalfInt(tj));
        const BchDefect d = bch_defect(single({1, 0, 0}), single({0, 1, 0}), st);
        // the literal constant is too small by the dropped 2i of the commutator
        CHECK_FALSE(d.report.satisfied);
        CHECK(d.corrected.satisfied);
        js.push_back(st.spin().value());
        lhs.push_back(d.report.lhs);
    }
    const PowerFit fit = fit_power_law(js, lhs);
    CHECK(fit.exponent == doctest::Approx(-0.5).epsilon(0.3));

    for (int trial = 0; trial < 30; ++trial) {
        const CoherentState st(testing::random_directions(rng, 2), HalfInt(1 + trial % 7));
        const BchDefect d = bch_defect(testing::random_field(rng, 2), testing::random_field(rng, 2), st);
        CHECK(d.corrected.satisfied);
    }
}

TEST_CASE("commutator estimates") {
    const SpinMatrices p = spin_matrices(HalfInt(1));
    const CMatrix s1 = 2.0 * p.s1, s2 = 2.0 * p.s2, s3 = 2.0 * p.s3;
    auto [r1, r2] = commutator_bounds(s1, s2, s3);
    CHECK(r1.satisfied);
    CHECK(r2.satisfied);
    // golden values for the Pauli triple
    CHECK(r1.lhs == doctest::Approx(2.0 * std::sin(1.0)));
    CHECK(r1.rhs == doctest::Approx(2.0));

    auto [c1, c2] = commutator_bounds(s3, s3, s3);
    CHECK(c1.lhs < 1e-14);
    CHECK(c2.lhs < 1e-14);

    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const CMatrix a = testing::random_hermitian(rng, 8), b = testing::random_hermitian(rng, 8);
        CMatrix c(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) c(i, j) = cplx(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1));
        auto [x, y] = commutator_bounds(a, b, c);
        CHECK(x.satisfied);
        CHECK(y.satisfied);
    }
    CMatrix nh = s1;
    nh(0, 1) = 3.0;
    CHECK_THROWS_AS(commutator_bounds(nh, s2, s3), ContractViolation);
}

TEST_CASE("polynomial characteristic function on the spin side") {
    std::mt19937_64 rng(14);
    const CoherentState s(testing::random_directions(rng, 2), HalfInt(2));
    const Vec3Field v = testing::random_field(rng, 2);
    const std::vector<Vec3Field> one{v};
    CHECK(std::abs(poly_char_spin(NoncommPoly::generator(1, 0), one, s) - fluctuation_char(v, s)) < 1e-12);

    NoncommPoly sq(1);
    sq.add_term(1.0, {0, 0});
    for (int tj : {1, 3, 8}) {
        const CoherentState north = CoherentState::uniform(1, kNorth, HalfInt(tj));
        const std::vector<Vec3Field> e3{single({0, 0, 1})};
        CHECK(std::abs(poly_char_spin(sq, e3, north) - 1.0) < 1e-12);
    }

    const std::vector<Vec3Field> two{testing::random_field(rng, 2), testing::random_field(rng, 2)};
    const cplx val = poly_char_spin(NoncommPoly::anticommutator(2, 0, 1), two, s);
    CHECK(std::abs(val) <= 1.0 + 1e-12);

    NoncommPoly bad(2);
    bad.add_term(1.0, {0, 1});
    CHECK_THROWS_AS(poly_char_spin(bad, two, s), ContractViolation);
}
