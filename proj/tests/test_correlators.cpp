#include "doctest.h"
#include "helpers.hpp"

#include "spinclt/correlators.hpp"
#include "spinclt/fit.hpp"

#include <numbers>

using namespace spinclt;
using std::numbers::pi;

namespace {

const Direction kNorth(0.0, 0.0);

Vec3Field single(const Vec3& v) { return Vec3Field(std::vector<Vec3>{v}); }

cplx dense_char(const Vec3Field& v, const CoherentState& state) {
    const SpinSystem sys(state.sites(), state.spin());
    return state.expectation(linalg::expm_i_hermitian(sys.sum_field_operator(v)));
}

CMatrix dense_fluctuation(const Vec3Field& v, const CoherentState& state) {
    const SpinSystem sys(state.sites(), state.spin());
    const double j = state.spin().value();
    return std::sqrt(2.0 / j) * (sys.sum_field_operator(v) - mean(v, state) * sys.identity());
}

// cumulants from dense moments <Omega|F^n|Omega>
std::vector<double> dense_cumulants(const Vec3Field& v, const CoherentState& state, int kmax) {
    const CMatrix f = dense_fluctuation(v, state);
    const CVector omega = state.product_vector();
    std::vector<double> m(kmax + 1), kappa(kmax + 1, 0.0);
    CVector w = omega;
    m[0] = 1.0;
    for (int n = 1; n <= kmax; ++n) {
        w = f * w;
        m[n] = omega.dot(w).real();
    }
    for (int n = 1; n <= kmax; ++n) {
        double acc = m[n];
        double binom = 1.0;  // C(n-1, i-1)
        for (int i = 1; i < n; ++i) {
            acc -= binom * kappa[i] * m[n - i];
            binom = binom * (n - i) / i;
        }
        kappa[n] = acc;
    }
    return kappa;
}

}  // namespace

TEST_CASE("char_closed_form trivial cases") {
    const CoherentState half = CoherentState::uniform(1, kNorth, HalfInt(1));
    for (double s : {0.3, 1.7, -2.5}) {
        CHECK(std::abs(char_closed_form(single({0, 0, s}), half) - std::exp(kI * (s / 2))) < 1e-15);
        CHECK(std::abs(char_closed_form(single({s, 0, 0}), half) - std::cos(s / 2)) < 1e-15);
    }
    CHECK(char_closed_form(Vec3Field::zeros(1), half) == cplx(1.0));
}

TEST_CASE("char_closed_form matches dense expectation on 100 random configurations") {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t sites = 1 + trial % 2;
        const HalfInt j(1 + (trial / 2) % 8);
        const CoherentState state(testing::random_directions(rng, sites), j);
        const Vec3Field v = testing::random_field(rng, sites, 2.0);
        const cplx closed = char_closed_form(v, state);
        worst = std::max(worst, std::abs(closed - dense_char(v, state)));
        CHECK(std::abs(closed) <= 1.0 + 1e-15);
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("mean") {
    const CoherentState s = CoherentState::uniform(1, kNorth, HalfInt(5));
    CHECK(mean(single({0, 0, 1}), s) == 2.5);
    CHECK(mean(single({0.4, -1, 0}), s) == 0.0);

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const CoherentState state(testing::random_directions(rng, 2), HalfInt(1 + trial % 4));
        const Vec3Field v = testing::random_field(rng, 2);
        const SpinSystem sys(2, state.spin());
        CHECK(std::abs(mean(v, state) - state.expectation(sys.sum_field_operator(v)).real()) < 1e-12);
    }
}

TEST_CASE("covariance examples and J-independence") {
    const Vec3Field e1 = single({1, 0, 0}), e2 = single({0, 1, 0}), e3 = single({0, 0, 1});
    for (int tj : {1, 2, 3}) {
        const CoherentState s = CoherentState::uniform(1, kNorth, HalfInt(tj));
        CHECK(std::abs(covariance(e1, e1, s) - 1.0) < 1e-15);
        CHECK(std::abs(covariance(e3, e3, s)) < 1e-15);
        CHECK(std::abs(covariance(e1, e2, s) - kI) < 1e-15);
        const CMatrix f1 = dense_fluctuation(e1, s), f2 = dense_fluctuation(e2, s);
        CHECK(std::abs(s.expectation(f1 * f2) - kI) < 1e-12);
    }

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const CoherentState state(testing::random_directions(rng, 2), HalfInt(1 + trial % 5));
        const Vec3Field v = testing::random_field(rng, 2), w = testing::random_field(rng, 2);
        const cplx dense = state.expectation(dense_fluctuation(v, state) * dense_fluctuation(w, state));
        CHECK(std::abs(covariance(v, w, state) - dense) < 1e-12);
        const cplx vv = covariance(v, v, state);
        CHECK(std::abs(vv - state.tangent(v).norm2_squared()) < 1e-12);
        CHECK(std::abs(vv - truncated_cumulant(2, v, state).value) < 1e-12);
    }
}

TEST_CASE("classical limit") {
    const CoherentState s = CoherentState::uniform(1, Direction(1.0, 2.0), HalfInt(3));
    const BoundReport zero = classical_limit_check(Vec3Field::zeros(1), s);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == doctest::Approx(std::exp(2.0) / 1.5));
    CHECK(zero.satisfied);

    const CoherentState north = CoherentState::uniform(1, kNorth, HalfInt(7));
    CHECK(classical_limit_check(single({0, 0, 0.8}), north).lhs < 1e-15);

    // |v|_1 = 1 generic direction
    const Vec3 raw{0.5, -0.3, 0.6};
    const Vec3 v1{raw[0] / length(raw), raw[1] / length(raw), raw[2] / length(raw)};
    std::vector<double> js, lhs;
    for (int tj = 1; tj <= 25; ++tj) {
        const CoherentState st = CoherentState::uniform(1, Direction(0.9, 0.4), HalfInt(tj));
        const BoundReport r = classical_limit_check(single(v1), st);
        CHECK(r.satisfied);
        CHECK(r.lhs * st.spin().value() < 1.0);
        js.push_back(st.spin().value());
        lhs.push_back(r.lhs);
    }
    const PowerFit fit = fit_power_law(js, lhs);
    CHECK(fit.exponent == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("truncated cumulant examples") {
    std::mt19937_64 rng(13);
    const CoherentState north = CoherentState::uniform(1, kNorth, HalfInt(4));
    CHECK(std::abs(truncated_cumulant(3, single({1, 0, 0}), north).value) < 1e-15);
    CHECK(truncated_cumulant(1, single({1, 0, 0}), north).value == 0.0);
    CHECK_THROWS_AS(truncated_cumulant(0, single({1, 0, 0}), north), ContractViolation);

    // third cumulant against central differences of log omega(exp(itF))
    const double r = 1.0 / std::sqrt(2.0);
    const Vec3Field v = single({r, 0, r});
    for (int tj : {1, 2, 5}) {
        const CoherentState s = CoherentState::uniform(1, kNorth, HalfInt(tj));
        auto lf = [&](double t) { return std::log(fluctuation_char(v, s, t)); };
        auto d3 = [&](double h) { return (lf(2 * h) - 2.0 * lf(h) + 2.0 * lf(-h) - lf(-2 * h)) / (2 * h * h * h); };
        const double h = 1e-3;
        const cplx richardson = (4.0 * d3(h / 2) - d3(h)) / 3.0;
        const double fd = (kI * richardson).real();  // (-i)^3 = i
        CHECK(std::abs(fd - truncated_cumulant(3, v, s).value) < 1e-6);
    }
}

TEST_CASE("closed form agrees with exact cumulants up to third order") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const CoherentState s(testing::random_directions(rng, 2), HalfInt(1 + trial % 6));
        const Vec3Field v = testing::random_field(rng, 2);
        const auto dense = dense_cumulants(v, s, 6);
        for (int k = 2; k <= 3; ++k) {
            CHECK(std::abs(truncated_cumulant(k, v, s).value - exact_cumulant(k, v, s)) < 1e-12);
        }
        for (int k = 2; k <= 6; ++k) CHECK(std::abs(exact_cumulant(k, v, s) - dense[k]) < 1e-9);
    }
}

TEST_CASE("exact fourth cumulant differs from the closed form") {
    // c = 0, J = 1/2: F is a +-1 coin, kappa_4 = -2 and kappa_8 = -272, the closed form gives 1
    const CoherentState s = CoherentState::uniform(1, kNorth, HalfInt(1));
    const Vec3Field v = single({1, 0, 0});
    CHECK(exact_cumulant(4, v, s) == doctest::Approx(-2.0));
    CHECK(truncated_cumulant(4, v, s).value == doctest::Approx(1.0));
    CHECK(exact_cumulant(8, v, s) == doctest::Approx(-272.0));
    CHECK(truncated_cumulant(8, v, s).bound == doctest::Approx(128.0));
}

TEST_CASE("closed-form cumulant stays inside its bound for k <= 8, J <= 10") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t sites = 1 + trial % 2;
        const CoherentState s(testing::random_directions(rng, sites), HalfInt(1 + trial % 20));
        const Vec3Field v = testing::random_field(rng, sites, 1.5);
        for (int k = 2; k <= 8; ++k) {
            const CumulantValue c = truncated_cumulant(k, v, s);
            CHECK(c.report.satisfied);
        }
    }
}
