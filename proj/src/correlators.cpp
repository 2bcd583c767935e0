#include "spinclt/correlators.hpp"

#include <cmath>

namespace spinclt {

namespace {

cplx ipow(cplx z, int n) {
    cplx out{1.0, 0.0};
    while (n > 0) {
        if (n & 1) out *= z;
        z *= z;
        n >>= 1;
    }
    return out;
}

// cos(s) + i c sin(s), with c = v.u/|v|; callers skip v = 0 (limit factor 1).
cplx site_factor(const Vec3& v, const Direction& u, double scale) {
    const double len = length(v);
    const double c = dot(v, u.unit()) / len;
    const double s = 0.5 * scale * len;
    return {std::cos(s), c * std::sin(s)};
}

void require_size(const Vec3Field& v, const CoherentState& state, const char* who) {
    if (v.size() != state.sites()) {
        throw ContractViolation(std::string(who) + ": field has " + std::to_string(v.size()) +
                                " sites, state has " + std::to_string(state.sites()));
    }
}

}  // namespace

CoherentState::CoherentState(std::vector<Direction> directions, HalfInt j)
    : directions_(std::move(directions)), j_(j) {
    if (directions_.empty()) throw ContractViolation("CoherentState: at least one site required");
    site_vectors_.reserve(directions_.size());
    for (const auto& u : directions_) site_vectors_.push_back(coherent_vector(j_, u));
}

CoherentState CoherentState::uniform(std::size_t sites, const Direction& u, HalfInt j) {
    return CoherentState(std::vector<Direction>(sites, u), j);
}

CVector CoherentState::product_vector(std::size_t budget) const {
    const SpinSystem sys(sites(), j_, budget);  // budget check only
    return linalg::kron_all(std::span<const CVector>(site_vectors_));
}

cplx CoherentState::expectation(const CMatrix& op) const {
    const CVector psi = product_vector(static_cast<std::size_t>(op.rows()));
    if (op.rows() != psi.size() || op.cols() != psi.size()) {
        throw ContractViolation("CoherentState::expectation: operator dimension does not match the lattice");
    }
    return psi.dot(op * psi);
}

cplx char_closed_form(const Vec3Field& v, const CoherentState& state) {
    require_size(v, state, "char_closed_form");
    cplx out{1.0, 0.0};
    for (std::size_t x = 0; x < v.size(); ++x) {
        if (length(v[x]) == 0.0) continue;
        out *= ipow(site_factor(v[x], state.directions()[x], 1.0), state.spin().twice());
    }
    return out;
}

cplx fluctuation_char(const Vec3Field& v, const CoherentState& state, double t) {
    require_size(v, state, "fluctuation_char");
    const double two_j = state.spin().twice();
    const double scale = t * std::sqrt(2.0 / state.spin().value());
    cplx out{1.0, 0.0};
    for (std::size_t x = 0; x < v.size(); ++x) {
        if (length(v[x]) == 0.0) continue;
        const double a = dot(v[x], state.directions()[x].unit());
        out *= std::exp(-kI * (t * std::sqrt(two_j) * a)) *
               ipow(site_factor(v[x], state.directions()[x], scale), state.spin().twice());
    }
    return out;
}

double mean(const Vec3Field& v, const CoherentState& state) {
    require_size(v, state, "mean");
    double acc = 0.0;
    for (std::size_t x = 0; x < v.size(); ++x) acc += dot(v[x], state.directions()[x].unit());
    return state.spin().value() * acc;
}

cplx covariance(const Vec3Field& v, const Vec3Field& w, const CoherentState& state) {
    require_size(v, state, "covariance");
    require_size(w, state, "covariance");
    cplx acc{0.0, 0.0};
    for (std::size_t x = 0; x < v.size(); ++x) {
        const Vec3 u = state.directions()[x].unit();
        acc += cplx{dot(v[x], w[x]) - dot(v[x], u) * dot(w[x], u), dot(cross(v[x], w[x]), u)};
    }
    return acc;
}

BoundReport classical_limit_check(const Vec3Field& v, const CoherentState& state) {
    require_size(v, state, "classical_limit_check");
    const double j = state.spin().value();
    double phase = 0.0;
    for (std::size_t x = 0; x < v.size(); ++x) phase += dot(v[x], state.directions()[x].unit());
    const double lhs = std::abs(char_closed_form(v * (1.0 / j), state) - std::exp(kI * phase));
    const double n1 = v.norm1();
    const double rhs = std::exp(n1 + 2.0 * std::exp(n1)) / j;
    return BoundReport::make("classical_limit", lhs, rhs);
}

CumulantValue truncated_cumulant(int k, const Vec3Field& v, const CoherentState& state) {
    if (k < 1) throw ContractViolation("truncated_cumulant: order must be >= 1");
    require_size(v, state, "truncated_cumulant");
    const double two_j = state.spin().twice();
    const double j = state.spin().value();
    CumulantValue out;
    out.order = k;
    if (k >= 2) {
        for (std::size_t x = 0; x < v.size(); ++x) {
            const double len = length(v[x]);
            if (len == 0.0) continue;
            const double c = dot(v[x], state.directions()[x].unit()) / len;
            // magnitude in log space, the bracket stays O(2^k)
            const double logmag = (1.0 - 0.5 * k) * std::log(two_j) + k * std::log(len) - std::log(2.0);
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            const double bracket = std::pow(1.0 - c, k - 1) + sign * std::pow(1.0 + c, k - 1);
            out.value += std::exp(logmag) * (1.0 - c * c) * bracket;
        }
    }
    const double n2 = v.norm2();
    out.bound = n2 == 0.0 ? 0.0 : std::exp(0.5 * k * std::log(2.0) + k * std::log(n2) - (0.5 * k - 1.0) * std::log(j));
    out.report = BoundReport::make("cumulant_k" + std::to_string(k), std::abs(out.value), out.bound);
    return out;
}

double exact_cumulant(int k, const Vec3Field& v, const CoherentState& state) {
    if (k < 1) throw ContractViolation("exact_cumulant: order must be >= 1");
    require_size(v, state, "exact_cumulant");
    if (k == 1) return 0.0;
    const double two_j = state.spin().twice();
    double total = 0.0;
    for (std::size_t x = 0; x < v.size(); ++x) {
        const double len = length(v[x]);
        if (len == 0.0) continue;
        const double c = dot(v[x], state.directions()[x].unit()) / len;
        // each of the 2J constituent spin-1/2 copies contributes +-|v|/sqrt(2J) with weights (1 +- c)/2
        const double b = len / std::sqrt(two_j);
        const double p = 0.5 * (1.0 + c);
        std::vector<double> m(k + 1), kappa(k + 1, 0.0);
        for (int n = 0; n <= k; ++n) m[n] = p * std::pow(b, n) + (1.0 - p) * std::pow(-b, n);
        std::vector<double> binom(k + 1, 0.0);  // row n-1 of Pascal's triangle
        for (int n = 1; n <= k; ++n) {
            binom.assign(n, 0.0);
            binom[0] = 1.0;
            for (int r = 1; r < n; ++r) binom[r] = binom[r - 1] * (n - r) / r;
            double acc = m[n];
            for (int i = 1; i < n; ++i) acc -= binom[i - 1] * kappa[i] * m[n - i];
            kappa[n] = acc;
        }
        total += two_j * kappa[k];
    }
    return total;
}

}  // namespace spinclt
