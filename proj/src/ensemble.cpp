#include "spinclt/ensemble.hpp"

#include "spinclt/fluctuation.hpp"

#include <cmath>
#include <stdexcept>

namespace spinclt {

namespace {

void require_config(const EnsembleConfig& c) {
    if (c.n < 1) throw ContractViolation("ensemble: N must be >= 1");
}

Vec3Field single(const Vec3& v) { return Vec3Field(std::vector<Vec3>{v}); }

CoherentState collective_state(const EnsembleConfig& c) { return CoherentState::uniform(1, c.u, HalfInt(c.n)); }

// every word of length 1..max_order over k letters
std::vector<std::vector<int>> all_words(int k, int max_order) {
    std::vector<std::vector<int>> out, layer{{}};
    for (int len = 1; len <= max_order; ++len) {
        std::vector<std::vector<int>> next;
        for (const auto& w : layer)
            for (int i = 0; i < k; ++i) {
                auto x = w;
                x.push_back(i);
                next.push_back(x);
            }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

cplx word_moment(const std::vector<int>& word, const std::vector<CMatrix>& ops, const CVector& omega) {
    CVector psi = omega;
    for (std::size_t i = word.size(); i-- > 0;) psi = ops[word[i]] * psi;
    return omega.dot(psi);
}

}  // namespace

CollectiveChar collective_char_routes(const EnsembleConfig& config, const Vec3& v) {
    require_config(config);
    const HalfInt half(1);
    const CVector c = coherent_vector(half, config.u);
    const CMatrix e = linalg::expm_i_hermitian(spin_matrices(half).along(v));
    const cplx one = c.dot(e * c);
    CollectiveChar out;
    out.product = 1.0;
    for (int i = 0; i < config.n; ++i) out.product *= one;
    out.collective = char_closed_form(single(v), collective_state(config));
    return out;
}

cplx collective_char(const EnsembleConfig& config, const Vec3& v) {
    const CollectiveChar r = collective_char_routes(config, v);
    if (std::abs(r.product - r.collective) > 1e-12) {
        throw std::logic_error("collective_char: ensemble and collective routes disagree by " +
                               std::to_string(std::abs(r.product - r.collective)));
    }
    return r.collective;
}

CMatrix ensemble_fluctuation(const EnsembleConfig& config, const Vec3& v, std::size_t budget) {
    require_config(config);
    if (config.n > kMaxEnsembleSites) {
        throw ResourceError("ensemble route needs 2^" + std::to_string(config.n) +
                                " dimensions (limit N <= 10); use the spin-N/2 route (collective_fluctuation)",
                            std::size_t{1} << std::min(config.n, 62));
    }
    const std::size_t n = static_cast<std::size_t>(config.n);
    const SpinSystem sys(n, HalfInt(1), budget);
    // v.sigma = 2 v.S and omega(v.sigma) = v.u
    const double mean = dot(v, config.u.unit());
    CMatrix f = 2.0 * sys.sum_field_operator(Vec3Field::uniform(n, v));
    f.diagonal().array() -= static_cast<double>(n) * mean;
    return f / std::sqrt(static_cast<double>(n));
}

CMatrix collective_fluctuation(const EnsembleConfig& config, const Vec3& v, std::size_t budget) {
    require_config(config);
    return FluctuationOperator(single(v), collective_state(config), budget).matrix();
}

EnsembleCheck ensemble_fluctuation_check(const EnsembleConfig& config, std::span<const Vec3> fields, int max_order,
                                         std::size_t budget) {
    require_config(config);
    if (fields.empty()) throw ContractViolation("ensemble_fluctuation_check: at least one field required");
    if (max_order < 1) throw ContractViolation("ensemble_fluctuation_check: max_order must be >= 1");
    EnsembleCheck out;

    std::vector<CMatrix> big, small;
    for (const auto& v : fields) {
        big.push_back(ensemble_fluctuation(config, v, budget));
        small.push_back(collective_fluctuation(config, v, budget));
    }
    const CVector omega_n = CoherentState::uniform(config.n, config.u, HalfInt(1)).product_vector(budget);
    const CVector omega_j = collective_state(config).product_vector(budget);
    for (const auto& w : all_words(static_cast<int>(fields.size()), max_order)) {
        out.moment_difference =
            std::max(out.moment_difference, std::abs(word_moment(w, big, omega_n) - word_moment(w, small, omega_j)));
        ++out.words;
    }

    const CoherentState state = collective_state(config);
    std::vector<Vec3Field> vf;
    for (const auto& v : fields) vf.push_back(single(v));
    for (const auto& v : vf) out.reports.push_back(clt_single_check(v, state));
    if (vf.size() > 1) out.reports.push_back(clt_multi_check(vf, state, budget));
    for (int k = 2; k <= 4 && k < config.n; k += 2) {
        std::vector<Vec3Field> word;
        for (int i = 0; i < k; ++i) word.push_back(vf[i % vf.size()]);
        out.reports.push_back(moments_check(word, state, budget));
    }
    return out;
}

KuperbergTable kuperberg_clt(const Direction& u, const NoncommPoly& p, std::span<const Vec3> fields,
                             std::span<const int> ns, int cap, std::size_t budget) {
    if (!p.is_selfadjoint()) throw ContractViolation("kuperberg_clt: polynomial is not selfadjoint");
    if (static_cast<int>(fields.size()) != p.generators()) {
        throw ContractViolation("kuperberg_clt: one field per generator required");
    }
    KuperbergTable t;
    const std::vector<Direction> dirs{u};
    std::vector<TangentField> tangents;
    std::vector<Vec3Field> vf;
    for (const auto& v : fields) {
        vf.push_back(single(v));
        tangents.push_back(project_tangent(vf.back(), dirs));
    }
    const BosonPolyValue limit = poly_char_boson(p, tangents, cap, 1e-8, 10, budget);
    t.limit = limit.value;
    t.limit_cap = limit.cap;
    t.limit_converged = limit.converged;

    for (int n : ns) {
        if (n < 1) throw ContractViolation("kuperberg_clt: N must be >= 1");
        const cplx value = poly_char_spin(p, vf, CoherentState::uniform(1, u, HalfInt(n)), budget);
        t.n.push_back(n);
        t.values.push_back(value);
        t.differences.push_back(std::abs(value - t.limit));
    }
    t.monotone_from = t.differences.empty() ? 0 : t.differences.size() - 1;
    while (t.monotone_from > 0 && t.differences[t.monotone_from - 1] >= t.differences[t.monotone_from]) --t.monotone_from;
    return t;
}

}  // namespace spinclt
