#include "spinclt/fluctuation.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace spinclt {

namespace {

Constant clamp(long double v) {
    if (!std::isfinite(static_cast<double>(v)) || v > static_cast<long double>(DBL_MAX)) return {DBL_MAX, true};
    return {static_cast<double>(v), false};
}

void require_same_size(std::span<const Vec3Field> fields, const CoherentState& state, const char* who) {
    for (const auto& f : fields) {
        if (f.size() != state.sites()) {
            throw ContractViolation(std::string(who) + ": field size differs from site count");
        }
    }
}

}  // namespace

FluctuationOperator::FluctuationOperator(const Vec3Field& v, const CoherentState& state, std::size_t budget)
    : v_(v), j_(state.spin()) {
    if (v.size() != state.sites()) throw ContractViolation("FluctuationOperator: field size differs from site count");
    const SpinSystem sys(state.sites(), j_, budget);
    const double jj = j_.value();
    const double scale = std::sqrt(2.0 / jj);
    const int d = j_.dim();
    matrix_ = CMatrix::Zero(sys.dim(), sys.dim());
    double mean_defect = 0.0, plus_sum = 0.0, minus_sum = 0.0;
    for (std::size_t x = 0; x < v.size(); ++x) {
        const double a = dot(v[x], state.directions()[x].unit());
        CMatrix term = scale * (sys.local().along(v[x]) - jj * a * CMatrix::Identity(d, d));
        mean_defect += std::abs(state.site_vector(x).dot(term * state.site_vector(x)));
        const double len = length(v[x]);
        plus_sum += len - a;
        minus_sum += len + a;
        if (len != 0.0) matrix_ += sys.embed(term, x);
        site_terms_.push_back(std::move(term));
    }
    // spectrum of each site term is sqrt(2/J)(|v_x| m - J v_x.u_x), m = -J..J
    norm_ = std::sqrt(2.0 * jj) * std::max(plus_sum, minus_sum);
    tangent_ = state.tangent(v);

    const double scale_ref = std::max(1.0, v.norm1() * std::sqrt(jj));
    if (!linalg::is_hermitian(matrix_, 1e-13)) throw std::logic_error("FluctuationOperator: matrix is not Hermitian");
    if (mean_defect > 1e-12 * scale_ref) throw std::logic_error("FluctuationOperator: mean is not zero");
    if (norm_ > norm_bound() * (1.0 + 1e-12)) throw std::logic_error("FluctuationOperator: norm exceeds bound");
}

double FluctuationOperator::norm_bound() const { return std::pow(2.0, 1.5) * v_.norm1() * std::sqrt(j_.value()); }

std::vector<CMatrix> FluctuationOperator::exp_factors(double t) const {
    std::vector<CMatrix> out;
    out.reserve(site_terms_.size());
    for (const auto& term : site_terms_) out.push_back(linalg::expm_i_hermitian(term, t));
    return out;
}

CVector FluctuationOperator::apply_exp(const CVector& psi, double t) const {
    const auto factors = exp_factors(t);
    return linalg::apply_kron(factors, psi);
}

CMatrix FluctuationOperator::exp_matrix(double t) const {
    const auto factors = exp_factors(t);
    return linalg::kron_all(factors);
}

Constant clt_constant_b(const Vec3Field& v) {
    const long double x = std::sqrt(2.0L) * v.norm2();
    return clamp(std::exp(x + std::sqrt(2.0L) * std::exp(x)));
}

Constant clt_constant_a(const Vec3Field& v, const Vec3Field& w) {
    const long double nv = v.norm2(), nw = w.norm2();
    const long double p = nv * nw;
    return clamp(p * (nv + nw) / 3.0L + std::sqrt(2.0L) * std::exp(0.5L * p + std::exp(p)));
}

BoundReport clt_single_check(const Vec3Field& v, const CoherentState& state) {
    const double t2 = state.tangent(v).norm2_squared();
    const double lhs = std::abs(fluctuation_char(v, state) - std::exp(-0.5 * t2));
    const Constant b = clt_constant_b(v);
    return BoundReport::make("clt_single", lhs, b.value / std::sqrt(state.spin().value()), b.saturated);
}

cplx weyl_product_expectation(std::span<const TangentField> fields) {
    if (fields.empty()) return 1.0;
    double sigma = 0.0;
    TangentField total = fields[0];
    for (std::size_t j = 0; j < fields.size(); ++j) {
        for (std::size_t k = j + 1; k < fields.size(); ++k) sigma += symplectic_form(fields[j], fields[k]);
        if (j > 0) total = total + fields[j];
    }
    return std::exp(-0.5 * kI * sigma) * std::exp(-0.5 * total.norm2_squared());
}

cplx spin_weyl_product(std::span<const Vec3Field> fields, const CoherentState& state, std::size_t budget) {
    require_same_size(fields, state, "spin_weyl_product");
    const CVector omega = state.product_vector(budget);
    CVector psi = omega;
    for (std::size_t j = fields.size(); j-- > 0;) psi = FluctuationOperator(fields[j], state, budget).apply_exp(psi);
    return omega.dot(psi);
}

BoundReport clt_multi_check(std::span<const Vec3Field> fields, const CoherentState& state, std::size_t budget) {
    if (fields.empty()) throw ContractViolation("clt_multi_check: at least one field required");
    require_same_size(fields, state, "clt_multi_check");
    if (fields.size() == 1) {
        BoundReport r = clt_single_check(fields[0], state);
        r.name = "clt_multi";
        return r;
    }
    std::vector<TangentField> tangents;
    for (const auto& f : fields) tangents.push_back(state.tangent(f));
    const double lhs = std::abs(spin_weyl_product(fields, state, budget) - weyl_product_expectation(tangents));

    const std::vector<Vec3Field> all(fields.begin(), fields.end());
    Constant b = clt_constant_b(sum(all));
    long double rhs = b.value;
    bool saturated = b.saturated;
    for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
        const std::vector<Vec3Field> tail(fields.begin() + j + 1, fields.end());
        const Constant a = clt_constant_a(fields[j], sum(tail));
        rhs += a.value;
        saturated = saturated || a.saturated;
    }
    const Constant total = clamp(rhs / std::sqrt(static_cast<long double>(state.spin().value())));
    return BoundReport::make("clt_multi", lhs, total.value, saturated || total.saturated);
}

BchDefect bch_defect(const Vec3Field& v, const Vec3Field& w, const CoherentState& state, std::size_t budget) {
    const FluctuationOperator fv(v, state, budget), fw(w, state, budget), fvw(v + w, state, budget);
    BchDefect out;
    out.commutator = linalg::commutator(fv.matrix(), fw.matrix());
    // exp(-C/2) = exp(i H) with H = (i/2) C Hermitian
    const CMatrix h = 0.5 * kI * out.commutator;
    const CMatrix diff =
        fv.exp_matrix() * fw.exp_matrix() - fvw.exp_matrix() * linalg::expm_i_hermitian(0.5 * (h + h.adjoint()));
    const double nv = v.norm2(), nw = w.norm2();
    const double lhs = linalg::op_norm(diff);
    const double rhs = nv * nw * (nv + nw) / (3.0 * std::sqrt(state.spin().value()));
    out.report = BoundReport::make("bch", lhs, rhs);
    out.corrected = BoundReport::make("bch_corrected", lhs, 2.0 * std::sqrt(2.0) * rhs);
    return out;
}

std::pair<BoundReport, BoundReport> commutator_bounds(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
    if (!linalg::is_hermitian(a) || !linalg::is_hermitian(b)) {
        throw ContractViolation("commutator_bounds: A and B must be Hermitian");
    }
    if (a.rows() != b.rows() || a.rows() != c.rows() || c.rows() != c.cols()) {
        throw ContractViolation("commutator_bounds: operator dimensions differ");
    }
    const CMatrix ea = linalg::expm_i_hermitian(a);
    const BoundReport first =
        BoundReport::make("commutator_exp", linalg::op_norm(linalg::commutator(ea, c)), linalg::op_norm(linalg::commutator(a, c)));

    const CMatrix ab = linalg::commutator(a, b);
    const CMatrix h = 0.5 * kI * ab;
    const CMatrix lhs_op = ea * linalg::expm_i_hermitian(b) -
                           linalg::expm_i_hermitian(a + b) * linalg::expm_i_hermitian(0.5 * (h + h.adjoint()));
    const double rhs = (linalg::op_norm(linalg::commutator(a, ab)) +
                        linalg::op_norm(linalg::commutator(b, linalg::commutator(b, a)))) / 3.0;
    return {first, BoundReport::make("commutator_bch", linalg::op_norm(lhs_op), rhs)};
}

cplx poly_char_spin(const NoncommPoly& p, std::span<const Vec3Field> fields, const CoherentState& state,
                    std::size_t budget) {
    if (!p.is_selfadjoint()) throw ContractViolation("poly_char_spin: polynomial is not selfadjoint");
    require_same_size(fields, state, "poly_char_spin");
    std::vector<CMatrix> ops;
    for (const auto& f : fields) ops.push_back(FluctuationOperator(f, state, budget).matrix());
    const CMatrix pm = p.evaluate(ops);
    const CVector omega = state.product_vector(budget);
    return omega.dot(linalg::expm_i_hermitian(0.5 * (pm + pm.adjoint())) * omega);
}

}  // namespace spinclt
