#include "spinclt/fock.hpp"

#include "spinclt/fluctuation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace spinclt {

namespace {

double factorial_ratio_sqrt(int n, int k) {
    // [(n+k)!/n!]^{1/2}
    double acc = 1.0;
    for (int i = n + 1; i <= n + k; ++i) acc *= i;
    return std::sqrt(acc);
}

void require_sector(const SectorVector& psi, const FockSpace& fock, const char* who) {
    if (psi.vec.size() != fock.dim()) throw ContractViolation(std::string(who) + ": vector dimension mismatch");
    if (fock.off_sector_norm(psi.vec, psi.n) > 1e-12 * std::max(1.0, psi.vec.norm())) {
        throw ContractViolation(std::string(who) + ": vector is not supported on sector " + std::to_string(psi.n));
    }
}

void require_cap(const FockSpace& fock, int needed, const char* who) {
    if (fock.cap() < needed) {
        throw ContractViolation(std::string(who) + ": occupation cap " + std::to_string(fock.cap()) +
                                " is below the required " + std::to_string(needed));
    }
}

// P_J F P_J for the rotated-spin form on the lattice of `state`
CMatrix dyson_from_tangent(const TangentField& t, HalfInt j, const FockSpace& fock) {
    const RVector p = fock.projector_diag(j);
    CMatrix out = CMatrix::Zero(fock.dim(), fock.dim());
    const double scale = std::sqrt(2.0 / j.value());
    for (std::size_t x = 0; x < fock.sites(); ++x) {
        const RVector g = fock.g_sqrt_diag(j, x);
        const CMatrix& a = fock.a(x);
        // a* g^{1/2} and g^{1/2} a
        const CMatrix up = a.adjoint() * g.asDiagonal();
        const CMatrix down = g.asDiagonal() * a;
        out += t.plus[x] * up + std::conj(t.plus[x]) * down;
        RVector n(fock.dim());
        for (Eigen::Index i = 0; i < fock.dim(); ++i) n[i] = fock.occupations(i)[x];
        out.diagonal() -= (scale * t.axial[x]) * n.cast<cplx>();
    }
    return p.asDiagonal() * out * p.asDiagonal();
}

}  // namespace

FockSpace::FockSpace(std::size_t sites, int cap, std::size_t budget) : sites_(sites), cap_(cap), dim_(1) {
    if (sites == 0) throw ContractViolation("FockSpace: at least one site required");
    if (cap < 1) throw ContractViolation("FockSpace: occupation cap must be >= 1");
    const std::size_t d = static_cast<std::size_t>(cap) + 1;
    std::size_t dim = 1;
    for (std::size_t i = 0; i < sites; ++i) dim = dim > SIZE_MAX / d ? SIZE_MAX : dim * d;
    check_budget(dim, budget,
                 "Fock space (cap+1)^sites with cap=" + std::to_string(cap) + ", sites=" + std::to_string(sites));
    dim_ = static_cast<Eigen::Index>(dim);

    occ_.resize(dim);
    total_.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<int> n(sites);
        std::size_t rest = i;
        for (std::size_t x = sites; x-- > 0;) {
            n[x] = static_cast<int>(rest % d);
            rest /= d;
        }
        total_[i] = std::accumulate(n.begin(), n.end(), 0);
        occ_[i] = std::move(n);
    }

    CMatrix mode = CMatrix::Zero(cap + 1, cap + 1);
    for (int n = 1; n <= cap; ++n) mode(n - 1, n) = std::sqrt(static_cast<double>(n));
    for (std::size_t x = 0; x < sites; ++x) {
        std::vector<CMatrix> factors(sites, CMatrix::Identity(cap + 1, cap + 1));
        factors[x] = mode;
        a_.push_back(linalg::kron_all(factors));
    }
}

Eigen::Index FockSpace::index(std::span<const int> n) const {
    if (n.size() != sites_) throw ContractViolation("FockSpace::index: wrong number of occupations");
    Eigen::Index i = 0;
    for (int nx : n) {
        if (nx < 0 || nx > cap_) throw ContractViolation("FockSpace::index: occupation outside [0, cap]");
        i = i * (cap_ + 1) + nx;
    }
    return i;
}

CMatrix FockSpace::number(std::size_t x) const {
    if (x >= sites_) throw ContractViolation("FockSpace::number: site out of range");
    CMatrix n = CMatrix::Zero(dim_, dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) n(i, i) = occ_[i][x];
    return n;
}

CVector FockSpace::vacuum() const {
    CVector v = CVector::Zero(dim_);
    v[0] = 1.0;
    return v;
}

CVector FockSpace::basis_vector(std::span<const int> n) const {
    CVector v = CVector::Zero(dim_);
    v[index(n)] = 1.0;
    return v;
}

RVector FockSpace::g_sqrt_diag(HalfInt j, std::size_t x) const {
    RVector g(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) g[i] = std::sqrt(g_factor(j, occ_[i].at(x)));
    return g;
}

RVector FockSpace::projector_diag(HalfInt j) const {
    RVector p(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
        const auto& n = occ_[i];
        p[i] = std::all_of(n.begin(), n.end(), [&](int nx) { return nx <= j.twice(); }) ? 1.0 : 0.0;
    }
    return p;
}

double FockSpace::cap_leakage(const CVector& psi) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dim_; ++i) {
        const auto& n = occ_[i];
        if (std::find(n.begin(), n.end(), cap_) != n.end()) acc += std::norm(psi[i]);
    }
    return std::sqrt(acc);
}

double FockSpace::off_sector_norm(const CVector& psi, int n) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dim_; ++i) {
        if (total_[i] != n) acc += std::norm(psi[i]);
    }
    return std::sqrt(acc);
}

double g_factor(HalfInt j, int n) {
    if (n < 0) throw ContractViolation("g_factor: occupation must be >= 0");
    if (n > j.twice()) return 0.0;
    return 1.0 - static_cast<double>(n) / j.twice();
}

SectorVector random_sector_vector(const FockSpace& fock, int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    SectorVector out;
    out.n = n;
    out.vec = CVector::Zero(fock.dim());
    for (Eigen::Index i = 0; i < fock.dim(); ++i) {
        if (fock.total(i) == n) out.vec[i] = cplx(gauss(rng), gauss(rng));
    }
    const double norm = out.vec.norm();
    if (norm == 0.0) throw ContractViolation("random_sector_vector: sector " + std::to_string(n) + " is empty");
    out.vec /= norm;
    return out;
}

SectorVector make_sector_vector(const FockSpace& fock, const CVector& psi, int n) {
    SectorVector out{psi, n};
    require_sector(out, fock, "make_sector_vector");
    return out;
}

CMatrix boson_field(const TangentField& t, const FockSpace& fock) {
    if (t.size() != fock.sites()) throw ContractViolation("boson_field: field size differs from site count");
    CMatrix out = CMatrix::Zero(fock.dim(), fock.dim());
    for (std::size_t x = 0; x < fock.sites(); ++x) {
        if (t.plus[x] == cplx{0.0, 0.0}) continue;
        const CMatrix& a = fock.a(x);
        out += t.plus[x] * a.adjoint() + std::conj(t.plus[x]) * a;
    }
    return out;
}

DysonSpinOps dyson_spin_ops(HalfInt j, const FockSpace& fock) {
    require_cap(fock, j.twice(), "dyson_spin_ops");
    const RVector p = fock.projector_diag(j);
    DysonSpinOps ops;
    for (std::size_t x = 0; x < fock.sites(); ++x) {
        const RVector g = fock.g_sqrt_diag(j, x);
        const CMatrix& a = fock.a(x);
        ops.lower.push_back(p.asDiagonal() * (a.adjoint() * g.asDiagonal()));
        ops.raise.push_back((g.asDiagonal() * a) * p.asDiagonal());
        ops.number.push_back(p.asDiagonal() * fock.number(x) * p.asDiagonal());
    }
    return ops;
}

CMatrix dyson_fluctuation(const Vec3Field& v, const CoherentState& state, const FockSpace& fock) {
    require_cap(fock, state.spin().twice(), "dyson_fluctuation");
    if (v.size() != fock.sites() || state.sites() != fock.sites()) {
        throw ContractViolation("dyson_fluctuation: lattice sizes differ");
    }
    return dyson_from_tangent(state.tangent(v), state.spin(), fock);
}

CMatrix spin_wave_frame(const CoherentState& state, std::size_t budget) {
    const SpinSystem sys(state.sites(), state.spin(), budget);
    std::vector<CMatrix> bases;
    for (const auto& u : state.directions()) bases.push_back(spin_wave_basis(state.spin(), u));
    return linalg::kron_all(bases);
}

namespace {

// Fock index of each spin-lattice basis index
std::vector<Eigen::Index> spin_to_fock_index(const CoherentState& state, const FockSpace& fock) {
    require_cap(fock, state.spin().twice(), "spin/Fock identification");
    if (state.sites() != fock.sites()) throw ContractViolation("spin/Fock identification: lattice sizes differ");
    const SpinSystem sys(state.sites(), state.spin(), static_cast<std::size_t>(fock.dim()));
    const int d = state.spin().dim();
    std::vector<Eigen::Index> out(sys.dim());
    std::vector<int> n(state.sites());
    for (std::size_t k = 0; k < sys.dim(); ++k) {
        std::size_t rest = k;
        for (std::size_t x = state.sites(); x-- > 0;) {
            n[x] = static_cast<int>(rest % d);
            rest /= d;
        }
        out[k] = fock.index(n);
    }
    return out;
}

}  // namespace

CVector spin_to_fock(const CVector& psi, const CoherentState& state, const FockSpace& fock) {
    const auto map = spin_to_fock_index(state, fock);
    const CVector coeff = spin_wave_frame(state, map.size()).adjoint() * psi;
    CVector out = CVector::Zero(fock.dim());
    for (std::size_t k = 0; k < map.size(); ++k) out[map[k]] = coeff[k];
    return out;
}

CVector fock_to_spin(const CVector& phi, const CoherentState& state, const FockSpace& fock) {
    const auto map = spin_to_fock_index(state, fock);
    CVector coeff(map.size());
    for (std::size_t k = 0; k < map.size(); ++k) coeff[k] = phi[map[k]];
    return spin_wave_frame(state, map.size()) * coeff;
}

CMatrix spin_operator_to_fock(const CMatrix& op, const CoherentState& state, const FockSpace& fock) {
    const auto map = spin_to_fock_index(state, fock);
    const CMatrix frame = spin_wave_frame(state, map.size());
    const CMatrix m = frame.adjoint() * op * frame;
    CMatrix out = CMatrix::Zero(fock.dim(), fock.dim());
    for (std::size_t r = 0; r < map.size(); ++r)
        for (std::size_t c = 0; c < map.size(); ++c) out(map[r], map[c]) = m(r, c);
    return out;
}

BoundReport petz_bound_check(const TangentField& t, const SectorVector& psi, const FockSpace& fock) {
    require_sector(psi, fock, "petz_bound_check");
    require_cap(fock, psi.n + 1, "petz_bound_check");
    const double lhs = (boson_field(t, fock) * psi.vec).norm();
    return BoundReport::make("petz", lhs, 2.0 * t.norm2() * std::sqrt(psi.n + 1.0) * psi.vec.norm());
}

BoundReport petzJ_bound_check(const Vec3Field& v, const CoherentState& state, const SectorVector& psi,
                              const FockSpace& fock) {
    require_sector(psi, fock, "petzJ_bound_check");
    if (!(state.spin().twice() > psi.n)) {
        throw ContractViolation("petzJ_bound_check: requires 2J > n (2J=" + std::to_string(state.spin().twice()) +
                                ", n=" + std::to_string(psi.n) + ")");
    }
    const double lhs = (dyson_fluctuation(v, state, fock) * psi.vec).norm();
    return BoundReport::make("petz_J", lhs, 4.0 * v.norm1() * std::sqrt(psi.n + 1.0) * psi.vec.norm());
}

BoundReport convergence_single(const Vec3Field& v, const CoherentState& state, const SectorVector& psi,
                               const FockSpace& fock) {
    require_sector(psi, fock, "convergence_single");
    if (!(state.spin().twice() > psi.n + 1)) {
        throw ContractViolation("convergence_single: requires 2J > n+1");
    }
    require_cap(fock, psi.n + 1, "convergence_single");
    const CMatrix diff = boson_field(state.tangent(v), fock) - dyson_fluctuation(v, state, fock);
    const double lhs = (diff * psi.vec).norm();
    const double rhs = 4.0 * v.norm1() * psi.n / std::sqrt(static_cast<double>(state.spin().twice())) * psi.vec.norm();
    return BoundReport::make("convergence_single", lhs, rhs);
}

BoundReport convergence_product(std::span<const Vec3Field> fields, const CoherentState& state,
                                const SectorVector& psi, const FockSpace& fock) {
    require_sector(psi, fock, "convergence_product");
    const int k = static_cast<int>(fields.size());
    if (k < 1) throw ContractViolation("convergence_product: at least one factor required");
    if (!(state.spin().twice() > psi.n + k)) throw ContractViolation("convergence_product: requires 2J > n+k");
    require_cap(fock, psi.n + k, "convergence_product");
    CVector boson = psi.vec, spin = psi.vec;
    double prod_norm = 1.0;
    for (int j = k; j-- > 0;) {
        boson = boson_field(state.tangent(fields[j]), fock) * boson;
        spin = dyson_fluctuation(fields[j], state, fock) * spin;
        prod_norm *= fields[j].norm1();
    }
    double sum = 0.0;
    for (int i = 1; i <= k; ++i) sum += std::pow(2.0, k + i) * std::sqrt(static_cast<double>(psi.n + k - i));
    const double rhs = prod_norm * factorial_ratio_sqrt(psi.n, k) * sum /
                       std::sqrt(static_cast<double>(state.spin().twice())) * psi.vec.norm();
    return BoundReport::make("convergence_product", (boson - spin).norm(), rhs);
}

BoundReport moments_check(std::span<const Vec3Field> fields, const CoherentState& state, std::size_t budget) {
    const int k = static_cast<int>(fields.size());
    if (k < 1) throw ContractViolation("moments_check: at least one factor required");
    if (!(state.spin().twice() > k)) throw ContractViolation("moments_check: requires 2J > k");

    const CVector omega = state.product_vector(budget);
    CVector spin = omega;
    for (int j = k; j-- > 0;) spin = FluctuationOperator(fields[j], state, budget).matrix() * spin;
    const cplx spin_value = omega.dot(spin);

    // k factors from the vacuum never reach occupation k+1
    const FockSpace fock(state.sites(), k, budget);
    CVector boson = fock.vacuum();
    double prod_norm = 1.0;
    for (int j = k; j-- > 0;) {
        boson = boson_field(state.tangent(fields[j]), fock) * boson;
        prod_norm *= fields[j].norm1();
    }
    const cplx boson_value = boson[0];

    double sum = 0.0;
    for (int i = 1; i <= k; ++i) sum += std::pow(2.0, k + i) * std::sqrt(static_cast<double>(k - i));
    const double rhs = factorial_ratio_sqrt(0, k) * prod_norm * sum / std::sqrt(static_cast<double>(state.spin().twice()));
    return BoundReport::make("moments_k" + std::to_string(k), std::abs(spin_value - boson_value), rhs);
}

BosonPolyValue poly_char_boson(const NoncommPoly& p, std::span<const TangentField> fields, int initial_cap,
                               double tol, int step, std::size_t budget) {
    if (!p.is_selfadjoint()) throw ContractViolation("poly_char_boson: polynomial is not selfadjoint");
    if (fields.empty() || static_cast<int>(fields.size()) != p.generators()) {
        throw ContractViolation("poly_char_boson: one field per generator required");
    }
    if (step < 1) throw ContractViolation("poly_char_boson: step must be >= 1");
    const std::size_t sites = fields[0].size();
    BosonPolyValue out;
    bool have_previous = false;
    for (int cap = initial_cap;; cap += step) {
        std::size_t dim = 1;
        for (std::size_t x = 0; x < sites; ++x) dim *= static_cast<std::size_t>(cap) + 1;
        if (dim > budget) {
            if (!have_previous) check_budget(dim, budget, "poly_char_boson Fock space");
            return out;  // best value so far, not converged
        }
        const FockSpace fock(sites, cap, budget);
        std::vector<CMatrix> ops;
        for (const auto& t : fields) ops.push_back(boson_field(t, fock));
        const CMatrix pm = p.evaluate(ops);
        const CVector psi = linalg::expm_i_hermitian(0.5 * (pm + pm.adjoint())) * fock.vacuum();
        const cplx value = psi[0];
        out.change = have_previous ? std::abs(value - out.value) : INFINITY;
        out.value = value;
        out.cap = cap;
        out.leakage = fock.cap_leakage(psi);
        if (have_previous && out.change < tol) {
            out.converged = true;
            return out;
        }
        have_previous = true;
    }
}

CVector spectral_function_apply(const std::function<double(double)>& f, const CMatrix& op, const CVector& psi) {
    if (!linalg::is_hermitian(op, 1e-12)) throw ContractViolation("spectral_function_apply: operator is not Hermitian");
    if (psi.size() != op.rows()) throw ContractViolation("spectral_function_apply: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (op + op.adjoint()));
    CVector coeff = es.eigenvectors().adjoint() * psi;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] *= f(es.eigenvalues()[i]);
    return es.eigenvectors() * coeff;
}

SpectralMeasure spectral_measure(const CMatrix& op, const CVector& psi) {
    if (!linalg::is_hermitian(op, 1e-12)) throw ContractViolation("spectral_measure: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (op + op.adjoint()));
    const CVector coeff = es.eigenvectors().adjoint() * psi;
    SpectralMeasure mu;
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < coeff.size(); ++i) {
        const double lam = es.eigenvalues()[i];
        const double w = std::norm(coeff[i]);
        // eigenvalues come sorted; merge numerically degenerate ones
        if (!mu.atoms.empty() && lam - mu.atoms.back() < 1e-10 * scale) {
            mu.weights.back() += w;
        } else {
            mu.atoms.push_back(lam);
            mu.weights.push_back(w);
        }
    }
    return mu;
}

double kolmogorov_to_gaussian(const SpectralMeasure& mu, double sigma) {
    if (!(sigma > 0.0)) throw ContractViolation("kolmogorov_to_gaussian: sigma must be positive");
    double total = std::accumulate(mu.weights.begin(), mu.weights.end(), 0.0);
    double below = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const double phi = 0.5 * std::erfc(-mu.atoms[i] / (sigma * std::sqrt(2.0)));
        const double after = below + mu.weights[i] / total;
        worst = std::max({worst, std::abs(below - phi), std::abs(after - phi)});
        below = after;
    }
    return worst;
}

}  // namespace spinclt
