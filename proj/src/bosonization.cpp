#include "spinclt/bosonization.hpp"

#include "spinclt/fluctuation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace spinclt {

namespace {

constexpr double kKernelTolerance = 1e-12;

Eigen::Matrix3d frame_matrix(const Direction& u) {
    // rows f^1, f^2, f^3
    const RotatedFrame f = rotated_frame(u);
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) m(i, k) = f.axis(i)[k];
    return m;
}

double coupling_scale(const SpinHamiltonianSpec& spec) {
    double s = 0.0;
    for (std::size_t x = 0; x < spec.sites(); ++x) {
        for (std::size_t y = 0; y < spec.sites(); ++y) s += spec.coupling(x, y).cwiseAbs().sum();
        s += length(spec.field(x));
    }
    return s;
}

void require_admissible(const RotatedCoefficients& r, const char* who) {
    if (!r.admissible) {
        throw ContractViolation(std::string(who) + ": the coherent state is not an eigenvector of this Hamiltonian (" +
                                std::to_string(r.violations.size()) + " violated conditions)");
    }
}

std::vector<double> lowest(const RVector& eig, int m) {
    std::vector<double> out(eig.data(), eig.data() + eig.size());
    std::sort(out.begin(), out.end());
    out.resize(std::min<std::size_t>(out.size(), static_cast<std::size_t>(m)));
    return out;
}

// (e^{i t lam} - 1)/(i lam) and its time integral, with series near lam t = 0
std::pair<cplx, cplx> mode_integrals(double lam, double t) {
    if (std::abs(lam) <= kKernelTolerance) return {t, 0.5 * t * t};
    const double x = lam * t;
    if (std::abs(x) < 0.1) {
        cplx c = 0.0, integral = 0.0, term = t;  // term = (i lam)^{k-1} t^k / k!
        for (int k = 1; k <= 20; ++k) {
            c += term;
            const cplx next = term * kI * lam * t / static_cast<double>(k + 1);
            integral += next / (kI * lam);
            term = next;
        }
        return {c, integral};
    }
    const double half = std::sin(0.5 * x);
    const cplx em1(-2.0 * half * half, std::sin(x));  // e^{ix} - 1
    const cplx c = em1 / (kI * lam);
    return {c, (c - t) / (kI * lam)};
}

struct Eigensystem {
    RVector values;
    CMatrix vectors;
};

Eigensystem eigensystem(const CMatrix& h) {
    if (!linalg::is_hermitian(h, 1e-12)) throw ContractViolation("one-particle operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
    return {es.eigenvalues(), es.eigenvectors()};
}

CVector tangent_vector(const TangentField& t) {
    CVector v(t.size());
    for (std::size_t x = 0; x < t.size(); ++x) v[x] = t.plus[x];
    return v;
}

}  // namespace

SpinHamiltonianSpec::SpinHamiltonianSpec(std::size_t sites)
    : sites_(sites), h_(sites * sites, Coupling::Zero()), g_(sites, Vec3{0, 0, 0}) {
    if (sites == 0) throw ContractViolation("SpinHamiltonianSpec: at least one site required");
}

SpinHamiltonianSpec& SpinHamiltonianSpec::add_pair(std::size_t x, std::size_t y, const Coupling& h) {
    if (x >= sites_ || y >= sites_) throw ContractViolation("SpinHamiltonianSpec::add_pair: site out of range");
    if (!h.allFinite()) throw ContractViolation("SpinHamiltonianSpec::add_pair: coupling must be finite");
    h_[x * sites_ + y] += h;
    return *this;
}

SpinHamiltonianSpec& SpinHamiltonianSpec::set_field(std::size_t x, const Vec3& g) {
    if (x >= sites_) throw ContractViolation("SpinHamiltonianSpec::set_field: site out of range");
    for (double c : g)
        if (!std::isfinite(c)) throw ContractViolation("SpinHamiltonianSpec::set_field: field must be finite");
    g_[x] = g;
    return *this;
}

SpinHamiltonianSpec& SpinHamiltonianSpec::set_uniform_field(const Vec3& g) {
    for (std::size_t x = 0; x < sites_; ++x) set_field(x, g);
    return *this;
}

CMatrix hamiltonian_matrix(const SpinHamiltonianSpec& spec, HalfInt j, std::size_t budget) {
    const SpinSystem sys(spec.sites(), j, budget);
    std::vector<std::array<CMatrix, 3>> s(spec.sites());
    for (std::size_t x = 0; x < spec.sites(); ++x)
        for (int i = 0; i < 3; ++i) s[x][i] = sys.embed(sys.local().component(i), x);

    CMatrix h = CMatrix::Zero(sys.dim(), sys.dim());
    for (std::size_t x = 0; x < spec.sites(); ++x) {
        for (std::size_t y = 0; y < spec.sites(); ++y) {
            const Coupling& c = spec.coupling(x, y);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (c(a, b) != 0.0) h -= c(a, b) * (s[x][a] * s[y][b]);
        }
        for (int i = 0; i < 3; ++i)
            if (spec.field(x)[i] != 0.0) h -= j.value() * spec.field(x)[i] * s[x][i];
    }
    return h;
}

RotatedCoefficients rotate_hamiltonian(const SpinHamiltonianSpec& spec, std::span<const Direction> directions,
                                       std::size_t budget) {
    const std::size_t n = spec.sites();
    if (directions.size() != n) throw ContractViolation("rotate_hamiltonian: one direction per site required");
    RotatedCoefficients r;
    r.sites = n;
    r.directions.assign(directions.begin(), directions.end());
    std::vector<Eigen::Matrix3d> frames;
    for (const auto& u : directions) frames.push_back(frame_matrix(u));

    // S^k_x = sum_i (f^i_x)_k S~^i_x
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const Coupling ht = frames[x] * spec.coupling(x, y) * frames[y].transpose();
            r.h.push_back(ht);
            r.h_mp.push_back(0.25 * cplx(ht(0, 0) + ht(1, 1), ht(1, 0) - ht(0, 1)));
            r.h_pm.push_back(0.25 * cplx(ht(0, 0) + ht(1, 1), ht(0, 1) - ht(1, 0)));
            r.h_mm.push_back(0.25 * cplx(ht(0, 0) - ht(1, 1), ht(0, 1) + ht(1, 0)));
        }
        const Eigen::Vector3d g = frames[x] * Eigen::Vector3d(spec.field(x)[0], spec.field(x)[1], spec.field(x)[2]);
        r.g.push_back(Vec3{g[0], g[1], g[2]});
    }

    const double tol = 1e-12 * std::max(1.0, coupling_scale(spec));
    for (std::size_t x = 0; x < n; ++x) {
        for (int i = 0; i < 2; ++i) {
            double row = 0.0, col = 0.0;
            for (std::size_t y = 0; y < n; ++y) {
                row += r.h[x * n + y](i, 2);
                // the S~^3_y S~^i_x terms collect on site x through the first index
                col += r.h[y * n + x](2, i);
            }
            if (std::abs(row) > tol) r.violations.push_back({"h_i3 row", i + 1, x, row});
            if (std::abs(col) > tol) r.violations.push_back({"h_3i row", i + 1, x, col});
            if (std::abs(r.g[x][i]) > tol) r.violations.push_back({"g_i", i + 1, x, r.g[x][i]});
        }
        for (std::size_t y = x; y < n; ++y) {
            // S~^-_x S~^-_y = S~^-_y S~^-_x for x != y, so only the symmetric part acts
            const cplx mm = x == y ? r.h_mm[x * n + x] : r.h_mm[x * n + y] + r.h_mm[y * n + x];
            if (std::abs(mm) > tol) r.violations.push_back({"h_--", 0, x, std::abs(mm)});
        }
    }

    const double scale = std::max(1.0, coupling_scale(spec));
    for (int tj = 1; tj <= 2; ++tj) {
        const HalfInt j(tj);
        std::size_t dim = 1;
        for (std::size_t x = 0; x < n && dim <= budget; ++x) dim *= j.dim();
        if (dim > budget) break;
        const CMatrix h = hamiltonian_matrix(spec, j, budget);
        const CVector omega = CoherentState(r.directions, j).product_vector(budget);
        const CVector ho = h * omega;
        const double res = (ho - omega.dot(ho) * omega).norm() / (scale * j.value() * j.value());
        r.residual = std::max(r.residual.value_or(0.0), res);
    }
    r.admissible = r.violations.empty() && (!r.residual || *r.residual < kEigenResidualTolerance);
    return r;
}

RenormalizedHamiltonian renormalize(const SpinHamiltonianSpec& spec, const RotatedCoefficients& rotated, HalfInt j,
                                    std::size_t budget) {
    require_admissible(rotated, "renormalize");
    if (rotated.sites != spec.sites()) throw ContractViolation("renormalize: rotated coefficients belong to another lattice");
    RenormalizedHamiltonian out;
    out.spin = j;
    out.matrix = hamiltonian_matrix(spec, j, budget);
    const CVector omega = CoherentState(rotated.directions, j).product_vector(budget);
    out.shift = omega.dot(out.matrix * omega).real();
    out.matrix.diagonal().array() -= out.shift;
    out.residual = (out.matrix * omega).norm();
    const RVector eig = linalg::eigvalsh(out.matrix);
    out.min_eigenvalue = eig.minCoeff();
    out.positive_semidefinite = out.min_eigenvalue >= -1e-9 * std::max(1.0, eig.cwiseAbs().maxCoeff());
    return out;
}

CMatrix one_particle_operator(const RotatedCoefficients& r) {
    const std::size_t n = r.sites;
    CMatrix h = CMatrix::Zero(n, n);
    for (std::size_t x = 0; x < n; ++x) {
        double e = 0.0;
        for (std::size_t y = 0; y < n; ++y) e += r.h33(x, y) + r.h33(y, x);
        h(x, x) += e + r.g[x][2];
        for (std::size_t y = 0; y < n; ++y) h(x, y) -= 2.0 * (r.mp(x, y) + r.pm(y, x));
    }
    return h;
}

BosonLimit build_boson_limit(const RotatedCoefficients& rotated, const FockSpace& fock) {
    require_admissible(rotated, "build_boson_limit");
    if (rotated.sites != fock.sites()) throw ContractViolation("build_boson_limit: lattice sizes differ");
    BosonLimit out;
    out.one_particle = one_particle_operator(rotated);
    out.fock = CMatrix::Zero(fock.dim(), fock.dim());
    for (std::size_t x = 0; x < fock.sites(); ++x)
        for (std::size_t y = 0; y < fock.sites(); ++y)
            if (out.one_particle(x, y) != cplx{0.0, 0.0}) out.fock += out.one_particle(x, y) * (fock.adag(x) * fock.a(y));
    return out;
}

CMatrix quartic_remainder(const RotatedCoefficients& rotated, const FockSpace& fock, HalfInt j) {
    if (rotated.sites != fock.sites()) throw ContractViolation("quartic_remainder: lattice sizes differ");
    CMatrix q = CMatrix::Zero(fock.dim(), fock.dim());
    for (Eigen::Index i = 0; i < fock.dim(); ++i) {
        const auto& n = fock.occupations(i);
        double acc = 0.0;
        for (std::size_t x = 0; x < fock.sites(); ++x)
            for (std::size_t y = 0; y < fock.sites(); ++y) acc += rotated.h33(x, y) * n[x] * n[y];
        q(i, i) = -acc / j.value();
    }
    return q;
}

SpectralTable spectral_compare(const SpinHamiltonianSpec& spec, const RotatedCoefficients& rotated,
                               std::span<const HalfInt> spins, int m, std::size_t budget) {
    require_admissible(rotated, "spectral_compare");
    if (m < 1) throw ContractViolation("spectral_compare: m must be >= 1");
    SpectralTable table;

    const FockSpace fock(spec.sites(), m, budget);
    const BosonLimit limit = build_boson_limit(rotated, fock);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < fock.dim(); ++i)
        if (fock.total(i) <= m) keep.push_back(i);
    CMatrix block(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c) block(r, c) = limit.fock(keep[r], keep[c]);
    table.boson_levels = lowest(linalg::eigvalsh(block), m);

    std::vector<std::vector<double>> xs(m), errs(m);
    for (HalfInt j : spins) {
        const RenormalizedHamiltonian h = renormalize(spec, rotated, j, budget);
        const RVector eig = linalg::eigvalsh(h.matrix / j.value());
        const std::vector<double> levels = lowest(eig, m);
        int degeneracy = 0;
        for (Eigen::Index i = 0; i < eig.size(); ++i)
            if (std::abs(eig[i] - levels[0]) < 1e-9) ++degeneracy;
        table.ground_degeneracy.push_back(degeneracy);
        for (std::size_t k = 0; k < levels.size() && k < table.boson_levels.size(); ++k) {
            const double err = std::abs(levels[k] - table.boson_levels[k]);
            table.rows.push_back({j, static_cast<int>(k), levels[k], table.boson_levels[k], err});
            xs[k].push_back(j.value());
            // roundoff-level errors count as zero for the trend
            errs[k].push_back(err < 1e-12 ? 0.0 : err);
        }
    }
    for (int k = 0; k < m; ++k) {
        table.fits.push_back(fit_power_law(xs[k], errs[k]));
        table.monotone.push_back(monotone_decreasing(errs[k]));
    }
    return table;
}

CVector evolved_tangent(const CMatrix& h, const CVector& v, double t) {
    if (v.size() != h.rows()) throw ContractViolation("evolved_tangent: dimension mismatch");
    const Eigensystem es = eigensystem(h);
    CVector c = es.vectors.adjoint() * v;
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= mode_integrals(es.values[i], t).first;
    return es.vectors * c;
}

double evolution_phase(const CMatrix& h, const CVector& v, double t) {
    if (v.size() != h.rows()) throw ContractViolation("evolution_phase: dimension mismatch");
    const Eigensystem es = eigensystem(h);
    const CVector c = es.vectors.adjoint() * v;
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) acc += std::norm(c[i]) * mode_integrals(es.values[i], t).second;
    // -(1/2) int sigma(v, v^s) ds with sigma = 2 Im <.,.>
    return -acc.imag();
}

CVector boson_prediction(const CMatrix& h, const CVector& v, double t, const FockSpace& fock) {
    if (static_cast<std::size_t>(v.size()) != fock.sites()) throw ContractViolation("boson_prediction: lattice sizes differ");
    const CVector w = evolved_tangent(h, v, t);
    const cplx prefactor = std::exp(kI * evolution_phase(h, v, t)) * std::exp(-0.5 * w.squaredNorm());
    // e^{iF(w)} Omega~ is the coherent vector with amplitude i w
    CVector out(fock.dim());
    for (Eigen::Index i = 0; i < fock.dim(); ++i) {
        cplx c = prefactor;
        const auto& n = fock.occupations(i);
        for (std::size_t x = 0; x < n.size(); ++x) {
            for (int k = 1; k <= n[x]; ++k) c *= kI * w[x] / std::sqrt(static_cast<double>(k));
        }
        out[i] = c;
    }
    return out;
}

EvolutionTable perturbed_evolution(const SpinHamiltonianSpec& spec, const RotatedCoefficients& rotated,
                                   const Vec3Field& v, std::span<const double> times, std::span<const HalfInt> spins,
                                   std::size_t budget) {
    require_admissible(rotated, "perturbed_evolution");
    if (v.size() != spec.sites()) throw ContractViolation("perturbed_evolution: field size differs from site count");
    EvolutionTable table;
    const CMatrix h = one_particle_operator(rotated);
    const CVector vt = tangent_vector(project_tangent(v, rotated.directions));

    const double step = 1e-4;
    for (double t : times) {
        const CVector fd = (evolved_tangent(h, vt, t + step) - evolved_tangent(h, vt, t - step)) / (2.0 * step);
        const CVector exact = linalg::expm_i_hermitian(h, t) * vt;
        table.derivative_defect = std::max(table.derivative_defect, (fd - exact).cwiseAbs().maxCoeff());
    }

    std::vector<std::vector<double>> deficits(times.size());
    for (HalfInt j : spins) {
        const CoherentState state(rotated.directions, j);
        const RenormalizedHamiltonian hj = renormalize(spec, rotated, j, budget);
        const CMatrix generator = hj.matrix / j.value() + FluctuationOperator(v, state, budget).matrix();
        const CVector omega = state.product_vector(budget);
        const FockSpace fock(spec.sites(), j.twice(), budget);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const CVector spin = spin_to_fock(linalg::expm_i_hermitian(generator, times[k]) * omega, state, fock);
            const CVector boson = boson_prediction(h, vt, times[k], fock);
            EvolutionRow row;
            row.time = times[k];
            row.spin = j;
            row.fidelity = std::abs(boson.dot(spin));
            row.truncation = std::sqrt(std::max(0.0, 1.0 - boson.squaredNorm()));
            table.constant = std::max(table.constant, (1.0 - row.fidelity) * j.value());
            deficits[k].push_back(std::max(0.0, 1.0 - row.fidelity));
            table.rows.push_back(row);
        }
    }
    for (const auto& d : deficits) table.monotone.push_back(monotone_decreasing(d));
    return table;
}

}  // namespace spinclt
