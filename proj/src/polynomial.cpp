#include "spinclt/polynomial.hpp"

#include "spinclt/types.hpp"

#include <algorithm>
#include <sstream>

namespace spinclt {

NoncommPoly::NoncommPoly(int generators) : generators_(generators) {
    if (generators < 1) throw ContractViolation("NoncommPoly: need at least one generator");
}

NoncommPoly NoncommPoly::generator(int generators, int index) {
    NoncommPoly p(generators);
    p.add_term(1.0, {index});
    return p;
}

NoncommPoly NoncommPoly::anticommutator(int generators, int i, int j) {
    NoncommPoly p(generators);
    p.add_term(1.0, {i, j});
    p.add_term(1.0, {j, i});
    return p;
}

NoncommPoly& NoncommPoly::add_term(cplx coeff, Word word) {
    for (int g : word) {
        if (g < 0 || g >= generators_) {
            throw ContractViolation("NoncommPoly: generator index " + std::to_string(g) + " out of range");
        }
    }
    auto it = terms_.find(word);
    if (it == terms_.end()) {
        if (coeff != cplx{0.0, 0.0}) terms_.emplace(std::move(word), coeff);
        return *this;
    }
    it->second += coeff;
    if (it->second == cplx{0.0, 0.0}) terms_.erase(it);
    return *this;
}

NoncommPoly NoncommPoly::adjoint() const {
    NoncommPoly out(generators_);
    for (const auto& [word, coeff] : terms_) {
        Word rev(word.rbegin(), word.rend());
        out.add_term(std::conj(coeff), std::move(rev));
    }
    return out;
}

bool NoncommPoly::is_selfadjoint() const { return adjoint().terms_ == terms_; }

CMatrix NoncommPoly::evaluate(std::span<const CMatrix> ops) const {
    if (static_cast<int>(ops.size()) != generators_) {
        throw ContractViolation("NoncommPoly::evaluate: expected " + std::to_string(generators_) + " operators, got " +
                                std::to_string(ops.size()));
    }
    const Eigen::Index d = ops[0].rows();
    for (const auto& op : ops) {
        if (op.rows() != d || op.cols() != d) throw ContractViolation("NoncommPoly::evaluate: operator size mismatch");
    }
    CMatrix out = CMatrix::Zero(d, d);
    for (const auto& [word, coeff] : terms_) {
        CMatrix acc = CMatrix::Identity(d, d);
        for (int g : word) acc = acc * ops[g];
        out += coeff * acc;
    }
    return out;
}

std::string NoncommPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [word, coeff] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << coeff.real() << (coeff.imag() < 0 ? "-" : "+") << std::abs(coeff.imag()) << "i)";
        if (word.empty()) os << "1";
        for (int g : word) os << "X" << (g + 1);
    }
    return os.str();
}

}  // namespace spinclt
