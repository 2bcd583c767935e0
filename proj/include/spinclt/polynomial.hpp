#pragma once

#include "spinclt/linalg.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace spinclt {

/// Complex linear combination of words in k noncommuting generators X_1..X_k.
/// Words are stored with 0-based generator indices; the empty word is the identity.
class NoncommPoly {
public:
    using Word = std::vector<int>;

    explicit NoncommPoly(int generators);
    static NoncommPoly generator(int generators, int index);
    /// X_i X_j + X_j X_i
    static NoncommPoly anticommutator(int generators, int i, int j);

    NoncommPoly& add_term(cplx coeff, Word word);

    int generators() const noexcept { return generators_; }
    const std::map<Word, cplx>& terms() const noexcept { return terms_; }

    /// Conjugate coefficients and reverse every word.
    NoncommPoly adjoint() const;
    /// Structural fixed point of the involution; no numerical tolerance.
    bool is_selfadjoint() const;

    /// Substitute matrices for the generators. Each word is multiplied out left to
    /// right exactly as written.
    CMatrix evaluate(std::span<const CMatrix> ops) const;

    std::string to_string() const;

private:
    int generators_;
    std::map<Word, cplx> terms_;
};

}  // namespace spinclt
