#include "spinclt/types.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace spinclt {

void check_budget(std::size_t dim, std::size_t budget, const std::string& what) {
    if (dim > budget) {
        std::ostringstream msg;
        msg << what << ": dimension " << dim << " exceeds budget " << budget;
        throw ResourceError(msg.str(), dim);
    }
}

HalfInt::HalfInt(int twice_j) : twice_(twice_j) {
    if (twice_j < 1) {
        throw ContractViolation("HalfInt: 2J must be a positive integer, got " + std::to_string(twice_j));
    }
}

std::string to_string(HalfInt j) {
    if (j.twice() % 2 == 0) return std::to_string(j.twice() / 2);
    return std::to_string(j.twice()) + "/2";
}

double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double length(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }

Direction::Direction(double theta, double phi) : theta_(theta), phi_(phi) {
    constexpr double pi = std::numbers::pi;
    if (!(theta >= 0.0 && theta <= pi)) {
        throw ContractViolation("Direction: theta must lie in [0, pi], got " + std::to_string(theta));
    }
    if (!(phi >= 0.0 && phi <= 2.0 * pi)) {
        throw ContractViolation("Direction: phi must lie in [0, 2pi], got " + std::to_string(phi));
    }
    if (phi_ == 2.0 * pi) phi_ = 0.0;
}

Vec3 Direction::unit() const noexcept {
    return {std::sin(theta_) * std::cos(phi_), std::sin(theta_) * std::sin(phi_), std::cos(theta_)};
}

Lattice::Lattice(std::vector<std::string> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) throw ContractViolation("Lattice: at least one site required");
    std::set<std::string> seen(sites_.begin(), sites_.end());
    if (seen.size() != sites_.size()) throw ContractViolation("Lattice: site labels must be unique");
}

Lattice Lattice::chain(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return Lattice(std::move(labels));
}

double Vec3Field::norm(double p) const {
    if (p < 1.0) throw ContractViolation("Vec3Field::norm: p must be >= 1");
    double acc = 0.0;
    for (const auto& v : values_) acc += std::pow(length(v), p);
    return std::pow(acc, 1.0 / p);
}

bool Vec3Field::is_zero() const noexcept {
    for (const auto& v : values_)
        if (v[0] != 0.0 || v[1] != 0.0 || v[2] != 0.0) return false;
    return true;
}

Vec3Field Vec3Field::operator+(const Vec3Field& other) const {
    if (other.size() != size()) throw ContractViolation("Vec3Field: size mismatch in addition");
    Vec3Field out = *this;
    for (std::size_t x = 0; x < size(); ++x)
        for (int i = 0; i < 3; ++i) out.values_[x][i] += other.values_[x][i];
    return out;
}

Vec3Field Vec3Field::operator*(double s) const {
    Vec3Field out = *this;
    for (auto& v : out.values_)
        for (auto& c : v) c *= s;
    return out;
}

Vec3Field sum(const std::vector<Vec3Field>& fields) {
    if (fields.empty()) throw ContractViolation("sum: empty field list");
    Vec3Field out = fields.front();
    for (std::size_t j = 1; j < fields.size(); ++j) out = out + fields[j];
    return out;
}

BoundReport BoundReport::make(std::string name, double lhs, double rhs, bool saturated) {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.saturated = saturated;
    if (!std::isfinite(r.rhs)) {
        r.rhs = std::numeric_limits<double>::max();
        r.saturated = true;
    }
    r.margin = r.rhs - r.lhs;
    r.satisfied = std::isfinite(lhs) && lhs <= r.rhs + kBoundSlack;
    return r;
}

}  // namespace spinclt
