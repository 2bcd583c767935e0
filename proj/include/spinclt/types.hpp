#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinclt {

/// Raised when an operation's precondition is not met by its arguments.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised when a requested Hilbert-space dimension exceeds the configured budget.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::size_t dimension)
        : std::runtime_error(what), dimension_(dimension) {}
    std::size_t dimension() const noexcept { return dimension_; }

private:
    std::size_t dimension_;
};

/// Default cap on the dimension of any dense operator we assemble.
inline constexpr std::size_t kDefaultDimensionBudget = 4096;

/// Throws ResourceError if `dim` exceeds `budget`; `what` names the space.
void check_budget(std::size_t dim, std::size_t budget, const std::string& what);

/// Spin magnitude stored as the integer 2J, so half-integers stay exact.
class HalfInt {
public:
    explicit HalfInt(int twice_j);
    static HalfInt from_twice(int twice_j) { return HalfInt(twice_j); }

    int twice() const noexcept { return twice_; }
    double value() const noexcept { return 0.5 * twice_; }
    int dim() const noexcept { return twice_ + 1; }

    friend bool operator==(HalfInt a, HalfInt b) noexcept { return a.twice_ == b.twice_; }

private:
    int twice_;
};

std::string to_string(HalfInt j);

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) noexcept;
Vec3 cross(const Vec3& a, const Vec3& b) noexcept;
double length(const Vec3& a) noexcept;

/// Spherical angles of a unit vector. theta in [0, pi], phi in [0, 2pi).
class Direction {
public:
    Direction() = default;
    /// Rejects theta outside [0, pi] and phi outside [0, 2pi]; phi = 2pi maps to 0.
    Direction(double theta, double phi);

    double theta() const noexcept { return theta_; }
    double phi() const noexcept { return phi_; }
    Vec3 unit() const noexcept;

private:
    double theta_ = 0.0;
    double phi_ = 0.0;
};

/// Ordered list of site labels. Order fixes the tensor-factor order (site 0 is the
/// leftmost Kronecker factor).
class Lattice {
public:
    explicit Lattice(std::vector<std::string> sites);
    static Lattice chain(std::size_t n);

    std::size_t size() const noexcept { return sites_.size(); }
    const std::string& label(std::size_t i) const { return sites_.at(i); }
    const std::vector<std::string>& labels() const noexcept { return sites_; }

private:
    std::vector<std::string> sites_;
};

/// Real 3-vector per lattice site, v = {v_x}.
class Vec3Field {
public:
    Vec3Field() = default;
    explicit Vec3Field(std::vector<Vec3> values) : values_(std::move(values)) {}
    static Vec3Field zeros(std::size_t n) { return Vec3Field(std::vector<Vec3>(n, Vec3{0, 0, 0})); }
    static Vec3Field uniform(std::size_t n, const Vec3& v) { return Vec3Field(std::vector<Vec3>(n, v)); }

    std::size_t size() const noexcept { return values_.size(); }
    const Vec3& operator[](std::size_t i) const { return values_[i]; }
    Vec3& operator[](std::size_t i) { return values_[i]; }
    const std::vector<Vec3>& values() const noexcept { return values_; }

    /// (sum_x |v_x|^p)^(1/p) with |v_x| the Euclidean length.
    double norm(double p) const;
    double norm1() const { return norm(1.0); }
    double norm2() const { return norm(2.0); }
    bool is_zero() const noexcept;

    Vec3Field operator+(const Vec3Field& other) const;
    Vec3Field operator*(double s) const;

private:
    std::vector<Vec3> values_;
};

Vec3Field sum(const std::vector<Vec3Field>& fields);

/// Uniform record for every inequality the library checks numerically.
struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool satisfied = false;
    /// rhs overflowed double range and was clamped to the largest finite value.
    bool saturated = false;

    static BoundReport make(std::string name, double lhs, double rhs, bool saturated = false);
};

inline constexpr double kBoundSlack = 1e-12;

}  // namespace spinclt
