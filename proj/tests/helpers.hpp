#pragma once

#include "spinclt/linalg.hpp"
#include "spinclt/types.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace testing {

using spinclt::CMatrix;
using spinclt::cplx;
using spinclt::CVector;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline spinclt::Direction random_direction(std::mt19937_64& rng) {
    const double theta = std::acos(uniform(rng, -1.0, 1.0));
    return spinclt::Direction(theta, uniform(rng, 0.0, 2.0 * std::numbers::pi));
}

inline std::vector<spinclt::Direction> random_directions(std::mt19937_64& rng, std::size_t n) {
    std::vector<spinclt::Direction> d;
    for (std::size_t i = 0; i < n; ++i) d.push_back(random_direction(rng));
    return d;
}

inline spinclt::Vec3 random_vec3(std::mt19937_64& rng, double scale = 1.0) {
    return {scale * uniform(rng, -1, 1), scale * uniform(rng, -1, 1), scale * uniform(rng, -1, 1)};
}

inline spinclt::Vec3Field random_field(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::vector<spinclt::Vec3> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(random_vec3(rng, scale));
    return spinclt::Vec3Field(v);
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
    return scale * 0.5 * (a + a.adjoint());
}

inline std::vector<spinclt::Direction> e3_directions(std::size_t n) {
    return std::vector<spinclt::Direction>(n, spinclt::Direction(0.0, 0.0));
}

}  // namespace testing
