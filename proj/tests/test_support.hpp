#pragma once

#include "rwfault/types.hpp"

#include <random>

namespace rwfault::test {

/// Fixed-seed generator so every property run sees the same instances.
inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240917);
    return gen;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Vec3 random_vec3(double scale = 1.0)
{
    return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
}

/// MRP inside the unit ball.
inline Mrp random_mrp()
{
    Vec3 v = random_vec3();
    while (v.norm() > 1.0)
        v = random_vec3();
    return Mrp(v);
}

inline double max_abs(const MatX& m)
{
    return m.cwiseAbs().maxCoeff();
}

constexpr int kPropertyInstances = 100;

} // namespace rwfault::test
