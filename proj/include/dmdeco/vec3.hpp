//! \file dmdeco/vec3.hpp
#pragma once

#include <cmath>

namespace dmdeco
{
struct Vec3
{
    double x = 0;
    double y = 0;
    double z = 0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b)
    {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b)
    {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend constexpr Vec3 operator*(double s, Vec3 a)
    {
        return {s * a.x, s * a.y, s * a.z};
    }
    friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(Vec3 a)
{
    return std::sqrt(dot(a, a));
}
}  // namespace dmdeco
