#pragma once

#include "phamp/types.hpp"

#include <cmath>

namespace phamp {

// Forward-mode derivative in three directions, used to get exact Jacobians
// out of the same templated field code that produces values and jets.
struct Dual {
    double v = 0.0;
    Vec3 d = Vec3::Zero();

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, const Vec3& grad) : v(value), d(grad) {}
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + b.d * a.v}; }
inline Dual operator/(const Dual& a, const Dual& b)
{
    const double inv = 1.0 / b.v;
    return {a.v * inv, (a.d - b.d * (a.v * inv)) * inv};
}
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

inline Dual operator+(const Dual& a, double s) { return {a.v + s, a.d}; }
inline Dual operator+(double s, const Dual& a) { return {a.v + s, a.d}; }
inline Dual operator-(const Dual& a, double s) { return {a.v - s, a.d}; }
inline Dual operator-(double s, const Dual& a) { return {s - a.v, -a.d}; }
inline Dual operator*(const Dual& a, double s) { return {a.v * s, a.d * s}; }
inline Dual operator*(double s, const Dual& a) { return {a.v * s, a.d * s}; }
inline Dual operator/(const Dual& a, double s) { return {a.v / s, a.d / s}; }
inline Dual operator/(double s, const Dual& a)
{
    const double inv = 1.0 / a.v;
    return {s * inv, a.d * (-s * inv * inv)};
}

inline Dual exp(const Dual& a)
{
    const double e = std::exp(a.v);
    return {e, a.d * e};
}
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline Dual pow(const Dual& a, double p)
{
    const double y = std::pow(a.v, p);
    return {y, a.d * (p * std::pow(a.v, p - 1.0))};
}
inline Dual sqrt(const Dual& a)
{
    const double y = std::sqrt(a.v);
    return {y, a.d * (0.5 / y)};
}
inline Dual sin(const Dual& a) { return {std::sin(a.v), a.d * std::cos(a.v)}; }
inline Dual cos(const Dual& a) { return {std::cos(a.v), a.d * -std::sin(a.v)}; }

} // namespace phamp
