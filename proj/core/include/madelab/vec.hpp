#pragma once

#include <array>
#include <cmath>

namespace madelab {

inline constexpr int kMaxDim = 3;

// Fixed-capacity position/velocity vector. Components at indices >= dim of
// the owning context are kept at zero; all arithmetic runs over the full
// array so the convention stays cheap to maintain.
using Vec = std::array<double, kMaxDim>;

constexpr Vec vec0() { return {0.0, 0.0, 0.0}; }

constexpr Vec vec(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline Vec operator+(const Vec& a, const Vec& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec operator-(const Vec& a, const Vec& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline Vec operator*(const Vec& a, double s) { return s * a; }

inline Vec& operator+=(Vec& a, const Vec& b) {
    a[0] += b[0];
    a[1] += b[1];
    a[2] += b[2];
    return a;
}

inline double dot(const Vec& a, const Vec& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm2(const Vec& a) { return dot(a, a); }

inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec cross(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline bool finite(const Vec& a, int dim) {
    for (int i = 0; i < dim; ++i)
        if (!std::isfinite(a[i])) return false;
    return true;
}

} // namespace madelab
