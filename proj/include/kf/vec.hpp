#pragma once

#include <cmath>
#include <complex>

namespace kf {

using Complex = std::complex<double>;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double r2() const { return x * x + y * y + z * z; }

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

// Points and vectors share the representation; Point3 carries the r2() helper.
using Point3 = Vec3;

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

// Complex-component 3-vector: gradients of complex scalars with respect to (x,y,z).
struct CVec3 {
    Complex x{}, y{}, z{};

    CVec3& operator+=(const CVec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    CVec3& operator-=(const CVec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    CVec3& operator*=(const Complex& s) { x *= s; y *= s; z *= s; return *this; }
};

inline CVec3 operator+(CVec3 a, const CVec3& b) { return a += b; }
inline CVec3 operator-(CVec3 a, const CVec3& b) { return a -= b; }
inline CVec3 operator*(CVec3 a, const Complex& s) { return a *= s; }
inline CVec3 operator*(const Complex& s, CVec3 a) { return a *= s; }

inline CVec3 conj(const CVec3& a) { return {std::conj(a.x), std::conj(a.y), std::conj(a.z)}; }
inline CVec3 cross(const CVec3& a, const CVec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3 real(const CVec3& a) { return {a.x.real(), a.y.real(), a.z.real()}; }
inline Vec3 imag(const CVec3& a) { return {a.x.imag(), a.y.imag(), a.z.imag()}; }
inline double max_imag_abs(const CVec3& a) {
    return std::max({std::abs(a.x.imag()), std::abs(a.y.imag()), std::abs(a.z.imag())});
}

// Componentwise Im(conj(a) * b), used by every conjugate-paired field expression.
inline Vec3 imag_herm(const Complex& a, const CVec3& b) {
    const Complex ca = std::conj(a);
    return {(ca * b.x).imag(), (ca * b.y).imag(), (ca * b.z).imag()};
}

}  // namespace kf
