#pragma once

#include <cmath>
#include <complex>

namespace cluscat {

using Complex = std::complex<double>;
inline constexpr Complex I{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  Vec3 normalized() const { return *this / norm(); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Complex-valued 3-vector (field gradients, intensities).
struct CVec3 {
  Complex x{}, y{}, z{};

  CVec3() = default;
  CVec3(Complex cx, Complex cy, Complex cz) : x(cx), y(cy), z(cz) {}
  explicit CVec3(const Vec3& v) : x(v.x), y(v.y), z(v.z) {}

  CVec3 operator+(const CVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  CVec3 operator-(const CVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  CVec3 operator*(Complex s) const { return {x * s, y * s, z * s}; }
  CVec3& operator+=(const CVec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }

  CVec3 conj() const { return {std::conj(x), std::conj(y), std::conj(z)}; }
  Complex dot(const Vec3& v) const { return x * v.x + y * v.y + z * v.z; }
  /// Sum of component products (no conjugation).
  Complex cdot(const CVec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return std::norm(x) + std::norm(y) + std::norm(z); }

  Vec3 real() const { return {x.real(), y.real(), z.real()}; }
  Vec3 imag() const { return {x.imag(), y.imag(), z.imag()}; }
};

inline CVec3 operator*(Complex s, const CVec3& v) { return v * s; }
inline CVec3 operator*(Complex s, const Vec3& v) { return CVec3(v) * s; }

}  // namespace cluscat
