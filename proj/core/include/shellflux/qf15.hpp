#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "shellflux/rational.hpp"

namespace shellflux {

// Exact element of Q(sqrt(15)): a + b*sqrt(15) with rational a, b.
// The representation is unique, so equality is componentwise.
struct QF15 {
  Rat a;
  Rat b;

  QF15() = default;
  QF15(Rat a_, Rat b_) : a(std::move(a_)), b(std::move(b_)) {}
  QF15(long n) : a(n), b(0) {}  // NOLINT(google-explicit-constructor)
  explicit QF15(const Rat& r) : a(r), b(0) {}

  bool is_rational() const { return b.is_zero(); }
  bool is_zero() const { return a.is_zero() && b.is_zero(); }

  friend QF15 operator+(const QF15& u, const QF15& v) { return {u.a + v.a, u.b + v.b}; }
  friend QF15 operator-(const QF15& u, const QF15& v) { return {u.a - v.a, u.b - v.b}; }
  QF15 operator-() const { return {-a, -b}; }
  friend QF15 operator*(const QF15& u, const QF15& v) {
    // (a + b s)(c + d s) = (ac + 15 bd) + (ad + bc) s, s = sqrt(15)
    return {u.a * v.a + Rat(15) * u.b * v.b, u.a * v.b + u.b * v.a};
  }
  friend QF15 operator*(const Rat& r, const QF15& u) { return {r * u.a, r * u.b}; }
  QF15& operator+=(const QF15& o) { a += o.a; b += o.b; return *this; }
  QF15& operator-=(const QF15& o) { a -= o.a; b -= o.b; return *this; }

  friend bool operator==(const QF15& u, const QF15& v) { return u.a == v.a && u.b == v.b; }
  friend bool operator!=(const QF15& u, const QF15& v) { return !(u == v); }

  std::string str() const;
};

// Sign of the real number a + b*sqrt(15), by integer case analysis only.
int sign(const QF15& u);

// Comparisons through sign(); never touch floating point.
inline bool operator<(const QF15& u, const QF15& v) { return sign(u - v) < 0; }
inline bool operator<=(const QF15& u, const QF15& v) { return sign(u - v) <= 0; }
inline bool operator>(const QF15& u, const QF15& v) { return sign(u - v) > 0; }
inline bool operator>=(const QF15& u, const QF15& v) { return sign(u - v) >= 0; }

// Greatest integer n with n <= u.
mpz_class floor(const QF15& u);
mpz_class ceil(const QF15& u);

// Value rounded to `precision` bits (>= 53), within 1 ulp of the true real.
double to_double(const QF15& u, unsigned precision = 64);
long double to_long_double(const QF15& u, unsigned precision = 80);

QF15 inverse(const QF15& u);  // 1/u, u != 0

struct Vec3X {
  QF15 x, y, z;

  friend Vec3X operator+(const Vec3X& u, const Vec3X& v) { return {u.x + v.x, u.y + v.y, u.z + v.z}; }
  friend Vec3X operator-(const Vec3X& u, const Vec3X& v) { return {u.x - v.x, u.y - v.y, u.z - v.z}; }
  Vec3X operator-() const { return {-x, -y, -z}; }
  friend bool operator==(const Vec3X& u, const Vec3X& v) { return u.x == v.x && u.y == v.y && u.z == v.z; }
  friend bool operator!=(const Vec3X& u, const Vec3X& v) { return !(u == v); }
  const QF15& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  QF15& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline QF15 dot(const Vec3X& u, const Vec3X& v) { return u.x * v.x + u.y * v.y + u.z * v.z; }
inline QF15 norm2(const Vec3X& u) { return dot(u, u); }
inline Vec3X scale(const QF15& s, const Vec3X& v) { return {s * v.x, s * v.y, s * v.z}; }

// Column-major 3x3 exact matrix; apply() is matrix * vector.
struct Mat3X {
  std::array<Vec3X, 3> col;
  Vec3X apply(const Vec3X& v) const;
  Mat3X mul(const Mat3X& o) const;
  static Mat3X identity();
};

}  // namespace shellflux
