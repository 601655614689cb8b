#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace shellflux {

// Exact rational, kept canonical (lowest terms, positive denominator).
// gmp's mpq_class maintains the invariant through arithmetic; construction
// from raw integers canonicalizes explicitly.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  Rat(long n, unsigned long d) : v_(n, d) { v_.canonicalize(); }
  explicit Rat(const mpz_class& n) : v_(n) {}
  Rat(const mpz_class& n, const mpz_class& d) : v_(mpq_class(n) / mpq_class(d)) {}
  explicit Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // Parses "p", "p/q", or a decimal like "0.125" (exact binary-free reading).
  static Rat parse(const std::string& text);

  const mpz_class num() const { return v_.get_num(); }
  const mpz_class den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }

  mpz_class floor() const;
  mpz_class ceil() const;

  double to_double() const { return v_.get_d(); }
  std::string str() const;

  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ + b.v_)); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ - b.v_)); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ * b.v_)); }
  friend Rat operator/(const Rat& a, const Rat& b) { return Rat(mpq_class(a.v_ / b.v_)); }
  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

 private:
  mpq_class v_;
};

inline Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }

// r compared against c*sqrt(k) for k in {3, 5, 15}; returns -1/0/+1.
// Used for shell thresholds whose squares leave Q (e.g. 1 +- sqrt(3) eps).
int compare_with_sqrt(const Rat& r, const Rat& c, unsigned k);

}  // namespace shellflux
