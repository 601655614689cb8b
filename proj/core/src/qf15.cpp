#include "shellflux/qf15.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>

namespace shellflux {

std::string QF15::str() const {
  if (b.is_zero()) return a.str();
  return a.str() + (b.sign() >= 0 ? "+" : "") + b.str() + "*sqrt(15)";
}

int sign(const QF15& u) {
  const int sa = u.a.sign();
  const int sb = u.b.sign();
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa > 0 && sb > 0) return +1;
  if (sa < 0 && sb < 0) return -1;
  // Opposite signs: compare a^2 against 15 b^2.
  const Rat d = u.a * u.a - Rat(15) * u.b * u.b;
  return sa > 0 ? d.sign() : -d.sign();
}

mpz_class floor(const QF15& u) {
  if (u.b.is_zero()) return u.a.floor();
  // Start from a float estimate, then correct with exact comparisons.
  double est = to_double(u, 64);
  mpz_class n(std::floor(est));
  // n <= u < n+1, adjust at most a couple of steps around the estimate.
  while (sign(u - QF15(Rat(n))) < 0) --n;
  while (sign(u - QF15(Rat(mpz_class(n + 1)))) >= 0) ++n;
  return n;
}

mpz_class ceil(const QF15& u) { return -floor(-u); }

namespace {

// Evaluates a + b*sqrt(15) at `work` bits, rounds once to `out`.
void eval_mpfr(const QF15& u, mpfr_t out, unsigned work_bits) {
  mpfr_t s, t;
  mpfr_init2(s, work_bits);
  mpfr_init2(t, work_bits);
  mpfr_set_ui(s, 15, MPFR_RNDN);
  mpfr_sqrt(s, s, MPFR_RNDN);
  mpfr_set_q(t, u.b.raw().get_mpq_t(), MPFR_RNDN);
  mpfr_mul(s, s, t, MPFR_RNDN);
  mpfr_set_q(t, u.a.raw().get_mpq_t(), MPFR_RNDN);
  mpfr_add(s, s, t, MPFR_RNDN);
  mpfr_set(out, s, MPFR_RNDN);
  mpfr_clear(s);
  mpfr_clear(t);
}

}  // namespace

double to_double(const QF15& u, unsigned precision) {
  if (precision < 53) throw std::invalid_argument("precision below 53 bits");
  mpfr_t r;
  mpfr_init2(r, precision);
  eval_mpfr(u, r, precision + 32);
  double out = mpfr_get_d(r, MPFR_RNDN);
  mpfr_clear(r);
  return out;
}

long double to_long_double(const QF15& u, unsigned precision) {
  if (precision < 64) precision = 64;
  mpfr_t r;
  mpfr_init2(r, precision);
  eval_mpfr(u, r, precision + 32);
  long double out = mpfr_get_ld(r, MPFR_RNDN);
  mpfr_clear(r);
  return out;
}

QF15 inverse(const QF15& u) {
  // 1/(a + b s) = (a - b s) / (a^2 - 15 b^2)
  const Rat n = u.a * u.a - Rat(15) * u.b * u.b;
  if (n.is_zero()) {
    if (u.is_zero()) throw std::domain_error("inverse of zero");
    // a^2 = 15 b^2 has no nonzero rational solutions (15 is not a square).
    throw std::domain_error("degenerate QF15 norm");
  }
  const Rat inv = Rat(1) / n;
  return {u.a * inv, -(u.b * inv)};
}

Vec3X Mat3X::apply(const Vec3X& v) const {
  Vec3X r;
  for (int i = 0; i < 3; ++i)
    r[i] = col[0][i] * v.x + col[1][i] * v.y + col[2][i] * v.z;
  return r;
}

Mat3X Mat3X::mul(const Mat3X& o) const {
  Mat3X r;
  for (int c = 0; c < 3; ++c) r.col[c] = apply(o.col[c]);
  return r;
}

Mat3X Mat3X::identity() {
  Mat3X m;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 3; ++i) m.col[c][i] = QF15(c == i ? 1 : 0);
  return m;
}

}  // namespace shellflux
