#include "shellflux/lattice.hpp"

#include <cstdlib>

namespace shellflux {

std::string FreqVec::str() const {
  return "(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + "," +
         std::to_string(k[2]) + ")";
}

i64 IBox::max_abs_component() const {
  if (empty()) return 0;
  i64 m = 0;
  for (int c = 0; c < 3; ++c) {
    const i64 a = std::llabs(lo[c]), b = std::llabs(hi[c]);
    if (a > m) m = a;
    if (b > m) m = b;
  }
  return m;
}

int sign_minus_sqrt_i128(i128 p, i128 q, unsigned k) {
  // sign of p - q*sqrt(k); caller guarantees p^2 and k*q^2 fit 128 bits.
  if (q == 0) return p > 0 ? +1 : (p < 0 ? -1 : 0);
  if (q > 0) {
    if (p <= 0) return -1;
    const i128 d = p * p - static_cast<i128>(k) * q * q;
    return d > 0 ? +1 : (d < 0 ? -1 : 0);
  }
  if (p >= 0) return +1;
  const i128 d = p * p - static_cast<i128>(k) * q * q;
  return d > 0 ? -1 : (d < 0 ? +1 : 0);
}

}  // namespace shellflux
