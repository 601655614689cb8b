#include "shellflux/rational.hpp"

#include <stdexcept>

namespace shellflux {

Rat Rat::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    mpz_class n(text.substr(0, slash));
    mpz_class d(text.substr(slash + 1));
    if (d == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rat(n, d);
  }
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    size_t frac_len = text.size() - dot - 1;
    mpz_class n(digits);
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 10, frac_len);
    return Rat(n, d);
  }
  return Rat(mpz_class(text));
}

mpz_class Rat::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return q;
}

mpz_class Rat::ceil() const {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return q;
}

std::string Rat::str() const {
  if (is_integer()) return num().get_str();
  return num().get_str() + "/" + den().get_str();
}

int compare_with_sqrt(const Rat& r, const Rat& c, unsigned k) {
  // sign of r - c*sqrt(k), exactly. Both sides may be negative.
  const int sr = r.sign();
  const int sc = c.sign();
  if (sc == 0) return sr;
  if (sc > 0) {
    if (sr <= 0) return -1;
    Rat d = r * r - c * c * Rat(static_cast<long>(k));
    return d.sign();
  }
  // c < 0: r vs negative quantity
  if (sr >= 0) return +1;
  Rat d = r * r - c * c * Rat(static_cast<long>(k));
  return -d.sign();
}

}  // namespace shellflux
