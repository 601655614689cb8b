#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace shellflux {

using i64 = std::int64_t;
using i128 = __int128;

// Integer lattice frequency on Z^3.
struct FreqVec {
  std::array<i64, 3> k{0, 0, 0};

  i64 operator[](int i) const { return k[i]; }
  i64& operator[](int i) { return k[i]; }
  friend FreqVec operator+(const FreqVec& a, const FreqVec& b) {
    return {{a.k[0] + b.k[0], a.k[1] + b.k[1], a.k[2] + b.k[2]}};
  }
  friend FreqVec operator-(const FreqVec& a, const FreqVec& b) {
    return {{a.k[0] - b.k[0], a.k[1] - b.k[1], a.k[2] - b.k[2]}};
  }
  FreqVec operator-() const { return {{-k[0], -k[1], -k[2]}}; }
  friend bool operator==(const FreqVec& a, const FreqVec& b) { return a.k == b.k; }
  friend bool operator!=(const FreqVec& a, const FreqVec& b) { return a.k != b.k; }
  friend bool operator<(const FreqVec& a, const FreqVec& b) { return a.k < b.k; }

  i64 norm2() const { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }
  bool is_zero() const { return k[0] == 0 && k[1] == 0 && k[2] == 0; }
  std::string str() const;
};

inline i64 dot(const FreqVec& a, const FreqVec& b) {
  return a.k[0] * b.k[0] + a.k[1] * b.k[1] + a.k[2] * b.k[2];
}

// Closed integer box [lo0,hi0] x [lo1,hi1] x [lo2,hi2]; empty when any hi < lo.
struct IBox {
  std::array<i64, 3> lo{0, 0, 0};
  std::array<i64, 3> hi{-1, -1, -1};

  bool empty() const { return hi[0] < lo[0] || hi[1] < lo[1] || hi[2] < lo[2]; }
  i64 count() const {
    if (empty()) return 0;
    return (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1);
  }
  bool contains(const FreqVec& v) const {
    return v[0] >= lo[0] && v[0] <= hi[0] && v[1] >= lo[1] && v[1] <= hi[1] &&
           v[2] >= lo[2] && v[2] <= hi[2];
  }
  // Linear index with z fastest; valid only when contains(v).
  i64 index_of(const FreqVec& v) const {
    const i64 d1 = hi[1] - lo[1] + 1, d2 = hi[2] - lo[2] + 1;
    return ((v[0] - lo[0]) * d1 + (v[1] - lo[1])) * d2 + (v[2] - lo[2]);
  }
  FreqVec point_at(i64 idx) const {
    const i64 d1 = hi[1] - lo[1] + 1, d2 = hi[2] - lo[2] + 1;
    FreqVec v;
    v[2] = lo[2] + idx % d2;
    v[1] = lo[1] + (idx / d2) % d1;
    v[0] = lo[0] + idx / (d1 * d2);
    return v;
  }

  IBox negated() const {
    if (empty()) return {};
    return {{-hi[0], -hi[1], -hi[2]}, {-lo[0], -lo[1], -lo[2]}};
  }
  friend IBox operator+(const IBox& a, const IBox& b) {
    if (a.empty() || b.empty()) return {};
    return {{a.lo[0] + b.lo[0], a.lo[1] + b.lo[1], a.lo[2] + b.lo[2]},
            {a.hi[0] + b.hi[0], a.hi[1] + b.hi[1], a.hi[2] + b.hi[2]}};
  }
  // Box shifted by +v.
  IBox shifted(const FreqVec& v) const {
    if (empty()) return {};
    return {{lo[0] + v[0], lo[1] + v[1], lo[2] + v[2]},
            {hi[0] + v[0], hi[1] + v[1], hi[2] + v[2]}};
  }
  friend IBox intersect(const IBox& a, const IBox& b) {
    IBox r;
    for (int c = 0; c < 3; ++c) {
      r.lo[c] = a.lo[c] > b.lo[c] ? a.lo[c] : b.lo[c];
      r.hi[c] = a.hi[c] < b.hi[c] ? a.hi[c] : b.hi[c];
    }
    return r;
  }
  bool contains_zero() const {
    return !empty() && lo[0] <= 0 && 0 <= hi[0] && lo[1] <= 0 && 0 <= hi[1] &&
           lo[2] <= 0 && 0 <= hi[2];
  }
  i64 max_abs_component() const;
};

// sign of (p - q*sqrt(k)) for 128-bit integers; k in {3, 5, 15}.
int sign_minus_sqrt_i128(i128 p, i128 q, unsigned k);

}  // namespace shellflux
