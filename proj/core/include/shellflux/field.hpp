#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shellflux/lattice.hpp"
#include "shellflux/qf15.hpp"
#include "shellflux/skeleton.hpp"

namespace shellflux {

// Test hooks that deliberately break one construction property.
enum class NegativeControl {
  None,
  NoRotation,     // every generation anchored at the unrotated plane
  SkipLeray,      // middle generation's wave-2 amplitudes left unprojected
  ShrinkA3,       // wave-3 blur cube gets side eps instead of 2*eps
  PlateauLow,     // low-pass plateau pulled below the wave-1 shell
};

NegativeControl parse_negative_control(const std::string& name);
std::string negative_control_name(NegativeControl c);

struct FieldSpec {
  Rat eps;
  Rat eps0 = Rat(1, 16);        // guard: 0 < eps <= eps0
  int q_min = 0;
  int q_max = 0;
  double amplitude_scale = 1.0;  // may be negative after flux calibration
  std::optional<double> target_c;
  int cutoff_order = 1;          // smoothstep polynomial order
  unsigned float_precision = 64;
  i64 mode_cap_eps_lambda = 32;  // materialize modes only while eps*2^q <= cap
  NegativeControl control = NegativeControl::None;

  void validate() const;  // throws ConfigError
  Rat lambda(int q) const { return Rat(mpz_class(mpz_class(1) << q)); }
  i64 lambda_i(int q) const { return i64(1) << q; }
  Rat eps_lambda(int q) const { return eps * lambda(q); }
  bool materialize(int q) const {
    return eps_lambda(q) <= Rat(mode_cap_eps_lambda);
  }
  static int default_q_min(const Rat& eps);
  std::string canonical_string() const;  // serialization used for cache keys
  std::uint64_t content_hash() const;
};

// Lattice points of lambda_q * (F_j^(i) + [0, s*eps]^3), s = 1 for waves 1
// and 2, s = 2 for wave 3. The point set is a full integer box.
struct ActiveRegion {
  int q = 0;
  int j = 0;
  int i = 1;
  IBox box;
  Vec3X cube_lo;  // lambda_q * F, exact
  Rat side;       // s * eps * lambda_q
  bool contains_exact(const FreqVec& v) const;
  bool empty() const { return box.empty(); }
  i64 count() const { return box.count(); }
};

// One dyadic level: regions plus (when materialized) per-mode amplitude
// directions in double precision. Signed modes share the direction array of
// the unsigned point since pi_{-xi} = pi_xi; only the scalar coefficient
// changes sign structure.
struct Generation {
  int q = 0;
  int j = 0;
  ActiveRegion regions[3];
  bool materialized = false;
  std::vector<double> dirs[3];          // 3 doubles per box point (pi_xi V)
  std::complex<double> coef[3][2];      // [i-1][sign: 0 -> +xi, 1 -> -xi]
  i64 n2_min = 0, n2_max = 0;           // |xi|^2 range over all regions
  long double gen_scale = 0.0L;

  i64 mode_count() const {
    i64 n = 0;
    for (const auto& r : regions) n += r.count();
    return 2 * n;
  }
};

// Reference to one mode: region wave index i, sign branch, linear box index.
struct ModeRef {
  int q = 0;
  int i = 1;
  int sign = +1;
  i64 idx = 0;
};

struct Field {
  FieldSpec spec;
  SkeletonData skel;
  std::vector<Generation> gens;

  const Generation* gen(int q) const {
    if (q < spec.q_min || q > spec.q_max) return nullptr;
    return &gens[q - spec.q_min];
  }
  // Finds the active mode at xi, if any (materialized generations only).
  std::optional<ModeRef> lookup(const FreqVec& xi) const;
  FreqVec mode_xi(const ModeRef& m) const;
  std::complex<double> mode_coef(const ModeRef& m) const;
  const double* mode_dir(const ModeRef& m) const;
  std::vector<std::string> empty_region_report() const;
  i64 total_modes() const;
};

// Exact Leray projection v - xi (xi.v)/|xi|^2; throws ZeroFrequency.
Vec3X leray_project(const FreqVec& xi, const Vec3X& v);

// Exact amplitude direction of the mode at xi in region (j, i).
Vec3X exact_amp_dir(const SkeletonData& skel, int j, int i, const FreqVec& xi);

// amplitude_scale * eps^-2 * 2^(-7q/3), with the dyadic part exact.
long double generation_scale(const FieldSpec& spec, int q);

ActiveRegion enumerate_region(const FieldSpec& spec, const SkeletonData& skel,
                              int q, int i);
Generation build_generation(const FieldSpec& spec, const SkeletonData& skel, int q);
Field build_field(const FieldSpec& spec);

// Exact check xi . pi_xi(V) = 0 for every materialized mode; returns the
// number of modes checked. Throws std::logic_error on any failure.
i64 verify_solenoidality_exact(const Field& field);

}  // namespace shellflux
