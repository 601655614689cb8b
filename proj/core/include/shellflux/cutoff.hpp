#pragma once

#include <string>
#include <vector>

#include "shellflux/field.hpp"

namespace shellflux {

// Radial low-pass profile: 1 on [0, sqrt(5)/2 + 2 eps], 0 on [2 - 4 eps, inf),
// monotone polynomial smoothstep in between.
struct CutoffSpec {
  double plateau_hi = 0.0;
  double cutoff_lo = 0.0;
  int order = 1;

  static CutoffSpec from_field(const FieldSpec& spec);
  static CutoffSpec make(const Rat& eps, int order, NegativeControl control);
};

double phi(double t, const CutoffSpec& spec);
// psi(t) = phi(t/2) - phi(t): the dyadic band profile.
double psi(double t, const CutoffSpec& spec);

// Low-pass weights phi(|xi| / 2^q) per mode of one generation's region, with
// a guard band around the transition endpoints.
struct RegionWeights {
  int q = 0;           // generation
  int i = 1;           // wave
  double weight[2];    // [0]: weight common to all modes when uniform
  bool uniform = false;
  std::vector<double> per_mode;  // used when not uniform (unsigned points)
  int boundary_warnings = 0;
};

// S_q applied to the whole field: per (generation, wave) weights. Weights of
// +xi and -xi coincide since the profile is radial.
struct WeightedModeSet {
  int q = 0;
  std::vector<RegionWeights> parts;  // one per materialized (gen, wave)
  int boundary_warnings = 0;
  const RegionWeights* find(int gen_q, int wave) const;
};

WeightedModeSet project_Sq(const Field& field, int q, const CutoffSpec& cutoff);
WeightedModeSet project_Deltaq(const Field& field, int q, const CutoffSpec& cutoff);

struct SqIdentityReport {
  int q = 0;
  bool pass = false;
  std::vector<std::string> offending;  // description of each violation
};

// Verifies S_q(U) = U_{<q} + u_q^(1): weight exactly 1 on every mode of the
// low generations and of wave 1 at level q, exactly 0 on waves 2,3 at level q
// and on everything above.
SqIdentityReport check_sq_identity(const Field& field, int q, const CutoffSpec& cutoff);

}  // namespace shellflux
