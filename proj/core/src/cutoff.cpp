#include "shellflux/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace shellflux {

namespace {

constexpr double kGuardBand = 1e-6;

double smoothstep(double s, int order) {
  // s in [0,1]; order 0 is linear, 1 the cubic 3s^2-2s^3, 2 the quintic.
  switch (order) {
    case 0: return s;
    case 1: return s * s * (3.0 - 2.0 * s);
    case 2: return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    case 3: {
      const double s4 = s * s * s * s;
      return s4 * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)));
    }
    default: throw std::invalid_argument("smoothstep order must be in [0,3]");
  }
}

}  // namespace

CutoffSpec CutoffSpec::make(const Rat& eps, int order, NegativeControl control) {
  CutoffSpec c;
  const double e = eps.to_double();
  c.plateau_hi = std::sqrt(5.0) / 2.0 + 2.0 * e;
  c.cutoff_lo = 2.0 - 4.0 * e;
  c.order = order;
  if (control == NegativeControl::PlateauLow) {
    // Pulls the plateau below the wave-1 shell so S_q drops those modes.
    c.plateau_hi = 1.0 - 3.0 * e;
  }
  if (!(c.plateau_hi < c.cutoff_lo))
    throw std::invalid_argument("cutoff transition is empty; eps too large");
  return c;
}

CutoffSpec CutoffSpec::from_field(const FieldSpec& spec) {
  return make(spec.eps, spec.cutoff_order, spec.control);
}

double phi(double t, const CutoffSpec& spec) {
  if (t <= spec.plateau_hi) return 1.0;
  if (t >= spec.cutoff_lo) return 0.0;
  const double s = (t - spec.plateau_hi) / (spec.cutoff_lo - spec.plateau_hi);
  return 1.0 - smoothstep(s, spec.order);
}

double psi(double t, const CutoffSpec& spec) { return phi(0.5 * t, spec) - phi(t, spec); }

namespace {

// |xi| range of a region box, as doubles (exact at these magnitudes).
void region_norm_range(const IBox& b, double& lo, double& hi) {
  double lo2 = 0, hi2 = 0;
  for (int c = 0; c < 3; ++c) {
    const double a = static_cast<double>(b.lo[c]), z = static_cast<double>(b.hi[c]);
    const double m = std::max(std::fabs(a), std::fabs(z));
    hi2 += m * m;
    if (a > 0) lo2 += a * a;
    else if (z < 0) lo2 += z * z;
  }
  lo = std::sqrt(lo2);
  hi = std::sqrt(hi2);
}

template <typename WeightFn>
WeightedModeSet project_weights(const Field& field, int q, const CutoffSpec& cutoff,
                                WeightFn&& weight_of, bool monotone_profile) {
  WeightedModeSet out;
  out.q = q;
  const double lam = std::ldexp(1.0, q);
  for (const auto& g : field.gens) {
    if (!g.materialized) continue;
    for (int i = 1; i <= 3; ++i) {
      const ActiveRegion& r = g.regions[i - 1];
      if (r.empty()) continue;
      RegionWeights w;
      w.q = g.q;
      w.i = i;
      double lo, hi;
      region_norm_range(r.box, lo, hi);
      const double tl = lo / lam, th = hi / lam;
      const double wl = weight_of(tl), wh = weight_of(th);
      for (double t : {tl, th}) {
        if (std::fabs(t - cutoff.plateau_hi) < kGuardBand ||
            std::fabs(t - cutoff.cutoff_lo) < kGuardBand)
          ++w.boundary_warnings;
      }
      bool flat = false;
      if (monotone_profile) {
        // Non-increasing profile: equal endpoint values pin the whole box.
        flat = (wl == wh) && (wl == 0.0 || wl == 1.0);
      } else {
        // Band profile: flat only inside a provably constant zone.
        flat = (th <= cutoff.plateau_hi) ||
               (tl >= cutoff.cutoff_lo && th <= 2.0 * cutoff.plateau_hi) ||
               (tl >= 2.0 * cutoff.cutoff_lo);
      }
      if (flat) {
        w.uniform = true;
        w.weight[0] = w.weight[1] = wl;
      } else {
        w.uniform = false;
        const i64 n = r.count();
        w.per_mode.resize(n);
        for (i64 t = 0; t < n; ++t) {
          const FreqVec xi = r.box.point_at(t);
          w.per_mode[t] = weight_of(std::sqrt(static_cast<double>(xi.norm2())) / lam);
        }
      }
      out.boundary_warnings += w.boundary_warnings;
      out.parts.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace

const RegionWeights* WeightedModeSet::find(int gen_q, int wave) const {
  for (const auto& p : parts)
    if (p.q == gen_q && p.i == wave) return &p;
  return nullptr;
}

WeightedModeSet project_Sq(const Field& field, int q, const CutoffSpec& cutoff) {
  return project_weights(field, q, cutoff, [&](double t) { return phi(t, cutoff); }, true);
}

WeightedModeSet project_Deltaq(const Field& field, int q, const CutoffSpec& cutoff) {
  return project_weights(field, q, cutoff, [&](double t) { return psi(t, cutoff); }, false);
}

SqIdentityReport check_sq_identity(const Field& field, int q, const CutoffSpec& cutoff) {
  SqIdentityReport rep;
  rep.q = q;
  rep.pass = true;
  const WeightedModeSet w = project_Sq(field, q, cutoff);
  for (const auto& p : w.parts) {
    const bool want_one = (p.q < q) || (p.q == q && p.i == 1);
    const double expect = want_one ? 1.0 : 0.0;
    bool ok = p.uniform && p.weight[0] == expect;
    if (!ok) {
      rep.pass = false;
      std::string what = "generation " + std::to_string(p.q) + " wave " + std::to_string(p.i);
      if (!p.uniform)
        what += ": weights touch the cutoff transition";
      else
        what += ": weight " + std::to_string(p.weight[0]) + ", expected " +
                std::to_string(expect);
      rep.offending.push_back(std::move(what));
    }
  }
  return rep;
}

}  // namespace shellflux
