#include "shellflux/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shellflux/errors.hpp"

namespace shellflux {

NegativeControl parse_negative_control(const std::string& name) {
  if (name.empty() || name == "none") return NegativeControl::None;
  if (name == "no-rotation") return NegativeControl::NoRotation;
  if (name == "skip-leray") return NegativeControl::SkipLeray;
  if (name == "shrink-a3") return NegativeControl::ShrinkA3;
  if (name == "plateau-low") return NegativeControl::PlateauLow;
  throw ConfigError("unknown negative control '" + name + "'");
}

std::string negative_control_name(NegativeControl c) {
  switch (c) {
    case NegativeControl::None: return "none";
    case NegativeControl::NoRotation: return "no-rotation";
    case NegativeControl::SkipLeray: return "skip-leray";
    case NegativeControl::ShrinkA3: return "shrink-a3";
    case NegativeControl::PlateauLow: return "plateau-low";
  }
  return "none";
}

void FieldSpec::validate() const {
  if (eps.sign() <= 0) throw ConfigError("eps must be positive");
  if (eps > eps0) throw ConfigError("eps " + eps.str() + " exceeds the eps0 guard " + eps0.str());
  if (q_min > q_max) throw ConfigError("q_min exceeds q_max");
  if (q_min < 0 || q_max > 20) throw ConfigError("generation range must lie in [0, 20]");
  if (amplitude_scale == 0.0) throw ConfigError("amplitude_scale must be nonzero");
  if (float_precision < 53) throw ConfigError("float_precision must be at least 53 bits");
  if (eps.den() > 4096) throw ConfigError("eps denominator too large for exact predicates");
}

int FieldSpec::default_q_min(const Rat& eps) {
  // Smallest q with eps * 2^q >= 1.
  int q = 0;
  while (eps * Rat(mpz_class(mpz_class(1) << q)) < Rat(1) && q < 64) ++q;
  return q;
}

std::string FieldSpec::canonical_string() const {
  std::string s = "v2;eps=" + eps.str() + ";eps0=" + eps0.str() +
                  ";q=" + std::to_string(q_min) + ".." + std::to_string(q_max);
  char buf[64];
  std::snprintf(buf, sizeof buf, ";scale=%.17g", amplitude_scale);
  s += buf;
  s += ";order=" + std::to_string(cutoff_order);
  s += ";prec=" + std::to_string(float_precision);
  s += ";cap=" + std::to_string(mode_cap_eps_lambda);
  s += ";ctl=" + negative_control_name(control);
  return s;
}

std::uint64_t FieldSpec::content_hash() const {
  // FNV-1a over the canonical serialization; stable across runs.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_string()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool ActiveRegion::contains_exact(const FreqVec& v) const {
  for (int c = 0; c < 3; ++c) {
    const QF15 x{Rat(mpz_class(v[c])), Rat(0)};
    if (sign(x - cube_lo[c]) < 0) return false;
    if (sign(x - (cube_lo[c] + QF15(side))) > 0) return false;
  }
  return true;
}

Vec3X leray_project(const FreqVec& xi, const Vec3X& v) {
  if (xi.is_zero()) throw ZeroFrequency();
  Vec3X x{QF15(Rat(mpz_class(xi[0]))), QF15(Rat(mpz_class(xi[1]))), QF15(Rat(mpz_class(xi[2])))};
  const QF15 xv = dot(x, v);
  const Rat inv_n2 = Rat(1) / Rat(mpz_class(xi.norm2()));
  const QF15 s = inv_n2 * xv;
  return v - scale(s, x);
}

Vec3X exact_amp_dir(const SkeletonData& skel, int j, int i, const FreqVec& xi) {
  return leray_project(xi, skel.V[j][i - 1]);
}

long double generation_scale(const FieldSpec& spec, int q) {
  // 2^(-7q/3) split as 2^k * 2^(r/3), r in {0,-1,-2}; the dyadic factor is
  // exact, so scale ratios between generations three apart are exactly 2^-7.
  static const long double cbrt_pow[3] = {
      1.0L,
      0.79370052598409973737585281963615137L,   // 2^(-1/3)
      0.62996052494743658238360530363911417L};  // 2^(-2/3)
  const int e = -7 * q;
  int k = e / 3, r = e % 3;
  if (r < 0) { r += 3; k -= 1; }  // e = 3k + r with r in {0,1,2}
  // now 2^(e/3) = 2^k * 2^(r/3); r>0 means multiply by 2^(r/3) = 2 * 2^((r-3)/3)
  long double frac = 1.0L;
  if (r == 1) frac = 2.0L * cbrt_pow[2];
  if (r == 2) frac = 2.0L * cbrt_pow[1];
  const long double num = static_cast<long double>(spec.eps.den().get_d());
  const long double den = static_cast<long double>(spec.eps.num().get_d());
  const long double inv_eps2 = (num * num) / (den * den);
  return static_cast<long double>(spec.amplitude_scale) * inv_eps2 * ldexpl(frac, k);
}

ActiveRegion enumerate_region(const FieldSpec& spec, const SkeletonData& skel,
                              int q, int i) {
  ActiveRegion r;
  r.q = q;
  r.j = q % 3;
  r.i = i;
  int s = (i == 3) ? 2 : 1;
  if (spec.control == NegativeControl::ShrinkA3) s = 1;
  const Rat lam = spec.lambda(q);
  r.side = Rat(s) * spec.eps * lam;
  const QF15 lamq{lam, Rat(0)};
  for (int c = 0; c < 3; ++c) {
    r.cube_lo[c] = lamq * skel.F[r.j][i - 1][c];
    const mpz_class lo = ceil(r.cube_lo[c]);
    const mpz_class hi = floor(r.cube_lo[c] + QF15(r.side));
    if (!lo.fits_slong_p() || !hi.fits_slong_p())
      throw std::overflow_error("region bounds exceed 64-bit range");
    r.box.lo[c] = lo.get_si();
    r.box.hi[c] = hi.get_si();
  }
  return r;
}

namespace {

// 10*V decomposed as integer vectors A + B*sqrt(15); exact for every rotated
// amplitude direction.
struct AmpIntParts {
  i64 A[3];
  i64 B[3];
};

AmpIntParts amp_int_parts(const Vec3X& v) {
  AmpIntParts p{};
  for (int c = 0; c < 3; ++c) {
    const Rat a10 = Rat(10) * v[c].a;
    const Rat b10 = Rat(10) * v[c].b;
    if (!a10.is_integer() || !b10.is_integer())
      throw std::logic_error("amplitude direction denominators exceed 10");
    p.A[c] = a10.num().get_si();
    p.B[c] = b10.num().get_si();
  }
  return p;
}

constexpr long double kSqrt15 = 3.87298334620741688517926539978240L;

}  // namespace

Generation build_generation(const FieldSpec& spec, const SkeletonData& skel, int q) {
  Generation g;
  g.q = q;
  g.j = (spec.control == NegativeControl::NoRotation) ? 0 : q % 3;
  g.gen_scale = generation_scale(spec, q);
  for (int i = 1; i <= 3; ++i) g.regions[i - 1] = enumerate_region(spec, skel, q, i);

  g.n2_min = 0;
  g.n2_max = 0;
  bool first = true;
  for (const auto& r : g.regions) {
    if (r.empty()) continue;
    i64 lo2 = 0, hi2 = 0;
    for (int c = 0; c < 3; ++c) {
      const i64 a = r.box.lo[c], b = r.box.hi[c];
      const i64 m = std::max(std::llabs(a), std::llabs(b));
      hi2 += m * m;
      if (a > 0) lo2 += a * a;
      else if (b < 0) lo2 += b * b;
    }
    if (first || lo2 < g.n2_min) g.n2_min = lo2;
    if (first || hi2 > g.n2_max) g.n2_max = hi2;
    first = false;
  }

  g.materialized = spec.materialize(q);
  if (!g.materialized) return g;

  const bool skip_leray_here =
      spec.control == NegativeControl::SkipLeray && q == (spec.q_min + spec.q_max) / 2;

  const double half = 0.5 * static_cast<double>(g.gen_scale);
  for (int i = 1; i <= 3; ++i) {
    const ActiveRegion& r = g.regions[i - 1];
    if (i == 1) {
      // sine wave: amplitudes -i/2 at +xi, +i/2 at -xi
      g.coef[0][0] = {0.0, -half};
      g.coef[0][1] = {0.0, +half};
    } else {
      g.coef[i - 1][0] = {half, 0.0};
      g.coef[i - 1][1] = {half, 0.0};
    }
    if (r.empty()) continue;

    const AmpIntParts vp = amp_int_parts(skel.V[g.j][i - 1]);
    const i64 n = r.count();
    auto& dirs = g.dirs[i - 1];
    dirs.resize(3 * n);
    const bool unprojected = skip_leray_here && i == 2;
    for (i64 t = 0; t < n; ++t) {
      const FreqVec xi = r.box.point_at(t);
      const long double xa = static_cast<long double>(dot(xi, FreqVec{{vp.A[0], vp.A[1], vp.A[2]}}));
      const long double xb = static_cast<long double>(dot(xi, FreqVec{{vp.B[0], vp.B[1], vp.B[2]}}));
      const long double n2 = static_cast<long double>(xi.norm2());
      const long double s = unprojected ? 0.0L : (xa + xb * kSqrt15) / (10.0L * n2);
      for (int c = 0; c < 3; ++c) {
        const long double vc = (static_cast<long double>(vp.A[c]) +
                                static_cast<long double>(vp.B[c]) * kSqrt15) / 10.0L;
        dirs[3 * t + c] = static_cast<double>(vc - s * static_cast<long double>(xi[c]));
      }
    }
  }
  return g;
}

Field build_field(const FieldSpec& spec) {
  spec.validate();
  Field f;
  f.spec = spec;
  f.skel = make_skeleton(spec.control != NegativeControl::NoRotation);
  f.gens.reserve(spec.q_max - spec.q_min + 1);
  for (int q = spec.q_min; q <= spec.q_max; ++q)
    f.gens.push_back(build_generation(spec, f.skel, q));

  // Signed active regions must be pairwise disjoint across the whole field;
  // a collision would make the global mode table ambiguous.
  std::vector<const ActiveRegion*> all;
  for (const auto& g : f.gens)
    for (const auto& r : g.regions)
      if (!r.empty()) all.push_back(&r);
  for (size_t a = 0; a < all.size(); ++a) {
    if (all[a]->box.contains(FreqVec{{0, 0, 0}}))
      throw std::logic_error("active region contains the zero frequency");
    if (!intersect(all[a]->box, all[a]->box.negated()).empty())
      throw std::logic_error("active region meets its own mirror");
    for (size_t b = a + 1; b < all.size(); ++b) {
      if (!intersect(all[a]->box, all[b]->box).empty() ||
          !intersect(all[a]->box, all[b]->box.negated()).empty())
        throw std::logic_error("active regions overlap across generations");
    }
  }
  return f;
}

std::optional<ModeRef> Field::lookup(const FreqVec& xi) const {
  const i64 n2 = xi.norm2();
  for (const auto& g : gens) {
    if (!g.materialized) continue;
    if (n2 < g.n2_min || n2 > g.n2_max) continue;
    for (int i = 1; i <= 3; ++i) {
      const IBox& b = g.regions[i - 1].box;
      if (b.contains(xi)) return ModeRef{g.q, i, +1, b.index_of(xi)};
      const FreqVec neg = -xi;
      if (b.contains(neg)) return ModeRef{g.q, i, -1, b.index_of(neg)};
    }
  }
  return std::nullopt;
}

FreqVec Field::mode_xi(const ModeRef& m) const {
  const Generation* g = gen(m.q);
  FreqVec v = g->regions[m.i - 1].box.point_at(m.idx);
  return m.sign > 0 ? v : -v;
}

std::complex<double> Field::mode_coef(const ModeRef& m) const {
  return gen(m.q)->coef[m.i - 1][m.sign > 0 ? 0 : 1];
}

const double* Field::mode_dir(const ModeRef& m) const {
  return &gen(m.q)->dirs[m.i - 1][3 * m.idx];
}

std::vector<std::string> Field::empty_region_report() const {
  std::vector<std::string> out;
  for (const auto& g : gens)
    for (const auto& r : g.regions)
      if (r.empty())
        out.push_back("q=" + std::to_string(g.q) + " wave " + std::to_string(r.i) +
                      ": no lattice point in the blur cube");
  return out;
}

i64 Field::total_modes() const {
  i64 n = 0;
  for (const auto& g : gens)
    if (g.materialized) n += g.mode_count();
  return n;
}

i64 verify_solenoidality_exact(const Field& field) {
  i64 checked = 0;
  for (const auto& g : field.gens) {
    if (!g.materialized) continue;
    for (int i = 1; i <= 3; ++i) {
      const ActiveRegion& r = g.regions[i - 1];
      const i64 n = r.count();
      for (i64 t = 0; t < n; ++t) {
        const FreqVec xi = r.box.point_at(t);
        const Vec3X dir = exact_amp_dir(field.skel, g.j, i, xi);
        Vec3X x{QF15(Rat(mpz_class(xi[0]))), QF15(Rat(mpz_class(xi[1]))),
                QF15(Rat(mpz_class(xi[2])))};
        if (!dot(x, dir).is_zero())
          throw std::logic_error("mode at " + xi.str() + " is not solenoidal");
        checked += 2;  // the mirrored mode carries the same direction
      }
    }
  }
  return checked;
}

}  // namespace shellflux
