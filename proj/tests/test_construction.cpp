#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "shellflux/errors.hpp"
#include "shellflux/field.hpp"
#include "shellflux/skeleton.hpp"

using namespace shellflux;

namespace {

Vec3X iv(long x, long y, long z) { return {QF15(x), QF15(y), QF15(z)}; }

// Brute-force lattice scan: every integer point with |component| <= bound
// tested against the exact cube membership predicate.
std::set<std::array<i64, 3>> scan_region(const ActiveRegion& r, i64 bound) {
  std::set<std::array<i64, 3>> pts;
  for (i64 x = -bound; x <= bound; ++x)
    for (i64 y = -bound; y <= bound; ++y)
      for (i64 z = -bound; z <= bound; ++z)
        if (r.contains_exact(FreqVec{{x, y, z}})) pts.insert({x, y, z});
  return pts;
}

FieldSpec small_spec(const Rat& eps, int q_min, int q_max) {
  FieldSpec s;
  s.eps = eps;
  s.eps0 = Rat(1, 2);  // tests exercise coarse eps values too
  s.q_min = q_min;
  s.q_max = q_max;
  return s;
}

}  // namespace

TEST_CASE("skeleton frozen values") {
  const SkeletonData s = make_skeleton();
  CHECK(s.freq(0, 3) == iv(2, 1, 0));
  CHECK(s.freq(0, 1) == iv(0, 1, 0));
  CHECK(s.amp(0, 3) == iv(-1, 2, 0));

  // First column of the rotation: R (1,0,0) = (9/10, -2/10, sqrt(15)/10).
  const Vec3X v11 = s.amp(1, 1);
  CHECK(v11.x == QF15{Rat(9, 10), Rat(0)});
  CHECK(v11.y == QF15{Rat(-1, 5), Rat(0)});
  CHECK(v11.z == QF15{Rat(0), Rat(1, 10)});
}

TEST_CASE("skeleton closure and rigidity") {
  const SkeletonData s = make_skeleton();
  for (int j = 0; j < 3; ++j) {
    CHECK(s.F[j][0] + s.F[j][1] - s.F[j][2] == iv(0, 0, 0));
    for (int i = 0; i < 3; ++i) CHECK(dot(s.F[j][i], s.V[j][i]).is_zero());
    CHECK(norm2(s.F[j][0]) == QF15(1));
    CHECK(norm2(s.F[j][1]) == QF15(4));
    CHECK(norm2(s.F[j][2]) == QF15(5));
  }
  // The rotation fixes its axis direction (2,-1,0).
  const Mat3X R = rotation_matrix();
  CHECK(R.apply(iv(2, -1, 0)) == iv(2, -1, 0));
  // Orthogonality: columns are orthonormal.
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(dot(R.col[a], R.col[b]) == QF15(a == b ? 1 : 0));
}

TEST_CASE("region enumeration against brute-force scan") {
  const SkeletonData skel = make_skeleton();

  SUBCASE("eps=1/4, q=3, wave 1: cube (0,8,0)+[0,2]^3 holds 27 points") {
    FieldSpec s = small_spec(Rat(1, 4), 3, 3);
    const ActiveRegion r = enumerate_region(s, skel, 3, 1);
    CHECK(r.count() == 27);
    CHECK(scan_region(r, 12).size() == 27);
    CHECK(r.box.lo == std::array<i64, 3>{0, 8, 0});
    CHECK(r.box.hi == std::array<i64, 3>{2, 10, 2});
  }

  SUBCASE("eps=1/16, q=4, rotated plane: box matches exact membership") {
    FieldSpec s = small_spec(Rat(1, 16), 4, 4);
    const ActiveRegion r = enumerate_region(s, skel, 4, 1);
    const auto pts = scan_region(r, 32);
    CHECK(static_cast<i64>(pts.size()) == r.count());
    for (const auto& p : pts) CHECK(r.box.contains(FreqVec{{p[0], p[1], p[2]}}));
  }

  SUBCASE("cardinality brackets") {
    for (int q : {3, 4, 5, 6}) {
      FieldSpec s = small_spec(Rat(1, 8), q, q);
      for (int i = 1; i <= 3; ++i) {
        const ActiveRegion r = enumerate_region(s, skel, q, i);
        const double el = (i == 3 ? 2.0 : 1.0) * s.eps_lambda(q).to_double();
        const double lo = std::pow(el - 1.0, 3.0), hi = std::pow(el + 1.0, 3.0);
        CHECK(static_cast<double>(r.count()) >= lo);
        CHECK(static_cast<double>(r.count()) <= hi);
      }
    }
  }
}

TEST_CASE("leray projection") {
  const Vec3X e1 = iv(1, 0, 0);
  CHECK(leray_project(FreqVec{{0, 8, 0}}, e1) == e1);

  const Vec3X p = leray_project(FreqVec{{1, 1, 0}}, e1);
  CHECK(p.x == QF15{Rat(1, 2), Rat(0)});
  CHECK(p.y == QF15{Rat(-1, 2), Rat(0)});
  CHECK(p.z == QF15(0));

  CHECK_THROWS_AS(leray_project(FreqVec{{0, 0, 0}}, e1), ZeroFrequency);

  // Orthogonality is exact for arbitrary inputs.
  const SkeletonData skel = make_skeleton();
  for (i64 x = -3; x <= 3; ++x)
    for (i64 y = -2; y <= 2; ++y) {
      const FreqVec xi{{x, y, 1 - x}};
      if (xi.is_zero()) continue;
      const Vec3X w = leray_project(xi, skel.V[1][2]);
      Vec3X xv{QF15(Rat(mpz_class(xi[0]))), QF15(Rat(mpz_class(xi[1]))), QF15(Rat(mpz_class(xi[2])))};
      CHECK(dot(xv, w).is_zero());
    }
}

TEST_CASE("projection deviation is O(eps)") {
  // sup over modes of |pi_xi(V) - V| / eps stays bounded across generations.
  FieldSpec s = small_spec(Rat(1, 8), 3, 6);
  const Field f = build_field(s);
  double worst = 0.0;
  for (const auto& g : f.gens) {
    for (int i = 1; i <= 3; ++i) {
      const ActiveRegion& r = g.regions[i - 1];
      for (i64 t = 0; t < r.count(); ++t) {
        const FreqVec xi = r.box.point_at(t);
        const Vec3X d = exact_amp_dir(f.skel, g.j, i, xi);
        const Vec3X diff = d - f.skel.V[g.j][i - 1];
        const double dev = std::sqrt(to_double(norm2(diff), 64));
        worst = std::max(worst, dev / s.eps.to_double());
      }
    }
  }
  CHECK(worst > 0.0);
  CHECK(worst < 10.0);
}

TEST_CASE("generation build") {
  FieldSpec s = small_spec(Rat(1, 8), 3, 5);
  const Field f = build_field(s);

  SUBCASE("exact solenoidality of every mode") {
    CHECK(verify_solenoidality_exact(f) == f.total_modes());
  }

  SUBCASE("conjugate symmetry: coefficients at -xi are conjugates") {
    for (const auto& g : f.gens) {
      for (int i = 1; i <= 3; ++i) {
        CHECK(g.coef[i - 1][0] == std::conj(g.coef[i - 1][1]));
      }
    }
  }

  SUBCASE("whole-generation shell bounds") {
    for (const auto& g : f.gens) {
      const double lam = std::ldexp(1.0, g.q);
      const double e = s.eps.to_double();
      const double lo = lam * (1 - 2 * e), hi = lam * (std::sqrt(5.0) + 4 * e);
      for (int i = 1; i <= 3; ++i) {
        const ActiveRegion& r = g.regions[i - 1];
        for (i64 t = 0; t < r.count(); ++t) {
          const double n = std::sqrt(static_cast<double>(r.box.point_at(t).norm2()));
          CHECK(n > lo);
          CHECK(n < hi);
        }
      }
    }
  }

  SUBCASE("per-wave shell bounds, exact comparisons") {
    // |xi|^2 / lambda^2 - (1 + 3 eps^2 s^2) compared against +-2 s eps sqrt(3)
    // (waves 1,2 with s the wave scale), and the sqrt(5) shell for wave 3
    // through Q(sqrt(15)).
    for (const auto& g : f.gens) {
      const Rat lam2 = s.lambda(g.q) * s.lambda(g.q);
      for (int i = 1; i <= 3; ++i) {
        const ActiveRegion& r = g.regions[i - 1];
        const Rat sc = (i == 3) ? Rat(2) : Rat(1);
        const Rat f2((i == 1) ? 1 : (i == 2) ? 4 : 5);
        for (i64 t = 0; t < r.count(); ++t) {
          const FreqVec xi = r.box.point_at(t);
          const Rat ratio = Rat(mpz_class(xi.norm2())) / lam2;
          const Rat base = ratio - f2 - Rat(3) * sc * sc * s.eps * s.eps;
          // lower: base >= -2 sqrt(3 f2) s eps ; upper: base <= +...
          const Rat c = Rat(2) * sc * s.eps;
          const unsigned k = (i == 3) ? 15u : (i == 2 ? 12u : 3u);
          // sqrt(3 * f2): wave1 sqrt3, wave2 sqrt12, wave3 sqrt15
          CHECK(compare_with_sqrt(base, -c, k) >= 0);
          CHECK(compare_with_sqrt(base, c, k) <= 0);
        }
      }
    }
  }

  SUBCASE("mode count brackets for the whole field") {
    for (const auto& g : f.gens) {
      const double el = s.eps_lambda(g.q).to_double();
      const double lo = 2 * (2 * std::pow(std::max(el - 1.0, 0.0), 3.0) +
                             std::pow(std::max(2 * el - 1.0, 0.0), 3.0));
      const double hi = 2 * (2 * std::pow(el + 1.0, 3.0) + std::pow(2 * el + 1.0, 3.0));
      CHECK(g.mode_count() >= lo);
      CHECK(g.mode_count() <= hi);
    }
  }
}

TEST_CASE("anchoring is exact and unambiguous") {
  FieldSpec s = small_spec(Rat(1, 8), 3, 6);
  const Field f = build_field(s);
  const Rat four_eps2 = Rat(4) * s.eps * s.eps;
  for (const auto& g : f.gens) {
    for (int i = 1; i <= 3; ++i) {
      const ActiveRegion& r = g.regions[i - 1];
      for (i64 t = 0; t < r.count(); ++t) {
        const FreqVec xi = r.box.point_at(t);
        Vec3X xv{QF15(Rat(mpz_class(xi[0]))), QF15(Rat(mpz_class(xi[1]))),
                 QF15(Rat(mpz_class(xi[2])))};
        const QF15 bound = QF15(four_eps2 * Rat(mpz_class(xi.norm2())));
        for (int j = 0; j < 3; ++j) {
          const QF15 d = dot(xv, f.skel.normal[j]);
          const int cmp = sign(d * d - bound);
          if (j == g.j)
            CHECK(cmp <= 0);  // anchored to its own plane
          else
            CHECK(cmp > 0);   // and to no other
        }
      }
    }
  }
}

TEST_CASE("cube scaling between generations three apart") {
  FieldSpec s = small_spec(Rat(1, 8), 3, 6);
  const SkeletonData skel = make_skeleton();
  for (int i = 1; i <= 3; ++i) {
    const ActiveRegion a = enumerate_region(s, skel, 3, i);
    const ActiveRegion b = enumerate_region(s, skel, 6, i);
    CHECK(b.side == Rat(8) * a.side);
    for (int c = 0; c < 3; ++c) CHECK(b.cube_lo[c] == QF15(Rat(8)) * a.cube_lo[c]);
  }
}

TEST_CASE("field-level structure") {
  FieldSpec s = small_spec(Rat(1, 8), 3, 6);
  const Field f = build_field(s);

  SUBCASE("supports are disjoint and lookup is unambiguous") {
    // build_field already enforces box disjointness; spot-check lookups.
    for (const auto& g : f.gens) {
      for (int i = 1; i <= 3; ++i) {
        const ActiveRegion& r = g.regions[i - 1];
        if (r.empty()) continue;
        const FreqVec xi = r.box.point_at(r.count() / 2);
        const auto m = f.lookup(xi);
        REQUIRE(m.has_value());
        CHECK(m->q == g.q);
        CHECK(m->i == i);
        CHECK(m->sign == +1);
        const auto mm = f.lookup(-xi);
        REQUIRE(mm.has_value());
        CHECK(mm->sign == -1);
      }
    }
    CHECK_FALSE(f.lookup(FreqVec{{1, 0, 0}}).has_value());
  }

  SUBCASE("default q_min matches eps") {
    CHECK(FieldSpec::default_q_min(Rat(1, 8)) == 3);
    CHECK(FieldSpec::default_q_min(Rat(1, 16)) == 4);
  }

  SUBCASE("eps guard") {
    FieldSpec bad = small_spec(Rat(1, 2), 3, 4);
    bad.eps0 = Rat(1, 16);
    CHECK_THROWS_AS(build_field(bad), ConfigError);
  }
}

TEST_CASE("generation scale dyadic structure") {
  FieldSpec s = small_spec(Rat(1, 8), 3, 9);
  // Three generations apart the scale ratio is exactly 2^-7.
  const long double a = generation_scale(s, 3);
  const long double b = generation_scale(s, 6);
  CHECK(static_cast<double>(a / b) == 128.0);
  // Doubling amplitude_scale doubles the scale exactly.
  FieldSpec s2 = s;
  s2.amplitude_scale = 2.0;
  CHECK(static_cast<double>(generation_scale(s2, 5) / generation_scale(s, 5)) == 2.0);
}
