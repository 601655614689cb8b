#include "shellflux/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "shellflux/errors.hpp"
#include "shellflux/parallel.hpp"

namespace shellflux {

namespace {

struct SignedRegion {
  const ActiveRegion* region;
  int q;
  int wave;
  int sign;
  IBox box;
};

std::vector<SignedRegion> signed_regions(const Field& field, const std::vector<int>& qs) {
  std::vector<SignedRegion> out;
  for (int q : qs) {
    const Generation* g = field.gen(q);
    if (!g) continue;
    for (int i = 1; i <= 3; ++i) {
      const ActiveRegion& r = g->regions[i - 1];
      if (r.empty()) continue;
      out.push_back({&r, q, i, +1, r.box});
      out.push_back({&r, q, i, -1, r.box.negated()});
    }
  }
  return out;
}

TriadWitness make_witness(const FreqVec& a, int qa, int wa, const FreqVec& b, int qb,
                          int wb, const FreqVec& c, int qc, int wc) {
  struct Entry {
    FreqVec xi;
    int q, w;
  };
  std::array<Entry, 3> e{{{a, qa, wa}, {b, qb, wb}, {c, qc, wc}}};
  std::sort(e.begin(), e.end(), [](const Entry& x, const Entry& y) {
    if (x.q != y.q) return x.q < y.q;
    return x.xi < y.xi;
  });
  TriadWitness w;
  w.xi1 = e[0].xi; w.q1 = e[0].q; w.wave1 = e[0].w;
  w.xi2 = e[1].xi; w.q2 = e[1].q; w.wave2 = e[1].w;
  w.xi3 = e[2].xi; w.q3 = e[2].q; w.wave3 = e[2].w;
  return w;
}

// Enumerates closing triples across three signed regions, appending up to
// `cap` witnesses; returns the number of closing triples walked.
std::uint64_t enumerate_triples(const SignedRegion& A, const SignedRegion& B,
                                const SignedRegion& C, int cap,
                                std::vector<TriadWitness>& out) {
  std::uint64_t found = 0;
  const IBox sum_bc = B.box + C.box;
  const i64 nA = A.box.count();
  for (i64 t = 0; t < nA; ++t) {
    const FreqVec xi1 = A.box.point_at(t);
    if (!sum_bc.contains(-xi1)) continue;
    IBox window;  // xi2 in B with -xi1 - xi2 in C
    for (int c = 0; c < 3; ++c) {
      window.lo[c] = -xi1[c] - C.box.hi[c];
      window.hi[c] = -xi1[c] - C.box.lo[c];
    }
    const IBox inter = intersect(B.box, window);
    const i64 n = inter.count();
    for (i64 u = 0; u < n; ++u) {
      const FreqVec xi2 = inter.point_at(u);
      const FreqVec xi3 = -xi1 - xi2;
      ++found;
      if (static_cast<int>(out.size()) < cap)
        out.push_back(make_witness(xi1, A.q, A.wave, xi2, B.q, B.wave, xi3, C.q, C.wave));
      else
        return found;
    }
  }
  return found;
}

std::uint64_t estimate_triples(const SignedRegion& A, const SignedRegion& B,
                               const SignedRegion& C) {
  if (!(A.box + B.box + C.box).contains_zero()) return 0;
  return static_cast<std::uint64_t>(A.box.count());
}

}  // namespace

std::string TriadWitness::str() const {
  return xi1.str() + "@q" + std::to_string(q1) + " + " + xi2.str() + "@q" +
         std::to_string(q2) + " + " + xi3.str() + "@q" + std::to_string(q3) + " = 0";
}

std::vector<TriadWitness> enumerate_cross_triads(const Field& field,
                                                 const std::vector<int>& qset,
                                                 const VerifyOptions& opt) {
  std::vector<int> qs = qset;
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  const auto regions = signed_regions(field, qs);

  std::uint64_t estimate = 0;
  for (const auto& A : regions)
    for (const auto& B : regions)
      for (const auto& C : regions) {
        if (A.q == B.q && B.q == C.q) continue;  // cross-generation only
        estimate += estimate_triples(A, B, C);
      }
  if (opt.budget_pairs && estimate > opt.budget_pairs)
    throw BudgetExceeded(estimate, opt.budget_pairs);

  // Each unordered triple is met once per slot order; dedupe by the sorted
  // frequency key as we go.
  std::set<std::array<i64, 9>> seen;
  std::vector<TriadWitness> out;
  for (const auto& A : regions) {
    for (const auto& B : regions)
      for (const auto& C : regions) {
        if (A.q == B.q && B.q == C.q) continue;
        if (!(A.box + B.box + C.box).contains_zero()) continue;
        std::vector<TriadWitness> found;
        enumerate_triples(A, B, C, opt.witness_cap, found);
        for (auto& w : found) {
          std::array<FreqVec, 3> v{w.xi1, w.xi2, w.xi3};
          std::sort(v.begin(), v.end());
          const std::array<i64, 9> key{v[0][0], v[0][1], v[0][2], v[1][0], v[1][1],
                                       v[1][2], v[2][0], v[2][1], v[2][2]};
          if (seen.insert(key).second &&
              static_cast<int>(out.size()) < opt.witness_cap)
            out.push_back(w);
        }
      }
  }
  return out;
}

VerificationReport check_windmill(const Field& field, int qa, int qb, int qc,
                                  const VerifyOptions& opt) {
  VerificationReport rep;
  rep.check = "windmill";
  rep.params = "q=(" + std::to_string(qa) + "," + std::to_string(qb) + "," +
               std::to_string(qc) + ")";
  if (field.spec.control != NegativeControl::NoRotation) {
    const bool distinct =
        (qa % 3 != qb % 3) && (qb % 3 != qc % 3) && (qa % 3 != qc % 3);
    if (!distinct) {
      rep.pass = false;
      rep.notes.push_back("generations do not lie in three distinct residues mod 3");
      return rep;
    }
  }
  const auto ra = signed_regions(field, {qa});
  const auto rb = signed_regions(field, {qb});
  const auto rc = signed_regions(field, {qc});
  rep.pass = true;
  for (const auto& A : ra)
    for (const auto& B : rb)
      for (const auto& C : rc) {
        ++rep.work;
        if (!(A.box + B.box + C.box).contains_zero()) continue;
        rep.pass = false;
        std::vector<TriadWitness> w;
        enumerate_triples(A, B, C, 2, w);
        for (auto& t : w)
          if (static_cast<int>(rep.witnesses.size()) < opt.witness_cap)
            rep.witnesses.push_back(t);
      }
  return rep;
}

VerificationReport check_near_field(const Field& field, int q_lo, int q_hi,
                                    const VerifyOptions& opt) {
  VerificationReport rep;
  rep.check = "near-field";
  rep.params = "window=[" + std::to_string(q_lo) + "," + std::to_string(q_hi) + "]";
  rep.pass = true;
  int min_gap = -1;
  for (int q1 = q_lo; q1 <= q_hi; ++q1)
    for (int q2 = q1; q2 <= q_hi; ++q2)
      for (int q3 = q2; q3 <= q_hi; ++q3) {
        if (q1 == q3) continue;  // all three equal: the local block
        const auto ra = signed_regions(field, {q1});
        const auto rb = signed_regions(field, {q2});
        const auto rc = signed_regions(field, {q3});
        bool exists = false;
        for (const auto& A : ra)
          for (const auto& B : rb)
            for (const auto& C : rc) {
              ++rep.work;
              if ((A.box + B.box + C.box).contains_zero()) {
                exists = true;
                if (!(q2 == q3 && q1 + 3 <= q3)) {
                  rep.pass = false;
                  std::vector<TriadWitness> w;
                  enumerate_triples(A, B, C, 2, w);
                  for (auto& t : w)
                    if (static_cast<int>(rep.witnesses.size()) < opt.witness_cap)
                      rep.witnesses.push_back(t);
                }
              }
            }
        if (exists && q2 == q3) {
          const int gap = q3 - q1;
          if (min_gap < 0 || gap < min_gap) min_gap = gap;
        }
      }
  if (min_gap >= 0) rep.measured["min_pair_gap"] = min_gap;
  return rep;
}

VerificationReport check_sumset(const Field& field, int q, const VerifyOptions& opt) {
  VerificationReport rep;
  rep.check = "sumset";
  rep.params = "q=" + std::to_string(q);
  const Generation* g = field.gen(q);
  if (!g) {
    rep.pass = false;
    rep.notes.push_back("generation not built");
    return rep;
  }
  const ActiveRegion &r1 = g->regions[0], &r2 = g->regions[1], &r3 = g->regions[2];
  // Interval proof: the sumset of two full integer boxes is the box of sums.
  const IBox sum = r1.box + r2.box;
  bool contained = !sum.empty();
  for (int c = 0; c < 3; ++c)
    if (sum.lo[c] < r3.box.lo[c] || sum.hi[c] > r3.box.hi[c]) contained = false;
  rep.pass = contained;
  rep.notes.push_back(contained ? "interval containment holds"
                                : "interval containment fails");

  const std::uint64_t pairs = static_cast<std::uint64_t>(r1.count()) *
                              static_cast<std::uint64_t>(r2.count());
  if (pairs > 0 && pairs <= opt.budget_pairs) {
    // The box equals the exact cube intersection by construction (bounds come
    // from exact ceil/floor), so integer membership is the full test; the
    // exact-cube predicate is still exercised on the extremes below.
    std::uint64_t bad = 0;
    for (i64 t1 = 0; t1 < r1.count(); ++t1)
      for (i64 t2 = 0; t2 < r2.count(); ++t2) {
        const FreqVec s12 = r1.box.point_at(t1) + r2.box.point_at(t2);
        if (!r3.box.contains(s12)) {
          ++bad;
          if (static_cast<int>(rep.witnesses.size()) < opt.witness_cap)
            rep.witnesses.push_back(make_witness(r1.box.point_at(t1), q, 1,
                                                 r2.box.point_at(t2), q, 2, -s12, q, 3));
        }
      }
    const FreqVec lo1{{r1.box.lo[0], r1.box.lo[1], r1.box.lo[2]}};
    const FreqVec hi1{{r1.box.hi[0], r1.box.hi[1], r1.box.hi[2]}};
    const FreqVec lo2{{r2.box.lo[0], r2.box.lo[1], r2.box.lo[2]}};
    const FreqVec hi2{{r2.box.hi[0], r2.box.hi[1], r2.box.hi[2]}};
    if (!r1.contains_exact(lo1) || !r1.contains_exact(hi1) ||
        !r2.contains_exact(lo2) || !r2.contains_exact(hi2)) {
      rep.pass = false;
      rep.notes.push_back("box disagrees with the exact cube predicate");
    }
    if (bad == 0 && (!r3.contains_exact(lo1 + lo2) || !r3.contains_exact(hi1 + hi2))) {
      rep.pass = false;
      rep.notes.push_back("corner sum escapes the exact wave-3 cube");
    }
    rep.work = pairs;
    if (bad > 0) rep.pass = false;
    rep.measured["violations"] = static_cast<double>(bad);
  } else {
    rep.notes.push_back("elementwise sweep skipped (over budget); interval proof is exact");
  }
  return rep;
}

bool shell_predicate_exact(const FieldSpec& spec, int q, int wave, const FreqVec& xi) {
  const Rat lam2 = spec.lambda(q) * spec.lambda(q);
  const Rat sc = (wave == 3) ? Rat(2) : Rat(1);
  const Rat f2((wave == 1) ? 1 : (wave == 2) ? 4 : 5);
  const Rat ratio = Rat(mpz_class(xi.norm2())) / lam2;
  const Rat base = ratio - f2 - Rat(3) * sc * sc * spec.eps * spec.eps;
  const Rat c = Rat(2) * sc * spec.eps;
  const unsigned k = (wave == 3) ? 15u : (wave == 2 ? 12u : 3u);
  return compare_with_sqrt(base, -c, k) >= 0 && compare_with_sqrt(base, c, k) <= 0;
}

namespace {
constexpr i128 kSquareSafe = static_cast<i128>(1) << 62;
}

bool shell_predicate_i128(const FieldSpec& spec, int q, int wave, const FreqVec& xi) {
  // |xi|^2 v^2 - lam^2 (f2 v^2 + 3 s^2 p^2) against +-2 s p v lam^2 sqrt(k)
  const i128 p = spec.eps.num().get_si();
  const i128 v = spec.eps.den().get_si();
  const i128 lam2 = static_cast<i128>(1) << (2 * q);
  const i128 s = (wave == 3) ? 2 : 1;
  const i128 f2 = (wave == 1) ? 1 : (wave == 2) ? 4 : 5;
  const unsigned k = (wave == 3) ? 15u : (wave == 2 ? 12u : 3u);
  const i128 base =
      static_cast<i128>(xi.norm2()) * v * v - lam2 * (f2 * v * v + 3 * s * s * p * p);
  const i128 c = 2 * s * p * v * lam2;
  if (base >= kSquareSafe || -base >= kSquareSafe || c >= kSquareSafe)
    return shell_predicate_exact(spec, q, wave, xi);
  return sign_minus_sqrt_i128(base, -c, k) >= 0 && sign_minus_sqrt_i128(base, c, k) <= 0;
}

bool anchor_predicate_exact(const FieldSpec& spec, const SkeletonData& skel, int j,
                            const FreqVec& xi) {
  Vec3X xv{QF15(Rat(mpz_class(xi[0]))), QF15(Rat(mpz_class(xi[1]))),
           QF15(Rat(mpz_class(xi[2])))};
  const QF15 d = dot(xv, skel.normal[j]);
  const QF15 bound{Rat(4) * spec.eps * spec.eps * Rat(mpz_class(xi.norm2())), Rat(0)};
  return sign(d * d - bound) <= 0;
}

bool anchor_predicate_i128(const FieldSpec& spec, const SkeletonData& skel, int j,
                           const FreqVec& xi) {
  // normal = (A + B sqrt(15)) / 10 with integer A, B; test
  // (xi.A)^2 + 15 (xi.B)^2 + 2 (xi.A)(xi.B) sqrt(15) <= 400 eps^2 |xi|^2.
  i64 A[3], B[3];
  for (int c = 0; c < 3; ++c) {
    A[c] = (Rat(10) * skel.normal[j][c].a).num().get_si();
    B[c] = (Rat(10) * skel.normal[j][c].b).num().get_si();
  }
  const i128 xa = xi[0] * A[0] + xi[1] * A[1] + xi[2] * A[2];
  const i128 xb = xi[0] * B[0] + xi[1] * B[1] + xi[2] * B[2];
  const i128 p = spec.eps.num().get_si();
  const i128 v = spec.eps.den().get_si();
  // Scale by 100 v^2: alpha + beta sqrt(15) <= 400 p^2 |xi|^2.
  const i128 alpha = (xa * xa + 15 * xb * xb) * v * v;
  const i128 beta = 2 * xa * xb * v * v;
  const i128 rhs = 400 * p * p * static_cast<i128>(xi.norm2());
  const i128 lhs = rhs - alpha;
  if (lhs >= kSquareSafe || -lhs >= kSquareSafe || beta >= kSquareSafe ||
      -beta >= kSquareSafe)
    return anchor_predicate_exact(spec, skel, j, xi);
  return sign_minus_sqrt_i128(lhs, beta, 15) >= 0;
}

VerificationReport check_bounds(const Field& field, const VerifyOptions& opt) {
  VerificationReport rep;
  rep.check = "bounds";
  rep.params = "eps=" + field.spec.eps.str() + " q=[" + std::to_string(field.spec.q_min) +
               "," + std::to_string(field.spec.q_max) + "]";
  rep.pass = true;

  double proj_const = 0.0;
  double anchor_ratio = 0.0;
  std::uint64_t modes_checked = 0;
  const double eps_d = field.spec.eps.to_double();
  const double sqrt15 = std::sqrt(15.0);

  for (const auto& g : field.gens) {
    for (int i = 1; i <= 3; ++i) {
      const ActiveRegion& r = g.regions[i - 1];
      if (r.empty()) continue;

      const Rat el = (i == 3 ? Rat(2) : Rat(1)) * field.spec.eps_lambda(g.q);
      const Rat lo = (el - Rat(1)) * (el - Rat(1)) * (el - Rat(1));
      const Rat hi = (el + Rat(1)) * (el + Rat(1)) * (el + Rat(1));
      const Rat count(mpz_class(r.count()));
      if (count < lo || count > hi) {
        rep.pass = false;
        rep.notes.push_back("cardinality bracket fails at q=" + std::to_string(g.q) +
                            " wave " + std::to_string(i));
      }

      i64 VA[3], VB[3];
      double na[3], nb[3];
      for (int c = 0; c < 3; ++c) {
        VA[c] = (Rat(10) * field.skel.V[g.j][i - 1][c].a).num().get_si();
        VB[c] = (Rat(10) * field.skel.V[g.j][i - 1][c].b).num().get_si();
        na[c] = (Rat(10) * field.skel.normal[g.j][c].a).to_double();
        nb[c] = (Rat(10) * field.skel.normal[g.j][c].b).to_double();
      }
      const double vnorm = std::sqrt((i == 3) ? 5.0 : 1.0);

      const i64 n = r.count();
      bool shells_ok = true, anchor_ok = true, unambiguous_ok = true;
      double region_proj = 0.0, region_anchor = 0.0;
      for (i64 t = 0; t < n; ++t) {
        const FreqVec xi = r.box.point_at(t);
        if (!shell_predicate_i128(field.spec, g.q, i, xi)) shells_ok = false;
        if (!anchor_predicate_i128(field.spec, field.skel, g.j, xi)) anchor_ok = false;
        if (field.spec.control != NegativeControl::NoRotation) {
          for (int jj = 0; jj < 3; ++jj) {
            if (jj == g.j) continue;
            if (anchor_predicate_i128(field.spec, field.skel, jj, xi))
              unambiguous_ok = false;
          }
        }
        const double xa =
            static_cast<double>(dot(xi, FreqVec{{VA[0], VA[1], VA[2]}}));
        const double xb =
            static_cast<double>(dot(xi, FreqVec{{VB[0], VB[1], VB[2]}}));
        const double xv = (xa + xb * sqrt15) / 10.0;
        const double norm = std::sqrt(static_cast<double>(xi.norm2()));
        region_proj = std::max(region_proj, std::fabs(xv) / norm / (eps_d * vnorm));
        const double dn = ((xi[0] * na[0] + xi[1] * na[1] + xi[2] * na[2]) +
                           (xi[0] * nb[0] + xi[1] * nb[1] + xi[2] * nb[2]) * sqrt15) /
                          10.0;
        region_anchor = std::max(region_anchor, std::fabs(dn) / (eps_d * norm));
      }
      modes_checked += 2 * static_cast<std::uint64_t>(n);
      if (!shells_ok) {
        rep.pass = false;
        rep.notes.push_back("shell bound fails at q=" + std::to_string(g.q) + " wave " +
                            std::to_string(i));
      }
      if (!anchor_ok) {
        rep.pass = false;
        rep.notes.push_back("anchoring fails at q=" + std::to_string(g.q) + " wave " +
                            std::to_string(i));
      }
      if (!unambiguous_ok) {
        rep.pass = false;
        rep.notes.push_back("anchoring ambiguous at q=" + std::to_string(g.q) + " wave " +
                            std::to_string(i));
      }
      proj_const = std::max(proj_const, region_proj);
      anchor_ratio = std::max(anchor_ratio, region_anchor);
    }
  }
  rep.work = modes_checked;
  rep.measured["projection_constant"] = proj_const;
  rep.measured["anchor_distance_ratio"] = anchor_ratio;
  rep.measured["modes_checked"] = static_cast<double>(modes_checked);
  if (anchor_ratio >= 2.0) {
    rep.pass = false;
    rep.notes.push_back("anchoring distance ratio reached 2");
  }
  (void)opt;
  return rep;
}

}  // namespace shellflux
