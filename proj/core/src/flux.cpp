#include "shellflux/flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shellflux/errors.hpp"
#include "shellflux/parallel.hpp"

namespace shellflux {

namespace {

// One signed active region prepared for the pair kernel.
struct SBox {
  int q = 0, i = 1, sign = +1;
  IBox sbox;  // box of the signed frequencies
  IBox ubox;
  const double* dirs = nullptr;
  std::complex<double> coef;
};

std::vector<SBox> signed_boxes(const Field& field, int q, unsigned wave_mask) {
  std::vector<SBox> out;
  const Generation* g = field.gen(q);
  if (!g || !g->materialized) return out;
  for (int i = 1; i <= 3; ++i) {
    if (!(wave_mask & (1u << (i - 1)))) continue;
    const ActiveRegion& r = g->regions[i - 1];
    if (r.empty()) continue;
    for (int sign : {+1, -1}) {
      SBox b;
      b.q = q;
      b.i = i;
      b.sign = sign;
      b.ubox = r.box;
      b.sbox = sign > 0 ? r.box : r.box.negated();
      b.dirs = g->dirs[i - 1].data();
      b.coef = g->coef[i - 1][sign > 0 ? 0 : 1];
      out.push_back(b);
    }
  }
  return out;
}

// Gradient-slot part: signed region plus low-pass weights.
struct GradPart {
  SBox box;
  bool uniform = true;
  double weight = 1.0;
  const std::vector<double>* per_mode = nullptr;
};

struct PairTask {
  SBox a, b;
  IBox sum;  // a.sbox + b.sbox
  std::complex<double> coef_ab;
};

std::vector<PairTask> make_tasks(const std::vector<SBox>& as, const std::vector<SBox>& bs) {
  std::vector<PairTask> out;
  out.reserve(as.size() * bs.size());
  for (const auto& a : as)
    for (const auto& b : bs) out.push_back({a, b, a.sbox + b.sbox, a.coef * b.coef});
  return out;
}

// Walks xi1 over a.sbox with xi2 = -xi3 - xi1 constrained to b.sbox and sums
// (dir_a . d3)(dir_b . xi3). Returns the number of ordered pairs visited.
inline std::uint64_t kernel(const PairTask& t, const FreqVec& xi3, const double* d3,
                            long double& geom_out) {
  IBox window;  // -xi3 - b.sbox
  for (int c = 0; c < 3; ++c) {
    window.lo[c] = -xi3[c] - t.b.sbox.hi[c];
    window.hi[c] = -xi3[c] - t.b.sbox.lo[c];
  }
  const IBox inter = intersect(t.a.sbox, window);
  if (inter.empty()) {
    geom_out = 0.0L;
    return 0;
  }

  const double x3[3] = {static_cast<double>(xi3[0]), static_cast<double>(xi3[1]),
                        static_cast<double>(xi3[2])};
  const IBox& ua = t.a.ubox;
  const IBox& ub = t.b.ubox;
  const i64 a_d1 = ua.hi[1] - ua.lo[1] + 1, a_d2 = ua.hi[2] - ua.lo[2] + 1;
  const i64 b_d1 = ub.hi[1] - ub.lo[1] + 1, b_d2 = ub.hi[2] - ub.lo[2] + 1;
  const int sa = t.a.sign, sb = t.b.sign;
  const i64 stepa = sa > 0 ? 3 : -3;
  const i64 stepb = sb > 0 ? -3 : 3;

  long double geom = 0.0L;
  for (i64 x = inter.lo[0]; x <= inter.hi[0]; ++x) {
    const i64 ax = (sa > 0 ? x : -x) - ua.lo[0];
    const i64 bx = (sb > 0 ? (-xi3[0] - x) : (xi3[0] + x)) - ub.lo[0];
    for (i64 y = inter.lo[1]; y <= inter.hi[1]; ++y) {
      const i64 ay = (sa > 0 ? y : -y) - ua.lo[1];
      const i64 by = (sb > 0 ? (-xi3[1] - y) : (xi3[1] + y)) - ub.lo[1];
      const i64 z0 = inter.lo[2];
      const i64 az = (sa > 0 ? z0 : -z0) - ua.lo[2];
      const i64 bz = (sb > 0 ? (-xi3[2] - z0) : (xi3[2] + z0)) - ub.lo[2];
      const double* pa = t.a.dirs + 3 * ((ax * a_d1 + ay) * a_d2 + az);
      const double* pb = t.b.dirs + 3 * ((bx * b_d1 + by) * b_d2 + bz);
      double row = 0.0;
      for (i64 z = z0; z <= inter.hi[2]; ++z) {
        const double da_d3 = pa[0] * d3[0] + pa[1] * d3[1] + pa[2] * d3[2];
        const double db_x3 = pb[0] * x3[0] + pb[1] * x3[1] + pb[2] * x3[2];
        row += da_d3 * db_x3;
        pa += stepa;
        pb += stepb;
      }
      geom += static_cast<long double>(row);
    }
  }
  geom_out = geom;
  return static_cast<std::uint64_t>(inter.count());
}

std::uint64_t kernel_count(const PairTask& t, const FreqVec& xi3) {
  IBox window;
  for (int c = 0; c < 3; ++c) {
    window.lo[c] = -xi3[c] - t.b.sbox.hi[c];
    window.hi[c] = -xi3[c] - t.b.sbox.lo[c];
  }
  return static_cast<std::uint64_t>(intersect(t.a.sbox, window).count());
}

struct EngineResult {
  long double re = 0.0L;
  long double im = 0.0L;
  std::uint64_t triads = 0;
};

// Deterministic parallel reduction over (gradient modes) x (pair tasks).
// Chunks are fixed slices of each part's point range; partial sums combine
// in chunk order, so the result is independent of the thread count.
EngineResult run_engine(const std::vector<GradPart>& parts,
                        const std::vector<PairTask>& tasks, int threads,
                        bool count_only) {
  struct PartWork {
    const GradPart* part;
    std::vector<const PairTask*> tasks;
    i64 n_points;
  };
  std::vector<PartWork> work;
  for (const auto& p : parts) {
    if (p.uniform && p.weight == 0.0) continue;
    PartWork w;
    w.part = &p;
    w.n_points = p.box.ubox.count();
    for (const auto& t : tasks)
      if ((t.sum + p.box.sbox).contains_zero()) w.tasks.push_back(&t);
    if (!w.tasks.empty() && w.n_points > 0) work.push_back(std::move(w));
  }

  constexpr i64 kChunk = 256;
  std::vector<std::pair<i64, i64>> chunks;
  for (i64 wi = 0; wi < static_cast<i64>(work.size()); ++wi)
    for (i64 off = 0; off < work[wi].n_points; off += kChunk)
      chunks.emplace_back(wi, off);

  std::vector<EngineResult> partial(chunks.size());
  run_chunks(static_cast<i64>(chunks.size()), threads, [&](i64 ci) {
    const auto [wi, off] = chunks[ci];
    const PartWork& w = work[wi];
    const GradPart& p = *w.part;
    const i64 end = std::min(w.n_points, off + kChunk);
    Accum re, im;
    std::uint64_t triads = 0;
    for (i64 t = off; t < end; ++t) {
      const double wgt = p.uniform ? p.weight : (*p.per_mode)[t];
      if (wgt == 0.0) continue;
      const FreqVec xi_u = p.box.ubox.point_at(t);
      const FreqVec xi3 = p.box.sign > 0 ? xi_u : -xi_u;
      const double* d3 = p.box.dirs + 3 * t;
      const std::complex<double> c3 =
          p.box.coef * std::complex<double>(0.0, wgt * wgt);
      for (const PairTask* task : w.tasks) {
        if (!task->sum.contains(-xi3)) continue;
        if (count_only) {
          triads += kernel_count(*task, xi3);
          continue;
        }
        long double geom = 0.0L;
        triads += kernel(*task, xi3, d3, geom);
        const std::complex<double> K = task->coef_ab * c3;
        re.add(static_cast<long double>(K.real()) * geom);
        im.add(static_cast<long double>(K.imag()) * geom);
      }
    }
    partial[ci] = {re.value(), im.value(), triads};
  });

  EngineResult total;
  Accum re, im;
  for (const auto& p : partial) {
    re.add(p.re);
    im.add(p.im);
    total.triads += p.triads;
  }
  total.re = re.value();
  total.im = im.value();
  return total;
}

std::vector<GradPart> grad_parts_wave1(const Field& field, int q) {
  std::vector<GradPart> parts;
  for (const SBox& b : signed_boxes(field, q, 0x1)) parts.push_back(GradPart{b});
  return parts;
}

double finish_real(const EngineResult& r, double imag_rel_tol, const char* what) {
  const double re = static_cast<double>(r.re);
  const double im = static_cast<double>(r.im);
  if (std::fabs(im) > imag_rel_tol * std::fabs(re) + 1e-14)
    throw std::logic_error(std::string(what) + ": imaginary residue " + std::to_string(im));
  return re;
}

std::vector<PairTask> local_tasks(const Field& field, int q) {
  const auto two = signed_boxes(field, q, 0x2);
  const auto three = signed_boxes(field, q, 0x4);
  auto tasks = make_tasks(two, three);
  const auto rev = make_tasks(three, two);
  tasks.insert(tasks.end(), rev.begin(), rev.end());
  return tasks;
}

std::vector<PairTask> pair_tasks(const Field& field, int k, unsigned a_wave_mask) {
  return make_tasks(signed_boxes(field, k, a_wave_mask), signed_boxes(field, k, 0x7));
}

int max_materialized(const Field& field) {
  int k = field.spec.q_min - 1;
  for (const auto& g : field.gens)
    if (g.materialized) k = g.q;
  return k;
}

int n_eps_of(const Rat& eps) {
  return static_cast<int>(std::floor(3.0 - std::log2(eps.to_double())));
}

}  // namespace

double flux_local(const Field& field, int q, const FluxOptions& opt) {
  const Generation* g = field.gen(q);
  if (!g || !g->materialized)
    throw std::invalid_argument("flux_local: generation " + std::to_string(q) +
                                " is not materialized");
  const auto r = run_engine(grad_parts_wave1(field, q), local_tasks(field, q),
                            opt.threads, false);
  if (opt.budget_pairs && r.triads > opt.budget_pairs)
    throw BudgetExceeded(r.triads, opt.budget_pairs);
  return finish_real(r, opt.imag_rel_tol, "flux_local");
}

std::uint64_t count_local_pairs(const Field& field, int q) {
  return run_engine(grad_parts_wave1(field, q), local_tasks(field, q), 0, true).triads;
}

double flux_pair(const Field& field, int l, int k, unsigned a_wave_mask,
                 const FluxOptions& opt) {
  if (k <= l) return 0.0;
  const Generation* gl = field.gen(l);
  const Generation* gk = field.gen(k);
  if (!gl || !gk || !gl->materialized || !gk->materialized)
    throw std::invalid_argument("flux_pair: generations not materialized");
  const auto r = run_engine(grad_parts_wave1(field, l),
                            pair_tasks(field, k, a_wave_mask), opt.threads, false);
  return finish_real(r, opt.imag_rel_tol, "flux_pair");
}

NonlocalFlux flux_nonlocal(const Field& field, int q, const FluxOptions& opt) {
  NonlocalFlux out;
  out.n_eps = n_eps_of(field.spec.eps);
  const int k_max = max_materialized(field);
  const int q_min = field.spec.q_min;
  if (field.gen(q) == nullptr)
    throw std::invalid_argument("flux_nonlocal: q outside the field range");

  // Exact complement: gradient over U_{<q} + u_q^(1), first tensor slot over
  // u_q^(2) + u_q^(3) + U_{>q}, second slot over everything, minus the local
  // block (all three slots at level q). Pure slot algebra; it does not rely
  // on the interaction-exclusion propositions.
  std::vector<SBox> w_boxes = signed_boxes(field, q, 0x6);
  for (int k = q + 1; k <= k_max; ++k) {
    const auto more = signed_boxes(field, k, 0x7);
    w_boxes.insert(w_boxes.end(), more.begin(), more.end());
  }
  std::vector<SBox> all_boxes;
  for (const auto& g : field.gens) {
    if (!g.materialized) continue;
    const auto more = signed_boxes(field, g.q, 0x7);
    all_boxes.insert(all_boxes.end(), more.begin(), more.end());
  }
  const auto all_tasks = make_tasks(w_boxes, all_boxes);
  std::vector<PairTask> cross_tasks;  // excludes (q, q) tensor pairs
  for (const auto& t : all_tasks)
    if (!(t.a.q == q && t.b.q == q)) cross_tasks.push_back(t);

  std::vector<GradPart> low_parts;
  for (int l = q_min; l < q; ++l)
    for (const SBox& b : signed_boxes(field, l, 0x7)) low_parts.push_back(GradPart{b});
  const auto r_low = run_engine(low_parts, all_tasks, opt.threads, false);
  const auto r_q = run_engine(grad_parts_wave1(field, q), cross_tasks, opt.threads, false);
  Accum total_re, total_im;
  total_re.add(r_low.re);
  total_re.add(r_q.re);
  total_im.add(r_low.im);
  total_im.add(r_q.im);
  out.value = finish_real({total_re.value(), total_im.value(), 0}, opt.imag_rel_tol,
                          "flux_nonlocal");

  // Structured pair blocks: two equal high generations against a low
  // gradient. Their sum reproduces `value` exactly when the near-field and
  // windmill exclusions hold; the gap is reported as `unstructured`.
  Accum pairs, far, near, same;
  for (int l = q_min; l <= q - 1; ++l) {
    const double v = flux_pair(field, l, q, 0x6, opt);
    same.add(v);
    pairs.add(v);
  }
  for (int k = q + 1; k <= k_max; ++k) {
    for (int l = q_min; l <= std::min(q, k - 1); ++l) {
      const double v = flux_pair(field, l, k, 0x7, opt);
      pairs.add(v);
      if (k > std::max(q, l + out.n_eps))
        far.add(v);
      else
        near.add(v);
    }
  }
  out.pair_sum = static_cast<double>(pairs.value());
  out.far_part = static_cast<double>(far.value());
  out.near_part = static_cast<double>(near.value());
  out.same_level = static_cast<double>(same.value());
  out.unstructured = out.value - out.pair_sum;
  out.truncation_bound = nonlocal_truncation_bound(field, q, k_max);
  return out;
}

double nonlocal_truncation_bound(const Field& field, int q, int k_max) {
  // |pair block (l,k)| <= sum_i |A_l^(1)| |A_k^(i)| |V^(i)|^2 *
  //   |scale|^3 eps^-6 lambda_k^(-14/3) lambda_l^(-4/3) (1 + sqrt(3) eps),
  // with the cardinalities replaced by their upper brackets. Summed over
  // l <= q and k > k_max; the k series is geometric with ratio 2^(-5/3).
  const long double eps = field.spec.eps.to_double();
  const long double scale3 = powl(fabsl(static_cast<long double>(field.spec.amplitude_scale)), 3.0L);
  const long double vnorm2[3] = {1.0L, 1.0L, 5.0L};
  const long double guard = 1.0L + sqrtl(3.0L) * eps;
  long double bound = 0.0L;
  for (int l = field.spec.q_min; l <= q; ++l) {
    const long double lam_l = ldexpl(1.0L, l);
    const long double al = powl(eps * lam_l + 1.0L, 3.0L);
    for (int k = k_max + 1; k <= k_max + 400; ++k) {
      const long double lam_k = ldexpl(1.0L, k);
      long double ak = 0.0L;
      for (int i = 0; i < 3; ++i) {
        const long double s = (i == 2) ? 2.0L : 1.0L;
        ak += vnorm2[i] * powl(s * eps * lam_k + 1.0L, 3.0L);
      }
      const long double term = al * ak * scale3 * powl(eps, -6.0L) *
                               powl(lam_k, -14.0L / 3.0L) * powl(lam_l, -4.0L / 3.0L) * guard;
      bound += term;
      if (term < 1e-300) break;
    }
  }
  return static_cast<double>(bound);
}

double flux_total(const Field& field, int q, const CutoffSpec& cutoff,
                  const FluxOptions& opt) {
  const WeightedModeSet weights = project_Sq(field, q, cutoff);
  std::vector<GradPart> parts;
  for (const auto& wp : weights.parts) {
    const Generation* g = field.gen(wp.q);
    const ActiveRegion& r = g->regions[wp.i - 1];
    for (int sign : {+1, -1}) {
      GradPart p;
      p.box.q = wp.q;
      p.box.i = wp.i;
      p.box.sign = sign;
      p.box.ubox = r.box;
      p.box.sbox = sign > 0 ? r.box : r.box.negated();
      p.box.dirs = g->dirs[wp.i - 1].data();
      p.box.coef = g->coef[wp.i - 1][sign > 0 ? 0 : 1];
      p.uniform = wp.uniform;
      p.weight = wp.uniform ? wp.weight[0] : 1.0;
      p.per_mode = wp.uniform ? nullptr : &wp.per_mode;
      parts.push_back(p);
    }
  }
  std::vector<SBox> all;
  for (const auto& g : field.gens) {
    if (!g.materialized) continue;
    const auto boxes = signed_boxes(field, g.q, 0x7);
    all.insert(all.end(), boxes.begin(), boxes.end());
  }
  const auto tasks = make_tasks(all, all);
  if (opt.budget_pairs) {
    const auto count = run_engine(parts, tasks, opt.threads, true);
    if (count.triads > opt.budget_pairs) throw BudgetExceeded(count.triads, opt.budget_pairs);
  }
  const auto r = run_engine(parts, tasks, opt.threads, false);
  return finish_real(r, opt.imag_rel_tol, "flux_total");
}

std::uint64_t count_total_pairs(const Field& field, int q, const CutoffSpec& cutoff) {
  const WeightedModeSet weights = project_Sq(field, q, cutoff);
  std::vector<GradPart> parts;
  for (const auto& wp : weights.parts) {
    if (wp.uniform && wp.weight[0] == 0.0) continue;
    const Generation* g = field.gen(wp.q);
    const ActiveRegion& r = g->regions[wp.i - 1];
    for (int sign : {+1, -1}) {
      GradPart p;
      p.box.q = wp.q;
      p.box.i = wp.i;
      p.box.sign = sign;
      p.box.ubox = r.box;
      p.box.sbox = sign > 0 ? r.box : r.box.negated();
      p.box.dirs = g->dirs[wp.i - 1].data();
      p.box.coef = g->coef[wp.i - 1][sign > 0 ? 0 : 1];
      p.uniform = wp.uniform;
      p.weight = wp.uniform ? wp.weight[0] : 1.0;
      p.per_mode = wp.uniform ? nullptr : &wp.per_mode;
      parts.push_back(p);
    }
  }
  std::vector<SBox> all;
  for (const auto& g : field.gens) {
    if (!g.materialized) continue;
    const auto boxes = signed_boxes(field, g.q, 0x7);
    all.insert(all.end(), boxes.begin(), boxes.end());
  }
  return run_engine(parts, make_tasks(all, all), 0, true).triads;
}

FluxBreakdown decomposition_check(const Field& field, int q, const CutoffSpec& cutoff,
                                  const FluxOptions& opt) {
  FluxBreakdown b;
  b.q = q;
  b.pi_total = flux_total(field, q, cutoff, opt);
  b.pi_local = flux_local(field, q, opt);
  const NonlocalFlux nl = flux_nonlocal(field, q, opt);
  b.pi_nonlocal = nl.value;
  b.pi_nonlocal_far = nl.far_part;
  b.pi_nonlocal_near = nl.near_part;
  b.pi_nonlocal_same_level = nl.same_level;
  b.pi_nonlocal_unstructured = nl.unstructured;
  b.truncation_bound = nl.truncation_bound;
  b.n_eps = nl.n_eps;
  b.triads_total = count_total_pairs(field, q, cutoff);

  const double oracle = skeleton_flux_oracle() *
                        std::pow(field.spec.amplitude_scale, 3.0);
  const double el = field.spec.eps_lambda(q).to_double();
  const double lo6 = std::pow(std::max(el - 1.0, 0.0) / el, 6.0);
  const double hi6 = std::pow((el + 1.0) / el, 6.0);
  b.lower_bracket = std::min(oracle * lo6, oracle * hi6);
  b.upper_bracket = std::max(oracle * lo6, oracle * hi6);

  b.residual = std::fabs(b.pi_total - b.pi_local - b.pi_nonlocal);
  b.decomposition_ok = b.residual <= b.truncation_bound + 1e-9 * std::fabs(b.pi_total);
  return b;
}

double skeleton_flux_oracle(int q) {
  if (q % 3 != 0) throw std::invalid_argument("skeleton generations live in 3N");
  // Exact product-to-sum reduction of int s2 (.) s3 : grad s1 for the
  // three-wave skeleton. All arithmetic is rational; the dyadic prefactors
  // cancel (-1/3 - 1/3 + (-1/3 + 1) = 0 powers of lambda).
  const SkeletonData skel = make_skeleton(true);
  const Vec3X* F = skel.F[0];
  const Vec3X* V = skel.V[0];
  auto fvec = [&](int i, int c) { return F[i][c].a; };  // integer entries at j=0

  struct CRat {
    Rat re, im;
  };
  // Fourier coefficients over e^(i sigma lambda F.x):
  //   wave 1 (sine):    -i/2 at +F1, +i/2 at -F1
  //   waves 2,3 (cos):  1/2 at both signs
  // Gradient of wave 1 multiplies by (i sigma lambda F1).
  Rat total(0);
  const Rat half(1, 2);
  for (int s2 : {+1, -1})
    for (int s3 : {+1, -1})
      for (int s1 : {+1, -1}) {
        bool closes = true;
        for (int c = 0; c < 3; ++c) {
          Rat sum = Rat(s2) * fvec(1, c) + Rat(s3) * fvec(2, c) + Rat(s1) * fvec(0, c);
          if (!sum.is_zero()) closes = false;
        }
        if (!closes) continue;
        // coefficient product: (1/2)(1/2) * [(-i s1 / 2) * (i s1)] = 1/8
        const CRat c2{half, Rat(0)};
        const CRat c3{half, Rat(0)};
        const CRat cgrad{half, Rat(0)};  // (-i s1/2)(i s1) = +1/2, real
        // contraction (V2 (.) V3) : V1 (x) F1 with both orderings
        Rat contr(0);
        Rat v2v1(0), v3v1(0), v3f1(0), v2f1(0);
        for (int c = 0; c < 3; ++c) {
          v2v1 += V[1][c].a * V[0][c].a;
          v3v1 += V[2][c].a * V[0][c].a;
          v3f1 += V[2][c].a * fvec(0, c);
          v2f1 += V[1][c].a * fvec(0, c);
        }
        contr = v2v1 * v3f1 + v3v1 * v2f1;
        total += c2.re * c3.re * cgrad.re * contr;
      }
  return total.to_double();
}

double calibrate_amplitude(double target_c) {
  // Any nonzero real target is reachable: the flux is odd under amplitude
  // negation, so the cube root may come out negative.
  if (target_c == 0.0 || !std::isfinite(target_c)) throw NonpositiveTarget();
  const double oracle = skeleton_flux_oracle();
  return std::cbrt(target_c / oracle);
}

}  // namespace shellflux
