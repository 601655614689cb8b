#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "shellflux/cutoff.hpp"
#include "shellflux/field.hpp"

namespace shellflux {

struct FluxOptions {
  int threads = 0;                          // 0: hardware concurrency
  std::uint64_t budget_pairs = 2'000'000'000ull;
  double imag_rel_tol = 1e-10;              // realness assertion
};

// One interacting triple xi1 + xi2 + xi3 = 0 (tensor, tensor, gradient slots).
struct Triad {
  FreqVec xi1, xi2, xi3;
  int q1 = 0, q2 = 0, q3 = 0;
};

struct FluxBreakdown {
  int q = 0;
  double pi_total = 0;
  double pi_local = 0;
  double pi_nonlocal = 0;
  // Diagnostics: the paper-gated far part (pair separation > N_eps), the
  // band 3 <= k - l <= N_eps, and the k = q same-level block.
  double pi_nonlocal_far = 0;
  double pi_nonlocal_near = 0;
  double pi_nonlocal_same_level = 0;
  double pi_nonlocal_unstructured = 0;
  double truncation_bound = 0;
  int n_eps = 0;
  double lower_bracket = 0;  // counting bracket around the local flux
  double upper_bracket = 0;
  double residual = 0;
  bool decomposition_ok = false;
  std::uint64_t triads_total = 0;
};

// Flux of the built field through shell q: the triadic sum equivalent of
// integrating S_q(U (x) U) : grad S_q U over the torus. Imaginary residue is
// checked against FluxOptions::imag_rel_tol.
double flux_total(const Field& field, int q, const CutoffSpec& cutoff,
                  const FluxOptions& opt = {});

// Same-generation skeleton-type block: waves 2 and 3 against grad wave 1.
double flux_local(const Field& field, int q, const FluxOptions& opt = {});

// Cross-generation pair block integral u_k (x) u_k : grad u_l^(1), with the
// first tensor slot restricted to `a_wave_mask` (bit i-1 set enables wave i).
// Any k > l is evaluated; whether small separations vanish is decided by the
// lattice geometry, not assumed.
double flux_pair(const Field& field, int l, int k, unsigned a_wave_mask = 0x7,
                 const FluxOptions& opt = {});

struct NonlocalFlux {
  // Exact complement Pi_q - Pi_local, from the slot identity
  // Pi_q = int (u_q^(2)+u_q^(3)+U_{>q}) (x) U : grad (U_{<q}+u_q^(1)).
  double value = 0;
  // Structured part: sum of two-equal-generations pair blocks.
  double pair_sum = 0;
  double far_part = 0;      // pairs with k > max(q, l + N_eps)
  double near_part = 0;     // pairs with k <= l + N_eps, k > q
  double same_level = 0;    // k = q block (tensor waves 2,3 against low grad)
  // value - pair_sum: triads outside the two-high-one-low pattern. Zero when
  // the interaction-exclusion propositions hold at this eps.
  double unstructured = 0;
  double truncation_bound = 0;
  int n_eps = 0;
};

NonlocalFlux flux_nonlocal(const Field& field, int q, const FluxOptions& opt = {});

// Upper bound on pair contributions from generations above k_max, following
// the geometric-series estimate over (lambda_l / lambda_k)^(5/3).
double nonlocal_truncation_bound(const Field& field, int q, int k_max);

FluxBreakdown decomposition_check(const Field& field, int q, const CutoffSpec& cutoff,
                                  const FluxOptions& opt = {});

// Closed-form flux of the single-triad skeleton field at amplitude scale 1,
// computed by exact product-to-sum reduction of the trigonometric integrand.
// Independent of q (valid for q in 3N).
double skeleton_flux_oracle(int q = 0);

// Amplitude scale making the skeleton constant hit target_c; real cube root,
// so targets of either sign work.
double calibrate_amplitude(double target_c);

// Count of interacting ordered pairs the given call would enumerate.
std::uint64_t count_local_pairs(const Field& field, int q);
std::uint64_t count_total_pairs(const Field& field, int q, const CutoffSpec& cutoff);

}  // namespace shellflux
