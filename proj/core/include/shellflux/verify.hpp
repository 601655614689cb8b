#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "shellflux/cutoff.hpp"
#include "shellflux/field.hpp"

namespace shellflux {

// One interacting triple, generations sorted ascending.
struct TriadWitness {
  FreqVec xi1, xi2, xi3;
  int q1 = 0, q2 = 0, q3 = 0;
  int wave1 = 0, wave2 = 0, wave3 = 0;  // region wave of each mode
  std::string str() const;
};

struct VerificationReport {
  std::string check;
  std::string params;
  bool pass = false;
  std::vector<TriadWitness> witnesses;        // counterexamples; empty on pass
  std::vector<std::string> notes;
  std::map<std::string, double> measured;     // empirical constants
  std::uint64_t work = 0;                     // pair evaluations performed
};

struct VerifyOptions {
  std::uint64_t budget_pairs = 2'000'000'000ull;
  int witness_cap = 16;  // counterexamples retained per report
  int threads = 0;
};

// All integer triads xi1 + xi2 + xi3 = 0 with modes drawn from the given
// generations, not all three from the same one. Existence is decided by
// exact interval arithmetic on the region boxes; witnesses are enumerated
// only where a closing triple exists.
std::vector<TriadWitness> enumerate_cross_triads(const Field& field,
                                                 const std::vector<int>& qset,
                                                 const VerifyOptions& opt = {});

// No triple anchored at three distinct planes may interact.
VerificationReport check_windmill(const Field& field, int qa, int qb, int qc,
                                  const VerifyOptions& opt = {});

// Interacting triples from distinct generations must have the two largest
// generations equal and separated from the smallest by at least three.
VerificationReport check_near_field(const Field& field, int q_lo, int q_hi,
                                    const VerifyOptions& opt = {});

// A_q^(1) + A_q^(2) is contained in A_q^(3); exact, with an elementwise
// sweep when the pair count fits the budget.
VerificationReport check_sumset(const Field& field, int q,
                                const VerifyOptions& opt = {});

// Cardinality brackets, per-wave shells, anchoring (own plane within
// 2 eps |xi|, other planes strictly outside), and the measured projection
// constant sup |pi_xi V - V| / eps.
VerificationReport check_bounds(const Field& field, const VerifyOptions& opt = {});

// Exact predicates on one frequency; exposed for cross-validation tests.
bool shell_predicate_exact(const FieldSpec& spec, int q, int wave, const FreqVec& xi);
bool shell_predicate_i128(const FieldSpec& spec, int q, int wave, const FreqVec& xi);
bool anchor_predicate_exact(const FieldSpec& spec, const SkeletonData& skel, int j,
                            const FreqVec& xi);
bool anchor_predicate_i128(const FieldSpec& spec, const SkeletonData& skel, int j,
                           const FreqVec& xi);

}  // namespace shellflux
