#pragma once

// Reproduction suites: each case compares a computed value against an
// independent expectation, either as an equality or as a bound.

#include <cstdint>
#include <string>
#include <vector>

#include "qedist/bipartite.hpp"

namespace qedist {

enum class Suite { pure, isotropic, maxcorr, appendix, hierarchy, zero_error };
Suite parse_suite(const std::string& name);
std::string to_string(Suite s);

enum class CaseKind { equal, at_most, at_least };

struct ReproCase {
  std::string description;
  double expected = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  CaseKind kind = CaseKind::equal;
  bool pass = false;
  std::string error;  // set when the computation threw
};

struct ReproReport {
  Suite suite = Suite::pure;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<ReproCase> cases;
  bool passed() const;
};

inline constexpr double kClosedFormTol = 1e-5;
inline constexpr double kInequalitySlack = 1e-6;

// d ≤ 4; 0 picks the suite default. Cases run on up to `jobs` threads.
ReproReport run_repro_suite(Suite s, int d, std::uint64_t seed, int jobs = 1);

// ½|ψ1⟩⟨ψ1| + ½|ψ2⟩⟨ψ2| on 3×3 with ψ1 = (|01⟩+|10⟩)/√2, ψ2 = (|02⟩+|20⟩)/√2.
DensityOperator counterexample_state();
// Witness with W ⪰ −1, W^{T_B} = −3|w⟩⟨w| and ⟨ρ,W⟩ = 1 on counterexample_state().
HermitianOperator counterexample_witness();

}  // namespace qedist
