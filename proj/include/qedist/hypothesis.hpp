#pragma once

// Hypothesis-testing relative entropy (base 2)
//   D_H^ε(ρ‖X) = −log min{⟨M,X⟩ : 0 ⪯ M ⪯ 1, ⟨M,ρ⟩ ≥ 1−ε}
// and its minimum over a set, computed as a single gauge program
//   min_{X ∈ Q} D_H^ε(ρ‖X) = −log min{Γ_{Q°}(W) : 0 ⪯ W ⪯ 1, ⟨ρ,W⟩ ≥ 1−ε}.

#include <optional>
#include <string>

#include "qedist/sets.hpp"

namespace qedist {

// Adds a test operator 0 ⪯ W ⪯ 1 with ⟨ρ,W⟩ ≥ 1−ε and returns it. For ε = 0
// the operator is parametrized as Π_ρ + V Y V† (V spanning ker ρ), which
// keeps the program strictly feasible.
MatrixExpr add_test_operator(ConicProgram& p, const DensityOperator& rho, double eps,
                             const std::string& name);

struct DhResult {
  double bits = 0.0;     // +∞ when the optimum is ≤ 0
  double optimum = 0.0;  // min ⟨M,X⟩
  HermitianOperator test;
  SolveReport report;
};

DhResult d_h_detailed(const DensityOperator& rho, const HermitianOperator& x, double eps);
double d_h(const DensityOperator& rho, const HermitianOperator& x, double eps);

struct DhSetResult {
  double bits = 0.0;
  double gauge = 0.0;           // min Γ_{Q°}(W)
  HermitianOperator test;       // optimal W
  HermitianOperator minimizer;  // implied optimal X ∈ Q
  SolveReport report;
};

// Q ∈ {PPT, PPT_PRIME, PPT_PLUS, RAINS, INCOHERENT}.
DhSetResult d_h_min_over_set_detailed(const DensityOperator& rho, SetTag q, double eps);
double d_h_min_over_set(const DensityOperator& rho, SetTag q, double eps);

}  // namespace qedist
