#pragma once

// Operator sets and their polar gauges Γ_{S°}(W) = sup{⟨X,W⟩ : X ∈ S}.
//
//   PPT        Tr X = 1, X^{T_B} ⪰ 0
//   PPT_PLUS   PPT ∩ {X ⪰ 0}
//   PPT_PRIME  ‖X^{T_B}‖_1 ≤ 1
//   RAINS      X ⪰ 0, ‖X^{T_B}‖_1 ≤ 1
//   INCOHERENT diagonal density operators
//   SEP        separable states; handled only on special structures

#include <cstdint>
#include <optional>
#include <string>

#include "qedist/conic.hpp"

namespace qedist {

enum class SetTag { SEP, PPT, PPT_PLUS, PPT_PRIME, RAINS, INCOHERENT };
enum class Tractability { exact_sdp, special_cases_only };

struct OperatorSetDescriptor {
  SetTag tag;
  Tractability tractability;
};

OperatorSetDescriptor describe(SetTag s);
std::string to_string(SetTag s);
// Accepts sep, ppt, pptplus, pptprime, rains, incoherent (case-insensitive).
SetTag parse_set_tag(const std::string& name);

// Throws IntractableError for SEP unless X is pure, isotropic, maximally
// correlated, or lives on a system with d_a·d_b ≤ 6.
bool membership(SetTag s, const HermitianOperator& x, double tol = 1e-9);

// Appends constraints enforcing Γ_{S°}(w) ≤ bound. Auxiliary variables and
// constraint labels are namespaced by `prefix`.
void add_polar_constraint(ConicProgram& p, SetTag s, const MatrixExpr& w, const ScalarExpr& bound,
                          const std::string& prefix);

// Element X of S read off the multipliers of a program that minimizes
// `bound` subject to add_polar_constraint. At optimum ⟨X,W⟩ = Γ_{S°}(W).
HermitianOperator polar_dual_element(SetTag s, const SolveReport& r, const std::string& prefix,
                                     int d_a, int d_b);

// Largest violation of the polar constraint at a solved certificate.
double polar_certificate_violation(SetTag s, const HermitianOperator& w, double bound,
                                   const SolveReport& r, const std::string& prefix);

struct GaugeResult {
  double value = 0.0;
  std::optional<HermitianOperator> maximizer;  // X ∈ S with ⟨X,W⟩ = value
  SolveReport report;                          // empty for closed forms
};

// Dual (minimization) form of Γ_{S°}(W); closed forms for PPT, PPT′, I.
double gauge_polar(SetTag s, const HermitianOperator& w);
GaugeResult gauge_polar_detailed(SetTag s, const HermitianOperator& w);

// Direct maximization of ⟨X,W⟩ over S. Independent of gauge_polar.
double gauge_polar_primal(SetTag s, const HermitianOperator& w);

// Γ_{SEP°}(Π) for a projector Π whose range is spanned by one pure state,
// has rank > (d_a−1)(d_b−1), or lies inside span{|ii⟩}.
double gauge_sep_projector(const HermitianOperator& pi);

HermitianOperator random_set_element(SetTag s, int d_a, int d_b, std::uint64_t seed);

// Real-symmetric variables suffice when every datum is real.
bool is_real(const CMatrix& m, double tol = 0.0);
bool is_real(const MatrixExpr& e);

}  // namespace qedist
