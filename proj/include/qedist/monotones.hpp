#pragma once

// Entanglement monotones built from the dual cones of the operator sets:
//   T^m_S(ρ)  = max{⟨ρ,W⟩ : −1 ⪯ W ⪯ m·1, W ∈ −S*}
//   G^m_Q(ρ)  = max{⟨ρ,W⟩ : 0 ⪯ W ⪯ 1, Γ_{Q°}(W) ≤ 1/m}
//   R^D_S(ρ)  = min{λ ≥ 0 : ρ ⪯ (1+λ)X, X ∈ S}
// with −PPT* = {W^{T_B} ⪯ 0}, −PPT⁺* = {−A − B^{T_B} : A,B ⪰ 0} and
// −I* = {diag(W) ≤ 0}.

#include <optional>
#include <string>

#include "qedist/sets.hpp"

namespace qedist {

enum class MeasureKind { t_m, g_m, robustness, negativity, mod_trace_distance };
MeasureKind parse_measure(const std::string& name);
std::string to_string(MeasureKind k);

struct MonotoneValue {
  double value = 0.0;
  std::string method;                     // "sdp" or "closed_form"
  std::optional<HermitianOperator> witness;
  SolveReport report;
};

// S ∈ {PPT, PPT_PLUS, INCOHERENT}; SEP on pure, isotropic and maximally
// correlated states through closed forms (integer m).
MonotoneValue t_m_detailed(const DensityOperator& rho, SetTag s, double m);
double t_m(const DensityOperator& rho, SetTag s, double m);
// min{m·Tr P + Tr N : ρ − P + N ∈ cone(S), P, N ⪰ 0}.
double t_m_primal(const DensityOperator& rho, SetTag s, double m);

// Q ∈ {PPT, PPT_PRIME, PPT_PLUS, RAINS, INCOHERENT}.
MonotoneValue g_m_detailed(const DensityOperator& rho, SetTag q, double m);
double g_m(const DensityOperator& rho, SetTag q, double m);
// min{Tr Y + Γ_Q(Z)/m : Y ⪰ 0, Y ⪰ ρ − Z}.
double g_m_primal(const DensityOperator& rho, SetTag q, double m);

// min{Tr Y − 1 : Y ⪰ ρ, Y ∈ cone(S)}; SEP via closed forms.
double robustness(const DensityOperator& rho, SetTag s);
// max{⟨ρ,W⟩ : W ⪰ −1, W ∈ −S*}.
MonotoneValue robustness_dual(const DensityOperator& rho, SetTag s);

double negativity(const DensityOperator& rho);

// min{‖ρ − X‖_1 : X ∈ cone(S)} as a trace-norm program.
double mod_trace_distance(const DensityOperator& rho, SetTag s);
// min{‖ρ − σ‖_1 : σ ∈ S}.
double set_trace_distance(const DensityOperator& rho, SetTag s);

}  // namespace qedist
