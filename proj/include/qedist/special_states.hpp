#pragma once

// Closed forms for pure, isotropic and maximally correlated states.

#include <functional>
#include <span>
#include <vector>

#include "qedist/bipartite.hpp"

namespace qedist {

// An integer m counts as achievable when F ≥ (1−ε) − kFloorGuard, and a
// gauge value g admits m when m·g ≤ 1 + kFloorGuard.
inline constexpr double kFloorGuard = 1e-7;

// ⌊(1 + kFloorGuard) / g⌋.
long floor_reciprocal(double g);

// Largest m ∈ [1, m_up) with fid(m) ≥ 1−ε−kFloorGuard, by bisection. fid is
// non-increasing, fid(1) = 1 is assumed and fid(m_up) must fail.
long largest_feasible_m(const std::function<double(long)>& fid, double eps, long m_up);

// ---- m-distillation norm ---------------------------------------------------

struct MNormResult {
  double value = 0.0;
  int k_star = 1;
  double head = 0.0;  // ℓ1 mass of the first m − k* entries
  double tail = 0.0;  // ℓ2 mass of the remaining entries
};

// ‖x‖_[m] = ‖x↓_{1:m−k*}‖_1 + √k* ‖x↓_{m−k*+1:d}‖_2 with
// k* = smallest argmin_{1≤k≤m} ‖x↓_{m−k+1:d}‖²_2 / k. Uses |x_i|.
MNormResult m_distillation_norm(std::span<const double> x, int m);
MNormResult m_distillation_norm(const SchmidtVector& xi, int m);

// max{⟨|x|,w⟩ : ‖w‖_∞ ≤ 1, ‖w‖_2 ≤ √m}, solved by water-filling.
double m_distillation_norm_dual(std::span<const double> x, int m);

// Schmidt vector (length d) of the state reached from ξ in the LOCC
// protocol attaining ‖ξ‖_[m]/√m overlap with Ψ_m. Requires m ≤ d.
std::vector<double> majorisation_ansatz(const SchmidtVector& xi, int m);

// Σ_{i≤k} a_i² ≤ Σ_{i≤k} b_i² + tol for every k (entries sorted internally).
bool schmidt_majorised(std::span<const double> a, std::span<const double> b, double tol = 1e-12);

// ---- pure states -----------------------------------------------------------

// ‖ξ‖²_[m] / m.
double pure_fidelity(const SchmidtVector& xi, int m);
// Largest m with ‖ξ‖²_[m] ≥ m(1−ε) by a descending scan.
long pure_rate_k(const SchmidtVector& xi, double eps);
double pure_rate(const SchmidtVector& xi, double eps);

struct QcqpResult {
  double min_linf_sq = 0.0;  // min ‖ω‖²_∞
  long k = 0;
  std::vector<double> omega;
};
// min ‖ω‖²_∞ s.t. ⟨ξ,ω⟩ ≥ √(1−ε), ‖ω‖_2 ≤ 1, ω ≥ 0; k = ⌊1/value⌋.
QcqpResult pure_rate_qcqp(const SchmidtVector& xi, double eps);
long pure_zero_error_k(const SchmidtVector& xi);

// ---- isotropic states ------------------------------------------------------

struct IsotropicState {
  int d = 2;
  double f = 0.0;
};

// 1/m for f ≤ 1/d; (df−1)/(d−1) + d(1−f)/(m(d−1)) for m ≤ d; fd/m for m ≥ d.
double isotropic_fidelity(const IsotropicState& iso, int m);
// 0 for f ≤ 1/d, else min(m, d−1)(df−1)/(d−1).
double isotropic_t_m(const IsotropicState& iso, double m);
// max{α⟨ρ,Ψ_d⟩ + β} over the separable-Choi polygon; a lower bound on F_SEP.
double isotropic_sep_lp(const DensityOperator& rho, int m);
// min Γ_SEP°(αΨ_d + β1) s.t. αf + β ≥ 1−ε, 0 ⪯ W ⪯ 1.
double isotropic_sep_gauge(const IsotropicState& iso, double eps);
long isotropic_rate_k(const IsotropicState& iso, double eps);

// ---- maximally correlated states -------------------------------------------
// Σ ρ̃_ij |ii⟩⟨jj| is represented by its d × d image ρ̃.

// max{⟨ρ̃,W⟩ : 0 ⪯ W ⪯ 1, W_ii ≤ 1/m}.
double maxcorr_fidelity(const CMatrix& rho_tilde, int m);
// ⌊1 / min{max_i W_ii : ⟨ρ̃,W⟩ ≥ 1−ε, 0 ⪯ W ⪯ 1}⌋.
long maxcorr_rate_k(const CMatrix& rho_tilde, double eps);
// Same integer from a bisection on maxcorr_fidelity.
long maxcorr_rate_scan_k(const CMatrix& rho_tilde, double eps);
double maxcorr_rate(const CMatrix& rho_tilde, double eps);
// ⌊1 / ‖Δ(Π_ρ̃)‖_∞⌋.
long maxcorr_zero_error_k(const CMatrix& rho_tilde);

}  // namespace qedist
