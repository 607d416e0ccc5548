#pragma once

// Fidelity of distillation, one-shot rates and assisted distillation under
// the operation classes PPT, PPT-preserving, PPT⁺-preserving,
// Rains-preserving, SEPP and one-way LOCC (pure states).

#include <cstdint>
#include <optional>
#include <string>

#include "qedist/sets.hpp"

namespace qedist {

enum class OperationClass {
  PPT,
  PPT_PRESERVING,
  PPT_PLUS_PRESERVING,
  RAINS_PRESERVING,
  SEPP,
  ONE_WAY_LOCC_PURE
};

// ppt | ppt-pres | pptplus-pres | rains-pres | sepp | 1locc-pure
OperationClass parse_operation_class(const std::string& name);
std::string to_string(OperationClass o);
// PPT, PPT-pres ↦ PPT′; Rains-pres ↦ RAINS; PPT⁺-pres ↦ PPT⁺; SEPP, 1-LOCC ↦ SEP.
SetTag gauge_set(OperationClass o);

enum class Quantity { fidelity, rate_eps, rate_zero_error, assisted_fidelity };
enum class Method { sdp, closed_form, bisection };
std::string to_string(Quantity q);
std::string to_string(Method m);

// Local structure used to pick closed forms for SEPP.
enum class StateStructure { pure, isotropic, max_correlated, general };
StateStructure detect_structure(const DensityOperator& rho);
std::string to_string(StateStructure s);

struct DistillationResult {
  Quantity quantity = Quantity::fidelity;
  OperationClass op = OperationClass::PPT;
  double value = 0.0;  // fidelity, or log2 k for rates
  int m = 0;           // fidelity queries
  long k = 0;          // rate queries
  double epsilon = 0.0;
  std::optional<HermitianOperator> certificate;
  Method method = Method::sdp;
  bool lower_bound = false;  // value is a bound rather than the exact quantity
  std::string note;
  int solver_iterations = 0;
  double duality_gap = 0.0;
};

// "log2 k" rendering of an integer rate.
std::string rate_string(long k);

// SEPP on general states: with allow_bound the PPT⁺-preserving value is
// returned flagged as a lower bound, otherwise IntractableError.
DistillationResult fidelity(const DensityOperator& rho, OperationClass o, int m,
                            bool allow_bound = true);

// Computes the integer both from the hypothesis-testing gauge and from a
// bisection over fidelity; SolverError when they disagree.
DistillationResult rate_eps(const DensityOperator& rho, OperationClass o, double eps,
                            bool allow_bound = true);

DistillationResult rate_zero_error(const DensityOperator& rho, OperationClass o);

// −log2 min{‖Q^{T_B}‖_∞ : Q ⪰ Π_ρ}.
double asymptotic_zero_error_rains(const DensityOperator& rho);

enum class AssistedMode { exact_pure, lower_bound_sampled };

struct AssistedOptions {
  int samples = 2000;
  std::uint64_t seed = 0;
};

DistillationResult assisted_fidelity(const DensityOperator& rho, OperationClass o, int m,
                                     AssistedMode mode, const AssistedOptions& opts = {});

}  // namespace qedist
