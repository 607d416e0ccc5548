#pragma once

// Dense linear algebra for bipartite systems A ⊗ B.
//
// Composite indices are A-major: i = i_A * d_b + i_B.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qedist/errors.hpp"

namespace qedist {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kDefaultRankTol = 1e-8;

// Hermitian operator on C^{d_a} ⊗ C^{d_b}. The stored matrix is exactly
// Hermitian: the constructor validates within `tol` and then symmetrizes.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  HermitianOperator(int d_a, int d_b, CMatrix entries, double tol = kHermitianTol);

  static HermitianOperator zero(int d_a, int d_b);
  static HermitianOperator identity(int d_a, int d_b);

  int d_a() const { return d_a_; }
  int d_b() const { return d_b_; }
  int dim() const { return d_a_ * d_b_; }
  const CMatrix& matrix() const { return m_; }

  double trace() const;
  RVector eigenvalues() const;  // ascending
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

 private:
  int d_a_ = 1;
  int d_b_ = 1;
  CMatrix m_ = CMatrix::Zero(1, 1);
};

inline HermitianOperator operator*(double s, const HermitianOperator& x) { return x * s; }

// Unit-trace positive semidefinite operator.
class DensityOperator {
 public:
  DensityOperator() = default;
  explicit DensityOperator(HermitianOperator op, double psd_tol = kPsdTol,
                           double trace_tol = kTraceTol);
  DensityOperator(int d_a, int d_b, CMatrix entries);

  const HermitianOperator& op() const { return op_; }
  const CMatrix& matrix() const { return op_.matrix(); }
  int d_a() const { return op_.d_a(); }
  int d_b() const { return op_.d_b(); }
  int dim() const { return op_.dim(); }

 private:
  HermitianOperator op_;
};

// Non-negative, non-increasing, unit ℓ2-norm coefficient vector.
class SchmidtVector {
 public:
  SchmidtVector() = default;
  explicit SchmidtVector(std::vector<double> coefficients);

  // Builds from squared coefficients; rescales to unit norm.
  static SchmidtVector from_squared(std::span<const double> squares);

  const std::vector<double>& coefficients() const { return c_; }
  std::size_t size() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  double max() const { return c_.empty() ? 0.0 : c_.front(); }

 private:
  std::vector<double> c_;
};

class PureState {
 public:
  PureState() = default;
  PureState(int d_a, int d_b, CVector amplitudes);

  int d_a() const { return d_a_; }
  int d_b() const { return d_b_; }
  const CVector& amplitudes() const { return psi_; }
  DensityOperator projector() const;

 private:
  int d_a_ = 1;
  int d_b_ = 1;
  CVector psi_ = CVector::Ones(1);
};

struct SchmidtDecomposition {
  SchmidtVector coefficients;
  CMatrix basis_a;  // d_a × d, column k is |a_k⟩
  CMatrix basis_b;  // d_b × d, column k is |b_k⟩
};

// ---- elementary operations -------------------------------------------------

HermitianOperator partial_transpose(const HermitianOperator& x);
CMatrix partial_transpose(const CMatrix& x, int d_a, int d_b);

// Hilbert–Schmidt inner product Re Tr(X† Y).
double inner(const HermitianOperator& x, const HermitianOperator& y);
double inner(const CMatrix& x, const CMatrix& y);

double trace_norm(const HermitianOperator& x);
double operator_norm(const HermitianOperator& x);

// Tensor product of a bipartite operator on A|B with one on A'|B', returned
// on the bipartition AA'|BB'.
HermitianOperator bipartite_tensor(const HermitianOperator& x, const HermitianOperator& y);

SchmidtDecomposition schmidt_decompose(const PureState& psi);

std::pair<HermitianOperator, HermitianOperator> positive_negative_parts(const HermitianOperator& x);

// Projector onto eigenvectors with eigenvalue > rank_tol · λ_max.
HermitianOperator support_projector(const DensityOperator& rho, double rank_tol = kDefaultRankTol);
int support_rank(const DensityOperator& rho, double rank_tol = kDefaultRankTol);

// Orthonormal basis (columns) of the kernel of ρ, complement of the support.
CMatrix kernel_basis(const DensityOperator& rho, double rank_tol = kDefaultRankTol);

// Projector onto the strictly negative eigenspace of X.
HermitianOperator negative_eigenprojector(const HermitianOperator& x, double tol = 1e-12);

// Squared Uhlmann fidelity (Tr|√ρ √σ|)²; equals |⟨ψ|φ⟩|² on pure states.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

HermitianOperator isotropic_twirl(const HermitianOperator& x);

// ---- named states ----------------------------------------------------------

CVector max_entangled_vector(int d);
DensityOperator max_entangled(int d);
DensityOperator isotropic_state(int d, double f);
// Σ ρ̃_ij |ii⟩⟨jj| for a single-party density matrix ρ̃.
DensityOperator max_correlated_state(const CMatrix& rho_tilde);

// d×d image ρ̃ if ρ is supported on span{|ii⟩} (d_a = d_b), else nullopt.
std::optional<CMatrix> max_correlated_image(const HermitianOperator& rho, double tol = 1e-9);
bool is_isotropic(const DensityOperator& rho, double tol = 1e-9);

// ---- random states ---------------------------------------------------------

enum class RandomKind { haar_pure, ginibre_mixed, isotropic, max_correlated };

struct RandomSpec {
  RandomKind kind = RandomKind::haar_pure;
  int d_a = 2;
  int d_b = 2;
  std::uint64_t seed = 0;
  std::optional<double> f;       // isotropic parameter; drawn uniformly if empty
  std::optional<int> rank;       // ginibre / max_correlated rank; full if empty
};

DensityOperator random_state(const RandomSpec& spec);
PureState random_pure_state(int d_a, int d_b, std::uint64_t seed);
CMatrix random_unitary(int d, std::uint64_t seed);

}  // namespace qedist
