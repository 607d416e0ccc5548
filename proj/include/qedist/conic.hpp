#pragma once

// Modeling layer and interior-point backend for linear matrix inequalities.
//
// A ConicProgram has real scalar unknowns z. Hermitian matrix unknowns are
// expanded into n² real parameters. Constraints are affine in z:
//   F(z) ⪰ 0     (complex Hermitian, lowered to a real symmetric block)
//   g(z) ≥ 0,  h(z) = 0
// and the objective is a real affine function of z, maximized or minimized.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qedist/bipartite.hpp"

namespace qedist {

struct ScalarExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)

  ScalarExpr() = default;
  ScalarExpr(double c) : constant(c) {}  // NOLINT: implicit on purpose
};

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator-(const ScalarExpr& a);
ScalarExpr operator*(double s, const ScalarExpr& a);

struct SparseEntry {
  int row;
  int col;
  cplx value;
};

struct MatrixExpr {
  int d_a = 1;
  int d_b = 1;
  CMatrix constant;
  std::vector<std::pair<int, std::vector<SparseEntry>>> terms;

  int dim() const { return d_a * d_b; }
};

MatrixExpr constant_expr(const CMatrix& c, int d_a, int d_b);
MatrixExpr constant_expr(const HermitianOperator& c);
MatrixExpr operator+(const MatrixExpr& a, const MatrixExpr& b);
MatrixExpr operator-(const MatrixExpr& a, const MatrixExpr& b);
MatrixExpr operator-(const MatrixExpr& a);
MatrixExpr operator*(double s, const MatrixExpr& a);
MatrixExpr operator+(const MatrixExpr& a, const HermitianOperator& c);
MatrixExpr operator-(const MatrixExpr& a, const HermitianOperator& c);
MatrixExpr operator-(const HermitianOperator& c, const MatrixExpr& a);

MatrixExpr partial_transpose(const MatrixExpr& x);
// t · 1 on a d_a × d_b system.
MatrixExpr identity_times(const ScalarExpr& t, int d_a, int d_b);
// V X V† for a k × k expression X and an n × k matrix V, on a d_a × d_b system.
MatrixExpr congruence(const MatrixExpr& x, const CMatrix& v, int d_a, int d_b);
// Re Tr(C X) for Hermitian C.
ScalarExpr inner(const HermitianOperator& c, const MatrixExpr& x);
ScalarExpr inner(const CMatrix& c, const MatrixExpr& x);
ScalarExpr trace(const MatrixExpr& x);
ScalarExpr diagonal_entry(const MatrixExpr& x, int i);

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };
std::string to_string(SolveStatus s);

enum class VariableShape { hermitian, real_symmetric, diagonal };

class ConicProgram {
 public:
  MatrixExpr hermitian(const std::string& name, int d_a, int d_b,
                       VariableShape shape = VariableShape::hermitian);
  ScalarExpr scalar(const std::string& name);

  void psd(const MatrixExpr& e, const std::string& label = {});
  void nonneg(const ScalarExpr& e, const std::string& label = {});
  void equal(const ScalarExpr& e, const std::string& label = {});  // e = 0
  void maximize(const ScalarExpr& e);
  void minimize(const ScalarExpr& e);

  int num_scalars() const { return nvars_; }

  struct MatrixVar {
    std::string name;
    int d_a, d_b;
    int first;
    VariableShape shape;
  };
  struct PsdConstraint {
    std::string label;
    MatrixExpr expr;
  };
  struct ScalarConstraint {
    std::string label;
    ScalarExpr expr;
  };

  const std::vector<MatrixVar>& matrix_vars() const { return mvars_; }
  const std::map<std::string, int>& scalar_vars() const { return svars_; }
  const std::vector<PsdConstraint>& psd_constraints() const { return psd_; }
  const std::vector<ScalarConstraint>& nonneg_constraints() const { return nonneg_; }
  const std::vector<ScalarConstraint>& equal_constraints() const { return equal_; }
  const ScalarExpr& objective() const { return objective_; }
  bool maximizing() const { return maximize_; }

 private:
  void check_name(const std::string& name) const;
  void check_expr(const ScalarExpr& e) const;
  void check_expr(const MatrixExpr& e) const;

  int nvars_ = 0;
  std::vector<MatrixVar> mvars_;
  std::map<std::string, int> svars_;
  std::vector<PsdConstraint> psd_;
  std::vector<ScalarConstraint> nonneg_;
  std::vector<ScalarConstraint> equal_;
  ScalarExpr objective_;
  bool maximize_ = true;
};

struct SolveReport {
  SolveStatus status = SolveStatus::numerical_failure;
  double primal_value = 0.0;  // objective at the returned assignment
  double dual_value = 0.0;    // Lagrange dual objective
  double duality_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  std::string message;

  std::vector<double> assignment;
  std::map<std::string, HermitianOperator> matrices;
  std::map<std::string, double> scalars;
  // Lagrange multipliers. For psd(F) the multiplier Y ⪰ 0 enters the
  // Lagrangian as Re⟨F, Y⟩; for nonneg/equal the multiplier is a real number.
  std::map<std::string, HermitianOperator> psd_duals;
  std::map<std::string, double> scalar_duals;

  bool optimal() const { return status == SolveStatus::optimal; }
};

struct SolveOptions {
  std::optional<double> gap_tol;   // defaults to default_gap_tol()
  int max_iterations = 120;
  std::string dump_path;           // writes an SDPA file when non-empty
};

// 1e-8 unless QEDIST_SOLVER_TOL is set to a positive number.
double default_gap_tol();

SolveReport solve(const ConicProgram& p, const SolveOptions& opts = {});

// Throws SolverError unless the report is optimal.
void require_optimal(const SolveReport& r, const std::string& context);

HermitianOperator extract_certificate(const SolveReport& r, const std::string& name);
double extract_scalar(const SolveReport& r, const std::string& name);
HermitianOperator extract_dual(const SolveReport& r, const std::string& label);
double extract_scalar_dual(const SolveReport& r, const std::string& label);

double evaluate(const ScalarExpr& e, const std::vector<double>& z);
CMatrix evaluate(const MatrixExpr& e, const std::vector<double>& z);

// Sparse SDPA text: min cᵀz s.t. Σ z_i F_i − F_0 ⪰ 0 (equalities as two LP rows).
void write_sdpa(const ConicProgram& p, std::ostream& out);

// Real embedding [[Re, −Im], [Im, Re]] and its adjoint-side inverse.
RMatrix real_embedding(const CMatrix& x);
CMatrix complex_from_embedding(const RMatrix& y);  // (P+T) + i(R−Q)

}  // namespace qedist
