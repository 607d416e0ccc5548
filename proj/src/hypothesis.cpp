#include "qedist/hypothesis.hpp"

#include <cmath>
#include <limits>

namespace qedist {

namespace {

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InputError("epsilon must lie in [0, 1)");
}

}  // namespace

MatrixExpr add_test_operator(ConicProgram& p, const DensityOperator& rho, double eps,
                             const std::string& name) {
  check_eps(eps);
  const int da = rho.d_a(), db = rho.d_b();
  const bool real = is_real(rho.matrix());
  const VariableShape shape = real ? VariableShape::real_symmetric : VariableShape::hermitian;
  if (eps > 0.0) {
    const MatrixExpr w = p.hermitian(name, da, db, shape);
    p.psd(w, name + "_psd");
    p.psd(HermitianOperator::identity(da, db) - w, name + "_le_1");
    p.nonneg(inner(rho.op(), w) - (1.0 - eps), name + "_accept");
    return w;
  }
  const HermitianOperator pi = support_projector(rho);
  const CMatrix v = kernel_basis(rho);
  const int k = static_cast<int>(v.cols());
  if (k == 0) return constant_expr(pi);
  const MatrixExpr y = p.hermitian(name + "_ker", k, 1, shape);
  p.psd(y, name + "_psd");
  p.psd(HermitianOperator::identity(k, 1) - y, name + "_le_1");
  return constant_expr(pi) + congruence(y, v, da, db);
}

DhResult d_h_detailed(const DensityOperator& rho, const HermitianOperator& x, double eps) {
  check_eps(eps);
  if (x.d_a() != rho.d_a() || x.d_b() != rho.d_b()) throw DimensionError("d_h: dimension mismatch");
  ConicProgram p;
  const MatrixExpr m = add_test_operator(p, rho, eps, "M");
  p.minimize(inner(x, m));
  DhResult out;
  if (p.num_scalars() == 0) {
    out.optimum = evaluate(inner(x, m), {});
    out.test = HermitianOperator(x.d_a(), x.d_b(), m.constant, 1e-8);
  } else {
    out.report = solve(p);
    require_optimal(out.report, "d_h");
    out.optimum = out.report.primal_value;
    out.test = HermitianOperator(x.d_a(), x.d_b(), evaluate(m, out.report.assignment), 1e-8);
  }
  const double cut = 1e-9 * (1.0 + operator_norm(x));
  out.bits = out.optimum <= cut ? std::numeric_limits<double>::infinity() : -std::log2(out.optimum);
  return out;
}

double d_h(const DensityOperator& rho, const HermitianOperator& x, double eps) {
  return d_h_detailed(rho, x, eps).bits;
}

DhSetResult d_h_min_over_set_detailed(const DensityOperator& rho, SetTag q, double eps) {
  check_eps(eps);
  if (q == SetTag::SEP) throw IntractableError("D_H minimized over SEP has no conic form");
  ConicProgram p;
  const ScalarExpr t = p.scalar("t");
  const MatrixExpr w = add_test_operator(p, rho, eps, "W");
  add_polar_constraint(p, q, w, t, "h_");
  p.minimize(t);
  DhSetResult out;
  out.report = solve(p);
  require_optimal(out.report, "d_h_min_over_set(" + to_string(q) + ")");
  out.gauge = out.report.primal_value;
  if (!(out.gauge > 0.0)) {
    throw SolverError("d_h_min_over_set: non-positive gauge value " + std::to_string(out.gauge));
  }
  out.bits = -std::log2(out.gauge);
  out.test = HermitianOperator(rho.d_a(), rho.d_b(), evaluate(w, out.report.assignment), 1e-8);
  out.minimizer = polar_dual_element(q, out.report, "h_", rho.d_a(), rho.d_b());
  return out;
}

double d_h_min_over_set(const DensityOperator& rho, SetTag q, double eps) {
  return d_h_min_over_set_detailed(rho, q, eps).bits;
}

}  // namespace qedist
