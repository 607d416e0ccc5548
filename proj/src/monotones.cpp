#include "qedist/monotones.hpp"

#include <cctype>
#include <cmath>

#include "qedist/special_states.hpp"

namespace qedist {

namespace {

VariableShape shape_for(const DensityOperator& rho) {
  return is_real(rho.matrix()) ? VariableShape::real_symmetric : VariableShape::hermitian;
}

HermitianOperator eye(const DensityOperator& rho) {
  return HermitianOperator::identity(rho.d_a(), rho.d_b());
}

void require_cone_set(SetTag s, const char* what) {
  if (s != SetTag::PPT && s != SetTag::PPT_PLUS && s != SetTag::INCOHERENT) {
    throw InputError(std::string(what) + ": set must be PPT, PPT+ or INCOHERENT (got " +
                     to_string(s) + ")");
  }
}

// Adds W ∈ −S* and returns W.
MatrixExpr add_negative_dual_cone_element(ConicProgram& p, const DensityOperator& rho, SetTag s) {
  const int da = rho.d_a(), db = rho.d_b();
  const VariableShape shape = shape_for(rho);
  switch (s) {
    case SetTag::PPT: {
      const MatrixExpr w = p.hermitian("W", da, db, shape);
      p.psd(-partial_transpose(w), "cone");
      return w;
    }
    case SetTag::PPT_PLUS: {
      const MatrixExpr a = p.hermitian("A", da, db, shape);
      const MatrixExpr b = p.hermitian("B", da, db, shape);
      p.psd(a, "A_psd");
      p.psd(b, "B_psd");
      return -a - partial_transpose(b);
    }
    case SetTag::INCOHERENT: {
      const MatrixExpr w = p.hermitian("W", da, db, shape);
      for (int i = 0; i < w.dim(); ++i) p.nonneg(-diagonal_entry(w, i));
      return w;
    }
    default:
      break;
  }
  throw InputError("no dual cone description");
}

// Adds constraints X ∈ cone(S) for an affine X.
void add_cone_membership(ConicProgram& p, const MatrixExpr& x, SetTag s) {
  switch (s) {
    case SetTag::PPT:
      p.psd(partial_transpose(x));
      return;
    case SetTag::PPT_PLUS:
      p.psd(x);
      p.psd(partial_transpose(x));
      return;
    default:
      break;
  }
  throw InputError("no cone description");
}

bool is_integer(double m) { return std::abs(m - std::round(m)) < 1e-12; }

// Closed forms of T^m_SEP on pure, isotropic and maximally correlated states.
MonotoneValue t_m_sep(const DensityOperator& rho, double m) {
  MonotoneValue v;
  v.method = "closed_form";
  const int d = std::min(rho.d_a(), rho.d_b());
  if (support_rank(rho) == 1) {
    if (!is_integer(m)) throw InputError("T^m_SEP closed form needs integer m");
    const auto es = Eigen::SelfAdjointEigenSolver<CMatrix>(rho.matrix());
    const CVector psi = es.eigenvectors().col(rho.dim() - 1);
    const auto sd = schmidt_decompose(PureState(rho.d_a(), rho.d_b(), psi / psi.norm()));
    const double n = m_distillation_norm(sd.coefficients, static_cast<int>(std::lround(m)) + 1).value;
    v.value = n * n - 1.0;
    return v;
  }
  if (is_isotropic(rho, 1e-9)) {
    v.value = isotropic_t_m({rho.d_a(), inner(max_entangled(rho.d_a()).op(), rho.op())}, m);
    return v;
  }
  if (auto img = max_correlated_image(rho.op(), 1e-9)) {
    const DensityOperator tilde(HermitianOperator(d, 1, *img, 1e-8));
    MonotoneValue c = t_m_detailed(tilde, SetTag::INCOHERENT, m);
    c.method = "closed_form";
    return c;
  }
  throw IntractableError("T^m_SEP is only available for pure, isotropic and maximally "
                         "correlated states");
}

}  // namespace

MeasureKind parse_measure(const std::string& name) {
  std::string n;
  for (char c : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (n == "tm" || n == "t_m") return MeasureKind::t_m;
  if (n == "gm" || n == "g_m") return MeasureKind::g_m;
  if (n == "robustness") return MeasureKind::robustness;
  if (n == "negativity") return MeasureKind::negativity;
  if (n == "mtd" || n == "mod_trace_distance") return MeasureKind::mod_trace_distance;
  throw InputError("unknown measure '" + name + "' (expected tm|gm|robustness|negativity|mtd)");
}

std::string to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::t_m: return "tm";
    case MeasureKind::g_m: return "gm";
    case MeasureKind::robustness: return "robustness";
    case MeasureKind::negativity: return "negativity";
    case MeasureKind::mod_trace_distance: return "mtd";
  }
  return "?";
}

// ---- T^m -------------------------------------------------------------------

MonotoneValue t_m_detailed(const DensityOperator& rho, SetTag s, double m) {
  if (!(m >= 0.0)) throw InputError("t_m: m must be non-negative");
  if (s == SetTag::SEP) return t_m_sep(rho, m);
  require_cone_set(s, "t_m");
  ConicProgram p;
  const MatrixExpr w = add_negative_dual_cone_element(p, rho, s);
  p.psd(w + eye(rho), "lower");
  p.psd(m * constant_expr(eye(rho)) - w, "upper");
  p.maximize(inner(rho.op(), w));
  MonotoneValue v;
  v.report = solve(p);
  require_optimal(v.report, "t_m");
  v.value = v.report.primal_value;
  v.method = "sdp";
  v.witness = HermitianOperator(rho.d_a(), rho.d_b(), evaluate(w, v.report.assignment), 1e-8);
  return v;
}

double t_m(const DensityOperator& rho, SetTag s, double m) { return t_m_detailed(rho, s, m).value; }

double t_m_primal(const DensityOperator& rho, SetTag s, double m) {
  if (!(m >= 0.0)) throw InputError("t_m_primal: m must be non-negative");
  require_cone_set(s, "t_m_primal");
  const int da = rho.d_a(), db = rho.d_b();
  const VariableShape shape = shape_for(rho);
  ConicProgram p;
  const MatrixExpr pp = p.hermitian("P", da, db, shape);
  p.psd(pp);
  if (s == SetTag::INCOHERENT) {
    // X = D diagonal ⪰ 0, N = P − ρ + D
    const MatrixExpr dvar = p.hermitian("D", da, db, VariableShape::diagonal);
    for (int i = 0; i < dvar.dim(); ++i) p.nonneg(diagonal_entry(dvar, i));
    const MatrixExpr nn = pp - rho.op() + dvar;
    p.psd(nn);
    p.minimize(m * trace(pp) + trace(nn));
  } else {
    const MatrixExpr nn = p.hermitian("N", da, db, shape);
    p.psd(nn);
    add_cone_membership(p, rho.op() - pp + nn, s);
    p.minimize(m * trace(pp) + trace(nn));
  }
  const SolveReport r = solve(p);
  require_optimal(r, "t_m_primal");
  return r.primal_value;
}

// ---- G^m -------------------------------------------------------------------

MonotoneValue g_m_detailed(const DensityOperator& rho, SetTag q, double m) {
  if (!(m >= 1.0)) throw InputError("g_m: m must be at least 1");
  if (q == SetTag::SEP) throw IntractableError("G^m_SEP has no general conic form");
  ConicProgram p;
  const MatrixExpr w = p.hermitian("W", rho.d_a(), rho.d_b(), shape_for(rho));
  p.psd(w, "W_psd");
  p.psd(eye(rho) - w, "W_le_1");
  add_polar_constraint(p, q, w, 1.0 / m, "p_");
  p.maximize(inner(rho.op(), w));
  MonotoneValue v;
  v.report = solve(p);
  require_optimal(v.report, "g_m(" + to_string(q) + ")");
  v.value = v.report.primal_value;
  v.method = "sdp";
  v.witness = extract_certificate(v.report, "W");
  return v;
}

double g_m(const DensityOperator& rho, SetTag q, double m) { return g_m_detailed(rho, q, m).value; }

double g_m_primal(const DensityOperator& rho, SetTag q, double m) {
  if (!(m >= 1.0)) throw InputError("g_m_primal: m must be at least 1");
  const int da = rho.d_a(), db = rho.d_b();
  const VariableShape shape = shape_for(rho);
  ConicProgram p;
  const MatrixExpr y = p.hermitian("Y", da, db, shape);
  p.psd(y);
  MatrixExpr z;
  ScalarExpr gauge;
  switch (q) {
    case SetTag::PPT_PRIME:
    case SetTag::RAINS: {
      const MatrixExpr pp = p.hermitian("P", da, db, shape);
      const MatrixExpr nn = p.hermitian("N", da, db, shape);
      p.psd(pp);
      p.psd(nn);
      z = partial_transpose(pp - nn);
      if (q == SetTag::RAINS) p.psd(z);
      gauge = trace(pp) + trace(nn);
      break;
    }
    case SetTag::PPT:
    case SetTag::PPT_PLUS:
      z = p.hermitian("Z", da, db, shape);
      p.psd(partial_transpose(z));
      if (q == SetTag::PPT_PLUS) p.psd(z);
      gauge = trace(z);
      break;
    case SetTag::INCOHERENT:
      z = p.hermitian("Z", da, db, VariableShape::diagonal);
      for (int i = 0; i < z.dim(); ++i) p.nonneg(diagonal_entry(z, i));
      gauge = trace(z);
      break;
    case SetTag::SEP:
      throw IntractableError("G^m_SEP has no general conic form");
  }
  p.psd(y + z - rho.op());
  p.minimize(trace(y) + (1.0 / m) * gauge);
  const SolveReport r = solve(p);
  require_optimal(r, "g_m_primal(" + to_string(q) + ")");
  return r.primal_value;
}

// ---- robustness ------------------------------------------------------------

double robustness(const DensityOperator& rho, SetTag s) {
  if (s == SetTag::SEP) {
    return t_m_sep(rho, std::min(rho.d_a(), rho.d_b()) - 1.0).value;
  }
  require_cone_set(s, "robustness");
  const int da = rho.d_a(), db = rho.d_b();
  ConicProgram p;
  MatrixExpr y;
  if (s == SetTag::INCOHERENT) {
    y = p.hermitian("Y", da, db, VariableShape::diagonal);
  } else {
    y = p.hermitian("Y", da, db, shape_for(rho));
    add_cone_membership(p, y, s);
  }
  p.psd(y - rho.op());
  p.minimize(trace(y) - 1.0);
  const SolveReport r = solve(p);
  require_optimal(r, "robustness");
  return r.primal_value;
}

MonotoneValue robustness_dual(const DensityOperator& rho, SetTag s) {
  require_cone_set(s, "robustness_dual");
  ConicProgram p;
  const MatrixExpr w = add_negative_dual_cone_element(p, rho, s);
  p.psd(w + eye(rho), "lower");
  p.maximize(inner(rho.op(), w));
  MonotoneValue v;
  v.report = solve(p);
  require_optimal(v.report, "robustness_dual");
  v.value = v.report.primal_value;
  v.method = "sdp";
  v.witness = HermitianOperator(rho.d_a(), rho.d_b(), evaluate(w, v.report.assignment), 1e-8);
  return v;
}

// ---- negativity and trace distances ----------------------------------------

double negativity(const DensityOperator& rho) {
  return 0.5 * (trace_norm(partial_transpose(rho.op())) - 1.0);
}

namespace {

double trace_distance_program(const DensityOperator& rho, SetTag s, bool unit_trace) {
  require_cone_set(s, "trace distance");
  const int da = rho.d_a(), db = rho.d_b();
  const VariableShape shape = shape_for(rho);
  ConicProgram p;
  MatrixExpr x;
  if (s == SetTag::INCOHERENT) {
    x = p.hermitian("X", da, db, VariableShape::diagonal);
    for (int i = 0; i < x.dim(); ++i) p.nonneg(diagonal_entry(x, i));
  } else {
    x = p.hermitian("X", da, db, shape);
    add_cone_membership(p, x, s);
  }
  if (unit_trace) p.equal(trace(x) - 1.0);
  // ρ − X = P − N with P, N ⪰ 0
  const MatrixExpr pp = p.hermitian("P", da, db, shape);
  const MatrixExpr nn = pp - rho.op() + x;
  p.psd(pp);
  p.psd(nn);
  p.minimize(trace(pp) + trace(nn));
  const SolveReport r = solve(p);
  require_optimal(r, "trace distance");
  return r.primal_value;
}

}  // namespace

double mod_trace_distance(const DensityOperator& rho, SetTag s) {
  return trace_distance_program(rho, s, false);
}

double set_trace_distance(const DensityOperator& rho, SetTag s) {
  return trace_distance_program(rho, s, true);
}

}  // namespace qedist
