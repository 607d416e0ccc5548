#include "qedist/sets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

namespace qedist {

namespace {

double lmin(const CMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double lmax(const CMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

double offdiag_max(const CMatrix& m) {
  double r = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

VariableShape shape_of(bool real) {
  return real ? VariableShape::real_symmetric : VariableShape::hermitian;
}

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

}  // namespace

bool is_real(const CMatrix& m, double tol) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= tol;
}

bool is_real(const MatrixExpr& e) {
  if (!is_real(e.constant)) return false;
  for (const auto& t : e.terms)
    for (const auto& en : t.second)
      if (en.value.imag() != 0.0) return false;
  return true;
}

OperatorSetDescriptor describe(SetTag s) {
  return {s, s == SetTag::SEP ? Tractability::special_cases_only : Tractability::exact_sdp};
}

std::string to_string(SetTag s) {
  switch (s) {
    case SetTag::SEP: return "SEP";
    case SetTag::PPT: return "PPT";
    case SetTag::PPT_PLUS: return "PPT+";
    case SetTag::PPT_PRIME: return "PPT'";
    case SetTag::RAINS: return "RAINS";
    case SetTag::INCOHERENT: return "INCOHERENT";
  }
  return "?";
}

SetTag parse_set_tag(const std::string& name) {
  std::string n;
  for (char c : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (n == "sep") return SetTag::SEP;
  if (n == "ppt") return SetTag::PPT;
  if (n == "pptplus" || n == "ppt+" || n == "ppt_plus") return SetTag::PPT_PLUS;
  if (n == "pptprime" || n == "ppt'" || n == "ppt_prime") return SetTag::PPT_PRIME;
  if (n == "rains" || n == "r") return SetTag::RAINS;
  if (n == "incoherent" || n == "i") return SetTag::INCOHERENT;
  throw InputError("unknown set '" + name + "' (expected sep|ppt|pptplus|pptprime|rains|incoherent)");
}

// ---- membership ------------------------------------------------------------

namespace {

bool is_state(const HermitianOperator& x, double tol) {
  return std::abs(x.trace() - 1.0) <= tol && x.min_eigenvalue() >= -tol;
}

}  // namespace

bool membership(SetTag s, const HermitianOperator& x, double tol) {
  const HermitianOperator xt = partial_transpose(x);
  switch (s) {
    case SetTag::PPT:
      return std::abs(x.trace() - 1.0) <= tol && xt.min_eigenvalue() >= -tol;
    case SetTag::PPT_PLUS:
      return is_state(x, tol) && xt.min_eigenvalue() >= -tol;
    case SetTag::PPT_PRIME:
      return trace_norm(xt) <= 1.0 + tol;
    case SetTag::RAINS:
      return x.min_eigenvalue() >= -tol && trace_norm(xt) <= 1.0 + tol;
    case SetTag::INCOHERENT:
      return is_state(x, tol) && offdiag_max(x.matrix()) <= tol;
    case SetTag::SEP: {
      if (!is_state(x, tol)) return false;
      if (xt.min_eigenvalue() < -tol) return false;  // NPT ⇒ entangled
      if (x.dim() <= 6) return true;                 // PPT ⇔ SEP in 2×2 and 2×3
      const DensityOperator rho(x, tol, tol);
      if (support_rank(rho) == 1) {
        const auto es = Eigen::SelfAdjointEigenSolver<CMatrix>(x.matrix());
        const CVector v = es.eigenvectors().col(x.dim() - 1);
        const auto sd = schmidt_decompose(PureState(x.d_a(), x.d_b(), v / v.norm()));
        return sd.coefficients.size() < 2 || sd.coefficients[1] <= std::sqrt(tol);
      }
      if (is_isotropic(rho, tol)) {
        const double f = inner(max_entangled(x.d_a()).op(), x);
        return f <= 1.0 / x.d_a() + tol;
      }
      if (auto img = max_correlated_image(x, tol)) return offdiag_max(*img) <= tol;
      throw IntractableError("SEP membership is only decided for pure, isotropic, maximally "
                             "correlated states or d_a*d_b <= 6");
    }
  }
  return false;
}

// ---- polar constraints -----------------------------------------------------

void add_polar_constraint(ConicProgram& p, SetTag s, const MatrixExpr& w, const ScalarExpr& bound,
                          const std::string& prefix) {
  const int da = w.d_a, db = w.d_b;
  const MatrixExpr tI = identity_times(bound, da, db);
  const bool real = is_real(w);
  switch (s) {
    case SetTag::PPT:
      p.psd(tI - partial_transpose(w), prefix + "pt_ub");
      return;
    case SetTag::PPT_PRIME: {
      const MatrixExpr wt = partial_transpose(w);
      p.psd(tI - wt, prefix + "pt_ub");
      p.psd(tI + wt, prefix + "pt_lb");
      return;
    }
    case SetTag::PPT_PLUS: {
      const MatrixExpr b = p.hermitian(prefix + "B", da, db, shape_of(real));
      p.psd(b, prefix + "B_psd");
      p.psd(tI - w - partial_transpose(b), prefix + "plus");
      return;
    }
    case SetTag::RAINS: {
      const MatrixExpr q = p.hermitian(prefix + "Q", da, db, shape_of(real));
      const MatrixExpr qt = partial_transpose(q);
      p.psd(q - w, prefix + "dom");
      p.psd(tI - qt, prefix + "pt_ub");
      p.psd(tI + qt, prefix + "pt_lb");
      return;
    }
    case SetTag::INCOHERENT:
      for (int i = 0; i < w.dim(); ++i) {
        p.nonneg(bound - diagonal_entry(w, i), prefix + "diag" + std::to_string(i));
      }
      return;
    case SetTag::SEP:
      throw IntractableError("no tractable conic description of the SEP polar");
  }
}

HermitianOperator polar_dual_element(SetTag s, const SolveReport& r, const std::string& prefix,
                                     int d_a, int d_b) {
  switch (s) {
    case SetTag::PPT:
      return partial_transpose(extract_dual(r, prefix + "pt_ub"));
    case SetTag::PPT_PRIME:
      return partial_transpose(extract_dual(r, prefix + "pt_ub") - extract_dual(r, prefix + "pt_lb"));
    case SetTag::PPT_PLUS:
      return extract_dual(r, prefix + "plus");
    case SetTag::RAINS:
      return extract_dual(r, prefix + "dom");
    case SetTag::INCOHERENT: {
      const int n = d_a * d_b;
      CMatrix x = CMatrix::Zero(n, n);
      for (int i = 0; i < n; ++i) x(i, i) = extract_scalar_dual(r, prefix + "diag" + std::to_string(i));
      return HermitianOperator(d_a, d_b, std::move(x));
    }
    case SetTag::SEP:
      break;
  }
  throw IntractableError("no dual element for SEP");
}

double polar_certificate_violation(SetTag s, const HermitianOperator& w, double bound,
                                   const SolveReport& r, const std::string& prefix) {
  const int n = w.dim();
  const CMatrix wt = partial_transpose(w.matrix(), w.d_a(), w.d_b());
  switch (s) {
    case SetTag::PPT:
      return std::max(0.0, lmax(wt) - bound);
    case SetTag::PPT_PRIME:
      return std::max({0.0, lmax(wt) - bound, -lmin(wt) - bound});
    case SetTag::INCOHERENT:
      return std::max(0.0, w.matrix().diagonal().real().maxCoeff() - bound);
    case SetTag::PPT_PLUS: {
      const HermitianOperator b = extract_certificate(r, prefix + "B");
      const CMatrix slack = bound * identity(n) - w.matrix() -
                            partial_transpose(b.matrix(), w.d_a(), w.d_b());
      return std::max({0.0, -b.min_eigenvalue(), -lmin(slack)});
    }
    case SetTag::RAINS: {
      const HermitianOperator q = extract_certificate(r, prefix + "Q");
      const CMatrix qt = partial_transpose(q.matrix(), w.d_a(), w.d_b());
      return std::max({0.0, -lmin(q.matrix() - w.matrix()), lmax(qt) - bound, -lmin(qt) - bound});
    }
    case SetTag::SEP:
      break;
  }
  throw IntractableError("no certificate check for SEP");
}

// ---- gauges ----------------------------------------------------------------

GaugeResult gauge_polar_detailed(SetTag s, const HermitianOperator& w) {
  const int da = w.d_a(), db = w.d_b();
  GaugeResult g;
  switch (s) {
    case SetTag::PPT:
    case SetTag::PPT_PRIME: {
      const CMatrix wt = partial_transpose(w.matrix(), da, db);
      const Eigen::SelfAdjointEigenSolver<CMatrix> es(wt);
      const RVector& ev = es.eigenvalues();
      int k = static_cast<int>(ev.size()) - 1;
      double sign = 1.0;
      if (s == SetTag::PPT_PRIME && -ev(0) > ev(k)) {
        k = 0;
        sign = -1.0;
      }
      g.value = sign * ev(k);
      const CVector v = es.eigenvectors().col(k);
      g.maximizer = HermitianOperator(da, db, partial_transpose(CMatrix(sign * v * v.adjoint()), da, db));
      return g;
    }
    case SetTag::INCOHERENT: {
      int k = 0;
      g.value = w.matrix().diagonal().real().maxCoeff(&k);
      CMatrix x = CMatrix::Zero(w.dim(), w.dim());
      x(k, k) = 1.0;
      g.maximizer = HermitianOperator(da, db, std::move(x));
      return g;
    }
    case SetTag::SEP:
      g.value = gauge_sep_projector(w);
      return g;
    case SetTag::PPT_PLUS:
    case SetTag::RAINS: {
      ConicProgram p;
      const ScalarExpr t = p.scalar("t");
      add_polar_constraint(p, s, constant_expr(w), t, "g_");
      p.minimize(t);
      g.report = solve(p);
      require_optimal(g.report, "gauge_polar(" + to_string(s) + ")");
      g.value = g.report.primal_value;
      g.maximizer = polar_dual_element(s, g.report, "g_", da, db);
      return g;
    }
  }
  throw IntractableError("unsupported set");
}

double gauge_polar(SetTag s, const HermitianOperator& w) { return gauge_polar_detailed(s, w).value; }

double gauge_polar_primal(SetTag s, const HermitianOperator& w) {
  const int da = w.d_a(), db = w.d_b(), n = w.dim();
  const VariableShape shape = shape_of(is_real(w.matrix()));
  ConicProgram p;
  switch (s) {
    case SetTag::PPT_PRIME:
    case SetTag::RAINS: {
      const MatrixExpr a = p.hermitian("A", da, db, shape);
      const MatrixExpr b = p.hermitian("B", da, db, shape);
      p.psd(a);
      p.psd(b);
      p.nonneg(1.0 - trace(a) - trace(b));
      const MatrixExpr x = partial_transpose(a - b);
      if (s == SetTag::RAINS) p.psd(x);
      p.maximize(inner(w, x));
      break;
    }
    case SetTag::PPT: {
      const MatrixExpr y = p.hermitian("Y", da, db, shape);
      p.psd(y);
      p.equal(trace(y) - 1.0);
      p.maximize(inner(w, partial_transpose(y)));
      break;
    }
    case SetTag::PPT_PLUS: {
      const MatrixExpr x = p.hermitian("X", da, db, shape);
      p.psd(x);
      p.psd(partial_transpose(x));
      p.equal(trace(x) - 1.0);
      p.maximize(inner(w, x));
      break;
    }
    case SetTag::INCOHERENT: {
      const MatrixExpr x = p.hermitian("X", da, db, VariableShape::diagonal);
      for (int i = 0; i < n; ++i) p.nonneg(diagonal_entry(x, i));
      p.equal(trace(x) - 1.0);
      p.maximize(inner(w, x));
      break;
    }
    case SetTag::SEP:
      throw IntractableError("no tractable primal description of SEP");
  }
  const SolveReport r = solve(p);
  require_optimal(r, "gauge_polar_primal(" + to_string(s) + ")");
  return r.primal_value;
}

double gauge_sep_projector(const HermitianOperator& pi) {
  const CMatrix& m = pi.matrix();
  if ((m * m - m).cwiseAbs().maxCoeff() > 1e-8) throw InputError("gauge_sep_projector: not a projector");
  const int da = pi.d_a(), db = pi.d_b();
  const int rank = static_cast<int>(std::lround(pi.trace()));
  if (rank < 1) throw InputError("gauge_sep_projector: zero projector");
  if (rank == 1) {
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    const CVector v = es.eigenvectors().col(pi.dim() - 1);
    const auto sd = schmidt_decompose(PureState(da, db, v / v.norm()));
    return sd.coefficients.max() * sd.coefficients.max();
  }
  if (auto img = max_correlated_image(pi, 1e-9)) return img->diagonal().real().maxCoeff();
  // A subspace of dimension > (d_a−1)(d_b−1) contains a product vector.
  if (rank > (da - 1) * (db - 1)) return 1.0;
  throw IntractableError("Γ_SEP° is only available for pure, maximally correlated or "
                         "large-rank supports");
}

// ---- random elements -------------------------------------------------------

HermitianOperator random_set_element(SetTag s, int d_a, int d_b, std::uint64_t seed) {
  const int n = d_a * d_b;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto rho = [&](std::uint64_t sd) {
    return random_state({RandomKind::ginibre_mixed, d_a, d_b, sd, std::nullopt, std::nullopt}).op();
  };
  switch (s) {
    case SetTag::PPT_PRIME: {
      const HermitianOperator h = rho(seed) - rho(seed + 7919);
      const double scale = unif(rng) / trace_norm(h);
      return partial_transpose(h * scale);
    }
    case SetTag::PPT: {
      const HermitianOperator y = rho(seed) + (rho(seed + 7919) - rho(seed + 104729)) * 0.3;
      // shift to make y ⪰ 0, renormalize, then undo the transpose
      const double shift = std::max(0.0, -y.min_eigenvalue());
      CMatrix m = y.matrix() + shift * identity(n);
      m /= m.trace().real();
      return partial_transpose(HermitianOperator(d_a, d_b, m, 1e-8));
    }
    case SetTag::PPT_PLUS:
    case SetTag::SEP: {
      if (s == SetTag::SEP) {
        // mixture of product pure states
        CMatrix m = CMatrix::Zero(n, n);
        const int terms = 1 + static_cast<int>(unif(rng) * 4);
        double total = 0.0;
        for (int k = 0; k < terms; ++k) {
          const CVector a = random_pure_state(d_a, 1, seed * 31 + 2 * k).amplitudes();
          const CVector b = random_pure_state(d_b, 1, seed * 31 + 2 * k + 1).amplitudes();
          CVector v(n);
          for (int i = 0; i < d_a; ++i)
            for (int j = 0; j < d_b; ++j) v(i * d_b + j) = a(i) * b(j);
          const double w = unif(rng) + 0.05;
          m += w * v * v.adjoint();
          total += w;
        }
        return HermitianOperator(d_a, d_b, m / total, 1e-8);
      }
      const HermitianOperator r = rho(seed);
      const double lam = partial_transpose(r).min_eigenvalue();
      double p0 = lam >= 0.0 ? 0.0 : -lam / (1.0 / n - lam);
      const double p = p0 + (1.0 - p0) * unif(rng) * 0.5;
      return HermitianOperator(d_a, d_b, (1.0 - p) * r.matrix() + (p / n) * identity(n), 1e-8);
    }
    case SetTag::RAINS: {
      const HermitianOperator r = rho(seed);
      return r * (unif(rng) / trace_norm(partial_transpose(r)));
    }
    case SetTag::INCOHERENT: {
      CMatrix m = CMatrix::Zero(n, n);
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        const double v = -std::log(1.0 - unif(rng));
        m(i, i) = v;
        total += v;
      }
      return HermitianOperator(d_a, d_b, m / total);
    }
  }
  throw InputError("unsupported set");
}

}  // namespace qedist
