#include "qedist/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace qedist {

// ---- scalar expressions ----------------------------------------------------

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
  ScalarExpr r = a;
  r.constant += b.constant;
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  return r;
}

ScalarExpr operator-(const ScalarExpr& a) { return -1.0 * a; }

ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return a + (-b); }

ScalarExpr operator*(double s, const ScalarExpr& a) {
  ScalarExpr r = a;
  r.constant *= s;
  for (auto& t : r.terms) t.second *= s;
  return r;
}

// ---- matrix expressions ----------------------------------------------------

namespace {

void require_same_dims(const MatrixExpr& a, const MatrixExpr& b) {
  if (a.d_a != b.d_a || a.d_b != b.d_b) throw DimensionError("matrix expression dims differ");
}

}  // namespace

MatrixExpr constant_expr(const CMatrix& c, int d_a, int d_b) {
  if (c.rows() != d_a * d_b || c.cols() != d_a * d_b) {
    throw DimensionError("constant_expr: shape mismatch");
  }
  MatrixExpr e;
  e.d_a = d_a;
  e.d_b = d_b;
  e.constant = c;
  return e;
}

MatrixExpr constant_expr(const HermitianOperator& c) {
  return constant_expr(c.matrix(), c.d_a(), c.d_b());
}

MatrixExpr operator+(const MatrixExpr& a, const MatrixExpr& b) {
  require_same_dims(a, b);
  MatrixExpr r = a;
  r.constant += b.constant;
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  return r;
}

MatrixExpr operator*(double s, const MatrixExpr& a) {
  MatrixExpr r = a;
  r.constant *= s;
  for (auto& t : r.terms)
    for (auto& e : t.second) e.value *= s;
  return r;
}

MatrixExpr operator-(const MatrixExpr& a) { return -1.0 * a; }
MatrixExpr operator-(const MatrixExpr& a, const MatrixExpr& b) { return a + (-b); }

MatrixExpr operator+(const MatrixExpr& a, const HermitianOperator& c) {
  return a + constant_expr(c);
}
MatrixExpr operator-(const MatrixExpr& a, const HermitianOperator& c) {
  return a + constant_expr(c * -1.0);
}
MatrixExpr operator-(const HermitianOperator& c, const MatrixExpr& a) {
  return constant_expr(c) - a;
}

MatrixExpr partial_transpose(const MatrixExpr& x) {
  MatrixExpr r;
  r.d_a = x.d_a;
  r.d_b = x.d_b;
  r.constant = partial_transpose(x.constant, x.d_a, x.d_b);
  r.terms = x.terms;
  const int db = x.d_b;
  for (auto& t : r.terms)
    for (auto& e : t.second) {
      const int ia = e.row / db, ib = e.row % db, ja = e.col / db, jb = e.col % db;
      e.row = ia * db + jb;
      e.col = ja * db + ib;
    }
  return r;
}

MatrixExpr identity_times(const ScalarExpr& t, int d_a, int d_b) {
  const int n = d_a * d_b;
  MatrixExpr r = constant_expr(t.constant * CMatrix::Identity(n, n), d_a, d_b);
  for (const auto& [var, coeff] : t.terms) {
    std::vector<SparseEntry> entries;
    entries.reserve(n);
    for (int i = 0; i < n; ++i) entries.push_back({i, i, cplx(coeff, 0.0)});
    r.terms.emplace_back(var, std::move(entries));
  }
  return r;
}

MatrixExpr congruence(const MatrixExpr& x, const CMatrix& v, int d_a, int d_b) {
  const int n = d_a * d_b;
  if (v.rows() != n || v.cols() != x.dim()) throw DimensionError("congruence: shape mismatch");
  MatrixExpr r = constant_expr(v * x.constant * v.adjoint(), d_a, d_b);
  for (const auto& [var, entries] : x.terms) {
    CMatrix acc = CMatrix::Zero(n, n);
    for (const auto& e : entries) acc += e.value * v.col(e.row) * v.col(e.col).adjoint();
    std::vector<SparseEntry> out;
    for (int c = 0; c < n; ++c)
      for (int rr = 0; rr < n; ++rr)
        if (std::abs(acc(rr, c)) > 1e-15) out.push_back({rr, c, acc(rr, c)});
    r.terms.emplace_back(var, std::move(out));
  }
  return r;
}

ScalarExpr inner(const CMatrix& c, const MatrixExpr& x) {
  if (c.rows() != x.dim() || c.cols() != x.dim()) throw DimensionError("inner: shape mismatch");
  ScalarExpr r;
  r.constant = (c.conjugate().cwiseProduct(x.constant)).sum().real();
  for (const auto& [var, entries] : x.terms) {
    double s = 0.0;
    for (const auto& e : entries) s += (std::conj(c(e.row, e.col)) * e.value).real();
    if (s != 0.0) r.terms.emplace_back(var, s);
  }
  return r;
}

ScalarExpr inner(const HermitianOperator& c, const MatrixExpr& x) { return inner(c.matrix(), x); }

ScalarExpr trace(const MatrixExpr& x) {
  return inner(CMatrix::Identity(x.dim(), x.dim()), x);
}

ScalarExpr diagonal_entry(const MatrixExpr& x, int i) {
  if (i < 0 || i >= x.dim()) throw DimensionError("diagonal_entry: index out of range");
  ScalarExpr r;
  r.constant = x.constant(i, i).real();
  for (const auto& [var, entries] : x.terms) {
    double s = 0.0;
    for (const auto& e : entries)
      if (e.row == i && e.col == i) s += e.value.real();
    if (s != 0.0) r.terms.emplace_back(var, s);
  }
  return r;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

// ---- program construction --------------------------------------------------

void ConicProgram::check_name(const std::string& name) const {
  if (name.empty()) throw InputError("variable name must be non-empty");
  if (svars_.count(name)) throw InputError("duplicate variable name: " + name);
  for (const auto& v : mvars_)
    if (v.name == name) throw InputError("duplicate variable name: " + name);
}

void ConicProgram::check_expr(const ScalarExpr& e) const {
  for (const auto& t : e.terms)
    if (t.first < 0 || t.first >= nvars_) throw InputError("expression references undeclared variable");
}

void ConicProgram::check_expr(const MatrixExpr& e) const {
  for (const auto& t : e.terms)
    if (t.first < 0 || t.first >= nvars_) throw InputError("expression references undeclared variable");
  if (e.constant.rows() != e.dim() || e.constant.cols() != e.dim()) {
    throw DimensionError("matrix expression constant has wrong shape");
  }
  if ((e.constant - e.constant.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw InputError("matrix expression constant is not Hermitian");
  }
}

MatrixExpr ConicProgram::hermitian(const std::string& name, int d_a, int d_b, VariableShape shape) {
  check_name(name);
  if (d_a < 1 || d_b < 1) throw DimensionError("variable dims must be positive");
  const int n = d_a * d_b;
  MatrixExpr e = constant_expr(CMatrix::Zero(n, n), d_a, d_b);
  mvars_.push_back({name, d_a, d_b, nvars_, shape});
  int k = nvars_;
  for (int i = 0; i < n; ++i) e.terms.push_back({k++, {{i, i, 1.0}}});
  if (shape != VariableShape::diagonal) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        e.terms.push_back({k++, {{i, j, 1.0}, {j, i, 1.0}}});
        if (shape == VariableShape::hermitian) {
          e.terms.push_back({k++, {{i, j, cplx(0, 1)}, {j, i, cplx(0, -1)}}});
        }
      }
  }
  nvars_ = k;
  return e;
}

ScalarExpr ConicProgram::scalar(const std::string& name) {
  check_name(name);
  svars_[name] = nvars_;
  ScalarExpr e;
  e.terms.emplace_back(nvars_++, 1.0);
  return e;
}

void ConicProgram::psd(const MatrixExpr& e, const std::string& label) {
  check_expr(e);
  psd_.push_back({label, e});
}

void ConicProgram::nonneg(const ScalarExpr& e, const std::string& label) {
  check_expr(e);
  nonneg_.push_back({label, e});
}

void ConicProgram::equal(const ScalarExpr& e, const std::string& label) {
  check_expr(e);
  equal_.push_back({label, e});
}

void ConicProgram::maximize(const ScalarExpr& e) {
  check_expr(e);
  objective_ = e;
  maximize_ = true;
}

void ConicProgram::minimize(const ScalarExpr& e) {
  check_expr(e);
  objective_ = e;
  maximize_ = false;
}

// ---- embedding -------------------------------------------------------------

RMatrix real_embedding(const CMatrix& x) {
  const int n = static_cast<int>(x.rows());
  RMatrix r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = x.real();
  r.bottomRightCorner(n, n) = x.real();
  r.topRightCorner(n, n) = -x.imag();
  r.bottomLeftCorner(n, n) = x.imag();
  return r;
}

CMatrix complex_from_embedding(const RMatrix& y) {
  const int n = static_cast<int>(y.rows()) / 2;
  CMatrix c(n, n);
  c.real() = y.topLeftCorner(n, n) + y.bottomRightCorner(n, n);
  c.imag() = y.bottomLeftCorner(n, n) - y.topRightCorner(n, n);
  return c;
}

// ---- lowering to block form ------------------------------------------------
//
// Internal form (y free):
//   max bᵀy  s.t.  C − Σ y_i A_i = S ⪰ 0 (block diagonal, last block LP),
//                  E y = f.
// Dual:  min ⟨C,X⟩ + fᵀλ  s.t.  A(X) + Eᵀλ = b,  X ⪰ 0.

namespace {

struct Triplet {
  int p, q;
  double v;
};

struct Lowered {
  int nvars = 0;
  std::vector<int> size;        // real block size
  std::vector<bool> complex;    // embedded?
  std::vector<RMatrix> C;
  std::vector<std::vector<std::pair<int, std::vector<Triplet>>>> A;  // per block
  int nlp = 0;
  RVector c_lp;
  std::vector<std::vector<std::pair<int, double>>> A_lp;  // per LP row
  RVector b;
  RMatrix E;
  RVector f;
  double obj_const = 0.0;
  bool flip = false;
};

std::vector<std::pair<int, double>> merge_terms(const ScalarExpr& e) {
  std::map<int, double> m;
  for (const auto& [v, c] : e.terms) m[v] += c;
  std::vector<std::pair<int, double>> out;
  for (const auto& [v, c] : m)
    if (c != 0.0) out.emplace_back(v, c);
  return out;
}

Lowered lower(const ConicProgram& p) {
  Lowered L;
  L.nvars = p.num_scalars();
  for (const auto& con : p.psd_constraints()) {
    const MatrixExpr& e = con.expr;
    const int n = e.dim();
    bool cx = e.constant.imag().cwiseAbs().maxCoeff() > 0.0;
    for (const auto& t : e.terms)
      for (const auto& en : t.second)
        if (en.value.imag() != 0.0) cx = true;
    std::map<int, std::map<std::pair<int, int>, double>> acc;
    for (const auto& [var, entries] : e.terms) {
      auto& m = acc[var];
      for (const auto& en : entries) {
        const double a = en.value.real(), bi = en.value.imag();
        // A_i = −F_i
        m[{en.row, en.col}] -= a;
        if (cx) {
          m[{en.row + n, en.col + n}] -= a;
          m[{en.row + n, en.col}] -= bi;
          m[{en.row, en.col + n}] += bi;
        }
      }
    }
    const CMatrix hc = 0.5 * (e.constant + e.constant.adjoint());
    L.C.push_back(cx ? real_embedding(hc) : RMatrix(hc.real()));
    L.size.push_back(cx ? 2 * n : n);
    L.complex.push_back(cx);
    std::vector<std::pair<int, std::vector<Triplet>>> blk;
    for (const auto& [var, m] : acc) {
      std::vector<Triplet> tr;
      for (const auto& [pq, v] : m)
        if (std::abs(v) > 1e-15) tr.push_back({pq.first, pq.second, v});
      if (!tr.empty()) blk.emplace_back(var, std::move(tr));
    }
    L.A.push_back(std::move(blk));
  }
  L.nlp = static_cast<int>(p.nonneg_constraints().size());
  L.c_lp.resize(L.nlp);
  for (int k = 0; k < L.nlp; ++k) {
    const ScalarExpr& g = p.nonneg_constraints()[k].expr;
    L.c_lp(k) = g.constant;
    auto row = merge_terms(g);
    for (auto& t : row) t.second = -t.second;
    L.A_lp.push_back(std::move(row));
  }
  const int neq = static_cast<int>(p.equal_constraints().size());
  L.E = RMatrix::Zero(neq, L.nvars);
  L.f.resize(neq);
  for (int k = 0; k < neq; ++k) {
    const ScalarExpr& h = p.equal_constraints()[k].expr;
    for (const auto& [v, c] : merge_terms(h)) L.E(k, v) = c;
    L.f(k) = -h.constant;
  }
  L.b = RVector::Zero(L.nvars);
  L.flip = !p.maximizing();
  for (const auto& [v, c] : merge_terms(p.objective())) L.b(v) = L.flip ? -c : c;
  L.obj_const = p.objective().constant;
  return L;
}

// ---- interior-point iterations ---------------------------------------------

struct Point {
  std::vector<RMatrix> X, S;
  RVector x, s;  // LP block
  RVector y, lam;
};

struct Dir {
  std::vector<RMatrix> X, S;
  RVector x, s, y, lam;
};

RVector apply_A(const Lowered& L, const std::vector<RMatrix>& X, const RVector& x) {
  RVector out = RVector::Zero(L.nvars);
  for (std::size_t b = 0; b < L.A.size(); ++b)
    for (const auto& [var, tr] : L.A[b]) {
      double s = 0.0;
      for (const auto& t : tr) s += t.v * X[b](t.p, t.q);
      out(var) += s;
    }
  for (int k = 0; k < L.nlp; ++k)
    for (const auto& [var, a] : L.A_lp[k]) out(var) += a * x(k);
  return out;
}

void apply_AT(const Lowered& L, const RVector& y, std::vector<RMatrix>& Y, RVector& ylp) {
  Y.resize(L.A.size());
  for (std::size_t b = 0; b < L.A.size(); ++b) {
    Y[b] = RMatrix::Zero(L.size[b], L.size[b]);
    for (const auto& [var, tr] : L.A[b]) {
      const double yv = y(var);
      if (yv == 0.0) continue;
      for (const auto& t : tr) Y[b](t.p, t.q) += yv * t.v;
    }
  }
  ylp = RVector::Zero(L.nlp);
  for (int k = 0; k < L.nlp; ++k)
    for (const auto& [var, a] : L.A_lp[k]) ylp(k) += a * y(var);
}

double dot(const RMatrix& a, const RMatrix& b) { return a.cwiseProduct(b).sum(); }

RMatrix sym(const RMatrix& a) { return 0.5 * (a + a.transpose()); }

// Largest α with M + α D ⪰ 0, capped at `cap`; M ≻ 0 with Cholesky factor L.
double max_step(const Eigen::LLT<RMatrix>& chol, const RMatrix& d, double cap) {
  const auto& Lm = chol.matrixL();
  RMatrix t = Lm.solve(d);
  t = Lm.solve(t.transpose()).transpose();
  const double lmin = Eigen::SelfAdjointEigenSolver<RMatrix>(sym(t), Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  if (lmin >= 0.0) return cap;
  return std::min(cap, -1.0 / lmin);
}

double max_step_lp(const RVector& v, const RVector& dv, double cap) {
  double a = cap;
  for (int k = 0; k < v.size(); ++k)
    if (dv(k) < 0.0) a = std::min(a, -v(k) / dv(k));
  return a;
}

class KktSolver {
 public:
  bool factor(const RMatrix& M, const RMatrix& E) {
    E_ = E;
    const int n = static_cast<int>(M.rows());
    const double scale = n > 0 ? std::max(1.0, M.diagonal().cwiseAbs().maxCoeff()) : 1.0;
    use_lu_ = false;
    for (double reg : {0.0, 1e-14, 1e-12, 1e-10}) {
      llt_.compute(M + reg * scale * RMatrix::Identity(n, n));
      if (llt_.info() == Eigen::Success) {
        if (E.rows() == 0) return true;
        MinvEt_ = llt_.solve(E.transpose());
        RMatrix K = E * MinvEt_;
        lltK_.compute(sym(K));
        if (lltK_.info() == Eigen::Success) return true;
        break;
      }
    }
    const int m = static_cast<int>(E.rows());
    RMatrix kkt = RMatrix::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = M;
    kkt.topRightCorner(n, m) = E.transpose();
    kkt.bottomLeftCorner(m, n) = E;
    lu_.compute(kkt);
    use_lu_ = true;
    return lu_.rank() == n + m;
  }

  void solve(const RVector& h, const RVector& r, RVector& dy, RVector& dlam) const {
    const int n = static_cast<int>(h.size());
    const int m = static_cast<int>(r.size());
    if (use_lu_) {
      RVector rhs(n + m);
      rhs << h, r;
      const RVector sol = lu_.solve(rhs);
      dy = sol.head(n);
      dlam = sol.tail(m);
      return;
    }
    const RVector Minvh = llt_.solve(h);
    if (m == 0) {
      dy = Minvh;
      dlam.resize(0);
      return;
    }
    dlam = lltK_.solve(E_ * Minvh - r);
    dy = Minvh - MinvEt_ * dlam;
  }

 private:
  RMatrix E_, MinvEt_;
  Eigen::LLT<RMatrix> llt_, lltK_;
  Eigen::FullPivLU<RMatrix> lu_;
  bool use_lu_ = false;
};

struct Outcome {
  SolveStatus status = SolveStatus::numerical_failure;
  Point pt;
  double pobj = 0, dobj = 0, pinf = 0, dinf = 0;
  int iterations = 0;
  std::string message;
};

constexpr double kNearOptimalFactor = 30.0;

Outcome run_ipm(const Lowered& L, double gap_tol, int max_iter) {
  const int N = L.nvars;
  const int nb = static_cast<int>(L.size.size());
  const double feas_tol = std::min(gap_tol, 1e-8);
  const int neq = static_cast<int>(L.E.rows());

  double ntot = L.nlp;
  for (int s : L.size) ntot += s;

  const double bnorm = L.b.norm();
  double cnorm2 = L.c_lp.squaredNorm();
  for (const auto& c : L.C) cnorm2 += c.squaredNorm();
  const double cnorm = std::sqrt(cnorm2);
  const double fnorm = L.f.norm();

  // Starting point in the spirit of SDPT3.
  Point pt;
  pt.X.resize(nb);
  pt.S.resize(nb);
  std::vector<double> anorm_b(nb, 0.0);
  RVector acol = RVector::Zero(N);  // per-variable Frobenius norm, all blocks
  for (int b = 0; b < nb; ++b)
    for (const auto& [var, tr] : L.A[b]) {
      double s = 0.0;
      for (const auto& t : tr) s += t.v * t.v;
      acol(var) += s;
    }
  for (int k = 0; k < L.nlp; ++k)
    for (const auto& [var, a] : L.A_lp[k]) acol(var) += a * a;
  acol = acol.cwiseSqrt();
  for (int b = 0; b < nb; ++b) {
    const int n = L.size[b];
    double amax = 0.0, ratio = 0.0;
    for (const auto& [var, tr] : L.A[b]) {
      double s = 0.0;
      for (const auto& t : tr) s += t.v * t.v;
      s = std::sqrt(s);
      amax = std::max(amax, s);
      ratio = std::max(ratio, (1.0 + std::abs(L.b(var))) / (1.0 + s));
    }
    const double xi = std::max({10.0, std::sqrt(double(n)), n * ratio});
    const double eta = std::max({10.0, std::sqrt(double(n)), amax, L.C[b].norm()});
    pt.X[b] = xi * RMatrix::Identity(n, n);
    pt.S[b] = eta * RMatrix::Identity(n, n);
  }
  {
    double amax = 0.0, ratio = 0.0;
    for (int k = 0; k < L.nlp; ++k) {
      double s = 0.0;
      for (const auto& [var, a] : L.A_lp[k]) s += a * a;
      amax = std::max(amax, std::sqrt(s));
    }
    for (int v = 0; v < N; ++v) ratio = std::max(ratio, (1.0 + std::abs(L.b(v))) / (1.0 + acol(v)));
    const double n = std::max(1, L.nlp);
    const double xi = std::max({10.0, std::sqrt(n), std::min(n, 1e3) * ratio});
    const double eta = std::max({10.0, std::sqrt(n), amax, L.nlp > 0 ? L.c_lp.cwiseAbs().maxCoeff() : 0.0});
    pt.x = RVector::Constant(L.nlp, xi);
    pt.s = RVector::Constant(L.nlp, eta);
  }
  pt.y = RVector::Zero(N);
  pt.lam = RVector::Zero(neq);

  Outcome best;
  double best_score = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int it = 0; it <= max_iter; ++it) {
    const RVector AX = apply_A(L, pt.X, pt.x);
    RVector Rp = L.b - AX;
    if (neq) Rp -= L.E.transpose() * pt.lam;
    std::vector<RMatrix> ATy;
    RVector ATy_lp;
    apply_AT(L, pt.y, ATy, ATy_lp);
    std::vector<RMatrix> Rd(nb);
    double rd2 = 0.0, cx = 0.0, gap = 0.0;
    for (int b = 0; b < nb; ++b) {
      Rd[b] = L.C[b] - ATy[b] - pt.S[b];
      rd2 += Rd[b].squaredNorm();
      cx += dot(L.C[b], pt.X[b]);
      gap += dot(pt.X[b], pt.S[b]);
    }
    const RVector rd_lp = L.c_lp - ATy_lp - pt.s;
    rd2 += rd_lp.squaredNorm();
    cx += L.c_lp.dot(pt.x);
    gap += pt.x.dot(pt.s);
    const RVector Re = neq ? RVector(L.f - L.E * pt.y) : RVector(RVector::Zero(0));

    const double pobj = L.b.dot(pt.y);
    const double dobj = cx + (neq ? L.f.dot(pt.lam) : 0.0);
    const double pinf = std::max(std::sqrt(rd2) / (1.0 + cnorm), neq ? Re.norm() / (1.0 + fnorm) : 0.0);
    const double dinf = Rp.norm() / (1.0 + bnorm);
    const double relgap = std::abs(dobj - pobj) / (1.0 + std::abs(pobj));
    const double mu = gap / ntot;

    const double score = std::max({pinf / feas_tol, dinf / feas_tol, relgap / gap_tol});
    if (score < best_score) {
      best_score = score;
      best.pt = pt;
      best.pobj = pobj;
      best.dobj = dobj;
      best.pinf = pinf;
      best.dinf = dinf;
      best.iterations = it;
    }
    if (pinf <= feas_tol && dinf <= feas_tol && relgap <= gap_tol) {
      best.status = SolveStatus::optimal;
      best.message = "converged";
      return best;
    }
    if (it == max_iter) break;

    // Farkas-type certificates.
    if (it > 5) {
      const double dlin = dobj;  // ⟨C,X⟩ + fᵀλ
      if (dlin < 0.0 && (L.b - Rp).norm() <= 1e-8 * -dlin) {
        Outcome o;
        o.status = SolveStatus::infeasible;
        o.pt = pt;
        o.iterations = it;
        o.message = "primal infeasibility certificate found";
        return o;
      }
      if (pobj > 0.0) {
        double cr2 = 0.0;
        for (int b = 0; b < nb; ++b) cr2 += (L.C[b] - Rd[b]).squaredNorm();
        cr2 += (L.c_lp - rd_lp).squaredNorm();
        const double er = neq ? (L.f - Re).norm() : 0.0;
        if (std::sqrt(cr2) <= 1e-8 * pobj && er <= 1e-8 * pobj) {
          Outcome o;
          o.status = SolveStatus::unbounded;
          o.pt = pt;
          o.iterations = it;
          o.message = "unbounded direction found";
          return o;
        }
      }
    }

    // Newton system.
    std::vector<RMatrix> Sinv(nb);
    std::vector<Eigen::LLT<RMatrix>> cholX(nb), cholS(nb);
    bool ok = true;
    for (int b = 0; b < nb; ++b) {
      cholX[b].compute(pt.X[b]);
      cholS[b].compute(pt.S[b]);
      if (cholX[b].info() != Eigen::Success || cholS[b].info() != Eigen::Success) ok = false;
      Sinv[b] = cholS[b].solve(RMatrix::Identity(L.size[b], L.size[b]));
      Sinv[b] = sym(Sinv[b]);
    }
    if (!ok) {
      best.message = "lost positive definiteness";
      break;
    }

    RMatrix M = RMatrix::Zero(N, N);
    for (int b = 0; b < nb; ++b) {
      const int n = L.size[b];
      const RMatrix& X = pt.X[b];
      const RMatrix& Si = Sinv[b];
      for (const auto& [j, trj] : L.A[b]) {
        // G = X A_j S⁻¹
        std::map<int, RVector> cols;
        for (const auto& t : trj) {
          auto it2 = cols.find(t.q);
          if (it2 == cols.end()) it2 = cols.emplace(t.q, RVector::Zero(n)).first;
          it2->second += t.v * X.col(t.p);
        }
        RMatrix G = RMatrix::Zero(n, n);
        for (const auto& [q, c] : cols) G.noalias() += c * Si.row(q);
        for (const auto& [i, tri] : L.A[b]) {
          double s = 0.0;
          for (const auto& t : tri) s += t.v * G(t.q, t.p);
          M(i, j) += s;
        }
      }
    }
    for (int k = 0; k < L.nlp; ++k) {
      const double w = pt.x(k) / pt.s(k);
      for (const auto& [i, ai] : L.A_lp[k])
        for (const auto& [j, aj] : L.A_lp[k]) M(i, j) += w * ai * aj;
    }
    M = sym(M);

    KktSolver kkt;
    if (!kkt.factor(M, L.E)) {
      best.message = "singular Newton system";
      if (it > 0) break;
    }

    auto direction = [&](double sigma_mu, const Dir* corr) {
      Dir d;
      std::vector<RMatrix> U(nb);
      for (int b = 0; b < nb; ++b) {
        RMatrix T = sigma_mu * Sinv[b] - pt.X[b] - pt.X[b] * Rd[b] * Sinv[b];
        if (corr) T -= corr->X[b] * corr->S[b] * Sinv[b];
        U[b] = sym(T);
      }
      RVector u_lp = (sigma_mu - (pt.x.array() * rd_lp.array())).matrix();
      u_lp = u_lp.cwiseQuotient(pt.s) - pt.x;
      if (corr) u_lp -= corr->x.cwiseProduct(corr->s).cwiseQuotient(pt.s);
      const RVector h = Rp - apply_A(L, U, u_lp);
      kkt.solve(h, Re, d.y, d.lam);
      std::vector<RMatrix> ATdy;
      RVector ATdy_lp;
      apply_AT(L, d.y, ATdy, ATdy_lp);
      d.X.resize(nb);
      d.S.resize(nb);
      for (int b = 0; b < nb; ++b) {
        d.S[b] = Rd[b] - ATdy[b];
        d.X[b] = sym(U[b] + pt.X[b] * ATdy[b] * Sinv[b]);
      }
      d.s = rd_lp - ATdy_lp;
      d.x = u_lp + pt.x.cwiseProduct(ATdy_lp).cwiseQuotient(pt.s);
      return d;
    };

    auto steps = [&](const Dir& d, double& ap, double& ad) {
      ap = 1e300;
      ad = 1e300;
      for (int b = 0; b < nb; ++b) {
        ap = max_step(cholX[b], d.X[b], ap);
        ad = max_step(cholS[b], d.S[b], ad);
      }
      ap = max_step_lp(pt.x, d.x, ap);
      ad = max_step_lp(pt.s, d.s, ad);
    };

    const Dir pred = direction(0.0, nullptr);
    double ap = 0, ad = 0;
    steps(pred, ap, ad);
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);
    double gap_aff = 0.0;
    for (int b = 0; b < nb; ++b)
      gap_aff += dot(pt.X[b] + ap * pred.X[b], pt.S[b] + ad * pred.S[b]);
    gap_aff += (pt.x + ap * pred.x).dot(pt.s + ad * pred.s);
    double sigma = std::pow(std::max(gap_aff, 0.0) / gap, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);
    const double gamma = 0.9 + 0.09 * std::min(ap, ad);

    const Dir d = direction(sigma * mu, &pred);
    steps(d, ap, ad);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    for (int b = 0; b < nb; ++b) {
      pt.X[b] = sym(pt.X[b] + ap * d.X[b]);
      pt.S[b] = sym(pt.S[b] + ad * d.S[b]);
    }
    pt.x += ap * d.x;
    pt.s += ad * d.s;
    if (neq) pt.lam += ap * d.lam;
    pt.y += ad * d.y;

    if (ap < 1e-9 && ad < 1e-9) {
      if (++stall >= 3) {
        best.message = "step length stalled";
        break;
      }
    } else {
      stall = 0;
    }
  }
  if (best.message.empty()) best.message = "iteration limit reached";
  // stalled near the optimum: accept the best iterate if it is within a small factor
  if (best_score <= kNearOptimalFactor) {
    best.message = "converged to reduced accuracy (" + best.message + ")";
    best.status = SolveStatus::optimal;
    return best;
  }
  best.status = SolveStatus::numerical_failure;
  return best;
}

}  // namespace

double default_gap_tol() {
  if (const char* env = std::getenv("QEDIST_SOLVER_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0 && std::isfinite(v)) return v;
  }
  return 1e-8;
}

double evaluate(const ScalarExpr& e, const std::vector<double>& z) {
  double s = e.constant;
  for (const auto& [v, c] : e.terms) s += c * z.at(v);
  return s;
}

CMatrix evaluate(const MatrixExpr& e, const std::vector<double>& z) {
  CMatrix m = e.constant;
  for (const auto& [v, entries] : e.terms) {
    const double zv = z.at(v);
    for (const auto& en : entries) m(en.row, en.col) += zv * en.value;
  }
  return m;
}

SolveReport solve(const ConicProgram& p, const SolveOptions& opts) {
  const double gap_tol = opts.gap_tol.value_or(default_gap_tol());
  if (!opts.dump_path.empty()) {
    std::ofstream out(opts.dump_path);
    if (!out) throw InputError("cannot open SDPA dump file " + opts.dump_path);
    write_sdpa(p, out);
  }
  const Lowered L = lower(p);
  const Outcome o = run_ipm(L, gap_tol, opts.max_iterations);

  SolveReport r;
  r.status = o.status;
  r.iterations = o.iterations;
  r.message = o.message;
  if (o.status == SolveStatus::infeasible || o.status == SolveStatus::unbounded) return r;

  const double sgn = L.flip ? -1.0 : 1.0;
  r.primal_value = sgn * o.pobj + L.obj_const;
  r.dual_value = sgn * o.dobj + L.obj_const;
  r.duality_gap = std::abs(r.primal_value - r.dual_value);
  r.primal_infeasibility = o.pinf;
  r.dual_infeasibility = o.dinf;
  r.assignment.assign(o.pt.y.data(), o.pt.y.data() + o.pt.y.size());

  for (const auto& v : p.matrix_vars()) {
    const int n = v.d_a * v.d_b;
    CMatrix m = CMatrix::Zero(n, n);
    int k = v.first;
    for (int i = 0; i < n; ++i) m(i, i) = r.assignment[k++];
    if (v.shape != VariableShape::diagonal) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double re = r.assignment[k++];
          double im = v.shape == VariableShape::hermitian ? r.assignment[k++] : 0.0;
          m(i, j) = cplx(re, im);
          m(j, i) = cplx(re, -im);
        }
    }
    r.matrices.emplace(v.name, HermitianOperator(v.d_a, v.d_b, std::move(m)));
  }
  for (const auto& [name, idx] : p.scalar_vars()) r.scalars[name] = r.assignment[idx];

  const auto& psd = p.psd_constraints();
  for (std::size_t b = 0; b < psd.size(); ++b) {
    if (psd[b].label.empty()) continue;
    const RMatrix& X = o.pt.X[b];
    CMatrix y = L.complex[b] ? complex_from_embedding(X) : CMatrix(X.cast<cplx>());
    y = (0.5 * (y + y.adjoint())).eval();
    r.psd_duals.emplace(psd[b].label,
                        HermitianOperator(psd[b].expr.d_a, psd[b].expr.d_b, std::move(y)));
  }
  for (std::size_t k = 0; k < p.nonneg_constraints().size(); ++k) {
    const auto& lbl = p.nonneg_constraints()[k].label;
    if (!lbl.empty()) r.scalar_duals[lbl] = o.pt.x(k);
  }
  for (std::size_t k = 0; k < p.equal_constraints().size(); ++k) {
    const auto& lbl = p.equal_constraints()[k].label;
    if (!lbl.empty()) r.scalar_duals[lbl] = -o.pt.lam(k);
  }
  return r;
}

void require_optimal(const SolveReport& r, const std::string& context) {
  if (r.optimal()) return;
  std::ostringstream os;
  os << context << ": solver status " << to_string(r.status) << " (" << r.message
     << ", iterations " << r.iterations;
  if (r.status == SolveStatus::numerical_failure) {
    os << ", gap " << r.duality_gap << ", infeasibility " << r.primal_infeasibility << "/"
       << r.dual_infeasibility;
  }
  os << ")";
  throw SolverError(os.str());
}

HermitianOperator extract_certificate(const SolveReport& r, const std::string& name) {
  require_optimal(r, "extract_certificate");
  auto it = r.matrices.find(name);
  if (it == r.matrices.end()) throw InputError("unknown variable name: " + name);
  return it->second;
}

double extract_scalar(const SolveReport& r, const std::string& name) {
  require_optimal(r, "extract_scalar");
  auto it = r.scalars.find(name);
  if (it == r.scalars.end()) throw InputError("unknown variable name: " + name);
  return it->second;
}

HermitianOperator extract_dual(const SolveReport& r, const std::string& label) {
  require_optimal(r, "extract_dual");
  auto it = r.psd_duals.find(label);
  if (it == r.psd_duals.end()) throw InputError("unknown constraint label: " + label);
  return it->second;
}

double extract_scalar_dual(const SolveReport& r, const std::string& label) {
  require_optimal(r, "extract_scalar_dual");
  auto it = r.scalar_duals.find(label);
  if (it == r.scalar_duals.end()) throw InputError("unknown constraint label: " + label);
  return it->second;
}

void write_sdpa(const ConicProgram& p, std::ostream& out) {
  const Lowered L = lower(p);
  const int nb = static_cast<int>(L.size.size());
  const int neq = static_cast<int>(L.E.rows());
  const int nlp = L.nlp + 2 * neq;
  out.precision(17);
  out << "\"qedist program: max/min folded into min\"\n";
  out << L.nvars << "\n" << nb + (nlp > 0 ? 1 : 0) << "\n";
  for (int s : L.size) out << s << " ";
  if (nlp > 0) out << -nlp;
  out << "\n";
  // SDPA: min cᵀz s.t. Σ z_i F_i − F_0 ⪰ 0. Here F_i = −A_i, F_0 = −C and c = −b.
  for (int v = 0; v < L.nvars; ++v) out << -L.b(v) << (v + 1 < L.nvars ? " " : "\n");
  if (L.nvars == 0) out << "\n";
  auto emit = [&](int mat, int blk, int i, int j, double v) {
    if (v != 0.0) out << mat << " " << blk << " " << i + 1 << " " << j + 1 << " " << v << "\n";
  };
  for (int b = 0; b < nb; ++b)
    for (int i = 0; i < L.size[b]; ++i)
      for (int j = i; j < L.size[b]; ++j) emit(0, b + 1, i, j, -L.C[b](i, j));
  for (int b = 0; b < nb; ++b)
    for (const auto& [var, tr] : L.A[b])
      for (const auto& t : tr)
        if (t.p <= t.q) emit(var + 1, b + 1, t.p, t.q, -t.v);
  if (nlp > 0) {
    const int blk = nb + 1;
    for (int k = 0; k < L.nlp; ++k) {
      emit(0, blk, k, k, -L.c_lp(k));
      for (const auto& [var, a] : L.A_lp[k]) emit(var + 1, blk, k, k, -a);
    }
    for (int e = 0; e < neq; ++e) {
      const int r1 = L.nlp + 2 * e, r2 = r1 + 1;
      emit(0, blk, r1, r1, L.f(e));
      emit(0, blk, r2, r2, -L.f(e));
      for (int v = 0; v < L.nvars; ++v) {
        emit(v + 1, blk, r1, r1, L.E(e, v));
        emit(v + 1, blk, r2, r2, -L.E(e, v));
      }
    }
  }
}

}  // namespace qedist
