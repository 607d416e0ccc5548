#include "qedist/special_states.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "qedist/hypothesis.hpp"
#include "qedist/monotones.hpp"

namespace qedist {

long floor_reciprocal(double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw SolverError("cannot invert gauge value " + std::to_string(g));
  return static_cast<long>(std::floor((1.0 + kFloorGuard) / g));
}

long largest_feasible_m(const std::function<double(long)>& fid, double eps, long m_up) {
  const double thr = 1.0 - eps - kFloorGuard;
  long lo = 1, hi = std::max<long>(m_up, 2);
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (fid(mid) >= thr) lo = mid;
    else hi = mid;
  }
  return lo;
}

namespace {

std::vector<double> sorted_abs(std::span<const double> x) {
  std::vector<double> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [](double v) { return std::abs(v); });
  std::sort(y.begin(), y.end(), std::greater<>());
  return y;
}

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InputError("epsilon must lie in [0, 1)");
}

// max cᵀx over {x ∈ R² : a_i·x ≤ b_i}, bounded and non-empty, by vertex enumeration.
struct HalfPlane {
  double a0, a1, b;
};

double lp2_max(double c0, double c1, const std::vector<HalfPlane>& rows) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      const HalfPlane& p = rows[i];
      const HalfPlane& q = rows[j];
      const double det = p.a0 * q.a1 - p.a1 * q.a0;
      if (std::abs(det) < 1e-14) continue;
      const double x0 = (p.b * q.a1 - p.a1 * q.b) / det;
      const double x1 = (p.a0 * q.b - p.b * q.a0) / det;
      bool ok = true;
      for (const HalfPlane& r : rows) {
        const double scale = 1.0 + std::abs(r.b);
        if (r.a0 * x0 + r.a1 * x1 > r.b + 1e-12 * scale) {
          ok = false;
          break;
        }
      }
      if (ok) best = std::max(best, c0 * x0 + c1 * x1);
    }
  }
  if (!std::isfinite(best)) throw SolverError("two-variable LP has no feasible vertex");
  return best;
}

// (α, β) ↦ αΨ_d + β1 with 0 ⪯ W ⪯ 1
std::vector<HalfPlane> unit_interval_rows() {
  return {{0, -1, 0}, {-1, -1, 0}, {1, 1, 1}};
}

}  // namespace

// ---- m-distillation norm ---------------------------------------------------

MNormResult m_distillation_norm(std::span<const double> x, int m) {
  if (m < 1) throw InputError("m must be a positive integer");
  const std::vector<double> y = sorted_abs(x);
  const int d = static_cast<int>(y.size());
  MNormResult r;
  if (m > d) {
    r.head = std::accumulate(y.begin(), y.end(), 0.0);
    r.value = r.head;
    return r;
  }
  std::vector<double> suffix(d + 1, 0.0);
  for (int i = d - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + y[i] * y[i];
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= m; ++k) {
    const double ratio = suffix[m - k] / k;
    if (ratio < best * (1.0 - 1e-13)) {
      best = ratio;
      r.k_star = k;
    }
  }
  for (int i = 0; i < m - r.k_star; ++i) r.head += y[i];
  r.tail = std::sqrt(suffix[m - r.k_star]);
  r.value = r.head + std::sqrt(static_cast<double>(r.k_star)) * r.tail;
  return r;
}

MNormResult m_distillation_norm(const SchmidtVector& xi, int m) {
  return m_distillation_norm(std::span<const double>(xi.coefficients()), m);
}

double m_distillation_norm_dual(std::span<const double> x, int m) {
  if (m < 1) throw InputError("m must be a positive integer");
  std::vector<double> y = sorted_abs(x);
  while (!y.empty() && y.back() == 0.0) y.pop_back();
  if (static_cast<int>(y.size()) <= m) return std::accumulate(y.begin(), y.end(), 0.0);
  auto mass = [&](double c) {
    double s = 0.0;
    for (double v : y) s += std::pow(std::min(1.0, c * v), 2);
    return s;
  };
  double lo = 0.0, hi = 1.0 / y.back();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) <= m ? lo : hi) = mid;
  }
  double v = 0.0;
  for (double t : y) v += t * std::min(1.0, lo * t);
  return v;
}

std::vector<double> majorisation_ansatz(const SchmidtVector& xi, int m) {
  const int d = static_cast<int>(xi.size());
  if (m < 1 || m > d) throw InputError("majorisation ansatz needs 1 ≤ m ≤ d");
  const MNormResult r = m_distillation_norm(xi, m);
  std::vector<double> eta(d, 0.0);
  for (int i = 0; i < m - r.k_star; ++i) eta[i] = xi[i];
  const double flat = r.tail / std::sqrt(static_cast<double>(r.k_star));
  for (int i = m - r.k_star; i < m; ++i) eta[i] = flat;
  return eta;
}

bool schmidt_majorised(std::span<const double> a, std::span<const double> b, double tol) {
  std::vector<double> x = sorted_abs(a), y = sorted_abs(b);
  const std::size_t n = std::max(x.size(), y.size());
  x.resize(n, 0.0);
  y.resize(n, 0.0);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i] * x[i];
    sy += y[i] * y[i];
    if (sx > sy + tol) return false;
  }
  return true;
}

// ---- pure states -----------------------------------------------------------

double pure_fidelity(const SchmidtVector& xi, int m) {
  const double n = m_distillation_norm(xi, m).value;
  return n * n / m;
}

long pure_rate_k(const SchmidtVector& xi, double eps) {
  check_eps(eps);
  const double thr = 1.0 - eps - kFloorGuard;
  const long top = static_cast<long>(std::floor(static_cast<double>(xi.size()) / thr)) + 1;
  for (long m = top; m > 1; --m) {
    if (pure_fidelity(xi, static_cast<int>(m)) >= thr) return m;
  }
  return 1;
}

double pure_rate(const SchmidtVector& xi, double eps) {
  return std::log2(static_cast<double>(pure_rate_k(xi, eps)));
}

QcqpResult pure_rate_qcqp(const SchmidtVector& xi, double eps) {
  check_eps(eps);
  const int d = static_cast<int>(xi.size());
  QcqpResult out;
  if (eps == 0.0) {
    // ω = ξ is the only feasible point
    out.omega = xi.coefficients();
    out.min_linf_sq = xi.max() * xi.max();
    out.k = floor_reciprocal(out.min_linf_sq);
    return out;
  }
  ConicProgram p;
  const ScalarExpr u = p.scalar("u");
  std::vector<ScalarExpr> w;
  MatrixExpr block = constant_expr(CMatrix::Identity(d + 1, d + 1), d + 1, 1);
  ScalarExpr overlap;
  for (int i = 0; i < d; ++i) {
    w.push_back(p.scalar("w" + std::to_string(i)));
    p.nonneg(w.back());
    p.nonneg(u - w.back());
    overlap = overlap + xi[i] * w.back();
    block.terms.push_back({w.back().terms.front().first, {{0, i + 1, 1.0}, {i + 1, 0, 1.0}}});
  }
  p.nonneg(overlap - std::sqrt(1.0 - eps));
  p.psd(block, "norm");
  p.minimize(u);
  const SolveReport r = solve(p);
  require_optimal(r, "pure_rate_qcqp");
  out.min_linf_sq = r.primal_value * r.primal_value;
  for (int i = 0; i < d; ++i) out.omega.push_back(extract_scalar(r, "w" + std::to_string(i)));
  out.k = floor_reciprocal(out.min_linf_sq);
  return out;
}

long pure_zero_error_k(const SchmidtVector& xi) { return floor_reciprocal(xi.max() * xi.max()); }

// ---- isotropic states ------------------------------------------------------

namespace {

void check_iso(const IsotropicState& iso) {
  if (iso.d < 2) throw InputError("isotropic state needs d ≥ 2");
  if (!(iso.f >= -1e-12 && iso.f <= 1.0 + 1e-12)) throw InputError("isotropic f must lie in [0, 1]");
}

}  // namespace

double isotropic_fidelity(const IsotropicState& iso, int m) {
  check_iso(iso);
  if (m < 1) throw InputError("m must be a positive integer");
  const double d = iso.d, f = iso.f;
  if (f <= 1.0 / d) return 1.0 / m;
  if (m >= iso.d) return f * d / m;
  return (d * f - 1.0) / (d - 1.0) + d * (1.0 - f) / (m * (d - 1.0));
}

double isotropic_t_m(const IsotropicState& iso, double m) {
  check_iso(iso);
  const double d = iso.d;
  if (iso.f <= 1.0 / d) return 0.0;
  return std::min(m, d - 1.0) * (d * iso.f - 1.0) / (d - 1.0);
}

double isotropic_sep_lp(const DensityOperator& rho, int m) {
  if (rho.d_a() != rho.d_b()) throw DimensionError("isotropic_sep_lp needs d_a = d_b");
  if (m < 1) throw InputError("m must be a positive integer");
  const double d = rho.d_a(), md = m;
  const double p = inner(max_entangled(rho.d_a()).op(), rho.op());
  // Choi operator of a twirled channel: α Ψ_d ⊗ Ψ_m + β 1 ⊗ Ψ_m + ... is
  // separable iff these hold (with the unit-interval conditions).
  std::vector<HalfPlane> rows = unit_interval_rows();
  rows.push_back({0, 1, 1});
  rows.push_back({md, -d * md, d});
  rows.push_back({-md, d * md, d});
  rows.push_back({md, d * md, d});
  rows.push_back({-(md - d), -(d * d * md - d), 0});
  return lp2_max(p, 1.0, rows);
}

double isotropic_sep_gauge(const IsotropicState& iso, double eps) {
  check_iso(iso);
  check_eps(eps);
  const double d = iso.d, f = iso.f;
  std::vector<HalfPlane> base = unit_interval_rows();
  base.push_back({-f, -1, -(1.0 - eps)});
  // α ≥ 0: Γ = α/d + β
  std::vector<HalfPlane> pos = base;
  pos.push_back({-1, 0, 0});
  const double g_pos = -lp2_max(-1.0 / d, -1.0, pos);
  // α ≤ 0: Γ = β
  std::vector<HalfPlane> neg = base;
  neg.push_back({1, 0, 0});
  double g_neg = std::numeric_limits<double>::infinity();
  try {
    g_neg = -lp2_max(0.0, -1.0, neg);
  } catch (const SolverError&) {
  }
  return std::min(g_pos, g_neg);
}

long isotropic_rate_k(const IsotropicState& iso, double eps) {
  check_iso(iso);
  check_eps(eps);
  const long m_up = static_cast<long>(std::floor(iso.d / (1.0 - eps - kFloorGuard))) + 1;
  return largest_feasible_m([&](long m) { return isotropic_fidelity(iso, static_cast<int>(m)); },
                            eps, m_up);
}

// ---- maximally correlated states -------------------------------------------

namespace {

DensityOperator as_single_party(const CMatrix& rho_tilde) {
  return DensityOperator(static_cast<int>(rho_tilde.rows()), 1, rho_tilde);
}

}  // namespace

double maxcorr_fidelity(const CMatrix& rho_tilde, int m) {
  if (m < 1) throw InputError("m must be a positive integer");
  return g_m(as_single_party(rho_tilde), SetTag::INCOHERENT, m);
}

long maxcorr_rate_k(const CMatrix& rho_tilde, double eps) {
  const DhSetResult r = d_h_min_over_set_detailed(as_single_party(rho_tilde), SetTag::INCOHERENT, eps);
  return floor_reciprocal(r.gauge);
}

long maxcorr_rate_scan_k(const CMatrix& rho_tilde, double eps) {
  check_eps(eps);
  const DensityOperator t = as_single_party(rho_tilde);
  const double lmax = t.op().max_eigenvalue();
  const long m_up = static_cast<long>(std::floor(lmax * t.dim() / (1.0 - eps - kFloorGuard))) + 1;
  return largest_feasible_m(
      [&](long m) { return g_m(t, SetTag::INCOHERENT, static_cast<double>(m)); }, eps, m_up);
}

double maxcorr_rate(const CMatrix& rho_tilde, double eps) {
  return std::log2(static_cast<double>(maxcorr_rate_k(rho_tilde, eps)));
}

long maxcorr_zero_error_k(const CMatrix& rho_tilde) {
  const HermitianOperator pi = support_projector(as_single_party(rho_tilde));
  return floor_reciprocal(pi.matrix().diagonal().real().maxCoeff());
}

}  // namespace qedist
