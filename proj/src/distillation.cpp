#include "qedist/distillation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "qedist/hypothesis.hpp"
#include "qedist/monotones.hpp"
#include "qedist/special_states.hpp"

namespace qedist {

OperationClass parse_operation_class(const std::string& name) {
  std::string n;
  for (char c : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (n == "ppt") return OperationClass::PPT;
  if (n == "ppt-pres") return OperationClass::PPT_PRESERVING;
  if (n == "pptplus-pres") return OperationClass::PPT_PLUS_PRESERVING;
  if (n == "rains-pres") return OperationClass::RAINS_PRESERVING;
  if (n == "sepp") return OperationClass::SEPP;
  if (n == "1locc-pure" || n == "1locc") return OperationClass::ONE_WAY_LOCC_PURE;
  throw InputError("unknown operation class '" + name +
                   "' (expected ppt|ppt-pres|pptplus-pres|rains-pres|sepp|1locc-pure)");
}

std::string to_string(OperationClass o) {
  switch (o) {
    case OperationClass::PPT: return "ppt";
    case OperationClass::PPT_PRESERVING: return "ppt-pres";
    case OperationClass::PPT_PLUS_PRESERVING: return "pptplus-pres";
    case OperationClass::RAINS_PRESERVING: return "rains-pres";
    case OperationClass::SEPP: return "sepp";
    case OperationClass::ONE_WAY_LOCC_PURE: return "1locc-pure";
  }
  return "?";
}

SetTag gauge_set(OperationClass o) {
  switch (o) {
    case OperationClass::PPT:
    case OperationClass::PPT_PRESERVING: return SetTag::PPT_PRIME;
    case OperationClass::RAINS_PRESERVING: return SetTag::RAINS;
    case OperationClass::PPT_PLUS_PRESERVING: return SetTag::PPT_PLUS;
    case OperationClass::SEPP:
    case OperationClass::ONE_WAY_LOCC_PURE: return SetTag::SEP;
  }
  return SetTag::SEP;
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::fidelity: return "fidelity";
    case Quantity::rate_eps: return "rate_eps";
    case Quantity::rate_zero_error: return "rate_zero_error";
    case Quantity::assisted_fidelity: return "assisted_fidelity";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::sdp: return "sdp";
    case Method::closed_form: return "closed_form";
    case Method::bisection: return "bisection";
  }
  return "?";
}

std::string to_string(StateStructure s) {
  switch (s) {
    case StateStructure::pure: return "pure";
    case StateStructure::isotropic: return "isotropic";
    case StateStructure::max_correlated: return "max_correlated";
    case StateStructure::general: return "general";
  }
  return "?";
}

StateStructure detect_structure(const DensityOperator& rho) {
  if (support_rank(rho) == 1) return StateStructure::pure;
  if (rho.d_a() == rho.d_b() && rho.d_a() >= 2) {
    if (is_isotropic(rho, 1e-9)) return StateStructure::isotropic;
    if (max_correlated_image(rho.op(), 1e-9)) return StateStructure::max_correlated;
  }
  return StateStructure::general;
}

std::string rate_string(long k) { return "log2 " + std::to_string(k); }

namespace {

SchmidtVector schmidt_of(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  const CVector psi = es.eigenvectors().col(rho.dim() - 1);
  return schmidt_decompose(PureState(rho.d_a(), rho.d_b(), psi / psi.norm())).coefficients;
}

IsotropicState iso_of(const DensityOperator& rho) {
  return {rho.d_a(), inner(max_entangled(rho.d_a()).op(), rho.op())};
}

CMatrix maxcorr_of(const DensityOperator& rho) { return *max_correlated_image(rho.op(), 1e-9); }

void check_m(int m) {
  if (m < 1) throw InputError("m must be a positive integer");
}

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw InputError("epsilon must lie in [0, 1)");
}

constexpr double kRevalidateTol = 1e-6;

// Re-checks the returned witness: 0 ⪯ W ⪯ 1, the polar bound and ⟨ρ,W⟩.
void revalidate(const DensityOperator& rho, SetTag q, double m, const MonotoneValue& v) {
  const HermitianOperator& w = *v.witness;
  std::ostringstream why;
  if (w.min_eigenvalue() < -kRevalidateTol) why << "W not PSD (λmin=" << w.min_eigenvalue() << ") ";
  if (w.max_eigenvalue() > 1.0 + kRevalidateTol) why << "W exceeds 1 (λmax=" << w.max_eigenvalue() << ") ";
  const double viol = polar_certificate_violation(q, w, 1.0 / m, v.report, "p_");
  if (viol > kRevalidateTol) why << "gauge bound violated by " << viol << ' ';
  const double overlap = inner(rho.op(), w);
  if (std::abs(overlap - v.value) > kRevalidateTol * (1.0 + std::abs(v.value))) {
    why << "objective mismatch " << overlap << " vs " << v.value;
  }
  if (!why.str().empty()) throw SolverError("fidelity certificate rejected: " + why.str());
}

DistillationResult sdp_fidelity(const DensityOperator& rho, SetTag q, int m) {
  const MonotoneValue v = g_m_detailed(rho, q, m);
  revalidate(rho, q, m, v);
  DistillationResult r;
  r.value = v.value;
  r.certificate = v.witness;
  r.method = Method::sdp;
  r.solver_iterations = v.report.iterations;
  r.duality_gap = v.report.duality_gap;
  return r;
}

[[noreturn]] void sepp_intractable() {
  throw IntractableError(
      "SEPP is exact only for pure, isotropic and maximally correlated states; "
      "pass the bound flag for a PPT+-preserving lower bound");
}

// Upper bound on ⟨ρ,W⟩ when Γ_{Q°}(W) ≤ 1/m, times m.
double fidelity_scale(const DensityOperator& rho, SetTag q) {
  if (q == SetTag::PPT_PRIME || q == SetTag::RAINS) return trace_norm(partial_transpose(rho.op()));
  return rho.op().max_eigenvalue() * rho.dim();
}

long m_upper(double scale, double eps) {
  return static_cast<long>(std::floor(scale / (1.0 - eps - kFloorGuard))) + 1;
}

struct TwoRoutes {
  long via_gauge = 0;
  long via_bisection = 0;
  double gauge = 0.0;
  std::optional<HermitianOperator> test;
  std::function<double(long)> fid;
};

void finish_rate(DistillationResult& r, const TwoRoutes& t, const std::string& context) {
  if (t.via_gauge != t.via_bisection) {
    std::ostringstream os;
    os << context << ": rate routes disagree (gauge " << t.gauge << " gives k=" << t.via_gauge
       << ", bisection gives k=" << t.via_bisection << ')';
    if (t.fid) {
      const long a = std::min(t.via_gauge, t.via_bisection);
      const long b = std::max(t.via_gauge, t.via_bisection);
      os << "; F(" << a << ")=" << t.fid(a) << ", F(" << b << ")=" << t.fid(b);
    }
    throw SolverError(os.str());
  }
  r.k = t.via_gauge;
  r.value = std::log2(static_cast<double>(r.k));
  r.certificate = t.test;
  std::ostringstream os;
  os << "gauge=" << t.gauge << "; both routes give k=" << r.k;
  r.note = r.note.empty() ? os.str() : r.note + "; " + os.str();
}

TwoRoutes sdp_routes(const DensityOperator& rho, SetTag q, double eps) {
  TwoRoutes t;
  const DhSetResult a = d_h_min_over_set_detailed(rho, q, eps);
  t.gauge = a.gauge;
  t.via_gauge = floor_reciprocal(a.gauge);
  t.test = a.test;
  t.fid = [&rho, q](long m) { return g_m(rho, q, static_cast<double>(m)); };
  t.via_bisection = largest_feasible_m(t.fid, eps, m_upper(fidelity_scale(rho, q), eps));
  return t;
}

}  // namespace

DistillationResult fidelity(const DensityOperator& rho, OperationClass o, int m, bool allow_bound) {
  check_m(m);
  DistillationResult r;
  if (o != OperationClass::SEPP && o != OperationClass::ONE_WAY_LOCC_PURE) {
    r = sdp_fidelity(rho, gauge_set(o), m);
  } else {
    const StateStructure s = detect_structure(rho);
    if (o == OperationClass::ONE_WAY_LOCC_PURE && s != StateStructure::pure) {
      throw InputError("one-way LOCC is supported on pure states only");
    }
    switch (s) {
      case StateStructure::pure:
        r.value = pure_fidelity(schmidt_of(rho), m);
        r.method = Method::closed_form;
        r.note = "pure state closed form";
        break;
      case StateStructure::isotropic:
        r.value = isotropic_fidelity(iso_of(rho), m);
        r.method = Method::closed_form;
        r.note = "isotropic closed form";
        break;
      case StateStructure::max_correlated:
        r.value = maxcorr_fidelity(maxcorr_of(rho), m);
        r.method = Method::sdp;
        r.note = "coherence reduction of a maximally correlated state";
        break;
      case StateStructure::general:
        if (!allow_bound) sepp_intractable();
        r = sdp_fidelity(rho, SetTag::PPT_PLUS, m);
        r.lower_bound = true;
        r.note = "PPT+-preserving value, a lower bound on SEPP";
        break;
    }
  }
  r.quantity = Quantity::fidelity;
  r.op = o;
  r.m = m;
  return r;
}

DistillationResult rate_eps(const DensityOperator& rho, OperationClass o, double eps, bool allow_bound) {
  check_eps(eps);
  DistillationResult r;
  r.quantity = Quantity::rate_eps;
  r.op = o;
  r.epsilon = eps;
  r.method = Method::bisection;
  TwoRoutes t;
  if (o != OperationClass::SEPP && o != OperationClass::ONE_WAY_LOCC_PURE) {
    t = sdp_routes(rho, gauge_set(o), eps);
  } else {
    const StateStructure s = detect_structure(rho);
    if (o == OperationClass::ONE_WAY_LOCC_PURE && s != StateStructure::pure) {
      throw InputError("one-way LOCC is supported on pure states only");
    }
    switch (s) {
      case StateStructure::pure: {
        const SchmidtVector xi = schmidt_of(rho);
        const QcqpResult q = pure_rate_qcqp(xi, eps);
        t.gauge = q.min_linf_sq;
        t.via_gauge = q.k;
        t.via_bisection = pure_rate_k(xi, eps);
        t.fid = [xi](long m) { return pure_fidelity(xi, static_cast<int>(m)); };
        r.method = Method::closed_form;
        r.note = "pure state: QCQP and norm scan";
        break;
      }
      case StateStructure::isotropic: {
        const IsotropicState iso = iso_of(rho);
        t.gauge = isotropic_sep_gauge(iso, eps);
        t.via_gauge = floor_reciprocal(t.gauge);
        t.via_bisection = isotropic_rate_k(iso, eps);
        t.fid = [iso](long m) { return isotropic_fidelity(iso, static_cast<int>(m)); };
        r.method = Method::closed_form;
        r.note = "isotropic: twirled LP and closed-form bisection";
        break;
      }
      case StateStructure::max_correlated: {
        const CMatrix img = maxcorr_of(rho);
        t.via_gauge = maxcorr_rate_k(img, eps);
        t.gauge = 1.0 / static_cast<double>(t.via_gauge);
        t.via_bisection = maxcorr_rate_scan_k(img, eps);
        t.fid = [img](long m) { return maxcorr_fidelity(img, static_cast<int>(m)); };
        r.note = "coherence reduction of a maximally correlated state";
        break;
      }
      case StateStructure::general:
        if (!allow_bound) sepp_intractable();
        t = sdp_routes(rho, SetTag::PPT_PLUS, eps);
        r.lower_bound = true;
        r.note = "PPT+-preserving rate, a lower bound on SEPP";
        break;
    }
  }
  finish_rate(r, t, "rate_eps(" + to_string(o) + ")");
  return r;
}

DistillationResult rate_zero_error(const DensityOperator& rho, OperationClass o) {
  DistillationResult r;
  r.quantity = Quantity::rate_zero_error;
  r.op = o;
  const HermitianOperator pi = support_projector(rho);
  double g = 0.0;
  switch (o) {
    case OperationClass::PPT:
    case OperationClass::PPT_PRESERVING: {
      const DhSetResult a = d_h_min_over_set_detailed(rho, SetTag::PPT_PRIME, 0.0);
      g = a.gauge;
      r.certificate = a.test;
      r.method = Method::sdp;
      r.solver_iterations = a.report.iterations;
      r.duality_gap = a.report.duality_gap;
      break;
    }
    case OperationClass::PPT_PLUS_PRESERVING:
    case OperationClass::RAINS_PRESERVING: {
      const GaugeResult a = gauge_polar_detailed(gauge_set(o), pi);
      g = a.value;
      r.certificate = pi;
      r.method = Method::sdp;
      r.solver_iterations = a.report.iterations;
      r.duality_gap = a.report.duality_gap;
      break;
    }
    case OperationClass::ONE_WAY_LOCC_PURE:
      if (support_rank(rho) != 1) throw InputError("one-way LOCC is supported on pure states only");
      [[fallthrough]];
    case OperationClass::SEPP:
      g = gauge_sep_projector(pi);
      r.certificate = pi;
      r.method = Method::closed_form;
      break;
  }
  r.k = floor_reciprocal(g);
  r.value = std::log2(static_cast<double>(r.k));
  r.note = "gauge=" + std::to_string(g);
  return r;
}

double asymptotic_zero_error_rains(const DensityOperator& rho) {
  return -std::log2(gauge_polar(SetTag::RAINS, support_projector(rho)));
}

// ---- assisted distillation -------------------------------------------------

namespace {

// Pure state with the Schmidt bases of psi and squared coefficients capped at
// 1/m by water-filling.
CVector cap_schmidt(const PureState& psi, int m) {
  const SchmidtDecomposition sd = schmidt_decompose(psi);
  const int r = static_cast<int>(sd.coefficients.size());
  std::vector<double> s(r);
  for (int i = 0; i < r; ++i) s[i] = sd.coefficients[i] * sd.coefficients[i] + 1e-9;
  const double cap = 1.0 / m;
  auto mass = [&](double c) {
    double t = 0.0;
    for (double v : s) t += std::min(cap, c * v);
    return t;
  };
  double lo = 0.0, hi = 1.0;
  while (mass(hi) < 1.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < 1.0 ? lo : hi) = mid;
  }
  const int da = psi.d_a(), db = psi.d_b();
  CVector out = CVector::Zero(da * db);
  for (int k = 0; k < r; ++k) {
    const double amp = std::sqrt(std::min(cap, hi * s[k]));
    for (int i = 0; i < da; ++i) {
      for (int j = 0; j < db; ++j) out(i * db + j) += amp * sd.basis_a(i, k) * sd.basis_b(j, k);
    }
  }
  return out / out.norm();
}

}  // namespace

DistillationResult assisted_fidelity(const DensityOperator& rho, OperationClass o, int m,
                                     AssistedMode mode, const AssistedOptions& opts) {
  check_m(m);
  if (mode == AssistedMode::exact_pure) {
    if (support_rank(rho) != 1) throw InputError("exact assisted fidelity needs a pure state");
    DistillationResult r = fidelity(rho, o, m, false);
    r.quantity = Quantity::assisted_fidelity;
    r.note = "a pure state is its own optimal decomposition";
    return r;
  }
  const int da = rho.d_a(), db = rho.d_b();
  if (m > std::min(da, db)) throw InputError("assisted bound needs m ≤ min(d_a, d_b)");
  std::vector<CVector> cands;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  for (int i = 0; i < rho.dim(); ++i) cands.push_back(cap_schmidt(PureState(da, db, es.eigenvectors().col(i)), m));
  {
    CVector psi_m = CVector::Zero(da * db);
    for (int i = 0; i < m; ++i) psi_m(i * db + i) = 1.0 / std::sqrt(static_cast<double>(m));
    cands.push_back(psi_m);
  }
  for (int s = 0; s < opts.samples; ++s) {
    cands.push_back(cap_schmidt(random_pure_state(da, db, opts.seed + 1000003ULL * (s + 1)), m));
  }
  std::vector<std::pair<double, int>> scored;
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    scored.push_back({(cands[i].adjoint() * rho.matrix() * cands[i])(0, 0).real(), i});
  }
  std::sort(scored.begin(), scored.end(), std::greater<>());
  double best = scored.front().first;
  CMatrix best_omega = cands[scored.front().second] * cands[scored.front().second].adjoint();
  const int top = std::min<int>(4, static_cast<int>(scored.size()));
  for (int i = 0; i < top; ++i) {
    for (int j = i + 1; j < top; ++j) {
      const CVector& u = cands[scored[i].second];
      const CVector& v = cands[scored[j].second];
      for (int step = 1; step < 10; ++step) {
        const double p = 0.1 * step;
        const CMatrix omega = p * u * u.adjoint() + (1.0 - p) * v * v.adjoint();
        const double f = fidelity(rho, DensityOperator(da, db, omega));
        if (f > best) {
          best = f;
          best_omega = omega;
        }
      }
    }
  }
  DistillationResult r;
  r.quantity = Quantity::assisted_fidelity;
  r.op = o;
  r.m = m;
  r.value = best;
  r.lower_bound = true;
  r.method = Method::closed_form;
  r.certificate = HermitianOperator(da, db, best_omega, 1e-8);
  r.note = "sampled lower bound over " + std::to_string(cands.size()) +
           " capped pure states and pairwise mixtures; independent of the operation class";
  return r;
}

}  // namespace qedist
