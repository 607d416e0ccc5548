#include "qedist/repro.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "qedist/distillation.hpp"
#include "qedist/monotones.hpp"
#include "qedist/special_states.hpp"

namespace qedist {

Suite parse_suite(const std::string& name) {
  std::string n;
  for (char c : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (n == "pure") return Suite::pure;
  if (n == "isotropic") return Suite::isotropic;
  if (n == "maxcorr") return Suite::maxcorr;
  if (n == "appendix") return Suite::appendix;
  if (n == "hierarchy") return Suite::hierarchy;
  if (n == "zero_error" || n == "zero-error") return Suite::zero_error;
  throw InputError("unknown suite '" + name +
                   "' (expected pure|isotropic|maxcorr|appendix|hierarchy|zero_error)");
}

std::string to_string(Suite s) {
  switch (s) {
    case Suite::pure: return "pure";
    case Suite::isotropic: return "isotropic";
    case Suite::maxcorr: return "maxcorr";
    case Suite::appendix: return "appendix";
    case Suite::hierarchy: return "hierarchy";
    case Suite::zero_error: return "zero_error";
  }
  return "?";
}

bool ReproReport::passed() const {
  for (const ReproCase& c : cases)
    if (!c.pass) return false;
  return true;
}

namespace {

CVector ket(int d, std::initializer_list<std::pair<int, double>> terms) {
  CVector v = CVector::Zero(d * d);
  for (auto [i, a] : terms) v(i) = a;
  return v;
}

CMatrix proj(const CVector& v) { return v * v.adjoint(); }

const double kS = 1.0 / std::sqrt(2.0);

}  // namespace

DensityOperator counterexample_state() {
  // |ij⟩ ↦ 3i + j
  const CVector psi1 = ket(3, {{1, kS}, {3, kS}});
  const CVector psi2 = ket(3, {{2, kS}, {6, kS}});
  return DensityOperator(3, 3, 0.5 * proj(psi1) + 0.5 * proj(psi2));
}

HermitianOperator counterexample_witness() {
  const CVector psi1 = ket(3, {{1, kS}, {3, kS}});
  const CVector psi2 = ket(3, {{2, kS}, {6, kS}});
  const CVector psi3 = ket(3, {{5, kS}, {7, kS}});
  const CVector a1 = ket(3, {{1, kS}, {3, -kS}});
  const CVector a2 = ket(3, {{2, kS}, {6, -kS}});
  const CVector a3 = ket(3, {{5, kS}, {7, -kS}});
  CMatrix w = proj(psi1) + proj(psi2) - proj(psi3) - proj(a1) - proj(a2) + proj(a3);
  for (int i : {0, 4, 8}) w(i, i) -= 1.0;
  return HermitianOperator(3, 3, w);
}

namespace {

using CaseFn = std::function<ReproCase()>;

ReproCase make(std::string what, double expected, double computed, double tol,
               CaseKind kind = CaseKind::equal) {
  ReproCase c;
  c.description = std::move(what);
  c.expected = expected;
  c.computed = computed;
  c.tolerance = tol;
  c.kind = kind;
  switch (kind) {
    case CaseKind::equal: c.pass = std::abs(expected - computed) <= tol; break;
    case CaseKind::at_most: c.pass = computed <= expected + tol; break;
    case CaseKind::at_least: c.pass = computed >= expected - tol; break;
  }
  return c;
}

std::vector<ReproCase> run_cases(const std::vector<std::pair<std::string, CaseFn>>& fns, int jobs) {
  std::vector<ReproCase> out(fns.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < fns.size(); i = next++) {
      try {
        out[i] = fns[i].second();
      } catch (const std::exception& e) {
        out[i].description = fns[i].first;
        out[i].pass = false;
        out[i].error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(fns.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return out;
}

std::string label(const std::string& base, std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os << base;
  for (auto [k, v] : kv) os << ' ' << k << '=' << v;
  return os.str();
}

SchmidtVector leading_schmidt(const DensityOperator& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  return schmidt_decompose(PureState(rho.d_a(), rho.d_b(), es.eigenvectors().col(rho.dim() - 1)))
      .coefficients;
}

const OperationClass kSdpClasses[] = {OperationClass::PPT, OperationClass::RAINS_PRESERVING,
                                      OperationClass::PPT_PLUS_PRESERVING};

using Cases = std::vector<std::pair<std::string, CaseFn>>;

void add(Cases& c, std::string name, CaseFn fn) { c.emplace_back(std::move(name), std::move(fn)); }

Cases pure_suite(int d, std::uint64_t seed) {
  Cases c;
  for (int s = 0; s < 10; ++s) {
    const std::uint64_t sd = seed * 1000 + s;
    const DensityOperator psi = random_state({RandomKind::haar_pure, d, d, sd, std::nullopt, std::nullopt});
    const SchmidtVector xi = leading_schmidt(psi);
    for (int m = 1; m <= d; ++m) {
      const double closed = pure_fidelity(xi, m);
      for (OperationClass o : kSdpClasses) {
        const std::string name = label("F_" + to_string(o) + " = |xi|^2_[m]/m", {{"state", double(s)}, {"m", double(m)}});
        add(c, name, [=] { return make(name, closed, fidelity(psi, o, m).value, kClosedFormTol); });
      }
      const std::string name = label("majorisation ansatz dominates xi", {{"state", double(s)}, {"m", double(m)}});
      add(c, name, [=] {
        return make(name, 1.0, schmidt_majorised(xi.coefficients(), majorisation_ansatz(xi, m)) ? 1.0 : 0.0, 0.0);
      });
    }
    for (double eps : {0.0, 0.05}) {
      const long closed = pure_rate_k(xi, eps);
      for (OperationClass o : kSdpClasses) {
        const std::string name = label("rate k_" + to_string(o) + " = closed form", {{"state", double(s)}, {"eps", eps}});
        add(c, name, [=] { return make(name, double(closed), double(rate_eps(psi, o, eps).k), 0.0); });
      }
    }
  }
  return c;
}

Cases isotropic_suite(int d) {
  Cases c;
  for (double f : {0.2, 1.0 / d, 0.6, 0.9, 1.0}) {
    const DensityOperator rho = isotropic_state(d, f);
    for (int m = 2; m <= d; ++m) {
      const double closed = isotropic_fidelity({d, f}, m);
      for (OperationClass o : kSdpClasses) {
        const std::string name = label("isotropic F_" + to_string(o) + " = closed form", {{"f", f}, {"m", double(m)}});
        add(c, name, [=] { return make(name, closed, fidelity(rho, o, m).value, kClosedFormTol); });
      }
      const std::string name = label("separable-Choi LP = closed form", {{"f", f}, {"m", double(m)}});
      add(c, name, [=] { return make(name, closed, isotropic_sep_lp(rho, m), kClosedFormTol); });
    }
  }
  return c;
}

Cases maxcorr_suite(int d, std::uint64_t seed) {
  Cases c;
  for (int s = 0; s < 10; ++s) {
    const DensityOperator mc =
        random_state({RandomKind::max_correlated, d, d, seed * 1000 + s, std::nullopt, 1 + s % d});
    const CMatrix img = *max_correlated_image(mc.op());
    for (int m = 2; m <= d; ++m) {
      const std::string name = label("coherence SDP = bipartite PPT' SDP", {{"state", double(s)}, {"m", double(m)}});
      add(c, name, [=] { return make(name, g_m(mc, SetTag::PPT_PRIME, m), maxcorr_fidelity(img, m), kClosedFormTol); });
    }
    for (double eps : {0.0, 0.1}) {
      const std::string name = label("coherence rate = bipartite PPT rate", {{"state", double(s)}, {"eps", eps}});
      add(c, name, [=] {
        return make(name, double(rate_eps(mc, OperationClass::PPT, eps).k), double(maxcorr_rate_k(img, eps)), 0.0);
      });
    }
  }
  return c;
}

Cases appendix_suite() {
  Cases c;
  const DensityOperator rho = counterexample_state();
  const HermitianOperator w = counterexample_witness();
  add(c, "negativity", [=] { return make("negativity", 1 / (2 * std::sqrt(2.0)), negativity(rho), 1e-8); });
  const double lam = partial_transpose(negative_eigenprojector(partial_transpose(rho.op()))).max_eigenvalue();
  add(c, "lambda_max of the negative projector, transposed",
      [=] { return make("lambda_max of the negative projector, transposed", 0.5, lam, 1e-8); });
  add(c, "<rho, W>", [=] { return make("<rho, W>", 1.0, inner(rho.op(), w), 1e-12); });
  add(c, "W >= -1", [=] { return make("W >= -1", -1.0, w.min_eigenvalue(), kInequalitySlack, CaseKind::at_least); });
  add(c, "W^T_B <= 0", [=] {
    return make("W^T_B <= 0", 0.0, partial_transpose(w).max_eigenvalue(), kInequalitySlack, CaseKind::at_most);
  });
  add(c, "R_PPT+ >= 1", [=] {
    return make("R_PPT+ >= 1", 1.0, robustness(rho, SetTag::PPT_PLUS), kInequalitySlack, CaseKind::at_least);
  });
  add(c, "R_PPT+ exceeds N / lambda_max", [=] {
    return make("R_PPT+ exceeds N / lambda_max", negativity(rho) / lam + 1e-3, robustness(rho, SetTag::PPT_PLUS), 0.0,
                CaseKind::at_least);
  });
  return c;
}

Cases hierarchy_suite(int d, std::uint64_t seed) {
  Cases c;
  for (int s = 0; s < 20; ++s) {
    const DensityOperator rho =
        random_state({RandomKind::ginibre_mixed, d, d, seed * 1000 + s, std::nullopt, 1 + s % (d * d)});
    const std::string a = label("F_ppt <= F_rains-pres", {{"state", double(s)}});
    const std::string b = label("F_rains-pres <= F_pptplus-pres", {{"state", double(s)}});
    add(c, a, [=] {
      return make(a, fidelity(rho, OperationClass::RAINS_PRESERVING, 2).value,
                  fidelity(rho, OperationClass::PPT, 2).value, kInequalitySlack, CaseKind::at_most);
    });
    add(c, b, [=] {
      return make(b, fidelity(rho, OperationClass::PPT_PLUS_PRESERVING, 2).value,
                  fidelity(rho, OperationClass::RAINS_PRESERVING, 2).value, kInequalitySlack, CaseKind::at_most);
    });
  }
  return c;
}

Cases zero_error_suite(int d, std::uint64_t seed) {
  Cases c;
  const OperationClass all[] = {OperationClass::PPT, OperationClass::RAINS_PRESERVING,
                                OperationClass::PPT_PLUS_PRESERVING, OperationClass::SEPP};
  for (int s = 0; s < 5; ++s) {
    const DensityOperator psi = random_state({RandomKind::haar_pure, d, d, seed * 1000 + s, std::nullopt, std::nullopt});
    const long closed = pure_zero_error_k(leading_schmidt(psi));
    for (OperationClass o : all) {
      const std::string name = label("pure zero-error k_" + to_string(o), {{"state", double(s)}});
      add(c, name, [=] { return make(name, double(closed), double(rate_zero_error(psi, o).k), 0.0); });
    }
    const DensityOperator mc =
        random_state({RandomKind::max_correlated, d, d, seed * 1000 + 500 + s, std::nullopt, 1 + s % d});
    const long mck = maxcorr_zero_error_k(*max_correlated_image(mc.op()));
    for (OperationClass o : all) {
      const std::string name = label("max-correlated zero-error k_" + to_string(o), {{"state", double(s)}});
      add(c, name, [=] { return make(name, double(mck), double(rate_zero_error(mc, o).k), 0.0); });
    }
    const DensityOperator full = random_state({RandomKind::ginibre_mixed, d, d, seed * 1000 + 700 + s, std::nullopt, std::nullopt});
    for (OperationClass o : all) {
      const std::string name = label("full rank gives k=1 for " + to_string(o), {{"state", double(s)}});
      add(c, name, [=] { return make(name, 1.0, double(rate_zero_error(full, o).k), 0.0); });
    }
  }
  for (int s = 0; s < 3; ++s) {
    const DensityOperator rho = random_state({RandomKind::ginibre_mixed, 2, 2, seed * 1000 + 900 + s, std::nullopt, 1 + s});
    const HermitianOperator pi = support_projector(rho);
    const std::string a = label("Rains gauge primal = dual", {{"state", double(s)}});
    add(c, a, [=] { return make(a, gauge_polar(SetTag::RAINS, pi), gauge_polar_primal(SetTag::RAINS, pi), kInequalitySlack); });
    const std::string b = label("Rains gauge multiplicative on Pi x Pi", {{"state", double(s)}});
    add(c, b, [=] {
      const double g = gauge_polar(SetTag::RAINS, pi);
      return make(b, g * g, gauge_polar(SetTag::RAINS, bipartite_tensor(pi, pi)), kClosedFormTol);
    });
  }
  return c;
}

}  // namespace

ReproReport run_repro_suite(Suite s, int d, std::uint64_t seed, int jobs) {
  static const int defaults[] = {3, 3, 3, 3, 2, 2};
  if (d == 0) d = defaults[static_cast<int>(s)];
  if (d < 2 || d > 4) throw InputError("suite dimension must lie in [2, 4]");
  if (s == Suite::appendix && d != 3) throw InputError("the appendix suite is defined for d = 3");
  ReproReport r;
  r.suite = s;
  r.d = d;
  r.seed = seed;
  Cases cases;
  switch (s) {
    case Suite::pure: cases = pure_suite(d, seed); break;
    case Suite::isotropic: cases = isotropic_suite(d); break;
    case Suite::maxcorr: cases = maxcorr_suite(d, seed); break;
    case Suite::appendix: cases = appendix_suite(); break;
    case Suite::hierarchy: cases = hierarchy_suite(d, seed); break;
    case Suite::zero_error: cases = zero_error_suite(d, seed); break;
  }
  r.cases = run_cases(cases, jobs);
  return r;
}

}  // namespace qedist
