// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qedist/distillation.hpp"
#include "qedist/hypothesis.hpp"
#include "qedist/monotones.hpp"
#include "qedist/repro.hpp"
#include "qedist/special_states.hpp"

using namespace qedist;

namespace {

struct Tally {
  long checks = 0;
  long failures = 0;
  double worst = 0.0;
  std::string first;

  void near(double a, double b, double tol, const std::string& what) {
    ++checks;
    const double e = std::abs(a - b);
    worst = std::max(worst, e);
    if (!(e <= tol)) fail(what + ": " + fmt(a) + " vs " + fmt(b));
  }
  void le(double a, double b, double slack, const std::string& what) {
    ++checks;
    if (!(a <= b + slack)) fail(what + ": " + fmt(a) + " > " + fmt(b));
  }
  void truth(bool ok, const std::string& what) {
    ++checks;
    if (!ok) fail(what);
  }
  void fail(const std::string& what) {
    if (failures++ == 0) first = what;
  }
  static std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
  }
};

DensityOperator haar_pure(int d, std::uint64_t seed) {
  return random_state({RandomKind::haar_pure, d, d, seed, std::nullopt, std::nullopt});
}

DensityOperator ginibre(int d, std::uint64_t seed, std::optional<int> rank = std::nullopt) {
  return random_state({RandomKind::ginibre_mixed, d, d, seed, std::nullopt, rank});
}

SchmidtVector schmidt_of(const DensityOperator& psi) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(psi.matrix());
  return schmidt_decompose(PureState(psi.d_a(), psi.d_b(), es.eigenvectors().col(psi.dim() - 1))).coefficients;
}

std::vector<DensityOperator> suite1_states() {
  std::vector<DensityOperator> v;
  for (int s = 0; s < 50; ++s) v.push_back(haar_pure(2 + s % 3, 7000 + s));
  return v;
}

struct Iso {
  int d;
  double f;
};
std::vector<Iso> suite2_params() {
  std::vector<Iso> v;
  for (int d = 2; d <= 3; ++d)
    for (double f : {0.2, 1.0 / d, 0.6, 0.9, 1.0}) v.push_back({d, f});
  return v;
}

std::vector<DensityOperator> suite3_states() {
  std::vector<DensityOperator> v;
  for (int s = 0; s < 20; ++s) {
    const int d = 2 + s % 2;
    v.push_back(random_state({RandomKind::max_correlated, d, d, static_cast<std::uint64_t>(8000 + s), std::nullopt, 1 + s % d}));
  }
  return v;
}

const OperationClass kSdp[] = {OperationClass::PPT, OperationClass::PPT_PRESERVING,
                               OperationClass::RAINS_PRESERVING, OperationClass::PPT_PLUS_PRESERVING};

bool report(int n, const char* title, const Tally& t, const std::string& extra = "") {
  const bool ok = t.failures == 0 && t.checks > 0;
  std::printf("%s criterion %d: %s (%ld checks, %ld failed, max abs dev %.3g%s%s)\n", ok ? "PASS" : "FAIL", n,
              title, t.checks, t.failures, t.worst, extra.empty() ? "" : ", ", extra.c_str());
  if (!ok && !t.first.empty()) std::printf("     first failure: %s\n", t.first.c_str());
  std::fflush(stdout);
  return ok;
}

template <class F>
bool guarded(int n, const char* title, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::printf("FAIL criterion %d: %s (exception: %s)\n", n, title, e.what());
    return false;
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criteria ---------------------------------------------------------------

bool c1() {
  const auto t0 = std::chrono::steady_clock::now();
  Tally t;
  for (const DensityOperator& psi : suite1_states()) {
    const SchmidtVector xi = schmidt_of(psi);
    const int d = psi.d_a();
    for (int m = 1; m <= d; ++m) {
      const double closed = pure_fidelity(xi, m);
      for (OperationClass o : kSdp)
        t.near(fidelity(psi, o, m).value, closed, 1e-5, to_string(o) + " m=" + std::to_string(m));
    }
  }
  const double sec = seconds_since(t0);
  t.truth(sec < 120.0, "runtime above 2 min");
  return report(1, "pure-state fidelities equal |xi|^2_[m]/m", t, "runtime " + Tally::fmt(sec) + " s");
}

bool c2() {
  Tally t;
  for (const Iso& p : suite2_params()) {
    const DensityOperator rho = isotropic_state(p.d, p.f);
    for (int m = 2; m <= p.d; ++m) {
      const double closed = isotropic_fidelity({p.d, p.f}, m);
      const std::string tag = " d=" + std::to_string(p.d) + " f=" + Tally::fmt(p.f) + " m=" + std::to_string(m);
      for (OperationClass o : kSdp) t.near(fidelity(rho, o, m).value, closed, 1e-5, to_string(o) + tag);
      t.near(fidelity(rho, OperationClass::SEPP, m).value, closed, 1e-5, "sepp" + tag);
      t.near(isotropic_sep_lp(rho, m), closed, 1e-5, "LP" + tag);
    }
  }
  return report(2, "isotropic closed form, SDPs and separable-Choi LP", t);
}

bool c3() {
  Tally t;
  for (const DensityOperator& mc : suite3_states()) {
    const int d = mc.d_a();
    const CMatrix img = *max_correlated_image(mc.op());
    for (int m = 2; m <= d; ++m)
      t.near(maxcorr_fidelity(img, m), g_m(mc, SetTag::PPT_PRIME, m), 1e-5, "m=" + std::to_string(m));
    for (double eps : {0.0, 0.01, 0.1}) {
      const long a = maxcorr_rate_k(img, eps);
      const long b = rate_eps(mc, OperationClass::PPT, eps).k;
      t.truth(a == b, "rate k " + std::to_string(a) + " vs " + std::to_string(b));
    }
  }
  return report(3, "max-correlated coherence SDP equals bipartite PPT' SDP", t);
}

bool c4() {
  Tally t;
  const DensityOperator rho = counterexample_state();
  const HermitianOperator w = counterexample_witness();
  t.near(negativity(rho), 1 / (2 * std::sqrt(2.0)), 1e-8, "negativity");
  const double lam = partial_transpose(negative_eigenprojector(partial_transpose(rho.op()))).max_eigenvalue();
  t.near(lam, 0.5, 1e-8, "lambda_max");
  // witness feasible for T^{d-1}_{PPT+}: -1 <= W <= 2, W^{T_B} <= 0, <rho,W> = 1
  t.le(-1.0, w.min_eigenvalue(), 1e-12, "W >= -1");
  t.le(w.max_eigenvalue(), 2.0, 1e-12, "W <= 2");
  t.le(partial_transpose(w).max_eigenvalue(), 0.0, 1e-12, "W^T_B <= 0");
  t.near(inner(rho.op(), w), 1.0, 1e-12, "<rho,W>");
  const double r = robustness(rho, SetTag::PPT_PLUS);
  t.le(1.0 - 1e-6, r, 0.0, "R_PPT+ >= 1");
  t.truth(r > 1.0 / std::sqrt(2.0), "R_PPT+ > 1/sqrt 2");
  t.truth(r > negativity(rho) / lam, "R_PPT+ > N / lambda");
  return report(4, "negativity-formula counterexample", t, "R_PPT+ = " + Tally::fmt(r));
}

long dh_route(const DensityOperator& rho, SetTag q, double eps) {
  const double bits = d_h_min_over_set(rho, q, eps);
  return floor_reciprocal(std::exp2(-bits));
}

long fidelity_route(const DensityOperator& rho, OperationClass o, double eps) {
  const SetTag q = gauge_set(o);
  const long up = q == SetTag::PPT_PLUS
                      ? static_cast<long>(std::floor(rho.dim() * rho.op().max_eigenvalue() / (1 - eps - kFloorGuard))) + 1
                      : static_cast<long>(std::floor(trace_norm(partial_transpose(rho.op())) / (1 - eps - kFloorGuard))) + 1;
  return largest_feasible_m([&](long m) { return g_m(rho, q, static_cast<double>(m)); }, eps, std::max(up, 2L));
}

bool c5() {
  Tally t;
  std::vector<DensityOperator> states = suite1_states();
  for (const Iso& p : suite2_params()) states.push_back(isotropic_state(p.d, p.f));
  for (const DensityOperator& mc : suite3_states()) states.push_back(mc);
  for (int s = 0; s < 20; ++s) states.push_back(ginibre(2, 9000 + s, 1 + s % 4));
  const OperationClass classes[] = {OperationClass::PPT, OperationClass::RAINS_PRESERVING,
                                    OperationClass::PPT_PLUS_PRESERVING};
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (double eps : {0.0, 0.01, 0.1}) {
      for (OperationClass o : classes) {
        const long a = dh_route(states[i], gauge_set(o), eps);
        const long b = fidelity_route(states[i], o, eps);
        t.truth(a == b, "state " + std::to_string(i) + " " + to_string(o) + " eps=" + Tally::fmt(eps) + ": " +
                            std::to_string(a) + " vs " + std::to_string(b));
      }
      // SEPP on the special classes: both internal routes, checked inside rate_eps
      if (detect_structure(states[i]) != StateStructure::general)
        t.truth(rate_eps(states[i], OperationClass::SEPP, eps, false).k >= 1, "sepp rate");
    }
  }
  return report(5, "rate from floor(2^D_H) equals rate from fidelity bisection", t,
                std::to_string(states.size()) + " states");
}

bool c6() {
  Tally t;
  for (int s = 0; s < 50; ++s) {
    const int d = 2 + s % 2;
    const DensityOperator rho = ginibre(d, 9500 + s, 1 + s % (d * d));
    const double rp = robustness(rho, SetTag::PPT);
    const double rpp = robustness(rho, SetTag::PPT_PLUS);
    t.near(t_m(rho, SetTag::PPT, d - 1), rp, 1e-5, "T^{d-1}_PPT vs R_PPT");
    t.near(t_m(rho, SetTag::PPT_PLUS, d - 1), rpp, 1e-5, "T^{d-1}_PPT+ vs R_PPT+");
    t.near(rp, rpp, 1e-5, "R_PPT vs R_PPT+");
    t.near(robustness_dual(rho, SetTag::PPT).value, rp, 1e-5, "R_PPT primal vs dual");
    for (SetTag q : {SetTag::PPT, SetTag::PPT_PLUS})
      t.near(t_m(rho, q, 1.0), mod_trace_distance(rho, q), 1e-5, "T^1 vs cone trace distance");
  }
  return report(6, "monotone identities", t);
}

bool c7() {
  Tally t;
  const OperationClass all[] = {OperationClass::PPT, OperationClass::PPT_PRESERVING,
                                OperationClass::RAINS_PRESERVING, OperationClass::PPT_PLUS_PRESERVING,
                                OperationClass::SEPP};
  for (const DensityOperator& psi : suite1_states()) {
    const long k = pure_zero_error_k(schmidt_of(psi));
    for (OperationClass o : all) t.truth(rate_zero_error(psi, o).k == k, "pure " + to_string(o));
    t.truth(rate_zero_error(psi, OperationClass::ONE_WAY_LOCC_PURE).k == k, "pure 1locc");
  }
  for (const DensityOperator& mc : suite3_states()) {
    const long k = maxcorr_zero_error_k(*max_correlated_image(mc.op()));
    for (OperationClass o : all) t.truth(rate_zero_error(mc, o).k == k, "max-correlated " + to_string(o));
  }
  for (int s = 0; s < 10; ++s) {
    const DensityOperator full = ginibre(2 + s % 2, 9900 + s);
    for (OperationClass o : all) {
      const DistillationResult r = rate_zero_error(full, o);
      t.truth(r.k == 1 && r.value == 0.0, "full rank " + to_string(o));
    }
  }
  for (int s = 0; s < 10; ++s) {
    const DensityOperator rho = ginibre(2, 9950 + s, 1 + s % 3);
    const HermitianOperator pi = support_projector(rho);
    const double g = gauge_polar(SetTag::RAINS, pi);
    t.near(g, gauge_polar_primal(SetTag::RAINS, pi), 1e-6, "Rains primal/dual");
    t.near(gauge_polar(SetTag::RAINS, bipartite_tensor(pi, pi)), g * g, 1e-5, "Rains multiplicativity");
  }
  return report(7, "zero-error formulas", t);
}

bool c8() {
  Tally t;
  for (int s = 0; s < 50; ++s) {
    const int d = 2 + s % 2;
    const DensityOperator rho = ginibre(d, 10000 + s, 1 + s % (d * d));
    for (int m = 2; m <= d; ++m) {
      const double a = fidelity(rho, OperationClass::PPT, m).value;
      const double b = fidelity(rho, OperationClass::RAINS_PRESERVING, m).value;
      const double c = fidelity(rho, OperationClass::PPT_PLUS_PRESERVING, m).value;
      t.le(a, b, 1e-6, "F_PPT <= F_Rains");
      t.le(b, c, 1e-6, "F_Rains <= F_PPT+");
    }
  }
  // existence of a strict gap: scan seeds over low-rank states
  std::string found;
  for (std::uint64_t seed = 0; seed < 500 && found.empty(); ++seed) {
    const int d = 2 + seed % 2;
    const DensityOperator rho = ginibre(d, 20000 + seed, 1 + (seed / 2) % d);
    const double gap = fidelity(rho, OperationClass::PPT_PLUS_PRESERVING, 2).value -
                       fidelity(rho, OperationClass::PPT, 2).value;
    if (gap > 1e-3) found = "gap " + Tally::fmt(gap) + " at seed " + std::to_string(20000 + seed) + ", d=" + std::to_string(d);
  }
  t.truth(!found.empty(), "no seed with a strict gap");
  return report(8, "fidelity hierarchy with a strict gap", t, found);
}

bool c9() {
  Tally t;
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> pick_d(1, 8);
  auto rnd = [&](int d) {
    std::vector<double> v(d);
    for (double& x : v) x = g(rng);
    return v;
  };
  auto l2 = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  auto l1 = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += std::abs(x);
    return s;
  };
  for (int s = 0; s < 200; ++s) {
    const int d = pick_d(rng);
    const std::vector<double> x = rnd(d), y = rnd(d);
    for (int m = 1; m <= d; ++m) {
      const double nx = m_distillation_norm(x, m).value;
      t.near(nx, m_distillation_norm_dual(x, m), 1e-9, "primal vs dual");
      t.truth(nx > 0.0, "positivity");
      std::vector<double> sx(x), sum(d);
      for (double& v : sx) v *= -2.5;
      for (int i = 0; i < d; ++i) sum[i] = x[i] + y[i];
      t.near(m_distillation_norm(sx, m).value, 2.5 * nx, 1e-12 * (1 + nx), "homogeneity");
      t.le(m_distillation_norm(sum, m).value, nx + m_distillation_norm(y, m).value, 1e-12, "triangle");
      t.le(l2(x), nx, 1e-12, "l2 <= norm");
      t.le(nx, std::sqrt(static_cast<double>(m)) * l2(x), 1e-12, "norm <= sqrt(m) l2");
    }
    t.near(m_distillation_norm(x, 1).value, l2(x), 1e-12, "m=1 is l2");
    t.near(m_distillation_norm(x, d).value, l1(x), 1e-12, "m=d is l1");
    t.near(m_distillation_norm(std::vector<double>(d, 0.0), 1 + s % d).value, 0.0, 0.0, "zero vector");
  }
  for (const DensityOperator& psi : suite1_states()) {
    const SchmidtVector xi = schmidt_of(psi);
    for (int m = 1; m <= psi.d_a(); ++m) {
      const std::vector<double> w = majorisation_ansatz(xi, m);
      t.truth(schmidt_majorised(xi.coefficients(), w), "ansatz majorises xi");
      double n2 = 0;
      for (double v : w) n2 += v * v;
      t.near(n2, 1.0, 1e-12, "ansatz is normalized");
    }
  }
  return report(9, "m-distillation norm: primal = dual, axioms and majorisation", t);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool()>>> criteria = {
      {"pure-state fidelities", c1}, {"isotropic", c2},        {"max-correlated", c3},
      {"counterexample", c4},              {"rate consistency", c5}, {"monotone identities", c6},
      {"zero-error", c7},            {"hierarchy", c8},        {"m-distillation norm", c9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i)
    if (!guarded(static_cast<int>(i + 1), criteria[i].first, criteria[i].second)) ++failed;
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
