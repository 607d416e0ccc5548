#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qedist/sets.hpp"

using namespace qedist;

namespace {

HermitianOperator random_test_operator(int da, int db, std::uint64_t seed) {
  // 0 ⪯ W ⪯ 1 with random spectrum
  const int n = da * db;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CMatrix q = random_unitary(n, seed + 1);
  RVector ev(n);
  for (int i = 0; i < n; ++i) ev(i) = u(rng);
  return HermitianOperator(da, db, q * ev.cast<cplx>().asDiagonal() * q.adjoint(), 1e-9);
}

CVector schmidt_form(std::vector<double> sq) {
  const int d = static_cast<int>(sq.size());
  CVector v = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = std::sqrt(sq[i]);
  return v;
}

const SetTag kSdpSets[] = {SetTag::PPT, SetTag::PPT_PLUS, SetTag::PPT_PRIME, SetTag::RAINS,
                           SetTag::INCOHERENT};

}  // namespace

TEST_CASE("descriptors and parsing") {
  CHECK(describe(SetTag::SEP).tractability == Tractability::special_cases_only);
  for (SetTag s : kSdpSets) {
    CHECK(describe(s).tractability == Tractability::exact_sdp);
    CHECK(parse_set_tag(to_string(s) == "PPT+"   ? "pptplus"
                        : to_string(s) == "PPT'" ? "pptprime"
                                                 : to_string(s)) == s);
  }
  CHECK(parse_set_tag("RAINS") == SetTag::RAINS);
  CHECK_THROWS_AS(parse_set_tag("dps"), InputError);
}

TEST_CASE("membership examples") {
  // ‖Ψ_2^{T_B}‖_1 = 2
  CHECK_FALSE(membership(SetTag::RAINS, max_entangled(2).op()));
  CHECK_FALSE(membership(SetTag::PPT_PRIME, max_entangled(2).op()));
  CHECK(membership(SetTag::RAINS, max_entangled(2).op() * 0.5));
  CHECK(membership(SetTag::PPT_PRIME, max_entangled(2).op() * -0.5));
  for (int d = 2; d <= 4; ++d) {
    CHECK_FALSE(membership(SetTag::PPT_PLUS, max_entangled(d).op()));
    CHECK_FALSE(membership(SetTag::PPT, max_entangled(d).op()));
  }
  // Ψ_3 has ‖Ψ^{T_B}‖_1 = 3
  CHECK_FALSE(membership(SetTag::RAINS, max_entangled(3).op()));
  for (int d = 2; d <= 3; ++d) {
    CHECK(membership(SetTag::PPT_PLUS, isotropic_state(d, 1.0 / d).op()));
    CHECK(membership(SetTag::PPT_PLUS, isotropic_state(d, 0.2).op()));
    CHECK(membership(SetTag::SEP, isotropic_state(d, 0.2).op()));
    CHECK_FALSE(membership(SetTag::SEP, isotropic_state(d, 0.9).op()));
  }
  CHECK(membership(SetTag::SEP, isotropic_state(3, 1.0 / 3).op()));
  CHECK(membership(SetTag::INCOHERENT, HermitianOperator::identity(2, 2) * 0.25));
  CHECK_FALSE(membership(SetTag::INCOHERENT, max_entangled(2).op()));
}

TEST_CASE("SEP membership only on tractable structures") {
  const DensityOperator mixed = random_state({RandomKind::ginibre_mixed, 3, 3, 4, std::nullopt, std::nullopt});
  // full-rank Ginibre states in 3x3 are NPT or need a decision procedure
  if (partial_transpose(mixed.op()).min_eigenvalue() >= 0.0) {
    CHECK_THROWS_AS(membership(SetTag::SEP, mixed.op()), IntractableError);
  } else {
    CHECK_FALSE(membership(SetTag::SEP, mixed.op()));
  }
  const DensityOperator ppt_mixed(random_set_element(SetTag::PPT_PLUS, 3, 3, 8), 1e-9, 1e-9);
  CHECK_THROWS_AS(membership(SetTag::SEP, ppt_mixed.op()), IntractableError);
  // 2x3: PPT decides
  const HermitianOperator small = random_set_element(SetTag::PPT_PLUS, 2, 3, 3);
  CHECK(membership(SetTag::SEP, small));
  CVector prod = CVector::Zero(9);
  prod(4) = 1.0;
  CHECK(membership(SetTag::SEP, PureState(3, 3, prod).projector().op()));
  CHECK_FALSE(membership(SetTag::SEP, max_entangled(3).op()));
  CMatrix diag = CMatrix::Zero(3, 3);
  diag(0, 0) = 0.5;
  diag(2, 2) = 0.5;
  CHECK(membership(SetTag::SEP, max_correlated_state(diag).op()));
}

TEST_CASE("random set elements are members") {
  for (SetTag s : kSdpSets) {
    for (int k = 0; k < 20; ++k) {
      const int da = 2 + k % 2, db = 2 + (k / 2) % 2;
      CHECK(membership(s, random_set_element(s, da, db, 50 + k), 1e-8));
    }
  }
}

TEST_CASE("gauge closed forms") {
  for (int m = 2; m <= 4; ++m) {
    CHECK(gauge_polar(SetTag::PPT_PRIME, max_entangled(m).op()) == doctest::Approx(1.0 / m).epsilon(1e-12));
    CHECK(gauge_polar(SetTag::RAINS, max_entangled(m).op()) == doctest::Approx(1.0 / m).epsilon(1e-7));
    CHECK(gauge_polar(SetTag::PPT_PLUS, max_entangled(m).op()) == doctest::Approx(1.0 / m).epsilon(1e-7));
  }
  CMatrix pr = CMatrix::Zero(4, 4);
  pr(0, 0) = 1.0;
  pr(3, 3) = 1.0;
  CHECK(gauge_polar(SetTag::INCOHERENT, HermitianOperator(2, 2, pr)) == 1.0);
}

TEST_CASE("polar monotonicity PPT+ <= RAINS <= PPT' on PSD operators") {
  for (int k = 0; k < 100; ++k) {
    const int da = 2 + k % 2, db = 2 + (k / 2) % 2;
    const HermitianOperator w = random_test_operator(da, db, 1000 + k);
    const double gp = gauge_polar(SetTag::PPT_PRIME, w);
    const double gr = gauge_polar(SetTag::RAINS, w);
    const double gpp = gauge_polar(SetTag::PPT_PLUS, w);
    CHECK(gpp <= gr + 1e-6);
    CHECK(gr <= gp + 1e-6);
  }
}

TEST_CASE("gauge dual forms agree with primal programs and sampled elements") {
  for (SetTag s : kSdpSets) {
    for (int k = 0; k < 50; ++k) {
      const int da = 2, db = 2 + k % 2;
      const HermitianOperator w = random_test_operator(da, db, 2000 + 97 * k + static_cast<int>(s));
      const GaugeResult g = gauge_polar_detailed(s, w);
      CAPTURE(to_string(s));
      CAPTURE(k);
      if (k < 10) CHECK(std::abs(g.value - gauge_polar_primal(s, w)) <= 1e-6 * (1 + std::abs(g.value)));
      REQUIRE(g.maximizer.has_value());
      CHECK(membership(s, *g.maximizer, 1e-6));
      CHECK(std::abs(inner(*g.maximizer, w) - g.value) <= 1e-6);
      const int samples = k < 5 ? 200 : 10;
      for (int j = 0; j < samples; ++j) {
        const HermitianOperator x = random_set_element(s, da, db, 77 * k + j);
        CHECK(inner(x, w) <= g.value + 1e-6);
      }
    }
  }
}

TEST_CASE("gauge on indefinite operators") {
  for (SetTag s : kSdpSets) {
    for (int k = 0; k < 5; ++k) {
      const HermitianOperator w = random_test_operator(2, 2, 3000 + k) - HermitianOperator::identity(2, 2) * 0.5;
      CHECK(std::abs(gauge_polar(s, w) - gauge_polar_primal(s, w)) < 1e-6);
    }
  }
}

TEST_CASE("SEP gauge on special projectors") {
  CHECK(gauge_sep_projector(max_entangled(3).op()) == doctest::Approx(1.0 / 3));
  const DensityOperator psi = PureState(3, 3, schmidt_form({0.7, 0.2, 0.1})).projector();
  CHECK(gauge_sep_projector(psi.op()) == doctest::Approx(0.7));
  // rank 8 > (3-1)(3-1)
  const HermitianOperator big = HermitianOperator::identity(3, 3) - max_entangled(3).op();
  CHECK(gauge_sep_projector(big) == 1.0);
  CMatrix mc = CMatrix::Zero(9, 9);
  mc(0, 0) = mc(4, 4) = 1.0;
  CHECK(gauge_sep_projector(HermitianOperator(3, 3, mc)) == doctest::Approx(1.0));
  CHECK(gauge_polar(SetTag::SEP, max_entangled(2).op()) == doctest::Approx(0.5));
  const HermitianOperator pair = PureState(3, 3, schmidt_form({0.5, 0.5, 0.0})).projector().op() +
                                 PureState(3, 3, schmidt_form({0.0, 0.5, 0.5})).projector().op();
  CHECK_THROWS_AS(gauge_sep_projector(pair), InputError);  // not a projector
  CHECK_THROWS_AS(gauge_polar_primal(SetTag::SEP, max_entangled(2).op()), IntractableError);
}

TEST_CASE("RAINS gauge is multiplicative on projectors") {
  for (int k = 0; k < 3; ++k) {
    const DensityOperator rho = random_state({RandomKind::ginibre_mixed, 2, 2, 70 + static_cast<std::uint64_t>(k), std::nullopt, 1 + k % 2});
    const HermitianOperator pi = support_projector(rho);
    const double g = gauge_polar(SetTag::RAINS, pi);
    const double g2 = gauge_polar(SetTag::RAINS, bipartite_tensor(pi, pi));
    CHECK(std::abs(g2 - g * g) < 1e-5);
  }
}

TEST_CASE("polar certificate violation is small at optimum") {
  for (SetTag s : {SetTag::PPT_PLUS, SetTag::RAINS}) {
    const HermitianOperator w = random_test_operator(2, 2, 4242);
    ConicProgram p;
    const ScalarExpr t = p.scalar("t");
    add_polar_constraint(p, s, constant_expr(w), t, "q_");
    p.minimize(t);
    const SolveReport r = solve(p);
    REQUIRE(r.optimal());
    CHECK(polar_certificate_violation(s, w, r.primal_value, r, "q_") < 1e-6);
    CHECK(polar_certificate_violation(s, w, 0.5 * r.primal_value, r, "q_") > 1e-3);
  }
}
