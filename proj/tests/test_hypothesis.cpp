#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "qedist/distillation.hpp"
#include "qedist/hypothesis.hpp"
#include "qedist/special_states.hpp"

using namespace qedist;
using namespace testutil;

TEST_CASE("D_H against itself") {
  for (int k = 0; k < 4; ++k) {
    const DensityOperator rho = ginibre(2, 2, 5 + k, 1 + k % 3);
    for (double eps : {0.0, 0.1, 0.3}) {
      CHECK(d_h(rho, rho.op(), eps) == doctest::Approx(-std::log2(1 - eps)).epsilon(1e-6));
    }
  }
}

TEST_CASE("D_H against the identity") {
  for (int d = 2; d <= 3; ++d) {
    const DensityOperator psi = haar(d, d, 9 + d);
    const HermitianOperator mixed = HermitianOperator::identity(d, d) * (1.0 / (d * d));
    CHECK(d_h(psi, mixed, 0.0) == doctest::Approx(2 * std::log2(d)).epsilon(1e-7));
  }
  // rank r state: optimal test is the support projector
  const DensityOperator rho = ginibre(2, 2, 3, 2);
  const HermitianOperator mixed = HermitianOperator::identity(2, 2) * 0.25;
  CHECK(d_h(rho, mixed, 0.0) == doctest::Approx(-std::log2(2.0 / 4)).epsilon(1e-6));
}

TEST_CASE("D_H is infinite when the optimum is non-positive") {
  const DensityOperator rho = ginibre(2, 2, 3, 2);
  const HermitianOperator x = HermitianOperator::identity(2, 2) - support_projector(rho) * 2.0;
  CHECK(std::isinf(d_h(rho, x, 0.1)));
  CHECK(std::isinf(d_h(rho, HermitianOperator::identity(2, 2) - support_projector(rho), 0.0)));
  CHECK_THROWS_AS(d_h(rho, x, 1.0), InputError);
  CHECK_THROWS_AS(d_h(rho, x, -0.1), InputError);
}

TEST_CASE("D_H minimized over sets: examples") {
  CHECK(d_h_min_over_set(max_entangled(2), SetTag::PPT_PRIME, 0.0) == doctest::Approx(1.0).epsilon(1e-7));
  const DensityOperator pp(random_set_element(SetTag::PPT_PLUS, 2, 2, 4), 1e-9, 1e-9);
  CHECK(std::abs(d_h_min_over_set(pp, SetTag::PPT_PLUS, 0.0)) < 1e-6);
  const DensityOperator iso = isotropic_state(3, 0.9);
  const double bits = d_h_min_over_set(iso, SetTag::PPT_PRIME, 0.05);
  const long k = floor_reciprocal(std::exp2(-bits));
  CHECK(k == isotropic_rate_k({3, 0.9}, 0.05));
  CHECK_THROWS_AS(d_h_min_over_set(iso, SetTag::SEP, 0.1), IntractableError);
}

TEST_CASE("monotone in epsilon and ordered in the set") {
  for (int k = 0; k < 4; ++k) {
    const DensityOperator rho = ginibre(2, 2, 30 + k, 1 + k % 2);
    double prev = -1.0;
    for (double eps : {0.0, 0.05, 0.2, 0.5}) {
      const double pp = d_h_min_over_set(rho, SetTag::PPT_PLUS, eps);
      const double ra = d_h_min_over_set(rho, SetTag::RAINS, eps);
      const double pr = d_h_min_over_set(rho, SetTag::PPT_PRIME, eps);
      CHECK(pr <= ra + 1e-6);
      CHECK(ra <= pp + 1e-6);
      CHECK(prev <= ra + 1e-6);
      prev = ra;
    }
  }
}

TEST_CASE("set minimum below every fixed member, attained by the implied minimizer") {
  const DensityOperator rho = ginibre(2, 2, 77, 2);
  for (SetTag q : {SetTag::PPT_PRIME, SetTag::PPT_PLUS, SetTag::RAINS, SetTag::INCOHERENT}) {
    const double eps = 0.1;
    const DhSetResult r = d_h_min_over_set_detailed(rho, q, eps);
    CAPTURE(to_string(q));
    for (int j = 0; j < 100; ++j) {
      const HermitianOperator x = random_set_element(q, 2, 2, 500 + j);
      CHECK(r.bits <= d_h(rho, x, eps) + 1e-6);
    }
    CHECK(membership(q, r.minimizer, 1e-6));
    CHECK(d_h(rho, r.minimizer, eps) == doctest::Approx(r.bits).epsilon(1e-5));
  }
}
