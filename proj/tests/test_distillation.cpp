#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "common.hpp"
#include "qedist/distillation.hpp"
#include "qedist/special_states.hpp"

using namespace qedist;
using namespace testutil;

namespace {

const OperationClass kSdpClasses[] = {OperationClass::PPT, OperationClass::PPT_PRESERVING,
                                      OperationClass::RAINS_PRESERVING,
                                      OperationClass::PPT_PLUS_PRESERVING};
const OperationClass kAllClasses[] = {OperationClass::PPT, OperationClass::PPT_PRESERVING,
                                      OperationClass::RAINS_PRESERVING,
                                      OperationClass::PPT_PLUS_PRESERVING, OperationClass::SEPP};

}  // namespace

TEST_CASE("class names and gauge sets") {
  for (OperationClass o : kAllClasses) CHECK(parse_operation_class(to_string(o)) == o);
  CHECK(parse_operation_class("1locc-pure") == OperationClass::ONE_WAY_LOCC_PURE);
  CHECK(gauge_set(OperationClass::PPT) == SetTag::PPT_PRIME);
  CHECK(gauge_set(OperationClass::PPT_PRESERVING) == SetTag::PPT_PRIME);
  CHECK(gauge_set(OperationClass::RAINS_PRESERVING) == SetTag::RAINS);
  CHECK(gauge_set(OperationClass::PPT_PLUS_PRESERVING) == SetTag::PPT_PLUS);
  CHECK(gauge_set(OperationClass::SEPP) == SetTag::SEP);
  CHECK_THROWS_AS(parse_operation_class("locc"), InputError);
  CHECK(rate_string(3) == "log2 3");
}

TEST_CASE("structure detection") {
  CHECK(detect_structure(max_entangled(3)) == StateStructure::pure);
  CHECK(detect_structure(isotropic_state(3, 0.6)) == StateStructure::isotropic);
  CHECK(detect_structure(random_state({RandomKind::max_correlated, 3, 3, 2, std::nullopt, 2})) ==
        StateStructure::max_correlated);
  CHECK(detect_structure(ginibre(2, 2, 1)) == StateStructure::general);
}

TEST_CASE("fidelity examples") {
  for (int d = 2; d <= 3; ++d) {
    for (int m = 1; m <= d; ++m) {
      for (OperationClass o : kAllClasses) {
        CHECK(fidelity(max_entangled(d), o, m).value == doctest::Approx(1.0).epsilon(1e-6));
      }
    }
  }
  const DensityOperator psi = schmidt_state({0.7, 0.2, 0.1});
  for (OperationClass o : kAllClasses) {
    const DistillationResult r = fidelity(psi, o, 2);
    CHECK(r.value == doctest::Approx(0.958258).epsilon(1e-5));
    CHECK(r.m == 2);
    CHECK_FALSE(r.lower_bound);
  }
  CHECK(fidelity(psi, OperationClass::ONE_WAY_LOCC_PURE, 2).value == doctest::Approx(0.958258).epsilon(1e-6));
  for (OperationClass o : kAllClasses) {
    CHECK(fidelity(isotropic_state(3, 0.9), o, 2).value == doctest::Approx(0.925).epsilon(1e-5));
  }
}

TEST_CASE("fidelity certificate is returned and feasible") {
  const DistillationResult r = fidelity(max_entangled(2), OperationClass::PPT, 2);
  REQUIRE(r.certificate.has_value());
  const HermitianOperator& w = *r.certificate;
  CHECK(w.min_eigenvalue() >= -1e-6);
  CHECK(w.max_eigenvalue() <= 1 + 1e-6);
  CHECK(operator_norm(partial_transpose(w)) <= 0.5 + 1e-6);
  CHECK(inner(max_entangled(2).op(), w) == doctest::Approx(r.value).epsilon(1e-6));
}

TEST_CASE("SEPP outside special classes") {
  const DensityOperator rho = ginibre(2, 2, 4, 2);
  const DistillationResult r = fidelity(rho, OperationClass::SEPP, 2);
  CHECK(r.lower_bound);
  CHECK(r.value == doctest::Approx(fidelity(rho, OperationClass::PPT_PLUS_PRESERVING, 2).value).epsilon(1e-7));
  CHECK_THROWS_AS(fidelity(rho, OperationClass::SEPP, 2, false), IntractableError);
  CHECK_THROWS_AS(fidelity(rho, OperationClass::ONE_WAY_LOCC_PURE, 2), InputError);
  CHECK_THROWS_AS(fidelity(rho, OperationClass::PPT, 0), InputError);
}

TEST_CASE("rate examples") {
  for (OperationClass o : kAllClasses) {
    const DistillationResult r = rate_eps(max_entangled(2), o, 0.0);
    CHECK(r.k == 2);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(rate_eps(schmidt_state({0.7, 0.2, 0.1}), o, 0.05).k == 2);
    CHECK(rate_eps(isotropic_state(3, 1.0), o, 0.0).k == 3);
  }
  CHECK_THROWS_AS(rate_eps(max_entangled(2), OperationClass::PPT, 1.0), InputError);
}

TEST_CASE("rate routes agree on mixed states and are monotone in epsilon") {
  for (int k = 0; k < 6; ++k) {
    const DensityOperator rho = ginibre(2, 2, 200 + k, 1 + k % 2);
    for (OperationClass o : kSdpClasses) {
      long prev = 0;
      for (double eps : {0.0, 0.01, 0.1, 0.4}) {
        const DistillationResult r = rate_eps(rho, o, eps);
        CHECK(r.k >= prev);
        prev = r.k;
      }
    }
  }
}

TEST_CASE("appending a separable ancilla does not change the rate") {
  const DensityOperator rho = ginibre(2, 2, 17, 1);
  CVector prod = CVector::Zero(4);
  prod(0) = 1.0;
  const DensityOperator anc = PureState(2, 2, prod).projector();
  const DensityOperator joint(bipartite_tensor(rho.op(), anc.op()), 1e-9, 1e-9);
  for (double eps : {0.0, 0.1}) {
    CHECK(rate_eps(joint, OperationClass::PPT, eps).k == rate_eps(rho, OperationClass::PPT, eps).k);
  }
}

TEST_CASE("zero-error rates") {
  const DensityOperator full = ginibre(2, 2, 1);
  for (OperationClass o : kAllClasses) CHECK(rate_zero_error(full, o).k == 1);
  const DensityOperator psi = schmidt_state({0.7, 0.2, 0.1});
  for (OperationClass o : kAllClasses) {
    CHECK(rate_zero_error(psi, o).k == 1);
    CHECK(rate_zero_error(max_entangled(3), o).k == 3);
  }
  const DensityOperator bell_mc = max_correlated_state(CMatrix::Constant(2, 2, 0.5));
  for (OperationClass o : kAllClasses) CHECK(rate_zero_error(bell_mc, o).value == doctest::Approx(1.0));
  for (int t = 0; t < 5; ++t) {
    const DensityOperator p = haar(3, 3, 60 + t);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(p.matrix());
    const SchmidtVector xi = schmidt_decompose(PureState(3, 3, es.eigenvectors().col(8))).coefficients;
    for (OperationClass o : kAllClasses) CHECK(rate_zero_error(p, o).k == pure_zero_error_k(xi));
  }
}

TEST_CASE("asymptotic zero-error Rains bound") {
  for (int d = 2; d <= 3; ++d) CHECK(asymptotic_zero_error_rains(max_entangled(d)) == doctest::Approx(std::log2(d)).epsilon(1e-7));
  CHECK(std::abs(asymptotic_zero_error_rains(ginibre(2, 2, 3))) < 1e-7);
  const DensityOperator psi = schmidt_state({0.6, 0.3, 0.1});
  CHECK(asymptotic_zero_error_rains(psi) == doctest::Approx(-std::log2(0.6)).epsilon(1e-6));
}

TEST_CASE("assisted fidelity") {
  const DensityOperator psi = schmidt_state({0.7, 0.2, 0.1});
  const DistillationResult e = assisted_fidelity(psi, OperationClass::PPT, 2, AssistedMode::exact_pure);
  CHECK(e.value == doctest::Approx(pure_fidelity(SchmidtVector::from_squared(std::vector<double>{0.7, 0.2, 0.1}), 2)).epsilon(1e-5));
  CHECK_THROWS_AS(assisted_fidelity(ginibre(2, 2, 1), OperationClass::PPT, 2, AssistedMode::exact_pure), InputError);
  // Ψ_2 dephased in its Schmidt basis
  CMatrix deph = CMatrix::Zero(4, 4);
  deph(0, 0) = deph(3, 3) = 0.5;
  const DensityOperator rho(2, 2, deph);
  const DistillationResult b = assisted_fidelity(rho, OperationClass::PPT, 2, AssistedMode::lower_bound_sampled, {200, 1});
  CHECK(b.lower_bound);
  CHECK(b.value >= 0.5 - 1e-9);
  CHECK(b.value <= 1.0 + 1e-12);
  const DistillationResult c = assisted_fidelity(ginibre(2, 2, 8), OperationClass::PPT, 2, AssistedMode::lower_bound_sampled, {200, 2});
  CHECK(c.value <= 1.0 + 1e-12);
  CHECK(c.value >= 0.0);
  CHECK_THROWS_AS(assisted_fidelity(rho, OperationClass::PPT, 3, AssistedMode::lower_bound_sampled), InputError);
}
