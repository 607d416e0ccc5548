#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qedist/repro.hpp"

using namespace qedist;

TEST_CASE("suite names") {
  for (Suite s : {Suite::pure, Suite::isotropic, Suite::maxcorr, Suite::appendix, Suite::hierarchy, Suite::zero_error})
    CHECK(parse_suite(to_string(s)) == s);
  CHECK(parse_suite("zero-error") == Suite::zero_error);
  CHECK_THROWS_AS(parse_suite("all"), InputError);
}

TEST_CASE("every suite passes at its default dimension") {
  for (Suite s : {Suite::pure, Suite::isotropic, Suite::maxcorr, Suite::appendix, Suite::hierarchy, Suite::zero_error}) {
    const ReproReport r = run_repro_suite(s, 0, 1, 2);
    CAPTURE(to_string(s));
    CHECK(!r.cases.empty());
    for (const ReproCase& c : r.cases) {
      CAPTURE(c.description);
      CAPTURE(c.error);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("other dimensions") {
  CHECK(run_repro_suite(Suite::isotropic, 2, 1).passed());
  CHECK(run_repro_suite(Suite::hierarchy, 3, 2).passed());
  CHECK(run_repro_suite(Suite::pure, 2, 5).passed());
  CHECK_THROWS_AS(run_repro_suite(Suite::pure, 5, 1), InputError);
  CHECK_THROWS_AS(run_repro_suite(Suite::appendix, 2, 1), InputError);
}

TEST_CASE("deterministic under a fixed seed, independent of threads") {
  const ReproReport a = run_repro_suite(Suite::hierarchy, 2, 11, 1);
  const ReproReport b = run_repro_suite(Suite::hierarchy, 2, 11, 4);
  REQUIRE(a.cases.size() == b.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    CHECK(a.cases[i].description == b.cases[i].description);
    CHECK(a.cases[i].computed == b.cases[i].computed);
  }
  const ReproReport c = run_repro_suite(Suite::hierarchy, 2, 12, 1);
  CHECK(c.cases[0].computed != a.cases[0].computed);
}

TEST_CASE("case kinds") {
  const ReproReport r = run_repro_suite(Suite::appendix, 3, 0);
  bool saw_bound = false;
  for (const ReproCase& c : r.cases) saw_bound |= c.kind != CaseKind::equal;
  CHECK(saw_bound);
}
