#include <doctest.h>

#include "fixtures.hpp"
#include "hitchlab/error.hpp"
#include "hitchlab/verify.hpp"

using namespace hitchlab;

TEST_CASE("flag identities hold for Fuchsian and bulged representations") {
  for (int d : {3, 4, 5}) {
    for (double t : {0.0, 0.2}) {
      const auto rep = t == 0.0 ? fuchsian_rep(d) : fixtures::bulged(d, t);
      const auto table = build_class_table(rep, 2, std::nullopt);
      VerifyOptions opt;
      opt.configurations = 60;
      for (const char* suite : {"frenet", "property-h", "identities"}) {
        const auto r = run_suite(suite, rep, table.classes, table.truncation(), opt);
        CHECK_MESSAGE(r.pass, "d=" << d << " t=" << t << " " << r.to_json().dump());
        CHECK(r.checks > 0);
        CHECK(r.failures == 0);
      }
    }
  }
}

TEST_CASE("the same seed gives the same report") {
  const auto rep = fixtures::bulged(4, 0.2);
  const auto table = build_class_table(rep, 2, std::nullopt);
  VerifyOptions opt;
  opt.configurations = 40;
  opt.seed = 7;
  const auto a = verify_frenet(rep, table.classes, opt);
  const auto b = verify_frenet(rep, table.classes, opt);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("walls") {
  const auto table = fixtures::seed_table(fuchsian_rep(3), 7.0);
  const auto r = verify_walls(table.classes, table.truncation());
  CHECK(r.pass);
  // Fuchsian: every sigma_i(lambda)/|lambda| equals sigma_i(u)/|u| = 1.
  CHECK(r.worst == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a broken identity is caught") {
  // Moving one Jordan projection off the wall-side makes the walls suite fail.
  auto table = fixtures::seed_table(fuchsian_rep(3), 7.0);
  table.classes[3].lambda = JordanVector({1.0, 1.0, -2.0});
  CHECK_FALSE(verify_walls(table.classes, table.truncation()).pass);
  CHECK_THROWS_AS(run_suite("nope", fuchsian_rep(3), table.classes, table.truncation()), Error);
}
