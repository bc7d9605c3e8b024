#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hitchlab/error.hpp"
#include "hitchlab/thermo.hpp"

using namespace hitchlab;

namespace {

Matrix constant(const MarkovShift& s, double c) {
  return Matrix::Constant(static_cast<int>(s.states()), static_cast<int>(s.states()), c);
}

}  // namespace

TEST_CASE("pressure of the full shift") {
  const auto s = full_shift(2);
  const auto p0 = pressure(s, constant(s, 0.0));
  CHECK(p0.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const auto pc = pressure(s, constant(s, 0.7));
  CHECK(pc.value == doctest::Approx(std::log(2.0) + 0.7).epsilon(1e-12));
  CHECK(pressure(full_shift(3), constant(full_shift(3), 0.0)).value == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("periodic-orbit and spectral pressure agree") {
  const auto s = golden_mean_shift();
  for (double t : {0.0, -0.5, -1.3}) {
    const Matrix g = s.roof * t;
    const auto p = pressure(s, g, 30);
    CHECK(std::abs(p.value - pressure_spectral(s, g)) <= 1e-8);
  }
  CHECK(pressure_spectral(s, constant(s, 0.0)) == doctest::Approx(std::log(std::numbers::phi)).epsilon(1e-12));
}

TEST_CASE("entropy equation P(-h f) = 0") {
  const auto s = full_shift(2);
  CHECK(solve_entropy(s, constant(s, std::log(2.0))).h == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(solve_entropy(s, constant(s, 0.3)).h == doctest::Approx(std::log(2.0) / 0.3).epsilon(1e-10));
  const auto g = golden_mean_shift();
  const auto a = solve_entropy(g, g.roof, 1e-13, PressureRoute::Spectral);
  const auto b = solve_entropy(g, g.roof, 1e-13, PressureRoute::PeriodicOrbits, 30);
  CHECK(std::abs(a.h - b.h) <= 1e-8);
  CHECK(std::abs(a.pressure_at_h) <= 1e-10);

  Matrix neg = g.roof;
  neg(0, 0) = -1.0;
  CHECK_THROWS_AS(solve_entropy(g, neg), Error);
}

TEST_CASE("period growth matches the entropy equation") {
  const auto g = golden_mean_shift();
  const double h = solve_entropy(g, g.roof, 1e-13, PressureRoute::Spectral).h;
  const auto pc = period_count_entropy(g, g.roof, 30);
  CHECK(pc.cycles > 1000);
  CHECK(std::abs(pc.h - h) / h <= 0.02);
}

TEST_CASE("primitive cycles") {
  // Full 2-shift: Witt's necklace count.
  const auto cycles = primitive_cycles(full_shift(2), 6);
  std::size_t by_len[7] = {};
  for (const auto& c : cycles) ++by_len[c.length()];
  const std::size_t necklaces[7] = {0, 2, 1, 2, 3, 6, 9};
  for (int n = 1; n <= 6; ++n) CHECK(by_len[n] == necklaces[n]);
  CHECK(primitive_cycles(full_shift(2), 8, 3).size() == primitive_cycles(full_shift(2), 8, 1).size());
}

TEST_CASE("Livsic periods") {
  const auto g = golden_mean_shift();
  // f + u(j) - u(i) has the same periods as f.
  const double u[2] = {0.4, -1.1};
  Matrix cob = g.roof;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) cob(i, j) += u[j] - u[i];
  }
  const auto same = livsic_test(g, g.roof, cob, 12, 1e-12);
  CHECK(same.pass);
  CHECK(same.cycles > 0);
  Matrix off = g.roof;
  off(0, 1) += 0.1;
  const auto diff = livsic_test(g, g.roof, off, 12, 1e-12);
  CHECK_FALSE(diff.pass);
  CHECK(diff.worst_gap >= 0.1 - 1e-12);
}

TEST_CASE("SRB normalization") {
  CHECK(srb_toy(cat_map_shift(), cat_map_shift().roof) == doctest::Approx(1.0).epsilon(1e-10));
  const auto d = doubling_shift();
  CHECK(srb_toy(d, d.roof) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(srb_toy(d, d.roof * 1.1) == doctest::Approx(1.0 / 1.1).epsilon(1e-10));
}

TEST_CASE("reparametrized periods") {
  const auto s = full_shift(2);
  for (const auto& c : reparametrize_periods(s, constant(s, 1.0), 5)) CHECK(c.period == static_cast<double>(c.length()));
  for (const auto& c : reparametrize_periods(s, constant(s, 2.0), 5)) CHECK(c.period == 2.0 * c.length());
  CHECK_THROWS_AS(reparametrize_periods(s, constant(s, 0.0), 5), Error);
}

TEST_CASE("shift JSON") {
  const auto g = golden_mean_shift();
  const auto back = shift_from_json(shift_to_json(g));
  CHECK(back.adjacency == g.adjacency);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (g.allowed(i, j)) CHECK(back.roof(i, j) == g.roof(i, j));
    }
  }
  CHECK_THROWS_AS(shift_from_json(nlohmann::json::parse(R"({"adjacency": [[1, 0], [0, 1]]})")), Error);
  const auto d = shift_from_json(nlohmann::json::parse(R"({"adjacency": [[1, 1], [1, 1]]})"));
  CHECK(d.roof(1, 0) == 1.0);
}
