#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "hitchlab/cone.hpp"
#include "hitchlab/error.hpp"

using namespace hitchlab;

namespace {

std::vector<JordanVector> lambdas_of(const ClassTable& t) {
  std::vector<JordanVector> out;
  for (const auto& c : t.classes) out.push_back(c.lambda);
  return out;
}

const ClassTable& fuchsian3() {
  static const ClassTable t = fixtures::seed_table(fuchsian_rep(3), 11.0);
  return t;
}

double angle_between(const CartanVector& a, const CartanVector& b) {
  const NormData n = NormData::for_dim(a.dim());
  const double c = n.inner(a.coords(), b.coords()) / (n.norm(a) * n.norm(b));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TEST_CASE("limit cone of a Fuchsian representation is the principal ray") {
  for (int d : {3, 4, 5}) {
    const auto t = fixtures::seed_table(fuchsian_rep(d), 8.0);
    const auto cone = limit_cone(lambdas_of(t));
    CHECK(cone.extreme.size() == 1);
    CHECK(cone.spread <= 1e-7);
    CHECK(angle_between(cone.rays[cone.extreme[0]], principal_vector(static_cast<std::size_t>(d))) <= 1e-9);
  }
  const auto one = limit_cone({JordanVector({1.0, 0.2, -1.2})});
  CHECK(one.rays.size() == 1);
  CHECK(one.extreme.size() == 1);
}

TEST_CASE("bulging opens the limit cone") {
  const auto t = fixtures::seed_table(fixtures::bulged(3, 0.1), 9.0);
  const auto cone = limit_cone(lambdas_of(t));
  CHECK(cone.extreme.size() >= 2);
  CHECK(cone.spread > 1e-4);
}

TEST_CASE("dual cone membership") {
  const auto cone = limit_cone(lambdas_of(fuchsian3()));
  CHECK(dual_cone_interior(to_double(simple_root(3, 1)), cone).pass);
  const auto eps2 = dual_cone_interior(LinearForm({0.0, 1.0, 0.0}), cone);
  CHECK_FALSE(eps2.pass);
  CHECK(std::abs(eps2.margin) <= 1e-12);
  CHECK_FALSE(dual_cone_interior(to_double(simple_root(3, 1)) * -1.0, cone).pass);
  const auto b = limit_cone(lambdas_of(fixtures::seed_table(fixtures::bulged(3, 0.3), 8.0)));
  CHECK(dual_cone_interior(to_double(simple_root(3, 1)), b).pass);
  CHECK(dual_cone_interior(to_double(simple_root(3, 2)), b).pass);
}

TEST_CASE("boundary of the entropy-one set") {
  const auto& t = fuchsian3();
  const NormData norm = NormData::for_dim(3);
  // Nearest element of the simple-root hyperplane: a -> <u, a>/2.
  const auto psi = form_of_vector(principal_vector(3) * 0.5, norm);
  const auto sigma1 = to_double(simple_root(3, 1));
  const auto sample = d_rho_boundary(t.classes, {psi, sigma1}, t.truncation());
  REQUIRE_FALSE(sample.points[0].degenerate);
  CHECK(sample.points[0].h >= 0.75);
  CHECK(sample.points[0].h <= 1.25);
  // The boundary parameter on sigma_1/|sigma_1| is h^sigma_1 * |sigma_1|.
  const auto direct = direction_entropy(t.classes, sigma1, t.truncation());
  const double n1 = dual_norm(sigma1, norm);
  CHECK(sample.points[1].h == doctest::Approx(direct.estimate.h_hat * n1).epsilon(1e-12));
  CHECK(dual_norm(sample.points[1].direction, norm) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convexity diagnostic on an exact convex model") {
  // Nearest-side boundary of the ellipse ((y1-3)/1)^2 + (y2/2)^2 <= 1 in the
  // Riesz coordinates of the dual sphere.
  const DualSphere sphere(3);
  DBoundarySample sample;
  sample.d = 3;
  for (int k = 0; k < 15; ++k) {
    const double th = -0.3 + 0.6 * k / 14.0;
    Vector x(2);
    x << std::cos(th), std::sin(th);
    // (t c - 3)^2 + (t s / 2)^2 = 1, smaller root.
    const double a = x[0] * x[0] + x[1] * x[1] / 4.0, b = -6.0 * x[0], c = 8.0;
    const double t = (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
    sample.points.push_back({sphere.form(x), false, t, 0.0, false});
  }
  const auto rep = convexity_diagnostic(sample);
  CHECK_FALSE(rep.insufficient_spread);
  CHECK(rep.configurations > 0);
  CHECK(rep.worst_violation <= 1e-9);

  // A dent is reported.
  auto dented = sample;
  dented.points[7].h += 0.2;
  CHECK(convexity_diagnostic(dented).worst_violation > 0.1);

  DBoundarySample collinear;
  collinear.d = 3;
  Vector x(2);
  x << 1.0, 0.0;
  for (int k = 0; k < 5; ++k) collinear.points.push_back({sphere.form(x), false, 1.0, 0.0, false});
  CHECK(convexity_diagnostic(collinear).insufficient_spread);
}

TEST_CASE("convexity on Fuchsian tau_4 data stays within the fit uncertainty") {
  const auto t = fixtures::seed_table(fuchsian_rep(4), 11.0);
  const auto dirs = interior_directions(limit_cone(lambdas_of(t)), 12);
  CHECK(dirs.size() == 12);
  const auto sample = d_rho_boundary(t.classes, dirs, t.truncation());
  double unc = 0.0;
  for (const auto& p : sample.points) {
    REQUIRE_FALSE(p.degenerate);
    unc = std::max(unc, p.uncertainty);
  }
  const auto rep = convexity_diagnostic(sample);
  CHECK_FALSE(rep.insufficient_spread);
  CHECK(rep.worst_violation <= 2 * unc + 1e-9);
}

TEST_CASE("span dimension of the Jordan projections") {
  for (int d : {3, 4, 6}) {
    const auto t = fixtures::seed_table(fuchsian_rep(d), 7.0);
    const auto z = zariski_dim(lambdas_of(t));
    CHECK(z.rank == 1);
    CHECK(z.singular_values[1] <= 1e-8 * z.singular_values[0]);
  }
  CHECK(zariski_dim(lambdas_of(fixtures::seed_table(fixtures::bulged(3, 0.1), 7.0))).rank >= 2);
  const auto rep = fixtures::bulged(4, 0.2);
  const WordSpectra s(rep);
  std::vector<JordanVector> powers;
  Word w;
  for (int k = 1; k <= 6; ++k) {
    for (Letter x : parse_word("a1b2")) w.push_back(x);
    powers.push_back(s.jordan(w));
  }
  CHECK(zariski_dim(powers).rank == 1);
}

TEST_CASE("optimizer on the dual sphere: single-ray closed form") {
  for (std::size_t d : {3, 4}) {
    const auto u = principal_vector(d);
    const NormData norm = NormData::for_dim(d);
    // One ray along u/|u| with N(s) = floor(e^s): h^phi = 1/phi(u/|u|).
    const auto uhat = u * (1.0 / norm.norm(u));
    std::vector<ConjClass> classes;
    for (int k = 2; k <= 20000; ++k) classes.push_back({Word{}, uhat * std::log(static_cast<double>(k)), 0.0});
    const auto r = critical_exponent(classes, Truncation{});
    CHECK(r.h_x == doctest::Approx(1.0).epsilon(1e-3));
    const auto dual = form_of_vector(uhat, norm);
    CHECK(angle_between(riesz_vector(r.direction, norm), riesz_vector(dual, norm)) * 180 / std::numbers::pi <= 0.5);

    const auto m = minimize_on_dual_sphere(d, [&](const LinearForm& phi) {
      const double v = phi(u);
      return v > 0 ? 1.0 / v : std::numeric_limits<double>::infinity();
    });
    CHECK(m.h_x == doctest::Approx(0.5).epsilon(1e-6));
  }
  CHECK_THROWS_AS(minimize_on_dual_sphere(3, [](const LinearForm&) { return std::numeric_limits<double>::infinity(); }),
                  Error);
}

TEST_CASE("critical exponent of Fuchsian tau_3") {
  const auto& t = fuchsian3();
  const auto r = critical_exponent(t.classes, t.truncation());
  CHECK(r.h_x >= 0.75);
  CHECK(r.h_x <= 1.25);
  const NormData norm = NormData::for_dim(3);
  CHECK(angle_between(riesz_vector(r.direction, norm), principal_vector(3)) * 180 / std::numbers::pi <= 5.0);
}
