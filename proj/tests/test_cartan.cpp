#include <doctest.h>

#include <cmath>
#include <random>

#include "hitchlab/cartan.hpp"
#include "hitchlab/error.hpp"

using namespace hitchlab;

namespace {

std::vector<double> principal(std::size_t d) {
  std::vector<double> u;
  for (std::size_t k = 0; k < d; ++k) u.push_back(static_cast<double>(d) - 1.0 - 2.0 * static_cast<double>(k));
  return u;
}

// sup of phi over unit vectors of the trace-zero space, by sampling.
double sampled_dual_norm(const LinearForm& phi, std::mt19937_64& rng, int samples) {
  const auto d = phi.dim();
  const NormData norm = NormData::for_dim(d);
  std::normal_distribution<double> g;
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> a(d);
    for (auto& x : a) x = g(rng);
    const auto v = CartanVector::projected(a);
    best = std::max(best, phi(v) / norm.norm(v));
  }
  return best;
}

}  // namespace

TEST_CASE("simple roots and fundamental weights evaluate as differences and partial sums") {
  CHECK(to_double(simple_root(4, 2))(CartanVector({3, 1, -1, -3})) == doctest::Approx(2.0));
  CHECK(to_double(simple_root(3, 1))(CartanVector({2, 0, -2})) == doctest::Approx(2.0));
  CHECK(to_double(simple_root(5, 4))(CartanVector({0, 0, 0, 0, 0})) == 0.0);
  const CartanVector a({0.7, 0.5, -1.2});
  CHECK(to_double(fundamental_weight(3, 2))(a) == doctest::Approx(-a[2]));
  for (std::size_t d = 2; d <= 8; ++d) {
    std::vector<double> x(d, 0.0);
    x[0] = 1.0;
    x[d - 1] = -1.0;
    CHECK(to_double(fundamental_weight(d, 1))(CartanVector(x)) == doctest::Approx(1.0));
    CHECK(to_double(fundamental_weight(d, 1))(CartanVector(std::vector<double>(d, 0.0))) == 0.0);
  }
}

TEST_CASE("forms are equal modulo the constant functional") {
  const ExactForm f({Rational(1), Rational(0), Rational(-1)});
  const ExactForm g({Rational(3), Rational(2), Rational(1)});
  CHECK(f == g);
  Rational sum(0);
  for (const auto& c : g.coeffs()) sum += c;
  CHECK(sum == Rational(0));
}

TEST_CASE("trace-zero check on Cartan vectors") {
  CHECK_THROWS_AS(CartanVector({1.0, 1.0}), Error);
  CHECK_NOTHROW(CartanVector({1.0, -1.0}));
}

TEST_CASE("c_d pins the principal vector to length 2") {
  for (std::size_t d = 2; d <= 8; ++d) {
    const auto n = static_cast<long long>(d);
    CHECK(NormData::exact_scale(d) == Rational(12, n * (n * n - 1)));
    const auto u = principal(d);
    double raw = 0.0;
    for (double x : u) raw += x * x;
    CHECK(std::sqrt(12.0 / (n * (n * n - 1.0)) * raw) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(NormData::for_dim(d).norm(u) == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("dual norm: zero form, sigma_1 in d = 2, and a sampled sup") {
  std::mt19937_64 rng(7);
  const NormData n2 = NormData::for_dim(2);
  CHECK(dual_norm(LinearForm({0.0, 0.0}), n2) == 0.0);
  // On a = (y, -y): <v,a> = 2(v1 - v2) y = 2y forces v = (1/2, -1/2), |v| = 1.
  const auto v = riesz_vector(to_double(simple_root(2, 1)), n2);
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(-0.5));
  CHECK(dual_norm(to_double(simple_root(2, 1)), n2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sampled_dual_norm(to_double(simple_root(2, 1)), rng, 100) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t d = 3; d <= 6; ++d) {
    const auto phi = to_double(simple_root(d, 1)) + to_double(fundamental_weight(d, d - 1)) * 0.3;
    const double exact = dual_norm(phi, NormData::for_dim(d));
    const double sampled = sampled_dual_norm(phi, rng, 200000);
    CHECK(sampled <= exact * (1 + 1e-12));
    CHECK(sampled >= exact * 0.97);
  }
}

TEST_CASE("minimum dual norm over the affine hull of the simple roots is 1") {
  for (std::size_t d = 2; d <= 8; ++d) {
    std::vector<LinearForm> roots;
    for (std::size_t i = 1; i < d; ++i) roots.push_back(to_double(simple_root(d, i)));
    const NormData norm = NormData::for_dim(d);
    const auto m = min_dual_norm_on_affine_hull(roots, norm);
    CHECK(std::abs(m.value - 1.0) <= 1e-8);
    // Every form of the hull takes the value 2 on u, so the minimizer is
    // a -> <u, a> / 2.
    const auto psi = form_of_vector(CartanVector(principal(d)) * 0.5, norm);
    for (std::size_t k = 0; k < d; ++k) CHECK(m.minimizer.coeffs()[k] == doctest::Approx(psi.coeffs()[k]).epsilon(1e-9));
    CHECK(dual_norm(psi, norm) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("c(phi) in exact arithmetic") {
  for (std::size_t d = 3; d <= 8; ++d) {
    const Rational expected(2, static_cast<long long>(d) - 1);
    CHECK(c_of_phi(phi_1(d)).value() == expected);
    CHECK(c_of_phi(phi_1d(d)).value() == expected);
    CHECK(c_of_phi(simple_root(d, 1)).value() == Rational(1));
    CHECK(c_of_phi(phi_1d(d) * Rational(3)).value() == expected / Rational(3));
    CHECK_FALSE(c_of_phi(simple_root(d, 1) * Rational(-1)).has_value());
    CHECK_FALSE(c_of_phi(simple_root(d, 1) - simple_root(d, 2)).has_value());
  }
  CHECK(*c_of_phi(to_double(phi_1d(5))) == doctest::Approx(0.5));
}

TEST_CASE("opposition involution") {
  const auto a = opposition_involution(CartanVector({3, 1, -1, -3}));
  CHECK(a.coords() == std::vector<double>({3, 1, -1, -3}));
  const auto b = opposition_involution(CartanVector({2, 1, -3}));
  CHECK(b[0] == doctest::Approx(3));
  CHECK(b[1] == doctest::Approx(-1));
  CHECK(b[2] == doctest::Approx(-2));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> x(5);
    for (auto& c : x) c = g(rng);
    const auto v = CartanVector::projected(x);
    const auto w = opposition_involution(opposition_involution(v));
    for (std::size_t i = 0; i < 5; ++i) CHECK(w[i] == doctest::Approx(v[i]).epsilon(1e-14));
  }
}

TEST_CASE("form presets and JSON arrays") {
  CHECK(parse_form("sigma:2", 4) == to_double(simple_root(4, 2)));
  CHECK(parse_form("omega:1", 4) == to_double(fundamental_weight(4, 1)));
  CHECK(parse_form("phibar", 3) == to_double(phi_1d(3)));
  CHECK(parse_form("[1, -1, 0]", 3) == to_double(simple_root(3, 1)));
  CHECK_THROWS_AS(parse_form("sigma:4", 4), Error);
  CHECK_THROWS_AS(parse_form("nonsense", 3), Error);
  CHECK_THROWS_AS(parse_form("[1, 2]", 3), Error);
  const auto round = parse_form(form_to_json(parse_form("phiu", 3)), 3);
  CHECK(round == parse_form("phiu", 3));
}
