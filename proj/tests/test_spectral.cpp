#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "hitchlab/error.hpp"
#include "hitchlab/spectral.hpp"

using namespace hitchlab;

namespace {

double two_by_two_length(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a);
  double top = 0.0;
  for (int j = 0; j < 2; ++j) top = std::max(top, std::abs(es.eigenvalues()[j]));
  return 2.0 * std::log(top);
}

// Basis vectors v^{d-1-k} w^k of the monomial curve in the coordinates of
// sym_power.
Matrix monomial_curve(const Eigen::Vector2d& v, const Eigen::Vector2d& w, int d, int count) {
  Matrix out(d, count);
  for (int k = 0; k < count; ++k) {
    std::vector<double> p{1.0};
    auto mul = [&](const Eigen::Vector2d& f) {
      std::vector<double> r(p.size() + 1, 0.0);
      for (std::size_t i = 0; i < p.size(); ++i) {
        r[i] += p[i] * f[0];
        r[i + 1] += p[i] * f[1];
      }
      p = r;
    };
    for (int e = 0; e < d - 1 - k; ++e) mul(v);
    for (int e = 0; e < k; ++e) mul(w);
    for (int j = 0; j < d; ++j) out(j, k) = p[static_cast<std::size_t>(j)];
  }
  return out;
}

std::pair<EigenFlag, EigenFlag> flags_of(const WordSpectra& s, const Word& w) {
  return eigen_flags(s.matrix(w), s.inverse_matrix(w));
}

}  // namespace

TEST_CASE("Jordan projections") {
  const auto z = jordan_projection(Matrix(Matrix::Identity(4, 4)));
  for (double x : z.coords()) CHECK(x == doctest::Approx(0.0));
  Matrix diag(2, 2);
  diag << std::exp(1.0), 0, 0, std::exp(-1.0);
  const auto l = jordan_projection(sym_power(diag, 4));
  const double expect[] = {3, 1, -1, -3};
  for (int i = 0; i < 4; ++i) CHECK(l[static_cast<std::size_t>(i)] == doctest::Approx(expect[i]).epsilon(1e-12));
  Matrix d3 = Matrix::Zero(3, 3);
  d3.diagonal() << 3.0, 1.0, 1.0 / 3.0;
  const auto m = jordan_projection(d3);
  CHECK(m[0] == doctest::Approx(std::log(3.0)));
  CHECK(m[1] == doctest::Approx(0.0));
  CHECK(m[2] == doctest::Approx(-std::log(3.0)));
}

TEST_CASE("Jordan projections of words agree with a 100-digit eigen-solve") {
  using Big = boost::multiprecision::cpp_bin_float_100;
  using MatrixB = Eigen::Matrix<Big, Eigen::Dynamic, Eigen::Dynamic>;
  for (int d : {3, 4, 5, 7}) {
    const auto rep = fixtures::bulged(d, 0.2);
    const WordSpectra s(rep);
    EnumerationOptions o;
    o.max_len = 3;
    for (const auto& e : enumerate_classes(o)) {
      const auto a = s.jordan(e.canonical);
      MatrixB p = MatrixB::Identity(d, d);
      for (Letter x : e.canonical) {
        const MatrixB g = rep.generators[x / 2].cast<Big>();
        p = p * (x % 2 == 0 ? g : MatrixB(g.inverse()));
      }
      Eigen::EigenSolver<MatrixB> es(p, false);
      std::vector<double> b;
      for (int i = 0; i < d; ++i) {
        const auto& v = es.eigenvalues()(i);
        b.push_back(static_cast<double>(log(sqrt(v.real() * v.real() + v.imag() * v.imag()))));
      }
      std::sort(b.begin(), b.end(), std::greater<>());
      for (int i = 0; i < d; ++i) {
        CHECK_MESSAGE(std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) <= 1e-12 * (1 + std::abs(b[static_cast<std::size_t>(i)])), "d=" << d << " i=" << i << " len=" << e.canonical.size());
      }
    }
  }
}

TEST_CASE("eigen-flags") {
  Matrix up(3, 3);
  up << 4, 1, 2, 0, 1, 3, 0, 0, 0.25;
  const auto [plus, minus] = eigen_flags(up);
  for (int i = 1; i <= 2; ++i) {
    Matrix coord = Matrix::Identity(3, 3).leftCols(i);
    CHECK(subspace_angle(plus.subspace(i), coord) <= 1e-12);
  }
  // tau_4 generator: eigenlines are the monomials in the 2x2 eigenvectors.
  const auto seed = seed_generators();
  const auto rep = fuchsian_rep(4);
  for (std::size_t k = 0; k < seed.size(); ++k) {
    Eigen::EigenSolver<Matrix> es(seed[k]);
    int hi = std::abs(es.eigenvalues()[0]) > std::abs(es.eigenvalues()[1]) ? 0 : 1;
    const Eigen::Vector2d v = es.eigenvectors().col(hi).real();
    const Eigen::Vector2d w = es.eigenvectors().col(1 - hi).real();
    const auto f = eigen_flags(rep.generators[k], MatrixL(rep.generators[k].inverse())).first;
    for (int i = 1; i <= 3; ++i) CHECK(subspace_angle(f.subspace(i), monomial_curve(v, w, 4, i)) <= 1e-8);
  }
  Matrix rot = Matrix::Identity(4, 4);
  rot.topLeftCorner(2, 2) << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
  rot(2, 2) = 2.0;
  rot(3, 3) = 0.5;
  CHECK_THROWS_AS(eigen_flags(rot), Error);
  try {
    eigen_flags(rot);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonLoxodromic);
  }
}

TEST_CASE("lines l_i(x, y)") {
  const auto rep = fuchsian_rep(3);
  const WordSpectra s(rep);
  const auto [xp, xm] = flags_of(s, parse_word("a1"));
  const auto [yp, ym] = flags_of(s, parse_word("b1"));
  for (int i = 1; i <= 3; ++i) {
    // Fixed points of one element: the i-th eigenline.
    CHECK(line_angle(line_intersection(xp, xm, i), xp.basis.col(i - 1)) <= 1e-9);
    const Vector l = line_intersection(xp, yp, i);
    CHECK(line_angle(l, line_intersection_exterior(xp, yp, i)) <= 1e-8);
    CHECK(line_angle(l, line_intersection(yp, xp, 3 - i + 1)) <= 1e-9);
  }
  CHECK(line_angle(line_intersection(xp, yp, 1), xp.basis.col(0)) <= 1e-12);
  CHECK(line_angle(line_intersection(xp, ym, 1), xp.basis.col(0)) <= 1e-12);
}

TEST_CASE("Frenet and three-point transversality") {
  const auto r5 = fuchsian_rep(5);
  const WordSpectra s5(r5);
  const auto [ap, am] = flags_of(s5, parse_word("a1"));
  const auto [bp, bm] = flags_of(s5, parse_word("b1"));
  const auto [cp, cm] = flags_of(s5, parse_word("a2"));
  for (int i = 1; i < 5; ++i) CHECK(frenet_check({{&ap, i}, {&am, 5 - i}}).pass);
  const auto three = frenet_check({{&ap, 2}, {&bp, 2}, {&cp, 1}});
  CHECK(three.pass);
  CHECK(three.margin > 1e-6);
  CHECK_FALSE(frenet_check({{&ap, 1}, {&ap, 1}}).pass);

  const auto r4 = fuchsian_rep(4);
  const WordSpectra s4(r4);
  const auto x = flags_of(s4, parse_word("a1")).first;
  const auto z = flags_of(s4, parse_word("b1")).first;
  const auto t = flags_of(s4, parse_word("a2")).first;
  CHECK(property_h_check(x, z, t, 2).pass);
  CHECK(property_h_check(x, z, t, 3).pass);
  CHECK_THROWS_AS(property_h_check(x, z, x, 2), Error);

  const WordSpectra s3(fuchsian_rep(3));
  CHECK(property_h_check(flags_of(s3, parse_word("a1")).first, flags_of(s3, parse_word("b1")).first,
                         flags_of(s3, parse_word("a2")).first, 2)
            .pass);
}

TEST_CASE("unstable exponent") {
  for (int d : {3, 4, 5}) {
    const auto rep = fuchsian_rep(d);
    const WordSpectra s(rep);
    const auto seed = seed_generators();
    for (std::size_t k = 0; k < seed.size(); ++k) {
      const Word w{static_cast<Letter>(2 * k)};
      const double g = two_by_two_length(seed[k]);
      for (int i = 2; i <= d; ++i) {
        const auto u = unstable_exponent(s, w, i);
        CHECK(u.direct == doctest::Approx(g).epsilon(1e-10));
        CHECK(u.from_jordan == doctest::Approx(g).epsilon(1e-10));
      }
    }
  }
  // Inverse element: exponent_i(gamma^-1) = sigma_{d-i+1}(lambda(gamma)).
  const auto b4 = fixtures::bulged(4, 0.3);
  const WordSpectra s(b4);
  std::mt19937_64 rng(4);
  EnumerationOptions o;
  o.max_len = 4;
  const auto classes = enumerate_classes(o);
  std::uniform_int_distribution<std::size_t> pick(0, classes.size() - 1);
  for (int n = 0; n < 30; ++n) {
    const Word& w = classes[pick(rng)].canonical;
    const auto lambda = s.jordan(w);
    for (int i = 2; i <= 4; ++i) {
      const auto u = unstable_exponent(s, w, i);
      CHECK(std::abs(u.direct - u.from_jordan) <= 1e-8);
      const auto v = unstable_exponent(s, inverse(w), i);
      const double sigma = lambda[static_cast<std::size_t>(4 - i)] - lambda[static_cast<std::size_t>(5 - i)];
      CHECK(std::abs(v.direct - sigma) <= 1e-10 * (1 + sigma));
    }
  }
  CHECK_THROWS_AS(unstable_exponent(s, parse_word("a1"), 1), Error);
}

TEST_CASE("eps_i sign membership") {
  const auto s4 = fixtures::seed_table(fuchsian_rep(4), 7.0);
  std::vector<JordanVector> l4;
  for (const auto& c : s4.classes) l4.push_back(c.lambda);
  const auto m4 = ui_membership(l4, 2);
  CHECK(m4.pass);
  CHECK(m4.sign == 1);
  const auto s3 = fixtures::seed_table(fuchsian_rep(3), 7.0);
  std::vector<JordanVector> l3;
  for (const auto& c : s3.classes) l3.push_back(c.lambda);
  CHECK_FALSE(ui_membership(l3, 2).pass);
  CHECK_THROWS_AS(ui_membership({}, 2), Error);
}

TEST_CASE("walls margin") {
  for (double t : {0.0, 0.3}) {
    const auto table = fixtures::seed_table(fixtures::bulged(3, t), 7.0);
    std::vector<JordanVector> l;
    for (const auto& c : table.classes) l.push_back(c.lambda);
    CHECK(walls_margin(l) > 0.0);
  }
  CHECK(std::isinf(walls_margin({})));
}
