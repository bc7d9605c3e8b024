#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hitchlab/benoist.hpp"
#include "hitchlab/error.hpp"

using namespace hitchlab;

namespace {

const ClassTable& fuchsian3() {
  static const ClassTable t = fixtures::seed_table(fuchsian_rep(3), 8.0);
  return t;
}

Point2 mean(const std::vector<Point2>& pts) {
  Point2 c = Point2::Zero();
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

double seed_length(const Word& w) {
  const auto seed = seed_generators();
  Matrix m = Matrix::Identity(2, 2);
  for (Letter x : w) m = m * (x % 2 == 0 ? seed[x / 2] : Matrix(seed[x / 2].inverse()));
  return translation_length_2x2(m);
}

}  // namespace

TEST_CASE("Hilbert distance on the unit disk") {
  const auto disk = ConvexDomain::unit_disk();
  for (double r : {0.1, 0.5, 0.9}) {
    CHECK(hilbert_distance(disk, Point2(0, 0), Point2(r, 0)) == doctest::Approx(std::atanh(r)).epsilon(1e-12));
  }
  CHECK(hilbert_distance(disk, Point2(0.2, 0.3), Point2(0.2, 0.3)) == 0.0);
  const double a = hilbert_distance(disk, Point2(0.1, 0.2), Point2(-0.4, 0.3));
  CHECK(hilbert_distance(disk, Point2(-0.4, 0.3), Point2(0.1, 0.2)) == doctest::Approx(a).epsilon(1e-12));
  CHECK_THROWS_AS(hilbert_distance(disk, Point2(0, 0), Point2(1.5, 0)), Error);

  // Square: distance along the diagonal through the center.
  const auto sq = ConvexDomain::hull({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0, 0}});
  CHECK(sq.is_polygon());
  CHECK(sq.vertices().size() == 4);
  CHECK(hilbert_distance(sq, Point2(0, 0), Point2(0.5, 0)) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("the Fuchsian limit set is a conic and its Hilbert metric is invariant") {
  const auto rep = fuchsian_rep(3);
  const auto& t = fuchsian3();
  const auto sample = limit_set_sample(rep, t.classes);
  CHECK(sample.points.size() > 100);
  const auto fit = fit_conic(sample.points);
  CHECK(fit.is_ellipse);
  CHECK(fit.residual <= 1e-6);
  const auto domain = ConvexDomain::from_conic(fit);
  const Point2 x = mean(sample.points);
  const Point2 y = 0.6 * x + 0.4 * sample.points[sample.points.size() / 3];
  const double dxy = hilbert_distance(domain, x, y);
  for (std::size_t k = 0; k < rep.generators.size(); ++k) {
    const Eigen::Matrix3d g = rep.generators[k].cast<double>();
    const Point2 gx = sample.chart.apply(g, x), gy = sample.chart.apply(g, y);
    CHECK(std::abs(hilbert_distance(domain, gx, gy) - dxy) <= 1e-6 * dxy);
  }
  // Translation along the axis equals the functional.
  const WordSpectra s(rep);
  for (const char* w : {"a1", "b2", "a1b1"}) {
    const auto audit = translation_length_audit(s, sample.chart, domain, parse_word(w));
    CHECK(audit.samples > 0);
    CHECK(audit.sampled == doctest::Approx(audit.functional).epsilon(1e-6));
  }
}

TEST_CASE("phibar on Fuchsian elements is the hyperbolic length") {
  const WordSpectra s(fuchsian_rep(3));
  for (const char* w : {"a1", "B2", "a1b2A2"}) {
    const Word word = parse_word(w);
    const double g = seed_length(word);
    CHECK(hilbert_translation_length(s, word) == doctest::Approx(g).epsilon(1e-10));
    Word sq = word;
    sq.insert(sq.end(), word.begin(), word.end());
    CHECK(hilbert_translation_length(s, sq) == doctest::Approx(2 * g).epsilon(1e-10));
  }
}

TEST_CASE("theta forms in dimension 3") {
  const auto f = ThetaForms::make(3);
  CHECK(f.phiu == simple_root(3, 1));
  CHECK(f.phis == simple_root(3, 2));
  CHECK(f.phibar == phi_1d(3));
  CHECK_THROWS_AS(ThetaForms::make(4), Error);

  // phiu(lambda) is the unstable exponent of the element.
  const auto rep = fixtures::bulged(3, 0.3);
  const WordSpectra s(rep);
  EnumerationOptions o;
  o.max_len = 3;
  for (const auto& e : enumerate_classes(o)) {
    const auto lambda = s.jordan(e.canonical);
    const double u = unstable_exponent(s, e.canonical, 2).direct;
    CHECK(std::abs(to_double(f.phiu)(lambda) - u) <= 1e-12 * (1 + u));
  }
}

TEST_CASE("bulging moves the limit set off the conic") {
  const auto rep = fixtures::bulged(3, 0.3);
  const auto t = fixtures::seed_table(rep, 8.0);
  const auto fuchs = fit_conic(limit_set_sample(fuchsian_rep(3), fuchsian3().classes).points);
  const auto bent = fit_conic(limit_set_sample(rep, t.classes).points);
  CHECK(bent.residual >= 10 * fuchs.residual);
  CHECK(bent.residual > 1e-6);
}

TEST_CASE("limit set sample edge cases") {
  const auto rep = fuchsian_rep(3);
  const auto& t = fuchsian3();
  const std::vector<ConjClass> one{t.classes.front()};
  const auto s = limit_set_sample(rep, one);
  CHECK(s.points.size() == 1);
  CHECK_THROWS_AS(fit_conic(s.points), Error);
  CHECK_THROWS_AS(limit_set_sample(rep, {}), Error);
  CHECK_THROWS_AS(limit_set_sample(fuchsian_rep(4), one), Error);
}

TEST_CASE("Hilbert-length entropies of a Fuchsian representation") {
  const auto t = fixtures::seed_table(fuchsian_rep(3), 11.0);
  const auto e = benoist_entropies(t.classes, t.truncation());
  CHECK(e.phiu.estimate.h_hat >= 0.75);
  CHECK(e.phiu.estimate.h_hat <= 1.25);
  CHECK(e.phis.estimate.h_hat >= 0.75);
  CHECK(e.phis.estimate.h_hat <= 1.25);
  CHECK(e.phibar.estimate.h_hat <= 1.25);
}
