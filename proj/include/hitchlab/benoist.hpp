#pragma once

// Convex projective picture in dimension 3: limit-set samples in an affine
// chart, conic fits, Hilbert distances and the Hilbert-length functionals.

#include <json.hpp>

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "hitchlab/cartan.hpp"
#include "hitchlab/counting.hpp"
#include "hitchlab/spectral.hpp"

namespace hitchlab {

/// phibar = (eps_1 - eps_3)/2, phiu = n omega_1 - omega_n,
/// phis = n omega_n - omega_1 with n = d - 1 = 2.
struct ThetaForms {
  ExactForm phibar, phiu, phis;
  static ThetaForms make(std::size_t d = 3);
};

using Point2 = Eigen::Vector2d;

/// Affine chart {ell = 1} of RP^2 with an orthonormal frame of ker ell.
struct ChartFrame {
  Eigen::Vector3d ell;
  Eigen::Matrix<double, 3, 2> frame;

  explicit ChartFrame(const Eigen::Vector3d& functional);
  ChartFrame() : ChartFrame(Eigen::Vector3d(0, 0, 1)) {}
  /// Throws OutsideDomain when ell(v) == 0.
  Point2 to_chart(const Eigen::Vector3d& v) const;
  Eigen::Vector3d lift(const Point2& p) const;
  /// Projective action of m on chart points.
  Point2 apply(const Eigen::Matrix3d& m, const Point2& p) const;
};

struct LimitSetSample {
  ChartFrame chart;
  std::vector<Point2> points;
  std::size_t skipped = 0;  // non-loxodromic or failed eigen-solves
};

/// Attracting eigenlines of rho(gamma), deduplicated at distance 1e-6. The
/// chart functional is the sum of the sign-normalized repelling hyperplanes
/// of the first three classes, which lies inside the dual cone, so the
/// sample is bounded.
LimitSetSample limit_set_sample(const RepSpec& rep, const std::vector<ConjClass>& classes, int workers = 1);

struct ConicFit {
  /// a x^2 + b xy + c y^2 + d x + e y + f in the original chart
  /// coordinates, unit coefficient vector.
  Eigen::Matrix<double, 6, 1> coeffs;
  /// RMS algebraic residual after centering and scaling the points to RMS
  /// radius sqrt 2.
  double residual = 0.0;
  bool is_ellipse = false;
};

ConicFit fit_conic(const std::vector<Point2>& points);

/// Bounded convex region of a chart: an ellipse (x-c)^T E (x-c) < 1 or a
/// convex polygon with counter-clockwise vertices.
class ConvexDomain {
 public:
  static ConvexDomain ellipse(const Point2& center, const Eigen::Matrix2d& shape);
  static ConvexDomain unit_disk() { return ellipse(Point2(0, 0), Eigen::Matrix2d::Identity()); }
  /// Throws InvalidArgument unless the fit is an ellipse.
  static ConvexDomain from_conic(const ConicFit& fit);
  /// Convex hull of the points.
  static ConvexDomain hull(const std::vector<Point2>& points);

  bool is_polygon() const { return polygon_; }
  const std::vector<Point2>& vertices() const { return vertices_; }
  bool contains(const Point2& p) const;

  /// Parameters t_p < 0 < 1 < t_q where x + t (y - x) leaves the domain.
  /// Throws OutsideDomain unless x and y are strictly inside.
  std::pair<double, double> exit_parameters(const Point2& x, const Point2& y) const;

 private:
  bool polygon_ = false;
  Point2 center_;
  Eigen::Matrix2d shape_;
  std::vector<Point2> vertices_;
};

/// (1/2) log [p, x; y, q]; the unit disk gives the curvature -1 metric.
double hilbert_distance(const ConvexDomain& domain, const Point2& x, const Point2& y);

/// phibar(lambda(rho gamma)) = (lambda_1 - lambda_3)/2. Throws NonLoxodromic.
double hilbert_translation_length(const WordSpectra& spectra, const Word& w);

struct AxisTranslation {
  double functional = 0.0;
  /// min over points p on the axis of hilbert_distance(p, gamma p).
  double sampled = 0.0;
  std::size_t samples = 0;
};

/// Both routes for one element; the axis joins the repelling and
/// attracting fixed points in the chart.
AxisTranslation translation_length_audit(const WordSpectra& spectra, const ChartFrame& chart,
                                         const ConvexDomain& domain, const Word& w, std::size_t samples = 41);

struct BenoistEntropies {
  DirectionEntropy phibar, phiu, phis;
  nlohmann::json to_json() const;
};

BenoistEntropies benoist_entropies(const std::vector<ConjClass>& classes, const Truncation& trunc);

}  // namespace hitchlab
