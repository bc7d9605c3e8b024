#pragma once

// Limit cone, dual cone, the entropy-one set D and the critical exponent
// h_X = min over unit-dual-norm directions phi of h^phi.

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

#include "hitchlab/cartan.hpp"
#include "hitchlab/counting.hpp"
#include "hitchlab/spectral.hpp"

namespace hitchlab {

struct ConeSample {
  std::size_t d = 0;
  /// Unit rays lambda/|lambda| (zero vectors dropped).
  std::vector<CartanVector> rays;
  /// Indices into rays of the extreme rays, deduplicated at angle 1e-7.
  std::vector<std::size_t> extreme;
  /// Largest angle between two extreme rays.
  double spread = 0.0;

  nlohmann::json to_json() const;
};

/// Extreme rays are found in the chart a -> a / phi_1d(a), which is an
/// affine (d-2)-plane: exact hull for d <= 4, support maximizers over a
/// fixed set of directions for d >= 5.
ConeSample limit_cone(const std::vector<JordanVector>& lambdas);

struct InteriorResult {
  bool pass = false;
  double margin = 0.0;  // min phi(ray)
};

InteriorResult dual_cone_interior(const LinearForm& phi, const ConeSample& cone, double threshold = 1e-9);

/// Orthonormal basis (for the Cartan inner product) of the trace-zero
/// space; x in the unit sphere S^{d-2} maps to the unit-dual-norm form
/// a -> <sum x_k b_k, a>.
class DualSphere {
 public:
  explicit DualSphere(std::size_t d);
  std::size_t d() const { return d_; }
  std::size_t dim() const { return d_ - 1; }
  LinearForm form(const Vector& x) const;
  Vector coords(const LinearForm& phi) const;  // Riesz coordinates

 private:
  std::size_t d_;
  NormData norm_;
  Matrix basis_;  // d x (d-1), columns b_k
};

/// Deterministic points on S^{n-1}: a circle for n = 2, a Fibonacci sphere
/// for n = 3, a Halton-based sample otherwise.
std::vector<Vector> sphere_points(std::size_t n, std::size_t count);

struct BoundaryPoint {
  LinearForm direction;  // unit dual norm
  bool degenerate = false;
  double h = 0.0;        // the ray meets the boundary of D at h * direction
  double uncertainty = 0.0;
  bool unstable = false;
};

struct DBoundarySample {
  std::size_t d = 0;
  std::vector<BoundaryPoint> points;
  nlohmann::json to_json() const;
};

DBoundarySample d_rho_boundary(const std::vector<ConjClass>& classes, const std::vector<LinearForm>& directions,
                               const Truncation& trunc, int workers = 1);

/// Unit directions strictly inside the dual cone of the sample, spread
/// around the Riesz dual of the cone's mean ray.
std::vector<LinearForm> interior_directions(const ConeSample& cone, std::size_t count, double max_angle = 0.6);

struct ConvexityReport {
  bool insufficient_spread = false;
  std::size_t configurations = 0;
  /// Largest h_k - t* over points k and chords through d-1 others whose
  /// cone contains direction k (positive means a dent).
  double worst_violation = 0.0;
  std::size_t worst_index = 0;

  nlohmann::json to_json() const;
};

ConvexityReport convexity_diagnostic(const DBoundarySample& sample);

struct ZariskiDim {
  int rank = 0;
  std::vector<double> singular_values;
  nlohmann::json to_json() const;
};

ZariskiDim zariski_dim(const std::vector<JordanVector>& lambdas, double rel_tol = 1e-6);

struct CriticalExponentConfig {
  std::size_t grid = 121;
  double tol = 1e-3;
  int max_iter = 200;
  int workers = 1;
};

struct CriticalExponent {
  double h_x = 0.0;
  LinearForm direction;
  double uncertainty = 0.0;
  bool unstable = false;
  std::size_t evaluations = 0;
  nlohmann::json to_json() const;
};

/// Grid over the unit dual sphere, then Nelder-Mead in a tangent chart at
/// the best grid point. Throws NoInteriorDirection when every probe is
/// degenerate.
CriticalExponent critical_exponent(const std::vector<ConjClass>& classes, const Truncation& trunc,
                                   const CriticalExponentConfig& config = {});

/// The same optimizer for an arbitrary objective on the unit dual sphere
/// (returns +inf for excluded directions). Used with synthetic models.
CriticalExponent minimize_on_dual_sphere(std::size_t d, const std::function<double(const LinearForm&)>& f,
                                         const CriticalExponentConfig& config = {});

}  // namespace hitchlab
