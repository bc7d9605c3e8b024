#include "hitchlab/benoist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

#include "hitchlab/error.hpp"

namespace hitchlab {

ThetaForms ThetaForms::make(std::size_t d) {
  if (d != 3) fail(ErrorKind::InvalidArgument, "the theta forms are implemented for d = 3");
  const auto n = static_cast<long long>(d - 1);
  const ExactForm w1 = fundamental_weight(d, 1);
  const ExactForm wn = fundamental_weight(d, d - 1);
  return {phi_1d(d), w1 * Rational(n) - wn, wn * Rational(n) - w1};
}

ChartFrame::ChartFrame(const Eigen::Vector3d& functional) : ell(functional) {
  if (!(ell.norm() > 0)) fail(ErrorKind::InvalidArgument, "chart functional must be nonzero");
  Eigen::Matrix<double, 3, 1> n = ell.normalized();
  Eigen::Vector3d a = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  Eigen::Vector3d e1 = (a - a.dot(n) * n).normalized();
  frame.col(0) = e1;
  frame.col(1) = n.cross(e1);
}

Point2 ChartFrame::to_chart(const Eigen::Vector3d& v) const {
  const double w = ell.dot(v);
  if (w == 0.0 || !std::isfinite(w)) fail(ErrorKind::OutsideDomain, "point on the chart's line at infinity");
  return frame.transpose() * (v / w);
}

Eigen::Vector3d ChartFrame::lift(const Point2& p) const {
  // Base point of {ell = 1} along ell, plus the frame coordinates.
  return ell / ell.squaredNorm() + frame * p;
}

Point2 ChartFrame::apply(const Eigen::Matrix3d& m, const Point2& p) const { return to_chart(m * lift(p)); }

namespace {

Eigen::Matrix3d to_3x3(const MatrixL& m) { return m.cast<double>(); }

struct FixedLines {
  Eigen::Vector3d attracting, middle, repelling;
};

FixedLines fixed_lines(const WordSpectra& spectra, const Word& w) {
  const auto [plus, minus] = eigen_flags(spectra.matrix(w), spectra.inverse_matrix(w));
  return {plus.basis.col(0), plus.basis.col(1), plus.basis.col(2)};
}

}  // namespace

LimitSetSample limit_set_sample(const RepSpec& rep, const std::vector<ConjClass>& classes, int workers) {
  if (rep.d != 3) fail(ErrorKind::InvalidArgument, "limit set sampling is implemented for d = 3");
  if (classes.empty()) fail(ErrorKind::InsufficientData, "no classes");
  const WordSpectra spectra(rep);
  std::vector<std::optional<FixedLines>> lines(classes.size());
  std::size_t skipped = 0;
  {
    const auto w = static_cast<std::size_t>(std::max(1, workers));
    std::vector<std::thread> pool;
    std::vector<std::size_t> skip(w, 0);
    for (std::size_t t = 0; t < w; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < classes.size(); k += w) {
          if (!(min_gap(classes[k].lambda) > 1e-9)) {
            ++skip[t];
            continue;
          }
          try {
            lines[k] = fixed_lines(spectra, classes[k].canonical);
          } catch (const Error&) {
            ++skip[t];
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    skipped = std::accumulate(skip.begin(), skip.end(), std::size_t{0});
  }

  std::vector<std::size_t> valid;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k]) valid.push_back(k);
  }
  if (valid.empty()) fail(ErrorKind::InsufficientData, "no loxodromic classes");

  // Tangent functionals at three distinct repelling points, signed to be
  // positive on a common reference point of the limit set.
  Eigen::Vector3d ell = Eigen::Vector3d::Zero();
  const Eigen::Vector3d ref = lines[valid.front()]->attracting;
  std::vector<Eigen::Vector3d> used;
  for (auto k : valid) {
    const auto& fl = *lines[k];
    bool distinct = true;
    for (const auto& u : used) distinct = distinct && std::abs(u.dot(fl.repelling)) < 1.0 - 1e-6;
    if (!distinct) continue;
    Eigen::Vector3d f = fl.middle.cross(fl.repelling);
    if (std::abs(f.dot(ref)) < 1e-9 * f.norm() * ref.norm()) continue;
    if (f.dot(ref) < 0) f = -f;
    ell += f.normalized();
    used.push_back(fl.repelling);
    if (used.size() == 3) break;
  }
  if (used.empty()) fail(ErrorKind::InsufficientData, "no usable reference element for the chart");

  LimitSetSample out{ChartFrame(ell), {}, skipped};
  std::vector<Point2> pts;
  for (auto k : valid) pts.push_back(out.chart.to_chart(lines[k]->attracting));
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  for (const auto& p : pts) {
    bool dup = false;
    for (auto it = out.points.rbegin(); it != out.points.rend() && p.x() - it->x() <= 1e-6; ++it) {
      if ((p - *it).norm() <= 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) out.points.push_back(p);
  }
  return out;
}

ConicFit fit_conic(const std::vector<Point2>& points) {
  if (points.size() < 5) fail(ErrorKind::InsufficientData, "a conic fit needs at least 5 points");
  Point2 c = Point2::Zero();
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  double ms = 0.0;
  for (const auto& p : points) ms += (p - c).squaredNorm();
  const double s = std::sqrt(2.0 / (ms / static_cast<double>(points.size())));
  Matrix design(static_cast<Eigen::Index>(points.size()), 6);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Point2 q = s * (points[k] - c);
    design.row(static_cast<Eigen::Index>(k)) << q.x() * q.x(), q.x() * q.y(), q.y() * q.y(), q.x(), q.y(), 1.0;
  }
  Eigen::JacobiSVD<Matrix> svd(design, Eigen::ComputeFullV);
  const Vector v = svd.matrixV().col(5);
  ConicFit fit;
  fit.residual = svd.singularValues()[5] / std::sqrt(static_cast<double>(points.size()));
  // Back to the original coordinates: q = s (p - c).
  Eigen::Matrix2d a;
  a << v[0], v[1] / 2, v[1] / 2, v[2];
  const Point2 b(v[3], v[4]);
  const Eigen::Matrix2d a2 = s * s * a;
  const Point2 b2 = -2.0 * s * s * (a * c) + s * b;
  const double f2 = s * s * c.dot(a * c) - s * b.dot(c) + v[5];
  fit.coeffs << a2(0, 0), 2 * a2(0, 1), a2(1, 1), b2.x(), b2.y(), f2;
  fit.coeffs.normalize();
  fit.is_ellipse = a.determinant() > 0;
  return fit;
}

ConvexDomain ConvexDomain::ellipse(const Point2& center, const Eigen::Matrix2d& shape) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(shape);
  if (!(es.eigenvalues().minCoeff() > 0)) fail(ErrorKind::InvalidArgument, "ellipse shape must be positive definite");
  ConvexDomain d;
  d.center_ = center;
  d.shape_ = shape;
  return d;
}

ConvexDomain ConvexDomain::from_conic(const ConicFit& fit) {
  if (!fit.is_ellipse) fail(ErrorKind::InvalidArgument, "fitted conic is not an ellipse");
  const auto& k = fit.coeffs;
  Eigen::Matrix2d a;
  a << k[0], k[1] / 2, k[1] / 2, k[2];
  const Point2 b(k[3], k[4]);
  const Point2 c = -0.5 * a.inverse() * b;
  const double r = c.dot(a * c) - k[5];
  return ellipse(c, a / r);
}

ConvexDomain ConvexDomain::hull(const std::vector<Point2>& points) {
  std::vector<Point2> p = points;
  std::sort(p.begin(), p.end(), [](const Point2& a, const Point2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) fail(ErrorKind::InsufficientData, "hull needs at least 3 distinct points");
  auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Point2> h(2 * p.size());
  std::size_t k = 0;
  for (const auto& q : p) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], q) <= 0) --k;
    h[k++] = q;
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  if (h.size() < 3) fail(ErrorKind::InsufficientData, "hull is degenerate");
  ConvexDomain d;
  d.polygon_ = true;
  d.vertices_ = std::move(h);
  return d;
}

bool ConvexDomain::contains(const Point2& p) const {
  if (!polygon_) return (p - center_).dot(shape_ * (p - center_)) < 1.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = vertices_[(i + 1) % n] - vertices_[i];
    const Point2 r = p - vertices_[i];
    if (!(e.x() * r.y() - e.y() * r.x() > 0)) return false;
  }
  return true;
}

std::pair<double, double> ConvexDomain::exit_parameters(const Point2& x, const Point2& y) const {
  if (!contains(x) || !contains(y)) fail(ErrorKind::OutsideDomain, "point not strictly inside the domain");
  const Point2 u = y - x;
  if (!polygon_) {
    const Point2 r = x - center_;
    const double a = u.dot(shape_ * u), b = 2 * u.dot(shape_ * r), c = r.dot(shape_ * r) - 1.0;
    const double disc = std::sqrt(b * b - 4 * a * c);
    // c < 0, so the roots have opposite signs; avoid cancellation.
    const double q = -0.5 * (b + std::copysign(disc, b));
    const double t1 = q / a, t2 = c / q;
    return {std::min(t1, t2), std::max(t1, t2)};
  }
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  // Each edge is a half-plane n.(p - v) >= 0 with inward normal n.
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e = vertices_[(i + 1) % n] - vertices_[i];
    const Point2 normal(-e.y(), e.x());
    const double g0 = normal.dot(x - vertices_[i]);  // > 0 inside
    const double g1 = normal.dot(u);
    if (g1 < 0) hi = std::min(hi, -g0 / g1);
    if (g1 > 0) lo = std::max(lo, -g0 / g1);
  }
  return {lo, hi};
}

double hilbert_distance(const ConvexDomain& domain, const Point2& x, const Point2& y) {
  if (!domain.contains(x) || !domain.contains(y)) fail(ErrorKind::OutsideDomain, "point not strictly inside the domain");
  if ((x - y).norm() == 0.0) return 0.0;
  const auto [tp, tq] = domain.exit_parameters(x, y);
  return 0.5 * (std::log(tq * (1.0 - tp)) - std::log((tq - 1.0) * (-tp)));
}

double hilbert_translation_length(const WordSpectra& spectra, const Word& w) {
  if (spectra.d() != 3) fail(ErrorKind::InvalidArgument, "Hilbert translation length needs d = 3");
  const auto lambda = spectra.jordan(w);
  if (!(min_gap(lambda) > 1e-9)) fail(ErrorKind::NonLoxodromic, "element is not loxodromic");
  return (lambda[0] - lambda[2]) / 2.0;
}

AxisTranslation translation_length_audit(const WordSpectra& spectra, const ChartFrame& chart,
                                         const ConvexDomain& domain, const Word& w, std::size_t samples) {
  AxisTranslation out;
  out.functional = hilbert_translation_length(spectra, w);
  const auto fl = fixed_lines(spectra, w);
  const Point2 plus = chart.to_chart(fl.attracting);
  const Point2 minus = chart.to_chart(fl.repelling);
  Eigen::Matrix3d m = to_3x3(spectra.matrix(w));
  m /= m.cwiseAbs().maxCoeff();
  out.sampled = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k + 1) / static_cast<double>(samples + 1);
    const Point2 p = minus + t * (plus - minus);
    const Point2 q = chart.apply(m, p);
    if (!domain.contains(p) || !domain.contains(q)) continue;
    out.sampled = std::min(out.sampled, hilbert_distance(domain, p, q));
    ++out.samples;
  }
  if (out.samples == 0) fail(ErrorKind::OutsideDomain, "no axis point inside the domain");
  return out;
}

nlohmann::json BenoistEntropies::to_json() const {
  return {{"phibar", phibar.to_json()}, {"phiu", phiu.to_json()}, {"phis", phis.to_json()}};
}

BenoistEntropies benoist_entropies(const std::vector<ConjClass>& classes, const Truncation& trunc) {
  if (classes.empty()) fail(ErrorKind::InsufficientData, "no classes");
  const auto forms = ThetaForms::make(classes.front().lambda.dim());
  return {direction_entropy(classes, to_double(forms.phibar), trunc),
          direction_entropy(classes, to_double(forms.phiu), trunc),
          direction_entropy(classes, to_double(forms.phis), trunc)};
}

}  // namespace hitchlab
