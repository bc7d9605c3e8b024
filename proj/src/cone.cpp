#include "hitchlab/cone.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <mutex>
#include <thread>

#include "hitchlab/error.hpp"

namespace hitchlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ray_angle(const CartanVector& a, const CartanVector& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double c = dot / std::sqrt(na * nb);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Euclidean orthonormal basis of {sum a = 0, a_1 = a_d}; coordinates on
// the chart {phi_1d = 1} up to a fixed offset.
Matrix chart_basis(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix cons = Matrix::Zero(n, 2);
  cons.col(0).setOnes();
  cons(0, 1) = 1.0;
  cons(n - 1, 1) = -1.0;
  return orthogonal_complement(cons);
}

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::vector<std::size_t> hull_2d(const std::vector<Eigen::Vector2d>& pts) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  if (idx.size() < 3) return idx;
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (auto i : idx) {
    while (k >= 2 && cross(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= 0) --k;
    h[k++] = i;
  }
  for (std::size_t j = idx.size() - 1, t = k + 1; j-- > 0;) {
    const auto i = idx[j];
    while (k >= t && cross(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= 0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

double halton(std::size_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};

template <typename F>
void parallel_for(std::size_t n, int workers, F&& body) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (std::size_t t = 0; t < std::min(w, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

ConeSample limit_cone(const std::vector<JordanVector>& lambdas) {
  if (lambdas.empty()) fail(ErrorKind::InvalidArgument, "limit cone of an empty sample");
  ConeSample out;
  out.d = lambdas.front().dim();
  const NormData norm = NormData::for_dim(out.d);
  for (const auto& l : lambdas) {
    const double n = norm.norm(l);
    if (n > 0) out.rays.push_back(l * (1.0 / n));
  }
  if (out.rays.empty()) return out;

  const std::size_t d = out.d;
  std::vector<std::size_t> cand;
  if (d <= 2) {
    cand = {0};
  } else {
    const Matrix basis = chart_basis(d);
    const auto m = basis.cols();
    std::vector<Vector> z;
    std::vector<std::size_t> src;
    for (std::size_t k = 0; k < out.rays.size(); ++k) {
      const auto& r = out.rays[k];
      const double w = (r[0] - r[d - 1]) / 2.0;
      if (!(w > 1e-15)) continue;
      Vector y(static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < d; ++i) y[static_cast<Eigen::Index>(i)] = r[i] / w;
      z.push_back(basis.transpose() * y);
      src.push_back(k);
    }
    if (z.empty()) {
      cand = {0};
    } else if (m == 1) {
      std::size_t lo = 0, hi = 0;
      for (std::size_t k = 1; k < z.size(); ++k) {
        if (z[k][0] < z[lo][0]) lo = k;
        if (z[k][0] > z[hi][0]) hi = k;
      }
      cand = {src[lo], src[hi]};
    } else if (m == 2) {
      std::vector<Eigen::Vector2d> pts;
      for (const auto& v : z) pts.emplace_back(v[0], v[1]);
      for (auto i : hull_2d(pts)) cand.push_back(src[i]);
    } else {
      std::vector<Vector> dirs;
      for (Eigen::Index a = 0; a < m; ++a) {
        Vector e = Vector::Zero(m);
        e[a] = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
      }
      for (std::size_t s = 1; s <= 64; ++s) {
        Vector v(m);
        for (Eigen::Index a = 0; a < m; ++a) v[a] = 2.0 * halton(s, kPrimes[a % 15]) - 1.0;
        if (v.norm() > 1e-12) dirs.push_back(v.normalized());
      }
      for (const auto& u : dirs) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < z.size(); ++k) {
          if (u.dot(z[k]) > u.dot(z[best])) best = k;
        }
        cand.push_back(src[best]);
      }
    }
  }
  for (auto c : cand) {
    bool dup = false;
    for (auto e : out.extreme) dup = dup || ray_angle(out.rays[c], out.rays[e]) < 1e-7;
    if (!dup) out.extreme.push_back(c);
  }
  for (std::size_t i = 0; i < out.extreme.size(); ++i) {
    for (std::size_t j = i + 1; j < out.extreme.size(); ++j) {
      out.spread = std::max(out.spread, ray_angle(out.rays[out.extreme[i]], out.rays[out.extreme[j]]));
    }
  }
  return out;
}

nlohmann::json ConeSample::to_json() const {
  nlohmann::json j;
  j["d"] = d;
  j["rays"] = rays.size();
  j["spread"] = spread;
  j["extreme_rays"] = nlohmann::json::array();
  for (auto e : extreme) j["extreme_rays"].push_back(rays[e].coords());
  return j;
}

InteriorResult dual_cone_interior(const LinearForm& phi, const ConeSample& cone, double threshold) {
  InteriorResult r;
  r.margin = kInf;
  for (const auto& ray : cone.rays) r.margin = std::min(r.margin, phi(ray));
  if (cone.rays.empty()) r.margin = 0.0;
  r.pass = r.margin > threshold;
  return r;
}

DualSphere::DualSphere(std::size_t d) : d_(d), norm_(NormData::for_dim(d)) {
  if (d < 2) fail(ErrorKind::InvalidArgument, "dual sphere needs d >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  basis_ = Matrix::Zero(n, n - 1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Vector v = Vector::Zero(n);
    v[k] = 1.0;
    v[k + 1] = -1.0;
    for (Eigen::Index j = 0; j < k; ++j) v -= norm_.scale * basis_.col(j).dot(v) * basis_.col(j);
    basis_.col(k) = v / std::sqrt(norm_.scale * v.squaredNorm());
  }
}

LinearForm DualSphere::form(const Vector& x) const {
  if (x.size() != basis_.cols()) fail(ErrorKind::InvalidArgument, "dual sphere coordinate size");
  const Vector v = basis_ * x;
  return form_of_vector(CartanVector::projected(std::vector<double>(v.data(), v.data() + v.size())), norm_);
}

Vector DualSphere::coords(const LinearForm& phi) const {
  const auto r = riesz_vector(phi, norm_).coords();
  const Eigen::Map<const Vector> v(r.data(), static_cast<Eigen::Index>(r.size()));
  return norm_.scale * basis_.transpose() * v;
}

std::vector<Vector> sphere_points(std::size_t n, std::size_t count) {
  std::vector<Vector> out;
  if (n == 0 || count == 0) return out;
  const auto ni = static_cast<Eigen::Index>(n);
  if (n == 1) {
    out.push_back(Vector::Constant(1, 1.0));
    if (count > 1) out.push_back(Vector::Constant(1, -1.0));
    return out;
  }
  if (n == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double a = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(count);
      Vector v(2);
      v << std::cos(a), std::sin(a);
      out.push_back(v);
    }
    return out;
  }
  if (n == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * static_cast<double>(k);
      Vector v(3);
      v << r * std::cos(a), r * std::sin(a), z;
      out.push_back(v);
    }
    return out;
  }
  for (std::size_t s = 1; out.size() < count; ++s) {
    Vector v(ni);
    for (Eigen::Index a = 0; a < ni; ++a) v[a] = 2.0 * halton(s, kPrimes[a % 15]) - 1.0;
    const double r = v.norm();
    if (r <= 1.0 && r > 1e-6) out.push_back(v / r);
  }
  return out;
}

DBoundarySample d_rho_boundary(const std::vector<ConjClass>& classes, const std::vector<LinearForm>& directions,
                               const Truncation& trunc, int workers) {
  if (classes.empty()) fail(ErrorKind::InsufficientData, "no classes");
  DBoundarySample out;
  out.d = classes.front().lambda.dim();
  const NormData norm = NormData::for_dim(out.d);
  out.points.resize(directions.size());
  parallel_for(directions.size(), workers, [&](std::size_t k) {
    BoundaryPoint p;
    const double n = dual_norm(directions[k], norm);
    if (!(n > 0)) fail(ErrorKind::InvalidArgument, "zero direction");
    p.direction = directions[k] * (1.0 / n);
    try {
      const auto de = direction_entropy(classes, p.direction, trunc);
      p.degenerate = de.degenerate;
      if (!de.degenerate) {
        p.h = de.estimate.h_hat;
        p.uncertainty = de.estimate.uncertainty;
        p.unstable = de.estimate.unstable;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InsufficientData) throw;
      p.degenerate = true;
    }
    out.points[k] = std::move(p);
  });
  return out;
}

nlohmann::json DBoundarySample::to_json() const {
  nlohmann::json j;
  j["d"] = d;
  j["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json q;
    q["direction"] = p.direction.coeffs();
    q["degenerate"] = p.degenerate;
    if (!p.degenerate) {
      q["h"] = p.h;
      q["boundary_point"] = (p.direction * p.h).coeffs();
      q["uncertainty"] = p.uncertainty;
    }
    q["flags"] = nlohmann::json::array();
    if (p.degenerate) q["flags"].push_back("DEGENERATE");
    if (p.unstable) q["flags"].push_back("UNSTABLE");
    j["points"].push_back(q);
  }
  return j;
}

std::vector<LinearForm> interior_directions(const ConeSample& cone, std::size_t count, double max_angle) {
  if (cone.rays.empty() || count == 0) return {};
  const std::size_t d = cone.d;
  const DualSphere sphere(d);
  const NormData norm = NormData::for_dim(d);
  std::vector<double> mean(d, 0.0);
  for (const auto& r : cone.rays) {
    for (std::size_t i = 0; i < d; ++i) mean[i] += r[i];
  }
  Vector x0 = sphere.coords(form_of_vector(CartanVector::projected(mean), norm));
  if (!(x0.norm() > 0)) return {};
  x0.normalize();

  std::vector<Vector> cands{x0};
  const std::size_t n = d - 1;
  if (n >= 2) {
    // Orthonormal tangent basis at x0.
    Matrix t = orthogonal_complement(x0);
    const std::size_t rings = n == 2 ? (count + 1) / 2 : 3;
    const std::size_t per = n == 2 ? 2 : (count + rings - 1) / rings;
    const auto tangent = sphere_points(n - 1, per);
    for (std::size_t r = 0; r < rings; ++r) {
      const double a = max_angle * static_cast<double>(r + 1) / static_cast<double>(rings);
      for (const auto& w : tangent) cands.push_back((std::cos(a) * x0 + std::sin(a) * (t * w)).normalized());
    }
  }
  std::vector<LinearForm> out;
  for (const auto& x : cands) {
    if (out.size() == count) break;
    const auto phi = sphere.form(x);
    if (dual_cone_interior(phi, cone).pass) out.push_back(phi);
  }
  return out;
}

ConvexityReport convexity_diagnostic(const DBoundarySample& sample) {
  ConvexityReport rep;
  const std::size_t d = sample.d;
  const std::size_t n = d - 1;
  const DualSphere sphere(d);
  std::vector<Vector> x, p;
  std::vector<double> h;
  std::vector<std::size_t> src;
  for (std::size_t k = 0; k < sample.points.size(); ++k) {
    const auto& b = sample.points[k];
    if (b.degenerate) continue;
    x.push_back(sphere.coords(b.direction));
    p.push_back(b.h * x.back());
    h.push_back(b.h);
    src.push_back(k);
  }
  double max_angle = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      max_angle = std::max(max_angle, std::acos(std::clamp(x[i].dot(x[j]), -1.0, 1.0)));
    }
  }
  if (x.size() < n + 1 || max_angle < 1e-9 || n == 0) {
    rep.insufficient_spread = true;
    return rep;
  }
  const auto ni = static_cast<Eigen::Index>(n);
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != k) others.push_back(j);
    }
    for (const auto& subset : combinations(static_cast<int>(others.size()), static_cast<int>(n))) {
      Matrix m(ni, ni);
      for (Eigen::Index c = 0; c < ni; ++c) m.col(c) = p[others[static_cast<std::size_t>(subset[c])]];
      Eigen::FullPivLU<Matrix> lu(m);
      if (!lu.isInvertible()) continue;
      const Vector alpha = lu.solve(x[k]);
      if (alpha.minCoeff() < -1e-12) continue;
      const double sum = alpha.sum();
      if (!(sum > 0)) continue;
      // The chord through the chosen boundary points meets the ray of
      // direction k at t* = 1/sum alpha.
      const double violation = h[k] - 1.0 / sum;
      if (rep.configurations == 0 || violation > rep.worst_violation) {
        rep.worst_violation = violation;
        rep.worst_index = src[k];
      }
      ++rep.configurations;
    }
  }
  if (rep.configurations == 0) rep.insufficient_spread = true;
  return rep;
}

nlohmann::json ConvexityReport::to_json() const {
  nlohmann::json j;
  if (insufficient_spread) {
    j["status"] = "insufficient spread";
    return j;
  }
  j["status"] = "ok";
  j["configurations"] = configurations;
  j["worst_violation"] = worst_violation;
  j["worst_index"] = worst_index;
  return j;
}

ZariskiDim zariski_dim(const std::vector<JordanVector>& lambdas, double rel_tol) {
  ZariskiDim z;
  if (lambdas.empty()) return z;
  const auto d = static_cast<Eigen::Index>(lambdas.front().dim());
  Matrix m(static_cast<Eigen::Index>(lambdas.size()), d);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = lambdas[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    z.singular_values.push_back(s[i]);
    if (s[i] > rel_tol * s[0]) ++z.rank;
  }
  return z;
}

nlohmann::json ZariskiDim::to_json() const {
  return {{"rank", rank}, {"singular_values", singular_values}};
}

CriticalExponent minimize_on_dual_sphere(std::size_t d, const std::function<double(const LinearForm&)>& f,
                                         const CriticalExponentConfig& config) {
  const DualSphere sphere(d);
  const std::size_t n = d - 1;
  CriticalExponent out;

  const auto grid = sphere_points(n, std::max<std::size_t>(config.grid, 1));
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), config.workers, [&](std::size_t k) { values[k] = f(sphere.form(grid[k])); });
  out.evaluations = grid.size();
  std::size_t best = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (values[k] < values[best]) best = k;
  }
  if (!(values[best] < kInf)) fail(ErrorKind::NoInteriorDirection, "every probed direction is degenerate");
  Vector x_best = grid[best];
  double f_best = values[best];

  if (n >= 2) {
    // Nelder-Mead on the tangent chart y -> normalize(x0 + T y).
    const Vector x0 = x_best;
    const Matrix t = orthogonal_complement(x0);
    const auto m = t.cols();
    auto point = [&](const Vector& y) -> Vector { return (x0 + t * y).normalized(); };
    auto eval = [&](const Vector& y) {
      ++out.evaluations;
      return f(sphere.form(point(y)));
    };
    const double step = n == 2 ? 2.0 * M_PI / static_cast<double>(grid.size())
                               : std::sqrt(4.0 * M_PI / static_cast<double>(grid.size()));
    std::vector<Vector> simplex{Vector::Zero(m)};
    std::vector<double> fs{f_best};
    for (Eigen::Index i = 0; i < m; ++i) {
      Vector y = Vector::Zero(m);
      y[i] = step;
      simplex.push_back(y);
    }
    // The remaining vertices are independent probes; evaluate them together.
    {
      std::vector<double> v(simplex.size() - 1);
      parallel_for(v.size(), config.workers, [&](std::size_t k) { v[k] = f(sphere.form(point(simplex[k + 1]))); });
      out.evaluations += v.size();
      fs.insert(fs.end(), v.begin(), v.end());
    }
    std::vector<std::size_t> order(simplex.size());
    for (int iter = 0; iter < config.max_iter; ++iter) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
      std::vector<Vector> s2;
      std::vector<double> f2;
      for (auto i : order) {
        s2.push_back(simplex[i]);
        f2.push_back(fs[i]);
      }
      simplex.swap(s2);
      fs.swap(f2);
      double diam = 0.0;
      for (std::size_t i = 1; i < simplex.size(); ++i) diam = std::max(diam, (simplex[i] - simplex[0]).norm());
      if (diam < config.tol) break;

      const std::size_t w = simplex.size() - 1;
      Vector centroid = Vector::Zero(m);
      for (std::size_t i = 0; i < w; ++i) centroid += simplex[i];
      centroid /= static_cast<double>(w);
      const Vector xr = centroid + (centroid - simplex[w]);
      const double fr = eval(xr);
      if (fr < fs[0]) {
        const Vector xe = centroid + 2.0 * (centroid - simplex[w]);
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[w] = xe;
          fs[w] = fe;
        } else {
          simplex[w] = xr;
          fs[w] = fr;
        }
        continue;
      }
      if (fr < fs[w - 1]) {
        simplex[w] = xr;
        fs[w] = fr;
        continue;
      }
      const bool outside = fr < fs[w];
      const Vector xc = outside ? centroid + 0.5 * (xr - centroid) : centroid + 0.5 * (simplex[w] - centroid);
      const double fc = eval(xc);
      if (fc < std::min(fr, fs[w])) {
        simplex[w] = xc;
        fs[w] = fc;
        continue;
      }
      for (std::size_t i = 1; i < simplex.size(); ++i) {
        simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
        fs[i] = eval(simplex[i]);
      }
    }
    std::size_t b = 0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      if (fs[i] < fs[b]) b = i;
    }
    if (fs[b] < f_best) {
      f_best = fs[b];
      x_best = point(simplex[b]);
    }
  }
  out.h_x = f_best;
  out.direction = sphere.form(x_best);
  return out;
}

CriticalExponent critical_exponent(const std::vector<ConjClass>& classes, const Truncation& trunc,
                                   const CriticalExponentConfig& config) {
  if (classes.empty()) fail(ErrorKind::InsufficientData, "no classes");
  const std::size_t d = classes.front().lambda.dim();
  FitOptions quick;
  quick.refits = false;
  auto objective = [&](const LinearForm& phi) {
    try {
      const auto de = direction_entropy(classes, phi, trunc, quick);
      return de.degenerate ? kInf : de.estimate.h_hat;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InsufficientData) return kInf;
      throw;
    }
  };
  CriticalExponent out = minimize_on_dual_sphere(d, objective, config);
  const auto de = direction_entropy(classes, out.direction, trunc);
  out.h_x = de.estimate.h_hat;
  out.uncertainty = de.estimate.uncertainty;
  out.unstable = de.estimate.unstable;
  return out;
}

nlohmann::json CriticalExponent::to_json() const {
  nlohmann::json j;
  j["h_x"] = h_x;
  j["direction"] = direction.coeffs();
  j["uncertainty"] = uncertainty;
  j["evaluations"] = evaluations;
  j["flags"] = nlohmann::json::array();
  if (unstable) j["flags"].push_back("UNSTABLE");
  return j;
}

}  // namespace hitchlab
