#include "hitchlab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "hitchlab/error.hpp"

namespace hitchlab {

namespace {

using HighFloat = boost::multiprecision::cpp_bin_float_50;
using MatrixH = Eigen::Matrix<HighFloat, Eigen::Dynamic, Eigen::Dynamic>;
using VectorH = Eigen::Matrix<HighFloat, Eigen::Dynamic, 1>;

std::vector<long double> sorted_log_moduli(const MatrixL& m) {
  Eigen::EigenSolver<MatrixL> es(m, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::EigenFailure, "eigenvalue iteration did not converge");
  std::vector<long double> logs;
  for (Eigen::Index i = 0; i < m.rows(); ++i) logs.push_back(std::log(std::abs(es.eigenvalues()(i))));
  std::sort(logs.begin(), logs.end(), std::greater<>());
  return logs;
}

JordanVector recentred(const std::vector<long double>& logs) {
  long double mean = 0.0L;
  for (auto x : logs) mean += x;
  mean /= static_cast<long double>(logs.size());
  std::vector<double> c;
  for (auto x : logs) c.push_back(static_cast<double>(x - mean));
  return JordanVector::projected(std::move(c));
}

// Real eigenvectors sorted by decreasing modulus, with their log-moduli,
// for the leading `count` eigenvalues; the trailing ones may be swamped by
// rounding and are neither checked nor returned.
struct SortedEigen {
  std::vector<long double> logs;
  std::vector<VectorL> vecs;
};

SortedEigen sorted_eigen(const MatrixL& m, std::size_t count) {
  Eigen::EigenSolver<MatrixL> es(m);
  if (es.info() != Eigen::Success) fail(ErrorKind::EigenFailure, "eigen-decomposition did not converge");
  const auto n = m.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto& vals = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(vals(a)) > std::abs(vals(b)); });
  SortedEigen out;
  if (order.size() > count) order.resize(count);
  for (auto i : order) {
    if (std::abs(vals(i).imag()) > 1e-12L * std::abs(vals(i))) {
      fail(ErrorKind::NonLoxodromic, "complex eigenvalue pair");
    }
    out.logs.push_back(std::log(std::abs(vals(i))));
    VectorL v = es.eigenvectors().col(i).real();
    out.vecs.push_back(v / v.norm());
  }
  return out;
}

void check_gaps(const std::vector<long double>& logs, std::size_t upto, double tol) {
  for (std::size_t k = 1; k < upto && k < logs.size(); ++k) {
    if (logs[k - 1] - logs[k] <= tol) fail(ErrorKind::NonLoxodromic, "eigenvalue moduli collide");
  }
}

Matrix orthonormal(const Matrix& m) { return orthonormal_basis(m, 0.0); }


double smallest_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (m.cols() > m.rows()) return 0.0;
  return sv.size() ? sv(sv.size() - 1) : 0.0;
}

}  // namespace

JordanVector jordan_projection(const MatrixL& m) {
  if (m.rows() != m.cols() || m.rows() < 1) fail(ErrorKind::InvalidArgument, "jordan_projection needs a square matrix");
  return recentred(sorted_log_moduli(m));
}

JordanVector jordan_projection(const Matrix& m) { return jordan_projection(MatrixL(m.cast<long double>())); }

struct HighLetters {
  std::vector<MatrixH> m;
};

WordSpectra::WordSpectra(const RepSpec& rep) : d_(rep.d), letters_(letter_matrices(rep)) {
  auto high = std::make_shared<HighLetters>();
  for (const auto& g : rep.generators) {
    const MatrixH h = g.cast<HighFloat>();
    high->m.push_back(h);
    high->m.push_back(h.inverse());
  }
  high_ = std::move(high);
}

namespace {

MatrixH high_product(const HighLetters& letters, const Word& w, int d) {
  MatrixH p = MatrixH::Identity(d, d);
  for (Letter x : w) p = p * letters.m[x];
  return p;
}

// Log-moduli of the eigenvalues of a 50-digit product, descending.
std::vector<long double> high_log_moduli(const HighLetters& letters, const Word& w, int d) {
  Eigen::EigenSolver<MatrixH> es(high_product(letters, w, d), false);
  if (es.info() != Eigen::Success) fail(ErrorKind::EigenFailure, "eigenvalue iteration did not converge");
  std::vector<long double> logs;
  for (Eigen::Index i = 0; i < d; ++i) {
    const HighFloat m = boost::multiprecision::sqrt(boost::multiprecision::pow(es.eigenvalues()(i).real(), 2) +
                                                    boost::multiprecision::pow(es.eigenvalues()(i).imag(), 2));
    logs.push_back(static_cast<long double>(boost::multiprecision::log(m)));
  }
  std::sort(logs.begin(), logs.end(), std::greater<>());
  return logs;
}

}  // namespace

JordanVector WordSpectra::jordan(const Word& w) const {
  if (d_ == 1) return JordanVector(std::vector<double>{0.0});
  // Rounding in rho(w) is of size eps |rho(w)|, which for a far-from-normal
  // product swamps the small eigenvalues. Each half of the spectrum is read
  // from the matrix in which it is the large half.
  const auto top = high_log_moduli(*high_, w, d_);
  const auto bottom = high_log_moduli(*high_, hitchlab::inverse(w), d_);
  const auto d = static_cast<std::size_t>(d_);
  std::vector<long double> lambda(d, 0.0L);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < d / 2; ++i) {
    lambda[i] = top[i];
    lambda[d - 1 - i] = -bottom[i];
    sum += lambda[i] + lambda[d - 1 - i];
  }
  if (d % 2 == 1) lambda[d / 2] = -sum;
  return recentred(lambda);
}

std::vector<ConjClass> attach_spectra(const RepSpec& rep, const std::vector<EnumeratedClass>& classes,
                                      int workers) {
  WordSpectra spectra(rep);
  std::vector<ConjClass> out(classes.size());
  auto run = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < classes.size(); i += step) {
      out[i] = {classes[i].canonical, spectra.jordan(classes[i].canonical), classes[i].seed_length};
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, workers));
  if (n == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n);
    for (std::size_t k = 0; k < n; ++k) {
      pool.emplace_back([&, k] {
        try {
          run(k, n);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return out;
}

double min_gap(const JordanVector& lambda) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < lambda.dim(); ++i) g = std::min(g, lambda[i - 1] - lambda[i]);
  return g;
}

namespace {

MatrixL eigen_basis(const MatrixL& m, const MatrixL& m_inv, double modulus_tol) {
  const auto d = static_cast<std::size_t>(m.rows());
  const std::size_t upper = (d + 1) / 2;
  const SortedEigen top = sorted_eigen(m, upper);
  const SortedEigen bottom = sorted_eigen(m_inv, d - upper);
  check_gaps(top.logs, upper, modulus_tol);
  check_gaps(bottom.logs, d - upper, modulus_tol);
  // The gap where the two halves meet.
  if (d - upper > 0 && top.logs[upper - 1] + bottom.logs[d - upper - 1] <= modulus_tol) {
    fail(ErrorKind::NonLoxodromic, "eigenvalue moduli collide");
  }
  MatrixL basis(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) {
    basis.col(static_cast<Eigen::Index>(k)) = k < upper ? top.vecs[k] : bottom.vecs[d - 1 - k];
  }
  return basis;
}

}  // namespace

std::pair<EigenFlag, EigenFlag> eigen_flags(const MatrixL& m, const MatrixL& m_inv, double modulus_tol) {
  const Matrix basis = eigen_basis(m, m_inv, modulus_tol).cast<double>();
  EigenFlag plus{basis};
  EigenFlag minus{basis.rowwise().reverse()};
  return {plus, minus};
}

std::pair<EigenFlag, EigenFlag> eigen_flags(const Matrix& m, double modulus_tol) {
  MatrixL ml = m.cast<long double>();
  return eigen_flags(ml, MatrixL(ml.inverse()), modulus_tol);
}

Vector line_intersection(const EigenFlag& x, const EigenFlag& y, int i, double rel_tol) {
  const int d = x.dim();
  if (i < 1 || i > d) fail(ErrorKind::InvalidArgument, "line index out of range");
  const Matrix cx = orthogonal_complement(x.subspace(i));
  const Matrix cy = orthogonal_complement(y.subspace(d - i + 1));
  Matrix constraints(d, cx.cols() + cy.cols());
  constraints << cx, cy;
  // Kernel of constraints^T: left singular vectors of constraints with zero
  // singular value.
  Eigen::JacobiSVD<Matrix> svd(constraints, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const Eigen::Index r = constraints.cols();  // d - 1 when both pieces have full rank
  if (r != d - 1) fail(ErrorKind::TransversalityFailure, "flag subspaces are rank deficient");
  const double top = sv.size() ? sv(0) : 0.0;
  if (sv(r - 1) <= rel_tol * std::max(1.0, top)) {
    fail(ErrorKind::TransversalityFailure, "intersection is not one-dimensional");
  }
  return svd.matrixU().col(d - 1);
}

Vector line_intersection_exterior(const EigenFlag& x, const EigenFlag& y, int i) {
  const int d = x.dim();
  if (i < 1 || i > d) fail(ErrorKind::InvalidArgument, "line index out of range");
  const Matrix u = orthonormal(x.subspace(i));
  const Matrix w = orthonormal(y.subspace(d - i + 1));
  const int p = static_cast<int>(u.cols());
  const int q = static_cast<int>(w.cols());
  if (p + q != d + 1) fail(ErrorKind::TransversalityFailure, "flag subspaces are rank deficient");
  Vector v = Vector::Zero(d);
  Matrix block(d, d);
  block.leftCols(p) = u;
  for (int j = 0; j < q; ++j) {
    int col = p;
    for (int k = 0; k < q; ++k) {
      if (k != j) block.col(col++) = w.col(k);
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    v += sign * block.determinant() * w.col(j);
  }
  const double n = v.norm();
  if (n == 0.0) fail(ErrorKind::TransversalityFailure, "intersection is not one-dimensional");
  return v / n;
}

TransversalityResult frenet_check(const std::vector<FlagPiece>& pieces, double tol) {
  if (pieces.size() < 2) fail(ErrorKind::InvalidArgument, "frenet_check needs at least two flags");
  const int d = pieces.front().flag->dim();
  int total = 0;
  for (const auto& p : pieces) total += p.dim;
  if (total > d) fail(ErrorKind::InvalidArgument, "dimensions sum past d");
  Matrix all(d, total);
  int col = 0;
  for (const auto& p : pieces) {
    if (p.dim == 0) continue;
    all.middleCols(col, p.dim) = orthonormal(p.flag->subspace(p.dim));
    col += p.dim;
  }
  TransversalityResult r;
  r.margin = total == 0 ? 1.0 : smallest_singular_value(all);
  r.pass = r.margin > tol;
  return r;
}

TransversalityResult property_h_check(const EigenFlag& x, const EigenFlag& z, const EigenFlag& t, int i,
                                      double tol) {
  const int d = x.dim();
  if (i < 2 || i > d - 1) fail(ErrorKind::InvalidArgument, "property (H) needs 2 <= i <= d-1");
  auto same = [](const EigenFlag& a, const EigenFlag& b) {
    return line_angle(a.basis.col(0), b.basis.col(0)) < 1e-9;
  };
  if (same(x, z) || same(x, t) || same(z, t)) {
    fail(ErrorKind::InvalidArgument, "property (H) needs three distinct points");
  }
  const Vector line = line_intersection(x, z, i);
  Matrix all(d, d);
  all.leftCols(d - i + 1) = orthonormal(t.subspace(d - i + 1));
  all.col(d - i + 1) = line;
  if (i > 2) all.rightCols(i - 2) = orthonormal(x.subspace(i - 2));
  TransversalityResult r;
  r.margin = smallest_singular_value(all);
  r.pass = r.margin > tol;
  return r;
}

UnstableExponent unstable_exponent(const WordSpectra& spectra, const Word& w, int i) {
  const int d = spectra.d();
  if (i < 2 || i > d) fail(ErrorKind::InvalidArgument, "unstable exponent needs 2 <= i <= d");
  const JordanVector lambda = spectra.jordan(w);
  if (min_gap(lambda) <= 1e-6) fail(ErrorKind::NonLoxodromic, "eigenvalue moduli collide");

  const MatrixL m = spectra.matrix(w);
  const MatrixL m_inv = spectra.inverse_matrix(w);
  const MatrixL basis = eigen_basis(m, m_inv, 1e-6);
  const MatrixL dual = basis.inverse();
  // T = v_{i-1} f_i^T spans hom(l_i, l_{i-1}) and M T M^-1 = (mu_{i-1}/mu_i) T.
  // Long double eigenpairs lose the middle of the spectrum once |lambda| is
  // large, so each pair is polished by inverse iteration in 50 digits and
  // mu_j is read off as the two-sided Rayleigh quotient.
  const int upper = (d + 1) / 2;
  const auto n = static_cast<Eigen::Index>(d);
  const MatrixH mh = high_product(spectra.high_letters(), w, d);
  auto log_mu = [&](int j) {
    const VectorL v0 = basis.col(j);
    const long double mu0 = j < upper ? dual.row(j).dot(m * v0) : 1.0L / dual.row(j).dot(m_inv * v0);
    const HighFloat shift = HighFloat(mu0) * (1 + HighFloat(1e-12));
    const Eigen::PartialPivLU<MatrixH> lu(mh - shift * MatrixH::Identity(n, n));
    const Eigen::PartialPivLU<MatrixH> lu_t((mh - shift * MatrixH::Identity(n, n)).transpose());
    VectorH v = v0.cast<HighFloat>();
    VectorH f = dual.row(j).transpose().cast<HighFloat>();
    for (int it = 0; it < 2; ++it) {
      v = lu.solve(v);
      v /= v.norm();
      f = lu_t.solve(f);
      f /= f.norm();
    }
    const HighFloat mu = f.dot(mh * v) / f.dot(v);
    return static_cast<long double>(log(abs(mu)));
  };
  const long double exponent = log_mu(i - 2) - log_mu(i - 1);

  UnstableExponent out;
  out.direct = static_cast<double>(exponent);
  out.from_jordan = lambda[static_cast<std::size_t>(i - 2)] - lambda[static_cast<std::size_t>(i - 1)];
  return out;
}

MembershipResult ui_membership(const std::vector<JordanVector>& sample, int i, double threshold) {
  if (sample.empty()) fail(ErrorKind::InsufficientData, "empty Jordan sample");
  const auto d = sample.front().dim();
  if (i < 1 || static_cast<std::size_t>(i) > d) fail(ErrorKind::InvalidArgument, "eps index out of range");
  const NormData norm = NormData::for_dim(d);
  MembershipResult r;
  r.margin = std::numeric_limits<double>::infinity();
  bool seen_pos = false, seen_neg = false;
  for (const auto& l : sample) {
    const double e = l[static_cast<std::size_t>(i - 1)];
    const double n = norm.norm(l);
    if (e > 0) seen_pos = true;
    if (e < 0) seen_neg = true;
    r.margin = std::min(r.margin, n > 0 ? std::abs(e) / n : 0.0);
  }
  r.sign = seen_pos && !seen_neg ? 1 : (seen_neg && !seen_pos ? -1 : 0);
  r.pass = r.sign != 0 && r.margin >= threshold;
  return r;
}

double walls_margin(const std::vector<JordanVector>& sample) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& l : sample) {
    const NormData norm = NormData::for_dim(l.dim());
    const double n = norm.norm(l);
    for (std::size_t i = 1; i < l.dim(); ++i) m = std::min(m, n > 0 ? (l[i - 1] - l[i]) / n : 0.0);
  }
  return m;
}

}  // namespace hitchlab
