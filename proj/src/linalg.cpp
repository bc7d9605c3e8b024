#include "hitchlab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace hitchlab {

std::vector<std::vector<int>> combinations(int d, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > d) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == d - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

Matrix exterior_power(const Matrix& m, int k) {
  const int d = static_cast<int>(m.rows());
  const auto subsets = combinations(d, k);
  const auto n = static_cast<Eigen::Index>(subsets.size());
  Matrix out(n, n);
  Matrix minor(k, k);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) minor(i, j) = m(subsets[a][i], subsets[b][j]);
      }
      out(a, b) = k == 0 ? 1.0 : minor.determinant();
    }
  }
  return out;
}

namespace {

Eigen::JacobiSVD<Matrix> full_svd(const Matrix& columns) {
  return Eigen::JacobiSVD<Matrix>(columns, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

Eigen::Index numerical_rank(const Vector& sv, double rel_tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > rel_tol * sv(0)) ++r;
  return r;
}

}  // namespace

Matrix orthonormal_basis(const Matrix& columns, double rel_tol) {
  auto svd = full_svd(columns);
  const auto r = numerical_rank(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

Matrix orthogonal_complement(const Matrix& columns, double rel_tol) {
  auto svd = full_svd(columns);
  const auto r = numerical_rank(svd.singularValues(), rel_tol);
  return svd.matrixU().rightCols(columns.rows() - r);
}

double line_angle(const Vector& u, const Vector& v) {
  Vector a = u.normalized();
  Vector b = v.normalized();
  // 2*asin(|a -+ b|/2) is accurate for tiny angles, unlike acos.
  double minus = (a - b).norm();
  double plus = (a + b).norm();
  return 2.0 * std::asin(std::min(1.0, std::min(minus, plus) / 2.0));
}

double subspace_angle(const Matrix& a, const Matrix& b) {
  Matrix qa = orthonormal_basis(a);
  Matrix qb = orthonormal_basis(b);
  // sin of the largest principal angle = |(I - Qb Qb^T) Qa|_2.
  Matrix resid = qa - qb * (qb.transpose() * qa);
  Eigen::JacobiSVD<Matrix> svd(resid);
  double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, s));
}

double distance_to_plus_minus_identity(const Matrix& m) {
  Matrix id = Matrix::Identity(m.rows(), m.cols());
  return std::min((m - id).norm(), (m + id).norm());
}

}  // namespace hitchlab
