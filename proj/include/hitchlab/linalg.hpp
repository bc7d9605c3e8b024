#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hitchlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// Relative singular-value threshold shared by every subspace computation.
inline constexpr double kSubspaceTol = 1e-8;

/// k-subsets of {0..d-1} in lexicographic order; the basis of the k-th
/// exterior power.
std::vector<std::vector<int>> combinations(int d, int k);

/// Matrix of the k-th exterior power on the lexicographic basis e_I.
Matrix exterior_power(const Matrix& m, int k);

/// Orthonormal basis of the column span (columns above the threshold).
Matrix orthonormal_basis(const Matrix& columns, double rel_tol = kSubspaceTol);

/// Orthonormal basis of the orthogonal complement of the column span.
Matrix orthogonal_complement(const Matrix& columns, double rel_tol = kSubspaceTol);

/// Angle between two lines, in [0, pi/2].
double line_angle(const Vector& u, const Vector& v);

/// Largest principal angle between two subspaces of equal dimension.
double subspace_angle(const Matrix& a, const Matrix& b);

/// Frobenius distance to the closer of +I and -I.
double distance_to_plus_minus_identity(const Matrix& m);

}  // namespace hitchlab
