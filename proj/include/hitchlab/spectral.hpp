#pragma once

// Per-element spectral data: Jordan projections, eigen-flags, the lines
// l_i(x,y) = zeta_i(x) cap zeta_{d-i+1}(y), transversality checks and the
// unstable exponent.

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "hitchlab/cartan.hpp"
#include "hitchlab/linalg.hpp"
#include "hitchlab/rep.hpp"
#include "hitchlab/words.hpp"

namespace hitchlab {

/// Sorted log-moduli of the eigenvalues (nonincreasing, recentred to sum 0).
using JordanVector = CartanVector;

JordanVector jordan_projection(const MatrixL& m);
JordanVector jordan_projection(const Matrix& m);

/// Jordan projections of words: 50-digit products, the upper half of the
/// spectrum read from rho(w) and the lower half from rho(w)^-1. A direct
/// double eigen-solve loses the small eigenvalues of long words. Inverse
/// letters are formed in 50 digits from the stored generators.
struct HighLetters;

class WordSpectra {
 public:
  explicit WordSpectra(const RepSpec& rep);

  int d() const { return d_; }
  const std::vector<MatrixL>& letters() const { return letters_; }
  const HighLetters& high_letters() const { return *high_; }

  JordanVector jordan(const Word& w) const;
  MatrixL matrix(const Word& w) const { return word_matrix(letters_, w); }
  MatrixL inverse_matrix(const Word& w) const { return word_matrix(letters_, hitchlab::inverse(w)); }

 private:
  int d_;
  std::vector<MatrixL> letters_;
  std::shared_ptr<const HighLetters> high_;
};

/// One conjugacy class with its spectral fingerprint.
struct ConjClass {
  Word canonical;
  JordanVector lambda;
  double seed_length = 0.0;
};

std::vector<ConjClass> attach_spectra(const RepSpec& rep, const std::vector<EnumeratedClass>& classes,
                                      int workers = 1);

/// Minimal consecutive gap lambda_i - lambda_{i+1}.
double min_gap(const JordanVector& lambda);

/// Eigen-directions of a loxodromic element ordered by decreasing modulus;
/// zeta_i = span of the first i columns.
struct EigenFlag {
  Matrix basis;
  int dim() const { return static_cast<int>(basis.rows()); }
  Matrix subspace(int i) const { return basis.leftCols(i); }
};

/// (zeta(gamma_+), zeta(gamma_-)): the attracting flags of M and of M^-1.
/// Directions for the upper half of the spectrum are taken from M, those
/// for the lower half from M^-1, where they are the dominant ones.
std::pair<EigenFlag, EigenFlag> eigen_flags(const MatrixL& m, const MatrixL& m_inv,
                                            double modulus_tol = 1e-6);
std::pair<EigenFlag, EigenFlag> eigen_flags(const Matrix& m, double modulus_tol = 1e-6);

/// zeta_i(x) cap zeta_{d-i+1}(y) as the kernel of the stacked orthogonal
/// complement constraints. Throws TransversalityFailure unless 1-dimensional.
Vector line_intersection(const EigenFlag& x, const EigenFlag& y, int i, double rel_tol = kSubspaceTol);

/// Same line through the exterior algebra: with U, W bases of the two
/// subspaces (i + (d-i+1) = d+1 vectors), v = sum_j (-1)^j det[U, W without w_j] w_j.
Vector line_intersection_exterior(const EigenFlag& x, const EigenFlag& y, int i);

struct TransversalityResult {
  bool pass = false;
  /// Smallest singular value of the concatenated orthonormal bases.
  double margin = 0.0;
};

struct FlagPiece {
  const EigenFlag* flag;
  int dim;
};

TransversalityResult frenet_check(const std::vector<FlagPiece>& pieces, double tol = kSubspaceTol);

/// zeta_{d-i+1}(t) + l_i(x,z) + zeta_{i-2}(x) = R^d, 2 <= i <= d-1.
TransversalityResult property_h_check(const EigenFlag& x, const EigenFlag& z, const EigenFlag& t, int i,
                                      double tol = kSubspaceTol);

struct UnstableExponent {
  /// log of the expansion factor of T -> M T M^-1 on hom(l_i, l_{i-1}),
  /// read off the eigenpairs of rho(w) by Rayleigh quotients.
  double direct = 0.0;
  /// sigma_{i-1}(lambda).
  double from_jordan = 0.0;
};

UnstableExponent unstable_exponent(const WordSpectra& spectra, const Word& w, int i);

struct MembershipResult {
  bool pass = false;
  /// min |eps_i(lambda)| / |lambda| over the sample.
  double margin = 0.0;
  int sign = 0;
};

/// Checks that eps_i keeps one sign on the sample with |eps_i|/|lambda| >=
/// threshold. Throws InsufficientData on an empty sample.
MembershipResult ui_membership(const std::vector<JordanVector>& sample, int i, double threshold = 1e-9);

/// min_i sigma_i(lambda)/|lambda| over the sample (+inf when empty).
double walls_margin(const std::vector<JordanVector>& sample);

}  // namespace hitchlab
