#pragma once

// Surface-group representations into SL(d,R): the Fuchsian locus through the
// irreducible symmetric-power embedding, bulging deformations, validation and
// the JSON file format.

#include <json.hpp>

#include <string>
#include <vector>

#include "hitchlab/linalg.hpp"
#include "hitchlab/words.hpp"

namespace hitchlab {

struct RepSpec {
  int d = 2;
  int genus = 2;
  std::string label;
  /// Ordered a_1, b_1, a_2, b_2, ...; unimodular lifts. Long double so that
  /// relators of high symmetric powers still close to 1e-7.
  std::vector<MatrixL> generators;
};

/// Bulging along the separating curve [a_1,b_1]...[a_j,b_j] (j = handles):
/// handles j+1..g are conjugated by exp(t H), H = diag(direction) in the
/// eigenbasis of rho(curve) ordered by decreasing modulus.
struct BulgeParams {
  int handles = 1;
  /// Zero-sum, length d; empty selects default_bulge_direction(d).
  std::vector<double> direction;
  double t = 0.0;
};

/// Action of A on S^{d-1}(R^2) in the monomial basis x^{d-1-k} y^k via
/// x -> a x + c y, y -> b x + d y; rescaled to |det| = 1.
Matrix sym_power(const Matrix& a, int d);
MatrixL sym_power(const MatrixL& a, int d);

/// Generators a_1, b_1, a_2, b_2 of the genus-2 octagon group (regular
/// octagon with interior angles pi/4, standard gluing), in long double.
std::vector<MatrixL> seed_generators_l();
std::vector<Matrix> seed_generators();

/// Multiplies out the relator in exact arithmetic over Q(sqrt2, sqrt(1+sqrt2)).
bool seed_relator_is_exact_identity();

RepSpec fuchsian_rep(int d);

/// Centred quadratic profile (k - (d-1)/2)^2 minus its mean, unit norm.
std::vector<double> default_bulge_direction(int d);

RepSpec bulge_deform(const RepSpec& rep, const BulgeParams& params);

/// Matrices indexed by letter (generator and inverse), long double.
std::vector<MatrixL> letter_matrices(const RepSpec& rep);
MatrixL word_matrix(const std::vector<MatrixL>& letters, const Word& w);

/// Frobenius distance of rho(relator) to the nearer of +I, -I.
double relator_residual(const RepSpec& rep);

/// Residual divided by sum_k |prefix_k| |g_k| |suffix_k|, the first-order
/// amplification of per-letter rounding. Stays near the unit roundoff for a
/// genuine representation even when the absolute residual cannot (high
/// symmetric powers); O(1) for matrices that do not satisfy the relator.
double relator_conditioned_residual(const RepSpec& rep);

struct ValidationFailure {
  std::string check;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  double max_det_error = 0.0;
  double relator_residual = 0.0;
  double relator_conditioned_residual = 0.0;
  /// Smallest gap between consecutive sorted log-moduli over the sample.
  double min_log_modulus_gap = 0.0;
  std::size_t sampled_words = 0;
  std::vector<ValidationFailure> failures;

  nlohmann::json to_json() const;
};

struct ValidationOptions {
  double det_tol = 1e-9;
  double relator_tol = 1e-7;
  /// Accepted in place of relator_tol when the absolute residual is
  /// dominated by the conditioning of the relator product.
  double relator_conditioned_tol = 1e-13;
  double modulus_tol = 1e-6;
  int sample_len = 3;
};

/// Never throws on a malformed rep; problems are listed in the report.
ValidationReport validate_rep(const RepSpec& rep, const ValidationOptions& options = {});

nlohmann::json rep_to_json(const RepSpec& rep);
RepSpec rep_from_json(const nlohmann::json& j);
void save_rep(const RepSpec& rep, const std::string& path);
RepSpec load_rep(const std::string& path);

}  // namespace hitchlab
