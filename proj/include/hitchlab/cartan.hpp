#pragma once

// Root-system data of sl(d,R): the Cartan space a = {sum a_i = 0}, linear
// forms on it (modulo the constant functional), simple roots, fundamental
// weights and the Weyl-invariant norm.

#include <boost/rational.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hitchlab {

using Rational = boost::rational<long long>;

/// A point of the Cartan subspace: d reals summing to zero.
class CartanVector {
 public:
  CartanVector() = default;
  /// Throws InvalidArgument unless the coordinates sum to zero within
  /// 1e-12 of their scale.
  explicit CartanVector(std::vector<double> coords);

  /// Orthogonal projection onto the trace-zero subspace.
  static CartanVector projected(std::vector<double> coords);

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<double>& coords() const { return coords_; }

  CartanVector operator*(double t) const;

 private:
  std::vector<double> coords_;
};

/// Element of a* written in epsilon coordinates sum c_i eps_i. Representatives
/// are canonicalized so that sum c_i = 0; two forms are equal iff their
/// canonical coefficients agree.
template <typename Scalar>
class BasicLinearForm {
 public:
  BasicLinearForm() = default;
  explicit BasicLinearForm(std::vector<Scalar> eps_coeffs);

  static BasicLinearForm from_simple_root_coords(const std::vector<Scalar>& c);

  std::size_t dim() const { return coeffs_.size(); }
  const std::vector<Scalar>& coeffs() const { return coeffs_; }

  /// Coordinates (c_1..c_{d-1}) with form = sum c_j sigma_j.
  std::vector<Scalar> simple_root_coords() const;

  double operator()(const CartanVector& a) const;
  double operator()(const std::vector<double>& a) const;

  BasicLinearForm operator+(const BasicLinearForm& o) const;
  BasicLinearForm operator-(const BasicLinearForm& o) const;
  BasicLinearForm operator*(const Scalar& t) const;
  bool operator==(const BasicLinearForm& o) const { return coeffs_ == o.coeffs_; }

 private:
  std::vector<Scalar> coeffs_;
};

using LinearForm = BasicLinearForm<double>;
using ExactForm = BasicLinearForm<Rational>;

LinearForm to_double(const ExactForm& f);

/// sigma_i = eps_i - eps_{i+1}, 1 <= i <= d-1.
ExactForm simple_root(std::size_t d, std::size_t i);
/// omega_i = eps_1 + ... + eps_i, 1 <= i <= d-1.
ExactForm fundamental_weight(std::size_t d, std::size_t i);
/// phi_1(a) = a_1.
ExactForm phi_1(std::size_t d);
/// phi_1d(a) = (a_1 - a_d)/2.
ExactForm phi_1d(std::size_t d);

/// Inner product <a,b> = c_d sum a_i b_i with c_d = 12/(d(d^2-1)), the
/// unique Weyl-invariant scale for which |(d-1, d-3, ..., 1-d)| = 2, i.e. the
/// principal hyperbolic plane has curvature -1. (c_d is derived from that
/// normalization, not quoted.)
struct NormData {
  std::size_t d = 2;
  double scale = 2.0;

  static NormData for_dim(std::size_t d);
  static Rational exact_scale(std::size_t d);

  double inner(const std::vector<double>& a, const std::vector<double>& b) const;
  double norm(const CartanVector& a) const;
  double norm(const std::vector<double>& a) const;
};

/// Dual norm sup{phi(a) : |a| = 1}, computed from the Riesz representative.
double dual_norm(const LinearForm& phi, const NormData& norm);

/// Riesz representative v with <v, a> = phi(a) on the Cartan subspace.
CartanVector riesz_vector(const LinearForm& phi, const NormData& norm);

/// Inverse Riesz map: the form a -> <v, a>.
LinearForm form_of_vector(const CartanVector& v, const NormData& norm);

/// The scale t with t*phi in the simplex spanned by the simple roots, i.e.
/// 1/sum c_j; nullopt when the ray misses the simplex (a negative
/// coordinate, or phi = 0). Boundary forms such as sigma_1 give 1.
std::optional<Rational> c_of_phi(const ExactForm& phi);
std::optional<double> c_of_phi(const LinearForm& phi);

/// iota(a) = (-a_d, ..., -a_1).
CartanVector opposition_involution(const CartanVector& a);

/// min |phi| over the affine hull {sum t_j f_j : sum t_j = 1}, solved from
/// the Gram matrix of the dual inner product. Returns the minimizer too.
struct AffineMinimum {
  double value = 0.0;
  LinearForm minimizer;
};
AffineMinimum min_dual_norm_on_affine_hull(const std::vector<LinearForm>& forms,
                                           const NormData& norm);

/// Principal direction u = (d-1, d-3, ..., 1-d).
CartanVector principal_vector(std::size_t d);

/// Parses a form given either as a preset name ("sigma:i", "omega:i",
/// "phi1", "phi1d", "phibar", "phiu", "phis") or as a JSON array of d numbers.
LinearForm parse_form(const std::string& text, std::size_t d);

/// Canonical-coefficient JSON array with 17 significant digits.
std::string form_to_json(const LinearForm& phi);

}  // namespace hitchlab
