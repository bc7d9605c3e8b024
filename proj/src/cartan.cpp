#include "hitchlab/cartan.hpp"

#include "hitchlab/error.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hitchlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Validation: return "ValidationFailure";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonLoxodromic: return "NonLoxodromic";
    case ErrorKind::TransversalityFailure: return "TransversalityFailure";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::NoInteriorDirection: return "NoInteriorDirection";
  }
  return "Unknown";
}

namespace {

double to_double_scalar(double x) { return x; }
double to_double_scalar(const Rational& x) {
  return static_cast<double>(x.numerator()) / static_cast<double>(x.denominator());
}

template <typename Scalar>
void canonicalize(std::vector<Scalar>& c) {
  if (c.empty()) return;
  Scalar sum = std::accumulate(c.begin(), c.end(), Scalar(0));
  Scalar mean = sum / Scalar(static_cast<long long>(c.size()));
  for (auto& x : c) x -= mean;
}

void check_index(std::size_t d, std::size_t i) {
  if (d < 2 || i < 1 || i > d - 1) {
    fail(ErrorKind::InvalidArgument,
         "root index " + std::to_string(i) + " out of range for d=" + std::to_string(d));
  }
}

}  // namespace

CartanVector::CartanVector(std::vector<double> coords) : coords_(std::move(coords)) {
  double sum = 0.0, scale = 1.0;
  for (double x : coords_) {
    sum += x;
    scale = std::max(scale, std::abs(x));
  }
  if (std::abs(sum) > 1e-12 * scale * static_cast<double>(std::max<std::size_t>(1, coords_.size()))) {
    fail(ErrorKind::InvalidArgument, "Cartan vector coordinates do not sum to zero");
  }
}

CartanVector CartanVector::projected(std::vector<double> coords) {
  canonicalize(coords);
  CartanVector v;
  v.coords_ = std::move(coords);
  return v;
}

CartanVector CartanVector::operator*(double t) const {
  CartanVector v = *this;
  for (auto& x : v.coords_) x *= t;
  return v;
}

template <typename Scalar>
BasicLinearForm<Scalar>::BasicLinearForm(std::vector<Scalar> eps_coeffs)
    : coeffs_(std::move(eps_coeffs)) {
  canonicalize(coeffs_);
}

template <typename Scalar>
BasicLinearForm<Scalar> BasicLinearForm<Scalar>::from_simple_root_coords(
    const std::vector<Scalar>& c) {
  // sum_j c_j (eps_j - eps_{j+1}) has eps_i coefficient c_i - c_{i-1}.
  std::vector<Scalar> e(c.size() + 1, Scalar(0));
  for (std::size_t i = 0; i < e.size(); ++i) {
    Scalar cur = i < c.size() ? c[i] : Scalar(0);
    Scalar prev = i > 0 ? c[i - 1] : Scalar(0);
    e[i] = cur - prev;
  }
  return BasicLinearForm(std::move(e));
}

template <typename Scalar>
std::vector<Scalar> BasicLinearForm<Scalar>::simple_root_coords() const {
  std::vector<Scalar> c;
  if (coeffs_.size() < 2) return c;
  c.reserve(coeffs_.size() - 1);
  Scalar partial(0);
  for (std::size_t j = 0; j + 1 < coeffs_.size(); ++j) {
    partial += coeffs_[j];
    c.push_back(partial);
  }
  return c;
}

template <typename Scalar>
double BasicLinearForm<Scalar>::operator()(const std::vector<double>& a) const {
  if (a.size() != coeffs_.size()) {
    fail(ErrorKind::InvalidArgument, "form/vector dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += to_double_scalar(coeffs_[i]) * a[i];
  return s;
}

template <typename Scalar>
double BasicLinearForm<Scalar>::operator()(const CartanVector& a) const {
  return (*this)(a.coords());
}

template <typename Scalar>
BasicLinearForm<Scalar> BasicLinearForm<Scalar>::operator+(const BasicLinearForm& o) const {
  auto c = coeffs_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coeffs_.at(i);
  return BasicLinearForm(std::move(c));
}

template <typename Scalar>
BasicLinearForm<Scalar> BasicLinearForm<Scalar>::operator-(const BasicLinearForm& o) const {
  auto c = coeffs_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.coeffs_.at(i);
  return BasicLinearForm(std::move(c));
}

template <typename Scalar>
BasicLinearForm<Scalar> BasicLinearForm<Scalar>::operator*(const Scalar& t) const {
  auto c = coeffs_;
  for (auto& x : c) x *= t;
  return BasicLinearForm(std::move(c));
}

template class BasicLinearForm<double>;
template class BasicLinearForm<Rational>;

LinearForm to_double(const ExactForm& f) {
  std::vector<double> c;
  c.reserve(f.dim());
  for (const auto& x : f.coeffs()) c.push_back(to_double_scalar(x));
  return LinearForm(std::move(c));
}

ExactForm simple_root(std::size_t d, std::size_t i) {
  check_index(d, i);
  std::vector<Rational> e(d, Rational(0));
  e[i - 1] = 1;
  e[i] = -1;
  return ExactForm(std::move(e));
}

ExactForm fundamental_weight(std::size_t d, std::size_t i) {
  check_index(d, i);
  std::vector<Rational> e(d, Rational(0));
  for (std::size_t k = 0; k < i; ++k) e[k] = 1;
  return ExactForm(std::move(e));
}

ExactForm phi_1(std::size_t d) {
  std::vector<Rational> e(d, Rational(0));
  e.at(0) = 1;
  return ExactForm(std::move(e));
}

ExactForm phi_1d(std::size_t d) {
  std::vector<Rational> e(d, Rational(0));
  e.at(0) = Rational(1, 2);
  e.at(d - 1) = Rational(-1, 2);
  return ExactForm(std::move(e));
}

Rational NormData::exact_scale(std::size_t d) {
  auto n = static_cast<long long>(d);
  return Rational(12, n * (n * n - 1));
}

NormData NormData::for_dim(std::size_t d) {
  if (d < 2) fail(ErrorKind::InvalidArgument, "dimension must be >= 2");
  NormData n;
  n.d = d;
  n.scale = to_double_scalar(exact_scale(d));
  return n;
}

double NormData::inner(const std::vector<double>& a, const std::vector<double>& b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b.at(i);
  return scale * s;
}

double NormData::norm(const std::vector<double>& a) const { return std::sqrt(inner(a, a)); }
double NormData::norm(const CartanVector& a) const { return norm(a.coords()); }

double dual_norm(const LinearForm& phi, const NormData& norm) {
  double s = 0.0;
  for (double c : phi.coeffs()) s += c * c;
  return std::sqrt(s / norm.scale);
}

CartanVector riesz_vector(const LinearForm& phi, const NormData& norm) {
  std::vector<double> v = phi.coeffs();
  for (auto& x : v) x /= norm.scale;
  return CartanVector::projected(std::move(v));
}

LinearForm form_of_vector(const CartanVector& v, const NormData& norm) {
  std::vector<double> c = v.coords();
  for (auto& x : c) x *= norm.scale;
  return LinearForm(std::move(c));
}

std::optional<Rational> c_of_phi(const ExactForm& phi) {
  Rational total(0);
  for (const auto& c : phi.simple_root_coords()) {
    if (c < Rational(0)) return std::nullopt;
    total += c;
  }
  if (total <= Rational(0)) return std::nullopt;
  return Rational(1) / total;
}

std::optional<double> c_of_phi(const LinearForm& phi) {
  double total = 0.0;
  for (double c : phi.simple_root_coords()) {
    if (c < 0.0) return std::nullopt;
    total += c;
  }
  if (!(total > 0.0)) return std::nullopt;
  return 1.0 / total;
}

CartanVector opposition_involution(const CartanVector& a) {
  std::vector<double> r(a.coords().rbegin(), a.coords().rend());
  for (auto& x : r) x = -x;
  return CartanVector::projected(std::move(r));
}

AffineMinimum min_dual_norm_on_affine_hull(const std::vector<LinearForm>& forms,
                                           const NormData& norm) {
  const auto m = static_cast<Eigen::Index>(forms.size());
  if (m == 0) fail(ErrorKind::InvalidArgument, "empty form list");
  // Minimize t^T G t subject to 1^T t = 1: t = G^{-1} 1 / (1^T G^{-1} 1).
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < norm.d; ++k) s += forms[i].coeffs()[k] * forms[j].coeffs()[k];
      gram(i, j) = s / norm.scale;
    }
  }
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd y = gram.ldlt().solve(ones);
  double denom = ones.dot(y);
  Eigen::VectorXd t = y / denom;
  std::vector<double> c(norm.d, 0.0);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < norm.d; ++k) c[k] += t(j) * forms[j].coeffs()[k];
  }
  AffineMinimum out;
  out.minimizer = LinearForm(std::move(c));
  out.value = dual_norm(out.minimizer, norm);
  return out;
}

CartanVector principal_vector(std::size_t d) {
  std::vector<double> u(d);
  for (std::size_t k = 0; k < d; ++k) {
    u[k] = static_cast<double>(d) - 1.0 - 2.0 * static_cast<double>(k);
  }
  return CartanVector(std::move(u));
}

namespace {

std::size_t parse_index(const std::string& text, std::size_t prefix_len) {
  try {
    return static_cast<std::size_t>(std::stoul(text.substr(prefix_len)));
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "cannot parse index in form '" + text + "'");
  }
}

}  // namespace

LinearForm parse_form(const std::string& text, std::size_t d) {
  if (text.rfind("sigma:", 0) == 0) return to_double(simple_root(d, parse_index(text, 6)));
  if (text.rfind("omega:", 0) == 0) return to_double(fundamental_weight(d, parse_index(text, 6)));
  if (text == "phi1") return to_double(phi_1(d));
  if (text == "phi1d" || text == "phibar") return to_double(phi_1d(d));
  if (text == "phiu" || text == "phis") {
    if (d < 3) fail(ErrorKind::InvalidArgument, "phiu/phis need d >= 3");
    const auto n = static_cast<long long>(d - 1);
    ExactForm w1 = fundamental_weight(d, 1);
    ExactForm wn = fundamental_weight(d, d - 1);
    ExactForm f = text == "phiu" ? w1 * Rational(n) - wn : wn * Rational(n) - w1;
    return to_double(f);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::InvalidArgument, "unknown form '" + text + "'");
  }
  if (!j.is_array() || j.size() != d) {
    fail(ErrorKind::InvalidArgument, "form JSON must be an array of " + std::to_string(d) + " numbers");
  }
  std::vector<double> c;
  for (const auto& x : j) {
    c.push_back(x.is_string() ? std::stod(x.get<std::string>()) : x.get<double>());
  }
  return LinearForm(std::move(c));
}

std::string form_to_json(const LinearForm& phi) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < phi.dim(); ++i) {
    if (i) os << ',';
    os << phi.coeffs()[i];
  }
  os << ']';
  return os.str();
}

}  // namespace hitchlab
