#include "hitchlab/rep.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hitchlab/cartan.hpp"
#include "hitchlab/error.hpp"
#include "hitchlab/spectral.hpp"

namespace hitchlab {

namespace {

// Numbers x + y*Q with x, y in Q(sqrt2) and Q = sqrt(1 + sqrt2).
struct Quad {
  Rational p, q;  // p + q sqrt2
  Quad operator+(const Quad& o) const { return {p + o.p, q + o.q}; }
  Quad operator-(const Quad& o) const { return {p - o.p, q - o.q}; }
  Quad operator*(const Quad& o) const { return {p * o.p + 2 * q * o.q, p * o.q + q * o.p}; }
  bool is_zero() const { return p == Rational(0) && q == Rational(0); }
};

struct Surd {
  Quad x, y;
  Surd operator+(const Surd& o) const { return {x + o.x, y + o.y}; }
  Surd operator-(const Surd& o) const { return {x - o.x, y - o.y}; }
  Surd operator*(const Surd& o) const {
    const Quad q2{1, 1};  // Q^2 = 1 + sqrt2
    return {x * o.x + y * o.y * q2, x * o.y + y * o.x};
  }
  Surd operator-() const { return Surd{} - *this; }
  bool is_zero() const { return x.is_zero() && y.is_zero(); }

  long double value() const {
    const long double s2 = std::sqrt(2.0L);
    const long double q = std::sqrt(1.0L + s2);
    auto f = [&](const Quad& u) {
      return static_cast<long double>(u.p.numerator()) / u.p.denominator() +
             static_cast<long double>(u.q.numerator()) / u.q.denominator() * s2;
    };
    return f(x) + f(y) * q;
  }
};

using Surd2 = std::array<Surd, 4>;  // row-major 2x2

Surd2 mul(const Surd2& a, const Surd2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

// Inverse of a determinant-one matrix.
Surd2 inv(const Surd2& a) { return {a[3], -a[1], -a[2], a[0]}; }

// c = 1 + sqrt2/2, q = Q, r = sqrt2 * Q.
Surd2 seed_exact(int k) {
  const Quad c{1, Rational(1, 2)};
  const Quad zero{0, 0};
  const Quad one{1, 0};
  const Quad s2{0, 1};
  const Surd cc{c, zero};
  const Surd q{zero, one};
  const Surd r{zero, s2};
  switch (k) {
    case 0: return {cc - q, cc + q, -(cc - q), cc + q};          // a1
    case 1: return {cc, -(cc + r), cc - r, cc};                  // b1
    case 2: return {cc + q, cc - q, -(cc + q), cc - q};          // a2
    default: return {cc, -cc + r, cc + r, cc};                   // b2
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_long(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

template <typename M>
M sym_power_impl(const M& a, int d) {
  using S = typename M::Scalar;
  if (a.rows() != 2 || a.cols() != 2) fail(ErrorKind::InvalidArgument, "sym_power needs a 2x2 matrix");
  if (d < 1) fail(ErrorKind::InvalidArgument, "sym_power needs d >= 1");
  // Polynomials in t = y/x; x -> a + c t, y -> b + d t.
  const std::vector<S> px{a(0, 0), a(1, 0)};
  const std::vector<S> py{a(0, 1), a(1, 1)};
  auto times = [](const std::vector<S>& u, const std::vector<S>& v) {
    std::vector<S> out(u.size() + v.size() - 1, S(0));
    for (std::size_t i = 0; i < u.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) out[i + j] += u[i] * v[j];
    }
    return out;
  };
  M out(d, d);
  for (int k = 0; k < d; ++k) {
    std::vector<S> poly{S(1)};
    for (int i = 0; i < d - 1 - k; ++i) poly = times(poly, px);
    for (int i = 0; i < k; ++i) poly = times(poly, py);
    for (int j = 0; j < d; ++j) out(j, k) = poly[static_cast<std::size_t>(j)];
  }
  const S det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const S adet = det < 0 ? -det : det;
  if (adet != S(1)) {
    // det S(A) = det(A)^{d(d-1)/2}; normalize each entry by |det A|^{(d-1)/2}.
    using std::pow;
    out /= pow(adet, S(d - 1) / S(2));
  }
  return out;
}

MatrixL to_long(const Matrix& m) { return m.cast<long double>(); }

}  // namespace

Matrix sym_power(const Matrix& a, int d) {
  return sym_power_impl<MatrixL>(to_long(a), d).cast<double>();
}

MatrixL sym_power(const MatrixL& a, int d) { return sym_power_impl<MatrixL>(a, d); }

std::vector<MatrixL> seed_generators_l() {
  std::vector<MatrixL> out;
  for (int k = 0; k < 4; ++k) {
    Surd2 e = seed_exact(k);
    MatrixL m(2, 2);
    m << e[0].value(), e[1].value(), e[2].value(), e[3].value();
    out.push_back(m);
  }
  return out;
}

std::vector<Matrix> seed_generators() {
  std::vector<Matrix> out;
  for (const auto& m : seed_generators_l()) out.push_back(m.cast<double>());
  return out;
}

bool seed_relator_is_exact_identity() {
  Surd2 r = {Surd{{1, 0}, {0, 0}}, Surd{}, Surd{}, Surd{{1, 0}, {0, 0}}};
  for (int h = 0; h < 2; ++h) {
    const Surd2 a = seed_exact(2 * h), b = seed_exact(2 * h + 1);
    r = mul(r, mul(mul(a, b), mul(inv(a), inv(b))));
  }
  const Surd one{{1, 0}, {0, 0}};
  return (r[0] - one).is_zero() && r[1].is_zero() && r[2].is_zero() && (r[3] - one).is_zero();
}

RepSpec fuchsian_rep(int d) {
  if (d < 2) fail(ErrorKind::InvalidArgument, "fuchsian_rep needs d >= 2");
  RepSpec rep;
  rep.d = d;
  rep.genus = 2;
  rep.label = "fuchsian d=" + std::to_string(d);
  for (const auto& g : seed_generators_l()) rep.generators.push_back(sym_power(g, d));
  const double resid = relator_residual(rep);
  if (!(resid <= 1e-7) && !(relator_conditioned_residual(rep) <= 1e-13)) {
    fail(ErrorKind::Validation, "seed relator residual " + format_number(resid) + " exceeds 1e-7");
  }
  return rep;
}

std::vector<double> default_bulge_direction(int d) {
  std::vector<double> w(static_cast<std::size_t>(d));
  const double mid = (d - 1) / 2.0;
  double mean = 0.0;
  for (int k = 0; k < d; ++k) {
    w[static_cast<std::size_t>(k)] = (k - mid) * (k - mid);
    mean += w[static_cast<std::size_t>(k)];
  }
  mean /= d;
  for (auto& x : w) x -= mean;
  const double n = NormData::for_dim(static_cast<std::size_t>(d)).norm(w);
  if (n > 0) {
    for (auto& x : w) x /= n;
  }
  return w;
}

std::vector<MatrixL> letter_matrices(const RepSpec& rep) {
  std::vector<MatrixL> out;
  for (const auto& g : rep.generators) {
    out.push_back(g);
    out.push_back(g.inverse());
  }
  return out;
}

MatrixL word_matrix(const std::vector<MatrixL>& letters, const Word& w) {
  const auto d = letters.empty() ? 0 : letters.front().rows();
  MatrixL m = MatrixL::Identity(d, d);
  for (Letter x : w) m = m * letters.at(x);
  return m;
}

double relator_residual(const RepSpec& rep) {
  const auto letters = letter_matrices(rep);
  const MatrixL r = word_matrix(letters, surface_relator(rep.genus));
  const MatrixL id = MatrixL::Identity(rep.d, rep.d);
  return static_cast<double>(std::min((r - id).norm(), (r + id).norm()));
}

double relator_conditioned_residual(const RepSpec& rep) {
  const auto letters = letter_matrices(rep);
  const Word r = surface_relator(rep.genus);
  std::vector<long double> prefix(r.size() + 1, 1.0L), suffix(r.size() + 1, 1.0L);
  MatrixL p = MatrixL::Identity(rep.d, rep.d);
  for (std::size_t k = 0; k < r.size(); ++k) {
    p = p * letters[r[k]];
    prefix[k + 1] = p.norm();
  }
  MatrixL s = MatrixL::Identity(rep.d, rep.d);
  for (std::size_t k = r.size(); k > 0; --k) {
    s = letters[r[k - 1]] * s;
    suffix[k - 1] = s.norm();
  }
  long double cond = 0.0L;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const long double pre = k == 0 ? 1.0L : prefix[k];
    const long double post = k + 1 == r.size() ? 1.0L : suffix[k + 1];
    cond += pre * letters[r[k]].norm() * post;
  }
  return static_cast<double>(relator_residual(rep) / cond);
}

RepSpec bulge_deform(const RepSpec& rep, const BulgeParams& params) {
  if (params.t == 0.0) return rep;
  if (params.handles < 1 || params.handles >= rep.genus) {
    fail(ErrorKind::InvalidArgument, "bulge curve must separate: 1 <= handles < genus");
  }
  const int d = rep.d;
  std::vector<double> dir = params.direction.empty() ? default_bulge_direction(d) : params.direction;
  if (static_cast<int>(dir.size()) != d) fail(ErrorKind::InvalidArgument, "bulge direction has wrong length");
  double sum = 0.0, scale = 0.0;
  for (double x : dir) {
    sum += x;
    scale = std::max(scale, std::abs(x));
  }
  if (std::abs(sum) > 1e-12 * std::max(1.0, scale)) {
    fail(ErrorKind::InvalidArgument, "bulge direction must sum to zero");
  }

  const auto letters = letter_matrices(rep);
  Word curve;
  for (int h = 0; h < params.handles; ++h) {
    const auto a = static_cast<Letter>(4 * h), b = static_cast<Letter>(4 * h + 2);
    curve.insert(curve.end(), {a, b, inverse(a), inverse(b)});
  }
  const MatrixL c = word_matrix(letters, curve);
  Eigen::EigenSolver<MatrixL> es(c);
  if (es.info() != Eigen::Success) fail(ErrorKind::EigenFailure, "eigen-decomposition of the bulge curve failed");
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  std::vector<int> order(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) { return std::abs(vals(i)) > std::abs(vals(j)); });
  MatrixL p(d, d);
  for (int k = 0; k < d; ++k) {
    const int i = order[static_cast<std::size_t>(k)];
    if (std::abs(vals(i).imag()) > 1e-12L * std::abs(vals(i))) {
      fail(ErrorKind::NonLoxodromic, "bulge curve has a non-real eigenvalue");
    }
    if (k > 0) {
      const long double prev = std::log(std::abs(vals(order[static_cast<std::size_t>(k - 1)])));
      if (prev - std::log(std::abs(vals(i))) < 1e-6L) {
        fail(ErrorKind::NonLoxodromic, "bulge curve has colliding eigenvalue moduli");
      }
    }
    for (int r = 0; r < d; ++r) p(r, k) = vecs(r, i).real();
  }
  VectorL e(d), einv(d);
  for (int k = 0; k < d; ++k) {
    e(k) = std::exp(static_cast<long double>(params.t) * dir[static_cast<std::size_t>(k)]);
    einv(k) = 1.0L / e(k);
  }
  const MatrixL pinv = p.inverse();
  const MatrixL conj = p * e.asDiagonal() * pinv;
  const MatrixL conj_inv = p * einv.asDiagonal() * pinv;

  RepSpec out = rep;
  for (int g = 2 * params.handles; g < 2 * rep.genus; ++g) {
    out.generators[static_cast<std::size_t>(g)] = conj * rep.generators[static_cast<std::size_t>(g)] * conj_inv;
  }
  std::ostringstream label;
  label << rep.label << " bulged t=" << format_number(params.t);
  out.label = label.str();
  return out;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json j;
  j["ok"] = ok;
  j["max_det_error"] = max_det_error;
  j["relator_residual"] = relator_residual;
  j["relator_conditioned_residual"] = relator_conditioned_residual;
  j["min_log_modulus_gap"] = min_log_modulus_gap;
  j["sampled_words"] = sampled_words;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : failures) j["failures"].push_back({{"check", f.check}, {"detail", f.detail}});
  return j;
}

ValidationReport validate_rep(const RepSpec& rep, const ValidationOptions& options) {
  ValidationReport report;
  auto add = [&](const std::string& check, const std::string& detail) {
    report.ok = false;
    report.failures.push_back({check, detail});
  };
  if (rep.d < 2) add("shape", "d must be >= 2");
  if (rep.genus < 2) add("shape", "genus must be >= 2");
  if (static_cast<int>(rep.generators.size()) != 2 * rep.genus) {
    add("shape", "expected " + std::to_string(2 * rep.genus) + " generators, got " +
                     std::to_string(rep.generators.size()));
  }
  for (const auto& g : rep.generators) {
    if (g.rows() != rep.d || g.cols() != rep.d) add("shape", "generator is not d x d");
    if (!g.allFinite()) add("shape", "generator has non-finite entries");
  }
  if (!report.ok) return report;

  for (std::size_t k = 0; k < rep.generators.size(); ++k) {
    const double err = static_cast<double>(std::abs(std::abs(rep.generators[k].determinant()) - 1.0L));
    report.max_det_error = std::max(report.max_det_error, err);
    if (err > options.det_tol) {
      add("determinant", "generator " + std::to_string(k) + " has |det| off by " + format_number(err));
    }
  }
  report.relator_residual = relator_residual(rep);
  report.relator_conditioned_residual = relator_conditioned_residual(rep);
  if (!(report.relator_residual <= options.relator_tol) &&
      !(report.relator_conditioned_residual <= options.relator_conditioned_tol)) {
    add("relator", "relator residual " + format_number(report.relator_residual));
  }

  EnumerationOptions eo;
  eo.genus = rep.genus;
  eo.max_len = std::max(1, options.sample_len);
  const auto sample = enumerate_classes(eo);
  report.sampled_words = sample.size();
  double smallest = std::numeric_limits<double>::infinity();
  try {
    const WordSpectra spectra(rep);
    for (const auto& cls : sample) {
      const double gap = min_gap(spectra.jordan(cls.canonical));
      smallest = std::min(smallest, gap);
      if (!(gap > options.modulus_tol)) add("loxodromy", "eigenvalue moduli collide for " + to_string(cls.canonical));
    }
  } catch (const Error& e) {
    add("loxodromy", e.what());
  }
  report.min_log_modulus_gap = smallest;
  return report;
}

nlohmann::json rep_to_json(const RepSpec& rep) {
  nlohmann::json j;
  j["d"] = rep.d;
  j["genus"] = rep.genus;
  j["label"] = rep.label;
  j["generators"] = nlohmann::json::array();
  for (const auto& g : rep.generators) {
    nlohmann::json flat = nlohmann::json::array();
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.cols(); ++c) flat.push_back(format_long(g(r, c)));
    }
    j["generators"].push_back(flat);
  }
  return j;
}

RepSpec rep_from_json(const nlohmann::json& j) {
  RepSpec rep;
  try {
    rep.d = j.at("d").get<int>();
    rep.genus = j.at("genus").get<int>();
    rep.label = j.value("label", std::string());
    if (rep.d < 1 || rep.d > 64) fail(ErrorKind::InvalidArgument, "rep d out of range");
    for (const auto& flat : j.at("generators")) {
      if (flat.size() != static_cast<std::size_t>(rep.d * rep.d)) {
        fail(ErrorKind::InvalidArgument, "generator needs d*d entries");
      }
      MatrixL m(rep.d, rep.d);
      for (int k = 0; k < rep.d * rep.d; ++k) {
        const auto& v = flat[static_cast<std::size_t>(k)];
        m(k / rep.d, k % rep.d) = v.is_string() ? std::stold(v.get<std::string>()) : v.get<double>();
      }
      rep.generators.push_back(m);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed rep JSON: ") + e.what());
  } catch (const std::logic_error& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed number in rep JSON: ") + e.what());
  }
  return rep;
}

void save_rep(const RepSpec& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << rep_to_json(rep).dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for " + path);
}

RepSpec load_rep(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
  return rep_from_json(j);
}

}  // namespace hitchlab
