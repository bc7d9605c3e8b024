#include "hitchlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hitchlab/error.hpp"

namespace hitchlab {

namespace {

struct FixedPoint {
  EigenFlag flag;
  std::size_t source;  // class index
};

std::vector<FixedPoint> fixed_points(const RepSpec& rep, const std::vector<ConjClass>& classes,
                                     std::size_t max_len) {
  const WordSpectra spectra(rep);
  std::vector<FixedPoint> pts;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const auto& c = classes[k];
    if (c.canonical.size() > max_len || is_proper_power(c.canonical)) continue;
    if (!(min_gap(c.lambda) > 1e-6)) continue;
    try {
      auto [plus, minus] = eigen_flags(spectra.matrix(c.canonical), spectra.inverse_matrix(c.canonical));
      for (auto* f : {&plus, &minus}) {
        bool fresh = true;
        for (const auto& p : pts) {
          if (line_angle(p.flag.basis.col(0), f->basis.col(0)) < 1e-6) {
            fresh = false;
            break;
          }
        }
        if (fresh) pts.push_back({*f, k});
      }
    } catch (const Error&) {
      // Not loxodromic enough for a flag; skip the element.
    }
  }
  return pts;
}

std::vector<std::size_t> distinct_sample(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> out;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (out.size() < k) {
    const auto x = pick(rng);
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

}  // namespace

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["pass"] = pass;
  j["checks"] = checks;
  j["failures"] = failures;
  j["worst"] = worst;
  j["tolerance"] = tolerance;
  if (!details.is_null()) j["details"] = details;
  return j;
}

VerifyReport verify_frenet(const RepSpec& rep, const std::vector<ConjClass>& classes, const VerifyOptions& opt) {
  const auto pts = fixed_points(rep, classes, opt.point_max_len);
  if (pts.size() < 2) fail(ErrorKind::InsufficientData, "need at least two distinct fixed points");
  const int d = rep.d;
  std::mt19937_64 rng(opt.seed);
  VerifyReport r{"frenet", true, 0, 0, std::numeric_limits<double>::infinity(), opt.tol, {}};
  r.details["fixed_points"] = pts.size();
  for (std::size_t n = 0; n < opt.configurations; ++n) {
    const int kmax = std::min<int>({d, 4, static_cast<int>(pts.size())});
    const int k = std::uniform_int_distribution<int>(2, kmax)(rng);
    const int total = std::uniform_int_distribution<int>(k, d)(rng);
    // Random composition of total into k positive parts.
    std::vector<int> cuts;
    for (int c : distinct_sample(rng, static_cast<std::size_t>(total - 1), static_cast<std::size_t>(k - 1))) {
      cuts.push_back(c + 1);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), 0);
    cuts.push_back(total);
    const auto chosen = distinct_sample(rng, pts.size(), static_cast<std::size_t>(k));
    std::vector<FlagPiece> pieces;
    for (int j = 0; j < k; ++j) {
      pieces.push_back({&pts[chosen[static_cast<std::size_t>(j)]].flag, cuts[static_cast<std::size_t>(j + 1)] -
                                                                           cuts[static_cast<std::size_t>(j)]});
    }
    const auto res = frenet_check(pieces, opt.tol);
    ++r.checks;
    if (!res.pass) ++r.failures;
    r.worst = std::min(r.worst, res.margin);
  }
  r.pass = r.failures == 0;
  return r;
}

VerifyReport verify_property_h(const RepSpec& rep, const std::vector<ConjClass>& classes,
                               const VerifyOptions& opt) {
  const int d = rep.d;
  if (d < 3) fail(ErrorKind::InvalidArgument, "property (H) needs d >= 3");
  const auto pts = fixed_points(rep, classes, opt.point_max_len);
  if (pts.size() < 3) fail(ErrorKind::InsufficientData, "need at least three distinct fixed points");
  std::mt19937_64 rng(opt.seed);
  VerifyReport r{"property-h", true, 0, 0, std::numeric_limits<double>::infinity(), opt.tol, {}};
  r.details["fixed_points"] = pts.size();
  for (std::size_t n = 0; n < opt.configurations; ++n) {
    const auto c = distinct_sample(rng, pts.size(), 3);
    const int i = std::uniform_int_distribution<int>(2, d - 1)(rng);
    ++r.checks;
    try {
      const auto res = property_h_check(pts[c[0]].flag, pts[c[1]].flag, pts[c[2]].flag, i, opt.tol);
      if (!res.pass) ++r.failures;
      r.worst = std::min(r.worst, res.margin);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TransversalityFailure) throw;
      ++r.failures;
      r.worst = 0.0;
    }
  }
  r.pass = r.failures == 0;
  return r;
}

VerifyReport verify_identities(const RepSpec& rep, const std::vector<ConjClass>& classes,
                               const VerifyOptions& opt) {
  const int d = rep.d;
  const WordSpectra spectra(rep);
  std::vector<std::size_t> lox;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (min_gap(classes[k].lambda) > 1e-6) lox.push_back(k);
  }
  if (lox.empty()) fail(ErrorKind::InsufficientData, "no loxodromic classes");
  std::mt19937_64 rng(opt.seed);
  const auto take = std::min(opt.configurations, lox.size());
  auto picks = distinct_sample(rng, lox.size(), take);
  std::sort(picks.begin(), picks.end());
  VerifyReport r{"identities", true, 0, 0, 0.0, opt.identity_tol, {}};
  double worst_exp = 0.0;
  for (auto p : picks) {
    const auto& w = classes[lox[p]].canonical;
    for (int i = 2; i <= d; ++i) {
      const auto u = unstable_exponent(spectra, w, i);
      const double err = std::abs(u.direct - u.from_jordan);
      ++r.checks;
      if (!(err <= opt.identity_tol)) ++r.failures;
      worst_exp = std::max(worst_exp, err);
    }
  }
  // Line symmetry on pairs of distinct fixed points.
  const auto pts = fixed_points(rep, classes, opt.point_max_len);
  double worst_line = 0.0;
  std::size_t line_checks = 0, line_failures = 0;
  if (pts.size() >= 2) {
    for (std::size_t n = 0; n < opt.configurations; ++n) {
      const auto c = distinct_sample(rng, pts.size(), 2);
      const int i = std::uniform_int_distribution<int>(1, d)(rng);
      const auto& x = pts[c[0]].flag;
      const auto& y = pts[c[1]].flag;
      ++line_checks;
      double a = 0.0;
      try {
        a = line_angle(line_intersection(x, y, i), line_intersection(y, x, d - i + 1));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TransversalityFailure) throw;
        a = std::numeric_limits<double>::infinity();
      }
      if (!(a <= opt.line_tol)) ++line_failures;
      worst_line = std::max(worst_line, a);
    }
  }
  r.details["unstable_exponent_max_error"] = worst_exp;
  r.details["unstable_exponent_classes"] = picks.size();
  r.details["line_symmetry_max_angle"] = worst_line;
  r.details["line_symmetry_tolerance"] = opt.line_tol;
  r.details["line_symmetry_checks"] = line_checks;
  r.checks += line_checks;
  r.failures += line_failures;
  r.worst = worst_exp;
  r.pass = r.failures == 0;
  return r;
}

VerifyReport verify_walls(const std::vector<ConjClass>& classes, const Truncation& trunc) {
  if (classes.empty()) fail(ErrorKind::InsufficientData, "no classes");
  std::vector<JordanVector> all;
  for (const auto& c : classes) all.push_back(c.lambda);
  VerifyReport r{"walls", true, classes.size(), 0, walls_margin(all), 0.0, {}};
  r.details["per_cutoff"] = nlohmann::json::array();
  for (double b : trunc.refit_bounds()) {
    std::vector<JordanVector> sub;
    for (const auto& c : classes) {
      if (trunc.coordinate(c) <= b) sub.push_back(c.lambda);
    }
    if (sub.empty()) continue;
    r.details["per_cutoff"].push_back({{"cutoff", b}, {"classes", sub.size()}, {"margin", walls_margin(sub)}});
  }
  for (const auto& c : classes) {
    if (!(walls_margin({c.lambda}) > 0)) ++r.failures;
  }
  r.pass = r.failures == 0 && r.worst > 0;
  return r;
}

VerifyReport run_suite(const std::string& suite, const RepSpec& rep, const std::vector<ConjClass>& classes,
                       const Truncation& trunc, const VerifyOptions& opt) {
  if (suite == "frenet") return verify_frenet(rep, classes, opt);
  if (suite == "property-h") return verify_property_h(rep, classes, opt);
  if (suite == "identities") return verify_identities(rep, classes, opt);
  if (suite == "walls") return verify_walls(classes, trunc);
  fail(ErrorKind::InvalidArgument, "unknown suite '" + suite + "' (frenet, property-h, identities, walls)");
}

}  // namespace hitchlab
