#include "hitchlab/thermo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "hitchlab/error.hpp"

namespace hitchlab {

namespace {

Matrix weighted(const MarkovShift& s, const Matrix& g) {
  const auto k = s.adjacency.rows();
  if (g.rows() != k || g.cols() != k) fail(ErrorKind::InvalidArgument, "potential/adjacency size mismatch");
  Matrix m = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (s.adjacency(i, j) != 0) m(i, j) = std::exp(g(i, j));
    }
  }
  return m;
}

void check_positive(const MarkovShift& s, const Matrix& f) {
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      if (s.adjacency(i, j) != 0 && !(f(i, j) > 0)) fail(ErrorKind::InvalidArgument, "roof must be positive");
    }
  }
}

}  // namespace

void MarkovShift::check() const {
  const auto k = adjacency.rows();
  if (k == 0 || adjacency.cols() != k) fail(ErrorKind::InvalidArgument, "adjacency must be square and nonempty");
  if (roof.rows() != k || roof.cols() != k) fail(ErrorKind::InvalidArgument, "roof/adjacency size mismatch");
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const int a = adjacency(i, j);
      if (a != 0 && a != 1) fail(ErrorKind::InvalidArgument, "adjacency entries must be 0 or 1");
      if (a == 1 && !std::isfinite(roof(i, j))) fail(ErrorKind::InvalidArgument, "roof must be finite");
    }
  }
  // Irreducible: every state reaches every state.
  for (Eigen::Index s = 0; s < k; ++s) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    std::vector<Eigen::Index> stack{s};
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < k; ++j) {
        if (adjacency(i, j) != 0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = true;
          stack.push_back(j);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      fail(ErrorKind::InvalidArgument, "adjacency is not irreducible");
    }
  }
}

MarkovShift MarkovShift::with_roof(const Matrix& r) const {
  MarkovShift s = *this;
  s.roof = r;
  s.check();
  return s;
}

MarkovShift full_shift(int k) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "full shift needs k >= 1");
  MarkovShift s;
  s.adjacency = Eigen::MatrixXi::Ones(k, k);
  s.roof = Matrix::Ones(k, k);
  return s;
}

MarkovShift golden_mean_shift() {
  MarkovShift s;
  s.adjacency.resize(2, 2);
  s.adjacency << 1, 1, 1, 0;
  s.roof.resize(2, 2);
  s.roof << 1.0, 1.0, 2.0, 2.0;
  return s;
}

MarkovShift cat_map_shift() {
  // Edges of [[2,1],[1,1]]: 0->0 (twice), 0->1, 1->0, 1->1.
  const int src[] = {0, 0, 0, 1, 1};
  const int dst[] = {0, 0, 1, 0, 1};
  MarkovShift s;
  s.adjacency = Eigen::MatrixXi::Zero(5, 5);
  for (int e = 0; e < 5; ++e) {
    for (int f = 0; f < 5; ++f) s.adjacency(e, f) = dst[e] == src[f] ? 1 : 0;
  }
  s.roof = Matrix::Constant(5, 5, std::log((3.0 + std::sqrt(5.0)) / 2.0));
  return s;
}

MarkovShift doubling_shift() {
  MarkovShift s = full_shift(2);
  s.roof = Matrix::Constant(2, 2, std::log(2.0));
  return s;
}

Matrix roof_from_json(const MarkovShift& s, const nlohmann::json& j) {
  const nlohmann::json& list = j.is_object() ? j.at("roof") : j;
  if (!list.is_array()) fail(ErrorKind::InvalidArgument, "roof must be a list of [from, to, value]");
  const auto k = static_cast<int>(s.states());
  Matrix r = s.roof.size() == 0 ? Matrix::Ones(k, k) : s.roof;
  for (const auto& e : list) {
    if (!e.is_array() || e.size() != 3) fail(ErrorKind::InvalidArgument, "roof entry must be [from, to, value]");
    const int a = e[0].get<int>(), b = e[1].get<int>();
    if (a < 0 || b < 0 || a >= k || b >= k) fail(ErrorKind::InvalidArgument, "roof entry out of range");
    if (s.adjacency(a, b) == 0) fail(ErrorKind::InvalidArgument, "roof entry on a forbidden edge");
    r(a, b) = e[2].get<double>();
  }
  return r;
}

MarkovShift shift_from_json(const nlohmann::json& j) {
  MarkovShift s;
  try {
    const auto& adj = j.at("adjacency");
    const auto k = static_cast<Eigen::Index>(adj.size());
    s.adjacency.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (adj[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(k)) {
        fail(ErrorKind::InvalidArgument, "adjacency must be square");
      }
      for (Eigen::Index c = 0; c < k; ++c) {
        s.adjacency(i, c) = adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<int>();
      }
    }
    s.roof = Matrix::Ones(k, k);
    if (j.contains("roof")) s.roof = roof_from_json(s, j.at("roof"));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed shift JSON: ") + e.what());
  }
  s.check();
  return s;
}

nlohmann::json shift_to_json(const MarkovShift& s) {
  nlohmann::json j;
  j["adjacency"] = nlohmann::json::array();
  j["roof"] = nlohmann::json::array();
  const auto k = s.adjacency.rows();
  for (Eigen::Index i = 0; i < k; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < k; ++c) {
      row.push_back(s.adjacency(i, c));
      if (s.adjacency(i, c) != 0) j["roof"].push_back({i, c, s.roof(i, c)});
    }
    j["adjacency"].push_back(row);
  }
  return j;
}

PressureResult pressure(const MarkovShift& shift, const Matrix& g, int n_max) {
  if (n_max < 4) fail(ErrorKind::InvalidArgument, "pressure needs n_max >= 4");
  const Matrix m = weighted(shift, g);
  PressureResult r;
  Matrix p = m;
  double log_scale = 0.0;
  int last = 0, prev = 0;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) p = p * m;
    const double top = p.cwiseAbs().maxCoeff();
    if (!(top > 0)) fail(ErrorKind::InvalidArgument, "weighted adjacency is nilpotent");
    p /= top;
    log_scale += std::log(top);
    const double tr = p.trace();
    if (tr > 0) {
      r.levels.push_back((std::log(tr) + log_scale) / n);
      prev = last;
      last = n;
    } else {
      r.levels.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  if (last == 0) fail(ErrorKind::InvalidArgument, "no periodic points up to n_max");
  r.value = r.levels[static_cast<std::size_t>(last - 1)];
  r.increment = prev > 0 ? std::abs(r.value - r.levels[static_cast<std::size_t>(prev - 1)]) : 0.0;
  return r;
}

double pressure_spectral(const MarkovShift& shift, const Matrix& g) {
  const Matrix m = weighted(shift, g);
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::EigenFailure, "eigenvalues of the weighted adjacency");
  return std::log(es.eigenvalues().cwiseAbs().maxCoeff());
}

EntropySolve solve_entropy(const MarkovShift& shift, const Matrix& f, double tol, PressureRoute route, int n_max) {
  shift.check();
  check_positive(shift, f);
  if (!(tol > 0)) fail(ErrorKind::InvalidArgument, "tolerance must be positive");
  auto p = [&](double s) {
    const Matrix g = -s * f;
    return route == PressureRoute::Spectral ? pressure_spectral(shift, g) : pressure(shift, g, n_max).value;
  };
  EntropySolve out;
  if (!(p(0.0) > 0)) fail(ErrorKind::BracketFailure, "P(0) <= 0: the shift has no entropy");
  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (p(hi) > 0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) fail(ErrorKind::BracketFailure, "no sign change of s -> P(-s f)");
  }
  out.bracket_hi = hi;
  while (hi - lo > tol * std::max(1.0, lo) && out.iterations < 400) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (p(mid) > 0 ? lo : hi) = mid;
    ++out.iterations;
  }
  out.h = 0.5 * (lo + hi);
  out.pressure_at_h = p(out.h);
  return out;
}

double srb_toy(const MarkovShift& shift, const Matrix& lambda_u) { return solve_entropy(shift, lambda_u).h; }

double cycle_sum(const Matrix& f, const std::vector<int>& states) {
  double s = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) s += f(states[i], states[(i + 1) % states.size()]);
  return s;
}

namespace {

// Lyndon words (strictly least rotation, hence primitive) over the states,
// admissible as closed walks, with first letter `first`. Prenecklace
// pruning follows the standard period-tracking generation.
void lyndon_dfs(const MarkovShift& s, int n_max, std::vector<int>& word, std::size_t period,
                std::vector<std::vector<int>>& out) {
  const std::size_t n = word.size();
  if (period == n && s.allowed(word.back(), word.front())) out.push_back(word);
  if (static_cast<int>(n) == n_max) return;
  const int k = static_cast<int>(s.states());
  for (int x = word[n - period]; x < k; ++x) {
    if (!s.allowed(word.back(), x)) continue;
    word.push_back(x);
    lyndon_dfs(s, n_max, word, x == word[n - period] ? period : n + 1, out);
    word.pop_back();
  }
}

}  // namespace

std::vector<PeriodicOrbit> primitive_cycles(const MarkovShift& shift, int n_max, int workers) {
  shift.check();
  if (n_max < 1) fail(ErrorKind::InvalidArgument, "n_max must be >= 1");
  const int k = static_cast<int>(shift.states());
  std::vector<std::vector<std::vector<int>>> per_state(static_cast<std::size_t>(k));
  auto run = [&](int s0) {
    std::vector<int> word{s0};
    lyndon_dfs(shift, n_max, word, 1, per_state[static_cast<std::size_t>(s0)]);
  };
  const int w = std::clamp(workers, 1, k);
  if (w == 1) {
    for (int s0 = 0; s0 < k; ++s0) run(s0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t) {
      pool.emplace_back([&, t] {
        for (int s0 = t; s0 < k; s0 += w) run(s0);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<PeriodicOrbit> out;
  for (auto& list : per_state) {
    for (auto& word : list) {
      PeriodicOrbit o;
      o.states = std::move(word);
      o.period = cycle_sum(shift.roof, o.states);
      out.push_back(std::move(o));
    }
  }
  std::sort(out.begin(), out.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
    return a.length() != b.length() ? a.length() < b.length() : a.states < b.states;
  });
  return out;
}

std::vector<PeriodicOrbit> reparametrize_periods(const MarkovShift& shift, const Matrix& f, int n_max,
                                                 int workers) {
  check_positive(shift, f);
  auto cycles = primitive_cycles(shift, n_max, workers);
  for (auto& c : cycles) c.period = cycle_sum(f, c.states);
  return cycles;
}

LivsicResult livsic_test(const MarkovShift& shift, const Matrix& f, const Matrix& g, int n_max, double tol) {
  LivsicResult r;
  for (const auto& c : primitive_cycles(shift, n_max)) {
    r.worst_gap = std::max(r.worst_gap, std::abs(cycle_sum(f, c.states) - cycle_sum(g, c.states)));
    ++r.cycles;
  }
  r.pass = r.worst_gap <= tol;
  return r;
}

PeriodGrowth period_count_entropy(const MarkovShift& shift, const Matrix& f, int n_max, int workers, double q_lo,
                                  double q_hi) {
  const auto cycles = reparametrize_periods(shift, f, n_max, workers);
  double fmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      if (shift.allowed(static_cast<int>(i), static_cast<int>(j))) fmin = std::min(fmin, f(i, j));
    }
  }
  PeriodGrowth out;
  out.cycles = cycles.size();
  out.complete_below = (n_max + 1) * fmin;
  std::vector<double> periods;
  for (const auto& c : cycles) periods.push_back(c.period);
  std::sort(periods.begin(), periods.end());
  // Psi at the end of each group of equal periods.
  const double tau = 1e-9 * out.complete_below;
  std::vector<double> xs, ys;
  double psi = 0.0;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    psi += periods[k];
    const bool group_end = k + 1 == periods.size() || periods[k + 1] - periods[k] > tau;
    if (!group_end) continue;
    const double s = periods[k];
    if (s >= out.complete_below - tau) break;
    if (s >= q_lo * out.complete_below && s <= q_hi * out.complete_below) {
      xs.push_back(s);
      ys.push_back(std::log(psi));
    }
  }
  if (xs.size() < 2) fail(ErrorKind::InsufficientData, "too few complete periods to fit a growth rate");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  out.h = sxy / sxx;
  out.points = xs.size();
  return out;
}

}  // namespace hitchlab
