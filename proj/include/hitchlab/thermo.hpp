#pragma once

// Toy thermodynamic formalism on subshifts of finite type with edge-indexed
// (locally constant) potentials: pressure, the reparametrization entropy
// equation P(-h f) = 0, Livsic periods and the SRB normalization.

#include <json.hpp>

#include <string>
#include <vector>

#include "hitchlab/linalg.hpp"

namespace hitchlab {

/// Vertex shift on k states; roof(i, j) is the potential on the edge i -> j
/// (ignored where adjacency(i, j) == 0).
struct MarkovShift {
  Eigen::MatrixXi adjacency;
  Matrix roof;

  std::size_t states() const { return static_cast<std::size_t>(adjacency.rows()); }
  bool allowed(int i, int j) const { return adjacency(i, j) != 0; }

  /// Throws InvalidArgument unless adjacency is square 0/1 and irreducible
  /// and the roof is finite on allowed edges.
  void check() const;

  MarkovShift with_roof(const Matrix& r) const;
};

MarkovShift full_shift(int k);
/// adjacency [[1,1],[1,0]]; roof 1 on edges leaving state 0, 2 on edges
/// leaving state 1.
MarkovShift golden_mean_shift();
/// Edge shift of the multigraph [[2,1],[1,1]]: the Markov coding of the cat
/// map, with topological entropy log((3+sqrt5)/2). Roof = that constant.
MarkovShift cat_map_shift();
/// Full 2-shift with roof log 2.
MarkovShift doubling_shift();

/// {"adjacency": [[...]], "roof": [[from, to, value], ...]}; missing roof
/// entries default to 1.
MarkovShift shift_from_json(const nlohmann::json& j);
nlohmann::json shift_to_json(const MarkovShift& s);
/// Replaces the roof from a [[from, to, value], ...] list (or {"roof": list}).
Matrix roof_from_json(const MarkovShift& s, const nlohmann::json& j);

struct PressureResult {
  double value = 0.0;
  /// |P_n - P_m| for the last two levels with periodic points.
  double increment = 0.0;
  std::vector<double> levels;  // P_n for n = 1..n_max (NaN where no periodic points)
};

/// Periodic-orbit route: P_n = (1/n) log sum_{sigma^n x = x} exp(S_n g), the
/// sum taken as the trace of the n-th power of the weighted adjacency
/// matrix with running renormalization.
PressureResult pressure(const MarkovShift& shift, const Matrix& g, int n_max = 40);

/// Spectral route: log of the spectral radius of A_ij exp(g_ij).
double pressure_spectral(const MarkovShift& shift, const Matrix& g);

enum class PressureRoute { PeriodicOrbits, Spectral };

struct EntropySolve {
  double h = 0.0;
  double pressure_at_h = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

/// Bisection root of s -> P(-s f), with s_max doubling from 1 until the sign
/// changes. Throws InvalidArgument unless f > 0 on allowed edges,
/// BracketFailure when P(0) <= 0 or no sign change is found.
EntropySolve solve_entropy(const MarkovShift& shift, const Matrix& f, double tol = 1e-13,
                           PressureRoute route = PressureRoute::PeriodicOrbits, int n_max = 40);

/// solve_entropy with the unstable log-expansion as roof.
double srb_toy(const MarkovShift& shift, const Matrix& lambda_u);

struct PeriodicOrbit {
  std::vector<int> states;  // least rotation; edges states[i] -> states[i+1 mod p]
  std::size_t length() const { return states.size(); }
  double period = 0.0;      // sum of the roof over the cycle
};

/// Primitive cycles of length <= n_max, one per rotation class, sorted by
/// (length, states). Parallel by start state.
std::vector<PeriodicOrbit> primitive_cycles(const MarkovShift& shift, int n_max, int workers = 1);

double cycle_sum(const Matrix& f, const std::vector<int>& states);

/// Cycles of the shift with their periods for roof f (which must be > 0).
std::vector<PeriodicOrbit> reparametrize_periods(const MarkovShift& shift, const Matrix& f, int n_max,
                                                 int workers = 1);

struct LivsicResult {
  bool pass = false;
  double worst_gap = 0.0;
  std::size_t cycles = 0;
};

LivsicResult livsic_test(const MarkovShift& shift, const Matrix& f, const Matrix& g, int n_max,
                         double tol = 1e-9);

struct PeriodGrowth {
  double h = 0.0;
  double complete_below = 0.0;
  std::size_t cycles = 0;
  std::size_t points = 0;
};

/// Growth rate of Psi(s) = sum of f-periods over primitive cycles with
/// f-period <= s (Psi ~ e^{hs}/h), fitted by least squares on the distinct
/// periods in [q_lo C, q_hi C], where C = (n_max + 1) min f is the bound
/// below which every cycle has been enumerated.
PeriodGrowth period_count_entropy(const MarkovShift& shift, const Matrix& f, int n_max, int workers = 1,
                                  double q_lo = 0.5, double q_hi = 1.0);

}  // namespace hitchlab
