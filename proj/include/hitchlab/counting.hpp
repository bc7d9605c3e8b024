#pragma once

// Counting functions N_phi(s) = #{classes : phi(lambda) <= s} and fitted
// exponential growth rates.

#include <json.hpp>

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hitchlab/cartan.hpp"
#include "hitchlab/spectral.hpp"

namespace hitchlab {

/// How the class sample was truncated. Each class carries a coordinate
/// (seed translation length or word length); the sample contains every
/// class with coordinate <= bound, and the first coordinate that could be
/// missing is `next`.
struct Truncation {
  enum class Kind { None, SeedLength, WordLength };
  Kind kind = Kind::None;
  double bound = std::numeric_limits<double>::infinity();

  double next() const { return kind == Kind::WordLength ? bound + 1.0 : bound; }
  /// Cutoffs bound-3 .. bound for stabilization refits.
  std::vector<double> refit_bounds() const;
  double coordinate(const ConjClass& c) const;
};

/// Sorted values phi(lambda) stored as base values times an exact scale, so
/// that rescaling the functional never perturbs the data.
class CountingTable {
 public:
  CountingTable() = default;
  CountingTable(std::vector<double> values, std::vector<double> coords, Truncation trunc);

  static CountingTable from_classes(const std::vector<ConjClass>& classes, const LinearForm& phi,
                                    const Truncation& trunc);

  std::size_t size() const { return base_.size(); }
  double scale() const { return scale_; }
  const std::vector<double>& base() const { return base_; }
  const std::vector<double>& coords() const { return coords_; }
  const Truncation& truncation() const { return trunc_; }
  double value(std::size_t k) const { return base_[k] * scale_; }

  /// The table of t*phi.
  CountingTable scaled(double t) const;

  /// Sub-table of classes with coordinate <= bound, truncated at bound.
  CountingTable restricted(double bound) const;

  /// Number of values <= s.
  std::size_t count(double s) const;

 private:
  std::vector<double> base_;    // ascending
  std::vector<double> coords_;  // aligned with base_
  double scale_ = 1.0;
  Truncation trunc_;
};

std::size_t counting_function(const CountingTable& table, double s);

struct EntropyEstimate {
  double h_hat = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double r2 = 0.0;
  /// Values below this are complete: every class with a smaller value is
  /// in the sample.
  double complete_below = 0.0;
  std::size_t points = 0;
  std::size_t classes = 0;
  std::vector<std::pair<double, double>> per_cutoff;
  /// Half the range of the per-cutoff estimates.
  double uncertainty = 0.0;
  bool unstable = false;

  nlohmann::json to_json() const;
};

struct FitOptions {
  double q_lo = 0.20;
  double q_hi = 0.80;
  std::size_t min_classes = 200;
  std::size_t min_points = 10;
  /// Refit at the cutoffs bound-3 .. bound (uncertainty, UNSTABLE flag).
  bool refits = true;
};

/// Least-squares slope of log N(s) against s at the data points inside the
/// [q_lo, q_hi] quantile window of the complete part of the sample.
/// Throws InsufficientData below min_classes.
EntropyEstimate fit_entropy(const CountingTable& table, const FitOptions& options = {});

struct DirectionEntropy {
  bool degenerate = false;
  /// min phi(lambda)/|lambda| over the sample.
  double min_ratio = 0.0;
  EntropyEstimate estimate;

  nlohmann::json to_json() const;
};

/// Degenerate when phi(lambda) <= 1e-9 |lambda| for some class.
DirectionEntropy direction_entropy(const std::vector<ConjClass>& classes, const LinearForm& phi,
                                   const Truncation& trunc, const FitOptions& options = {});

}  // namespace hitchlab
