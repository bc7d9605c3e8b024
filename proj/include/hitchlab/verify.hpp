#pragma once

// Randomized and exhaustive checks of the flag-curve and spectral identities
// on fixed points of enumerated elements.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "hitchlab/counting.hpp"
#include "hitchlab/spectral.hpp"

namespace hitchlab {

struct VerifyOptions {
  std::size_t configurations = 200;
  std::uint64_t seed = 1;
  /// Fixed points are taken from classes of word length <= this.
  std::size_t point_max_len = 2;
  double tol = kSubspaceTol;
  /// Two-route tolerance for the unstable exponent.
  double identity_tol = 1e-8;
  /// Angle tolerance for l_i(x,y) = l_{d-i+1}(y,x).
  double line_tol = 1e-9;
};

struct VerifyReport {
  std::string suite;
  bool pass = false;
  std::size_t checks = 0;
  std::size_t failures = 0;
  /// Smallest margin (frenet, property-h, walls) or largest error
  /// (identities).
  double worst = 0.0;
  double tolerance = 0.0;
  nlohmann::json details;

  nlohmann::json to_json() const;
};

/// Random configurations of 2..min(d,4) distinct fixed points with dims
/// summing to at most d.
VerifyReport verify_frenet(const RepSpec& rep, const std::vector<ConjClass>& classes, const VerifyOptions& opt = {});

/// Random triples of distinct fixed points and random 2 <= i <= d-1.
VerifyReport verify_property_h(const RepSpec& rep, const std::vector<ConjClass>& classes,
                               const VerifyOptions& opt = {});

/// Unstable exponent (both routes, every i) on sampled classes, and the
/// line symmetry l_i(x,y) = l_{d-i+1}(y,x) on sampled pairs.
VerifyReport verify_identities(const RepSpec& rep, const std::vector<ConjClass>& classes,
                               const VerifyOptions& opt = {});

/// min_i sigma_i(lambda)/|lambda| over all classes, and at each refit cutoff.
VerifyReport verify_walls(const std::vector<ConjClass>& classes, const Truncation& trunc);

VerifyReport run_suite(const std::string& suite, const RepSpec& rep, const std::vector<ConjClass>& classes,
                       const Truncation& trunc, const VerifyOptions& opt = {});

}  // namespace hitchlab
