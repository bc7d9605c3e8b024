#pragma once

#include <random>

#include "hitchlab/pipeline.hpp"
#include "hitchlab/rep.hpp"

namespace fixtures {

// Classes of seed translation length <= s with spectra of rep.
inline hitchlab::ClassTable seed_table(const hitchlab::RepSpec& rep, double s) {
  return hitchlab::build_class_table(rep, 1, s);
}

inline hitchlab::RepSpec bulged(int d, double t) {
  hitchlab::BulgeParams p;
  p.t = t;
  return hitchlab::bulge_deform(hitchlab::fuchsian_rep(d), p);
}

// Random hyperbolic element of SL(2,R).
inline hitchlab::Matrix random_hyperbolic(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (;;) {
    hitchlab::Matrix a(2, 2);
    a << u(rng), u(rng), u(rng), u(rng);
    const double det = a.determinant();
    if (det < 0.2) continue;
    a /= std::sqrt(det);
    if (std::abs(a.trace()) > 2.2) return a;
  }
}

}  // namespace fixtures
