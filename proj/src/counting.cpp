#include "hitchlab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hitchlab/error.hpp"

namespace hitchlab {

std::vector<double> Truncation::refit_bounds() const {
  if (kind == Kind::None) return {};
  return {bound - 3.0, bound - 2.0, bound - 1.0, bound};
}

double Truncation::coordinate(const ConjClass& c) const {
  switch (kind) {
    case Kind::SeedLength: return c.seed_length;
    case Kind::WordLength: return static_cast<double>(c.canonical.size());
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

CountingTable::CountingTable(std::vector<double> values, std::vector<double> coords, Truncation trunc)
    : trunc_(trunc) {
  if (coords.empty()) coords.assign(values.size(), std::numeric_limits<double>::quiet_NaN());
  if (coords.size() != values.size()) fail(ErrorKind::InvalidArgument, "values/coords size mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && coords[a] < coords[b]);
  });
  base_.reserve(values.size());
  coords_.reserve(values.size());
  for (auto i : order) {
    base_.push_back(values[i]);
    coords_.push_back(coords[i]);
  }
}

CountingTable CountingTable::from_classes(const std::vector<ConjClass>& classes, const LinearForm& phi,
                                          const Truncation& trunc) {
  std::vector<double> values, coords;
  values.reserve(classes.size());
  coords.reserve(classes.size());
  for (const auto& c : classes) {
    values.push_back(phi(c.lambda));
    coords.push_back(trunc.coordinate(c));
  }
  return CountingTable(std::move(values), std::move(coords), trunc);
}

CountingTable CountingTable::scaled(double t) const {
  if (!(t > 0)) fail(ErrorKind::InvalidArgument, "scale factor must be positive");
  CountingTable out = *this;
  out.scale_ = scale_ * t;
  return out;
}

CountingTable CountingTable::restricted(double bound) const {
  CountingTable out;
  out.scale_ = scale_;
  out.trunc_ = trunc_;
  out.trunc_.bound = bound;
  for (std::size_t k = 0; k < base_.size(); ++k) {
    if (coords_[k] <= bound) {
      out.base_.push_back(base_[k]);
      out.coords_.push_back(coords_[k]);
    }
  }
  return out;
}

std::size_t CountingTable::count(double s) const {
  return static_cast<std::size_t>(std::upper_bound(base_.begin(), base_.end(), s / scale_) - base_.begin());
}

std::size_t counting_function(const CountingTable& table, double s) { return table.count(s); }

namespace {

struct CoreFit {
  double slope = 0.0;  // in base units
  double lo = 0.0, hi = 0.0, r2 = 0.0, complete = 0.0;
  std::size_t points = 0;
};

// Base-unit bound below which the sample is complete.
double complete_bound(const CountingTable& table) {
  const auto& trunc = table.truncation();
  if (trunc.kind == Truncation::Kind::None) return std::numeric_limits<double>::infinity();
  double ratio = std::numeric_limits<double>::infinity();
  const auto& base = table.base();
  const auto& coords = table.coords();
  for (std::size_t k = 0; k < base.size(); ++k) {
    if (coords[k] > 0) ratio = std::min(ratio, base[k] / coords[k]);
  }
  return trunc.next() * ratio;
}

CoreFit core_fit(const CountingTable& table, const FitOptions& opt) {
  if (table.size() < opt.min_classes) {
    fail(ErrorKind::InsufficientData, "entropy fit needs at least " + std::to_string(opt.min_classes) +
                                          " classes, got " + std::to_string(table.size()));
  }
  const auto& base = table.base();
  CoreFit fit;
  fit.complete = complete_bound(table);
  // Values closer than tau are treated as one tie group. Length spectra
  // have many exact multiplicities, and rounding noise must not decide how
  // they split.
  const double tau = 1e-9 * std::max(std::abs(base.front()), std::abs(base.back()));
  const auto m = static_cast<std::size_t>(
      std::upper_bound(base.begin(), base.end(), fit.complete + tau) - base.begin());
  if (m < opt.min_points || base.front() <= 0.0) {
    fail(ErrorKind::InsufficientData, "too few complete values for an entropy fit");
  }
  auto group_end = [&](std::size_t k) {
    while (k + 1 < base.size() && base[k + 1] - base[k] <= tau) ++k;
    return k;
  };
  const auto lo = group_end(static_cast<std::size_t>(std::floor(opt.q_lo * static_cast<double>(m - 1))));
  const auto hi = group_end(static_cast<std::size_t>(std::ceil(opt.q_hi * static_cast<double>(m - 1))));
  std::vector<double> xs, ys;
  for (std::size_t k = lo; k <= hi; ++k) {
    k = group_end(k);
    xs.push_back(base[k]);
    ys.push_back(std::log(static_cast<double>(k + 1)));
  }
  if (xs.size() < opt.min_points) fail(ErrorKind::InsufficientData, "too few distinct values in the fit window");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  if (!(sxx > 0)) fail(ErrorKind::InsufficientData, "fit window has no spread");
  fit.slope = sxy / sxx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.lo = base[lo];
  fit.hi = base[hi];
  fit.points = xs.size();
  return fit;
}

}  // namespace

EntropyEstimate fit_entropy(const CountingTable& table, const FitOptions& options) {
  const CoreFit core = core_fit(table, options);
  const double scale = table.scale();
  EntropyEstimate e;
  e.h_hat = core.slope / scale;
  e.window_lo = core.lo * scale;
  e.window_hi = core.hi * scale;
  e.r2 = core.r2;
  e.complete_below = core.complete * scale;
  e.points = core.points;
  e.classes = table.size();

  if (!options.refits) return e;
  for (double b : table.truncation().refit_bounds()) {
    const CountingTable sub = table.restricted(b);
    if (sub.size() < options.min_classes) continue;
    try {
      e.per_cutoff.emplace_back(b, core_fit(sub, options).slope / scale);
    } catch (const Error&) {
      // Too little data at this cutoff; the remaining cutoffs still count.
    }
  }
  if (!e.per_cutoff.empty()) {
    double lo = e.per_cutoff.front().second, hi = lo;
    for (const auto& [b, h] : e.per_cutoff) {
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
    e.uncertainty = (hi - lo) / 2.0;
  }
  if (table.truncation().kind != Truncation::Kind::None) {
    const auto& pc = e.per_cutoff;
    if (pc.size() < 2) {
      e.unstable = true;
    } else {
      e.unstable = std::abs(pc.back().second - pc[pc.size() - 2].second) > e.uncertainty;
    }
  }
  return e;
}

nlohmann::json EntropyEstimate::to_json() const {
  nlohmann::json j;
  j["h_hat"] = h_hat;
  j["window"] = {window_lo, window_hi};
  j["r2"] = r2;
  j["complete_below"] = complete_below;
  j["points"] = points;
  j["classes"] = classes;
  j["per_cutoff"] = nlohmann::json::array();
  for (const auto& [b, h] : per_cutoff) j["per_cutoff"].push_back({{"cutoff", b}, {"h_hat", h}});
  j["uncertainty"] = uncertainty;
  j["flags"] = nlohmann::json::array();
  if (unstable) j["flags"].push_back("UNSTABLE");
  return j;
}

DirectionEntropy direction_entropy(const std::vector<ConjClass>& classes, const LinearForm& phi,
                                   const Truncation& trunc, const FitOptions& options) {
  if (classes.empty()) fail(ErrorKind::InsufficientData, "no classes");
  DirectionEntropy out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& c : classes) {
    const double n = NormData::for_dim(c.lambda.dim()).norm(c.lambda);
    const double v = phi(c.lambda);
    out.min_ratio = std::min(out.min_ratio, n > 0 ? v / n : 0.0);
    if (v <= 1e-9 * n) out.degenerate = true;
  }
  if (out.degenerate) return out;
  out.estimate = fit_entropy(CountingTable::from_classes(classes, phi, trunc), options);
  return out;
}

nlohmann::json DirectionEntropy::to_json() const {
  nlohmann::json j;
  j["degenerate"] = degenerate;
  j["min_ratio"] = min_ratio;
  if (!degenerate) j["estimate"] = estimate.to_json();
  return j;
}

}  // namespace hitchlab
