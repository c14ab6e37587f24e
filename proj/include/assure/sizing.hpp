#pragma once

// Assurance curves over an n-grid and minimal-n search against a target.
// Curves from Monte Carlo engines are noisy; the search smooths the coarse
// pass with isotonic regression (pool adjacent violators) before bracketing,
// then refines by integer bisection with more replicates per probe. All grid
// points share one master seed, so replicate streams are common random
// numbers across n.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "assure/errors.hpp"
#include "assure/mc_engine.hpp"

namespace assure::sizing {

using Engine = std::function<AssuranceEstimate(int n, const MCSettings&)>;

struct SizingRequest {
  Engine engine;
  double gamma = 0.5;   // target assurance
  int n_min = 1;
  int n_max = 1;
  int step = 1;
  int refine_window = 1;            // stop refining when the bracket is this wide
  int refine_replicate_factor = 2;  // probe replicates relative to the coarse pass
  int max_bisection_depth = 12;
  MCSettings settings;
};

struct CurvePoint {
  int n;
  double assurance;
  double std_error;
  int replicates;
};

struct SizingResult {
  std::optional<int> n_star;       // empty: target not achieved on [n_min, n_max]
  std::vector<CurvePoint> curve;   // coarse-grid estimates
  std::vector<double> smoothed;    // isotonic fit of the coarse curve
  double max_smoothed = 0.0;
  std::uint64_t master_seed = 0;
};

/// Weighted least-squares monotone (nondecreasing) fit; the fit of an
/// already monotone sequence is the sequence itself.
inline std::vector<double> isotonic_fit(const std::vector<double>& y,
                                        const std::vector<double>& w) {
  struct Block {
    double value;
    double weight;
    int size;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], w.empty() ? 1.0 : w[i], 1});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].value > blocks.back().value) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      a.value = (a.value * a.weight + b.value * b.weight) / (a.weight + b.weight);
      a.weight += b.weight;
      a.size += b.size;
    }
  }
  std::vector<double> fit;
  fit.reserve(y.size());
  for (const Block& b : blocks) fit.insert(fit.end(), b.size, b.value);
  return fit;
}

namespace detail {

inline std::vector<int> make_grid(const SizingRequest& req) {
  if (!(req.gamma > 0.0 && req.gamma < 1.0))
    throw ConfigError("sizing: gamma must lie in (0,1)");
  if (req.step < 1) throw ConfigError("sizing: step must be at least 1");
  if (req.n_min < 1 || req.n_min > req.n_max)
    throw ConfigError("sizing: grid is empty (need 1 <= n_min <= n_max)");
  std::vector<int> grid;
  for (int n = req.n_min; n <= req.n_max; n += req.step) grid.push_back(n);
  return grid;
}

inline AssuranceEstimate eval_engine(const SizingRequest& req, int n, const MCSettings& s) {
  try {
    return req.engine(n, s);
  } catch (const std::exception& e) {
    throw ConfigError("sizing: engine failed at n = " + std::to_string(n) + ": " + e.what());
  }
}

}  // namespace detail

/// Coarse-grid curve only (no search).
inline SizingResult assurance_curve(const SizingRequest& req) {
  const std::vector<int> grid = detail::make_grid(req);
  SizingResult result;
  result.master_seed = req.settings.master_seed;
  result.curve.reserve(grid.size());
  std::vector<double> values;
  values.reserve(grid.size());
  for (int n : grid) {
    const AssuranceEstimate est = detail::eval_engine(req, n, req.settings);
    result.curve.push_back({n, est.estimate, est.std_error, est.replicates});
    values.push_back(est.estimate);
  }
  result.smoothed = isotonic_fit(values, {});
  result.max_smoothed = result.smoothed.empty() ? 0.0 : result.smoothed.back();
  return result;
}

/// Smallest n on [n_min, n_max] whose smoothed assurance reaches gamma,
/// refined inside the bracketing grid interval by bisection at
/// refine_replicate_factor times the coarse replicate count.
inline SizingResult min_sample_size(const SizingRequest& req) {
  SizingResult result = assurance_curve(req);
  const double gamma = req.gamma;

  int first = -1;
  for (std::size_t i = 0; i < result.smoothed.size(); ++i) {
    if (result.smoothed[i] >= gamma) {
      first = static_cast<int>(i);
      break;
    }
  }
  if (first < 0) return result;  // not achieved; n_star stays empty
  if (first == 0) {
    result.n_star = result.curve.front().n;
    return result;
  }

  int lo = result.curve[first - 1].n;  // smoothed assurance < gamma
  int hi = result.curve[first].n;      // smoothed assurance >= gamma
  const MCSettings probe =
      req.settings.with_replicates(req.settings.replicates * req.refine_replicate_factor);
  int depth = 0;
  while (hi - lo > req.refine_window && depth < req.max_bisection_depth) {
    const int mid = lo + (hi - lo) / 2;
    const AssuranceEstimate est = detail::eval_engine(req, mid, probe);
    if (est.estimate >= gamma)
      hi = mid;
    else
      lo = mid;
    ++depth;
  }
  result.n_star = hi;
  return result;
}

/// Report-only overlay: least-squares fit of assurance to a + b log(n).
struct LogFit {
  double intercept = 0.0;
  double slope = 0.0;
};

inline LogFit fit_log_curve(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 2) throw ConfigError("sizing: log fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(curve.size());
  for (const CurvePoint& pt : curve) {
    const double x = std::log(static_cast<double>(pt.n));
    sx += x;
    sy += pt.assurance;
    sxx += x * x;
    sxy += x * pt.assurance;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw ConfigError("sizing: log fit is degenerate");
  LogFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

}  // namespace assure::sizing
