#pragma once

#include <utility>
#include <vector>

#include "qmlcha/types.hpp"

namespace qmlcha {

/// Tuning knobs for the hull-membership simplex.
struct HullLpOptions {
  double primal_tol = 1e-9;     ///< bound violation tolerated in the ratio test
  double dual_tol = 1e-9;       ///< reduced cost needed to enter the basis
  double pivot_tol = 1e-10;     ///< smallest usable pivot element
  int refactor_every = 64;      ///< rebuild the basis inverse every k pivots
  int max_iterations = 200000;
  /// Partial pricing: columns scanned per pass before taking the best
  /// candidate found; 0 prices every column each iteration.
  int pricing_block = 256;
};

enum class HullLpStatus { kOptimal, kUnbounded };

struct HullLpSolution {
  HullLpStatus status = HullLpStatus::kOptimal;
  double alpha = 0.0;
  double origin_weight = 0.0;
  /// Basic hull columns with their convex weights.
  std::vector<std::pair<int, double>> weights;
  int iterations = 0;
};

/// Revised primal simplex for
///
///     max α  s.t.  α p = Σ_j λ_j c_j (+ λ_0 · 0),  Σ λ = 1,  λ ≥ 0,  α ≥ 0,
///
/// where the c_j are the columns of `points` (feature_dim × m). Column
/// data is never copied; pricing is one GEMV over `points` per pass.
/// Throws LpInfeasible when no α ≥ 0 is feasible (only possible without
/// the origin) and NumericalFailure if the iteration limit is hit.
HullLpSolution solve_hull_lp(const Eigen::Ref<const RMatrix>& points, bool include_origin,
                             const Eigen::Ref<const RVector>& p, const HullLpOptions& options = {});

}  // namespace qmlcha
