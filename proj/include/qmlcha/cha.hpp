#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qmlcha/hull_lp.hpp"
#include "qmlcha/qstate.hpp"
#include "qmlcha/rng.hpp"
#include "qmlcha/sampling.hpp"

namespace qmlcha {

/// Returned for the p = 0 ray, where the LP is unbounded.
inline constexpr double kAlphaCap = 1e6;
/// Convex weight above which an extreme point counts as active.
inline constexpr double kActiveWeight = 1e-9;

/// Inner approximation of the separable set: the convex hull of sampled
/// pure product states, plus the origin (the maximally mixed state).
class ConvexHull {
 public:
  /// `points` is feature_dim × m, one extreme point per column.
  ConvexHull(Dims dims, RMatrix points, bool include_origin = true);

  const Dims& dims() const { return dims_; }
  const RMatrix& points() const { return points_; }
  Eigen::Index size() const { return points_.cols(); }
  bool include_origin() const { return include_origin_; }

  /// First m extreme points (C_m of a nested family).
  ConvexHull prefix(Eigen::Index m) const;

  /// Checks every column defeaturizes to a rank-1 product state within `tol`.
  void validate_product_points(double tol = 1e-10) const;

  friend bool operator==(const ConvexHull& a, const ConvexHull& b) {
    return a.dims_ == b.dims_ && a.include_origin_ == b.include_origin_ && a.points_ == b.points_;
  }

 private:
  Dims dims_;
  RMatrix points_;
  bool include_origin_;
};

enum class AlphaStatus { kOptimal, kCappedUnbounded };

struct AlphaResult {
  double alpha = 0.0;
  AlphaStatus status = AlphaStatus::kOptimal;
  double origin_weight = 0.0;
  /// (extreme-point index, convex weight) for points with weight > 0.
  std::vector<std::pair<int, double>> weights;

  bool separable() const { return alpha >= 1.0; }
};

/// m product states drawn sequentially from `rng`, so hulls from one seed
/// are nested: build_hull(m, seed) is a prefix of build_hull(m' > m, seed).
ConvexHull build_hull(const Dims& dims, Eigen::Index m, Rng& rng);

/// Largest a with a·p in the hull.
AlphaResult alpha(const ConvexHull& hull, const FeatureVector& p, const HullLpOptions& opt = {});
AlphaResult alpha(const ConvexHull& hull, const Eigen::Ref<const RVector>& p,
                  const HullLpOptions& opt = {});

/// α for every column of `points` (feature_dim × count); OpenMP over states.
std::vector<double> alpha_batch(const ConvexHull& hull, const RMatrix& points,
                                const HullLpOptions& opt = {});
/// Serial reference for alpha_batch.
std::vector<double> alpha_batch_serial(const ConvexHull& hull, const RMatrix& points,
                                       const HullLpOptions& opt = {});

/// −1 (separable) iff alpha ≥ 1, else +1.
int classify_cha(const ConvexHull& hull, const DensityMatrix& rho);

/// Maximum over the weights of ‖αp − Σ λ_i c_i‖∞ and |Σλ − 1|.
double alpha_residual(const ConvexHull& hull, const RVector& p, const AlphaResult& r);

/// Fills every record's alpha against `hull`; p = 0 records get kAlphaCap.
LabeledDataset extend_dataset(const ConvexHull& hull, const LabeledDataset& ds);
LabeledDataset extend_dataset_serial(const ConvexHull& hull, const LabeledDataset& ds);

/// Settings of the iterative critical-point refinement.
struct CriticalPointConfig {
  int initial_points = 1000;
  double epsilon0 = 1.0;
  double gamma = 0.95;
  int neighbors_per_point = 10;
  int max_iters = 200;
  double convergence_tol = 1e-4;
  int convergence_window = 5;

  void validate() const;
};

struct CriticalPointResult {
  double alpha_est = 0.0;
  ConvexHull final_hull;
  std::vector<double> trace;  ///< α after each LP solve
  int iterations = 0;
  bool reached_separable = false;
};

/// Refines the hull near the active extreme points of α(C, p) until α ≥ 1
/// or the estimate stops moving.
CriticalPointResult critical_point(const DensityMatrix& rho, const CriticalPointConfig& cfg,
                                   Rng& rng);

/// Random Hermitian d×d matrix with unit Frobenius norm (GUE direction).
CMatrix random_unit_hermitian(int d, Rng& rng);

}  // namespace qmlcha
