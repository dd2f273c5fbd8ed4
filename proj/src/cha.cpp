#include "qmlcha/cha.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmlcha/parallel.hpp"

namespace qmlcha {

ConvexHull::ConvexHull(Dims dims, RMatrix points, bool include_origin)
    : dims_(dims), points_(std::move(points)), include_origin_(include_origin) {
  if (points_.rows() != dims_.feature_dim())
    throw InvalidDimension("hull points have " + std::to_string(points_.rows()) +
                           " coordinates, expected " + std::to_string(dims_.feature_dim()));
  if (points_.cols() < 1) throw InvalidArgument("a hull needs at least one extreme point");
}

ConvexHull ConvexHull::prefix(Eigen::Index m) const {
  if (m < 1 || m > size())
    throw InvalidArgument("hull prefix size " + std::to_string(m) + " outside [1, " +
                          std::to_string(size()) + "]");
  return ConvexHull(dims_, points_.leftCols(m), include_origin_);
}

void ConvexHull::validate_product_points(double tol) const {
  for (Eigen::Index j = 0; j < size(); ++j) {
    const DensityMatrix rho = defeaturize(FeatureVector{dims_, points_.col(j)});
    const RVector ev = hermitian_eigenvalues(rho.matrix());
    // rank 1 and positive
    if (ev(0) < -tol || std::abs(ev(ev.size() - 1) - 1.0) > tol)
      throw InvariantViolation("hull point " + std::to_string(j) + " is not a pure state");
    const CMatrix red = partial_trace_b(dims_, rho.matrix());
    if (std::abs((red * red).trace().real() - 1.0) > tol)
      throw InvariantViolation("hull point " + std::to_string(j) + " is not a product state");
  }
}

ConvexHull build_hull(const Dims& dims, Eigen::Index m, Rng& rng) {
  if (m < 1) throw InvalidArgument("build_hull: m must be >= 1");
  RMatrix points(dims.feature_dim(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto s = random_product_vectors(dims, rng);
    product_features_into(s.psi_a, s.psi_b, points.col(j).data());
  }
  return ConvexHull(dims, std::move(points), true);
}

AlphaResult alpha(const ConvexHull& hull, const Eigen::Ref<const RVector>& p,
                  const HullLpOptions& opt) {
  if (p.size() != hull.dims().feature_dim())
    throw InvalidDimension("alpha: feature vector length " + std::to_string(p.size()) +
                           " does not match hull dimension " +
                           std::to_string(hull.dims().feature_dim()));
  AlphaResult out;
  if (p.cwiseAbs().maxCoeff() < 1e-12) {
    out.alpha = kAlphaCap;
    out.status = AlphaStatus::kCappedUnbounded;
    out.origin_weight = 1.0;
    return out;
  }
  HullLpSolution sol = solve_hull_lp(hull.points(), hull.include_origin(), p, opt);
  if (sol.status == HullLpStatus::kUnbounded || sol.alpha > kAlphaCap) {
    out.alpha = kAlphaCap;
    out.status = AlphaStatus::kCappedUnbounded;
    return out;
  }
  out.alpha = sol.alpha;
  out.origin_weight = sol.origin_weight;
  out.weights = std::move(sol.weights);
  return out;
}

AlphaResult alpha(const ConvexHull& hull, const FeatureVector& p, const HullLpOptions& opt) {
  if (!(p.dims == hull.dims()))
    throw InvalidDimension("alpha: state dims " + to_string(p.dims) + " vs hull dims " +
                           to_string(hull.dims()));
  return alpha(hull, p.coords, opt);
}

std::vector<double> alpha_batch_serial(const ConvexHull& hull, const RMatrix& points,
                                       const HullLpOptions& opt) {
  std::vector<double> out(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index i = 0; i < points.cols(); ++i) out[i] = alpha(hull, points.col(i), opt).alpha;
  return out;
}

std::vector<double> alpha_batch(const ConvexHull& hull, const RMatrix& points,
                                const HullLpOptions& opt) {
  std::vector<double> out(static_cast<std::size_t>(points.cols()));
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = alpha(hull, points.col(static_cast<Eigen::Index>(i)), opt).alpha;
  });
  return out;
}

int classify_cha(const ConvexHull& hull, const DensityMatrix& rho) {
  return alpha(hull, featurize(rho)).separable() ? kSeparable : kEntangled;
}

double alpha_residual(const ConvexHull& hull, const RVector& p, const AlphaResult& r) {
  if (r.status == AlphaStatus::kCappedUnbounded) return 0.0;
  RVector combo = RVector::Zero(p.size());
  double total = r.origin_weight;
  for (const auto& [idx, w] : r.weights) {
    combo += w * hull.points().col(idx);
    total += w;
  }
  const double fit = (r.alpha * p - combo).cwiseAbs().maxCoeff();
  return std::max(fit, std::abs(total - 1.0));
}

namespace {

RMatrix records_matrix(const LabeledDataset& ds) {
  RMatrix m(ds.dims.feature_dim(), static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = ds.records[i].coords;
  return m;
}

LabeledDataset with_alpha(const LabeledDataset& ds, const std::vector<double>& alphas) {
  LabeledDataset out = ds;
  for (std::size_t i = 0; i < out.size(); ++i) out.records[i].alpha = alphas[i];
  return out;
}

void check_same_dims(const ConvexHull& hull, const LabeledDataset& ds) {
  if (!(hull.dims() == ds.dims))
    throw InvalidDimension("dataset dims " + to_string(ds.dims) + " vs hull dims " +
                           to_string(hull.dims()));
}

}  // namespace

LabeledDataset extend_dataset(const ConvexHull& hull, const LabeledDataset& ds) {
  check_same_dims(hull, ds);
  return with_alpha(ds, alpha_batch(hull, records_matrix(ds)));
}

LabeledDataset extend_dataset_serial(const ConvexHull& hull, const LabeledDataset& ds) {
  check_same_dims(hull, ds);
  return with_alpha(ds, alpha_batch_serial(hull, records_matrix(ds)));
}

void CriticalPointConfig::validate() const {
  if (initial_points < 1 || neighbors_per_point < 1 || max_iters < 1 || convergence_window < 1)
    throw InvalidArgument("critical-point counts must be positive");
  if (!(epsilon0 > 0.0) || !(convergence_tol > 0.0))
    throw InvalidArgument("critical-point epsilon0 and convergence_tol must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("critical-point gamma must lie in (0,1)");
}

CMatrix random_unit_hermitian(int d, Rng& rng) {
  CMatrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  CMatrix h = 0.5 * (g + g.adjoint());
  return h / h.norm();
}

namespace {

CVector evolve(const CMatrix& h, double xi, const CVector& psi) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const auto& v = es.eigenvectors();
  CVector phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    phases(i) = std::polar(1.0, xi * es.eigenvalues()(i));
  CVector out = v * phases.asDiagonal() * (v.adjoint() * psi);
  return out / out.norm();
}

struct ProductHull {
  Dims dims;
  std::vector<ProductSample> factors;

  ConvexHull hull() const {
    RMatrix pts(dims.feature_dim(), static_cast<Eigen::Index>(factors.size()));
    for (std::size_t j = 0; j < factors.size(); ++j)
      product_features_into(factors[j].psi_a, factors[j].psi_b,
                            pts.col(static_cast<Eigen::Index>(j)).data());
    return ConvexHull(dims, std::move(pts), true);
  }
};

}  // namespace

CriticalPointResult critical_point(const DensityMatrix& rho, const CriticalPointConfig& cfg,
                                   Rng& rng) {
  cfg.validate();
  const Dims dims = rho.dims();
  const FeatureVector p = featurize(rho);

  ProductHull work{dims, {}};
  work.factors.reserve(static_cast<std::size_t>(cfg.initial_points));
  for (int j = 0; j < cfg.initial_points; ++j) work.factors.push_back(random_product_vectors(dims, rng));

  double epsilon = cfg.epsilon0;
  CriticalPointResult out{0.0, work.hull(), {}, 0, false};
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    ConvexHull hull = work.hull();
    const AlphaResult a = alpha(hull, p);
    out.trace.push_back(a.alpha);
    out.iterations = iter + 1;
    out.alpha_est = a.alpha;
    out.final_hull = std::move(hull);
    if (a.alpha >= 1.0) {
      out.reached_separable = true;
      break;
    }
    const auto w = static_cast<std::size_t>(cfg.convergence_window);
    if (out.trace.size() > w) {
      const auto tail = std::span(out.trace).last(w + 1);
      const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
      if (*hi - *lo < cfg.convergence_tol) break;
    }
    if (iter + 1 == cfg.max_iters) break;

    std::vector<ProductSample> active;
    for (const auto& [idx, weight] : a.weights)
      if (weight > kActiveWeight) active.push_back(work.factors[static_cast<std::size_t>(idx)]);
    std::vector<ProductSample> next = active;
    if (active.empty()) {
      // α = 0: the ray misses every facet; restart from fresh samples.
      for (int j = 0; j < cfg.initial_points; ++j) next.push_back(random_product_vectors(dims, rng));
    }
    for (const auto& s : active) {
      for (int r = 0; r < cfg.neighbors_per_point; ++r) {
        const CMatrix h1 = random_unit_hermitian(dims.d_a(), rng);
        const CMatrix h2 = random_unit_hermitian(dims.d_b(), rng);
        const double xi = rng.uniform(0.0, epsilon);
        next.push_back(ProductSample{evolve(h1, xi, s.psi_a), evolve(h2, xi, s.psi_b)});
      }
    }
    work.factors = std::move(next);
    epsilon *= cfg.gamma;
  }
  return out;
}

}  // namespace qmlcha
