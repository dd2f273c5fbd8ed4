#include "qmlcha/protocols.hpp"

#include <algorithm>
#include <limits>
#include <memory>

namespace qmlcha::protocols {
namespace {

LabeledDataset slice(const LabeledDataset& ds, std::size_t begin, std::size_t end) {
  LabeledDataset out{ds.dims, ds.label_source, {}};
  out.records.assign(ds.records.begin() + static_cast<std::ptrdiff_t>(begin),
                     ds.records.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

long max_of(const std::vector<long>& ms) {
  if (ms.empty()) throw InvalidArgument("need at least one hull size");
  const long m = *std::max_element(ms.begin(), ms.end());
  if (*std::min_element(ms.begin(), ms.end()) < 1) throw InvalidArgument("hull sizes must be >= 1");
  return m;
}

ChaBchaRow cha_vs_bcha(const ConvexHull& hull, const Split& split, int trees, const TreeParams& params,
                       Rng rng) {
  const LabeledDataset train = extend_dataset(hull, split.train);
  const LabeledDataset test = extend_dataset(hull, split.test);
  const auto shared = std::make_shared<const ConvexHull>(hull);
  const BchaModel model = train_bcha(shared, train, trees, params, rng);
  ChaBchaRow row;
  row.m = static_cast<long>(hull.size());
  row.cha_error = evaluate(cha_classifier(), test);
  row.bcha_error = evaluate(committee_classifier(model.committee, FeatureMode::kWithAlpha), test);
  return row;
}

}  // namespace

std::vector<Table1Row> table1(std::uint64_t seed, const std::vector<long>& ms) {
  Rng rng(seed, kHullStream);
  const ConvexHull full = build_hull(Dims(3, 3), max_of(ms), rng);
  const RVector p = featurize(tiles_state()).coords;
  std::vector<Table1Row> rows;
  for (long m : ms) {
    const ConvexHull hull = full.prefix(m);
    const AlphaResult a = alpha(hull, p);
    rows.push_back({m, a.alpha, alpha_residual(hull, p, a)});
  }
  return rows;
}

Split two_qubit_split(std::uint64_t seed, std::size_t train, std::size_t test) {
  SamplerConfig cfg;
  cfg.dims = Dims(2, 2);
  cfg.seed = seed;
  const LabeledDataset all = build_dataset(cfg, train + test, Labeler::ppt());
  return {slice(all, 0, train), slice(all, train, train + test)};
}

std::vector<ChaBchaRow> table_s1(const TwoQubitConfig& cfg) {
  const Split split = two_qubit_split(cfg.seed, cfg.train, cfg.test);
  Rng hull_rng(cfg.seed, kHullStream);
  const ConvexHull full = build_hull(Dims(2, 2), max_of(cfg.ms), hull_rng);
  const Rng model_rng(cfg.seed, kModelStream);
  std::vector<ChaBchaRow> rows;
  for (long m : cfg.ms)
    rows.push_back(cha_vs_bcha(full.prefix(m), split, cfg.trees, cfg.params,
                               model_rng.split(static_cast<std::uint64_t>(m))));
  return rows;
}

LearnerRow table_s2_partial(const TwoQubitConfig& cfg) {
  const Split split = two_qubit_split(cfg.seed, cfg.train, cfg.test);
  const TrainingSet ts = make_training_set(split.train, FeatureMode::kRaw);
  Rng rng(cfg.seed, kModelStream);
  const BaggedCommittee bag = train_bagging(ts, cfg.trees, cfg.params, rng);
  const BaggedCommittee single(std::vector<DecisionTree>{train_tree(ts, cfg.params)});
  LearnerRow row;
  row.bagging_error = evaluate(committee_classifier(bag, FeatureMode::kRaw), split.test);
  row.tree_error = evaluate(committee_classifier(single, FeatureMode::kRaw), split.test);
  return row;
}

QutritResult table_s3_scaled(const QutritConfig& cfg) {
  const Dims dims(3, 3);
  Rng hull_rng(cfg.seed, kHullStream);
  const ConvexHull oracle = build_hull(dims, cfg.oracle_m, hull_rng);
  if (max_of(cfg.ms) > cfg.oracle_m) throw InvalidArgument("sub-hulls must not exceed the oracle hull");
  SamplerConfig sc;
  sc.dims = dims;
  sc.seed = cfg.seed;
  const LabeledDataset all =
      build_dataset(sc, cfg.train + cfg.test, Labeler::hull_oracle(oracle), StateFilter::kPptOnly);
  const Split split{slice(all, 0, cfg.train), slice(all, cfg.train, cfg.train + cfg.test)};
  QutritResult out;
  out.oracle_separable_fraction = all.empty() ? 0.0 : all.separable_fraction();
  const Rng model_rng(cfg.seed, kModelStream);
  for (long m : cfg.ms)
    out.rows.push_back(cha_vs_bcha(oracle.prefix(m), split, cfg.trees, cfg.params,
                                   model_rng.split(static_cast<std::uint64_t>(m))));
  return out;
}

FigS1Result fig_s1(const FigS1Config& cfg) {
  if (cfg.k_max < 1) throw InvalidArgument("k_max must be >= 1");
  const Dims dims(2, 2);
  const CMatrix h1 = figure_observable_h1();
  const CMatrix h2 = figure_observable_h2();
  FigS1Result out;
  for (int k = 1; k <= cfg.k_max; ++k) out.curves.push_back(boundary_projection(dims, h1, h2, k, cfg.num_angles));
  Rng rng(cfg.seed, kProductStream);
  out.products = project_product_states(dims, h1, h2, cfg.product_states, rng);
  out.separable_support = projected_support(out.products, cfg.num_angles);
  return out;
}

double max_nesting_violation(const FigS1Result& r) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < r.curves.size(); ++k)
    for (std::size_t j = 0; j < r.curves[k].size(); ++j)
      worst = std::max(worst, r.curves[k + 1][j].support - r.curves[k][j].support);
  return worst;
}

double min_separable_gap(const FigS1Result& r) {
  double gap = std::numeric_limits<double>::infinity();
  const auto& last = r.curves.back();
  for (std::size_t j = 0; j < last.size(); ++j) gap = std::min(gap, last[j].support - r.separable_support[j]);
  return gap;
}

double ppt_critical_weight(const DensityMatrix& rho, double tol) {
  double lo = 0.0, hi = 1.0;
  if (is_ppt(rho)) return 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (is_ppt(depolarize(rho, mid)) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qmlcha::protocols
