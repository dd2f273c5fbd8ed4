#include <gtest/gtest.h>

#include <memory>

#include "qmlcha/cha.hpp"
#include "qmlcha/ensemble.hpp"
#include "qmlcha/protocols.hpp"

using namespace qmlcha;

namespace {

std::span<const double> row_span(const RVector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

TrainingSet threshold_set(int n, std::uint64_t seed) {
  Rng rng(seed);
  TrainingSet ts{RMatrix(n, 1), {}};
  for (int i = 0; i < n; ++i) {
    ts.x(i, 0) = rng.uniform();
    ts.y.push_back(ts.x(i, 0) > 0.5 ? kEntangled : kSeparable);
  }
  return ts;
}

DecisionTree leaf(int label, int dim) { return DecisionTree(dim, {DecisionTree::Node{-1, 0.0, -1, -1, label}}); }

struct Extended {
  std::shared_ptr<const ConvexHull> hull;
  LabeledDataset train, test;
};

const Extended& extended_two_qubit() {
  static const Extended e = [] {
    const protocols::Split s = protocols::two_qubit_split(3, 2000, 1000);
    Rng rng(4);
    auto hull = std::make_shared<const ConvexHull>(build_hull(Dims(2, 2), 1000, rng));
    return Extended{hull, extend_dataset(*hull, s.train), extend_dataset(*hull, s.test)};
  }();
  return e;
}

}  // namespace

TEST(Tree, PureLabelsGiveSingleLeaf) {
  TrainingSet ts{RMatrix::Random(30, 3), std::vector<int>(30, kSeparable)};
  const DecisionTree t = train_tree(ts, TreeParams{});
  EXPECT_EQ(t.nodes().size(), 1u);
  const RVector x = RVector::Random(3);
  EXPECT_EQ(t.predict(row_span(x)), kSeparable);
}

TEST(Tree, OneDimensionalThreshold) {
  const TrainingSet ts = threshold_set(1000, 2);
  const DecisionTree t = train_tree(ts, TreeParams{});
  ASSERT_EQ(t.depth(), 1);
  double below = -1.0, above = 2.0;
  for (int i = 0; i < 1000; ++i) {
    if (ts.x(i, 0) <= 0.5)
      below = std::max(below, ts.x(i, 0));
    else
      above = std::min(above, ts.x(i, 0));
  }
  const double thr = t.nodes()[0].threshold;
  EXPECT_GE(thr, below);
  EXPECT_LE(thr, above);
  RVector x(1);
  x << thr + 1e-9;
  EXPECT_EQ(t.predict(row_span(x)), kEntangled);
  x << thr;
  EXPECT_EQ(t.predict(row_span(x)), kSeparable);
}

TEST(Tree, TiesPreferLowestFeature) {
  // Two identical columns: the split must use feature 0.
  TrainingSet ts = threshold_set(200, 5);
  RMatrix x(200, 2);
  x << ts.x, ts.x;
  ts.x = x;
  EXPECT_EQ(train_tree(ts, TreeParams{}).nodes()[0].feature, 0);
}

TEST(Tree, RespectsMinLeafAndDepth) {
  TrainingSet ts = threshold_set(500, 6);
  Rng rng(1);
  for (auto& y : ts.y)
    if (rng.uniform() < 0.2) y = -y;  // label noise forces deep trees
  TreeParams p;
  p.max_depth = 3;
  EXPECT_LE(train_tree(ts, p).depth(), 3);
  p.max_depth = 24;
  p.min_leaf = 50;
  EXPECT_LE(train_tree(ts, p).leaf_count(), 10u);
  p.min_leaf = 0;
  EXPECT_THROW(train_tree(ts, p), InvalidArgument);
}

TEST(Tree, PredictionChecks) {
  const DecisionTree t = leaf(kEntangled, 4);
  const RVector ok = RVector::Zero(4), bad = RVector::Zero(3);
  EXPECT_EQ(t.predict(row_span(ok)), kEntangled);
  EXPECT_THROW(t.predict(row_span(bad)), InvalidDimension);
  EXPECT_THROW(train_tree(TrainingSet{RMatrix(0, 2), {}}, TreeParams{}), InvalidArgument);
}

TEST(Tree, StableUnderTinyPerturbations) {
  const auto& e = extended_two_qubit();
  const TrainingSet ts = make_training_set(e.train, FeatureMode::kWithAlpha);
  const DecisionTree t = train_tree(ts, TreeParams{});
  for (Eigen::Index i = 0; i < 200; ++i) {
    RVector x = ts.x.row(i).transpose();
    const int base = t.predict(row_span(x));
    x.array() += 1e-13;
    bool near_threshold = false;
    for (const auto& n : t.nodes())
      if (n.feature >= 0 && std::abs(x(n.feature) - n.threshold) < 1e-12) near_threshold = true;
    if (!near_threshold) EXPECT_EQ(t.predict(row_span(x)), base);
  }
}

TEST(Tree, FitsExtendedFeatures) {
  const auto& e = extended_two_qubit();
  const TrainingSet ts = make_training_set(e.train, FeatureMode::kWithAlpha);
  const DecisionTree t = train_tree(ts, TreeParams{});
  int right = 0;
  for (Eigen::Index i = 0; i < ts.size(); ++i) {
    const RVector x = ts.x.row(i).transpose();
    right += t.predict(row_span(x)) == ts.y[static_cast<std::size_t>(i)];
  }
  EXPECT_GE(static_cast<double>(right) / ts.size(), 0.97);
}

TEST(Committee, TieGoesToEntangled) {
  const BaggedCommittee c({leaf(kSeparable, 2), leaf(kEntangled, 2)});
  const RVector x = RVector::Zero(2);
  EXPECT_EQ(c.vote(row_span(x)), 0);
  EXPECT_EQ(c.predict(row_span(x)), kEntangled);
  const BaggedCommittee c2({leaf(kSeparable, 2), leaf(kEntangled, 2)}, kSeparable);
  EXPECT_EQ(c2.predict(row_span(x)), kSeparable);
  EXPECT_THROW(BaggedCommittee({leaf(kSeparable, 2), leaf(kEntangled, 3)}), InvalidArgument);
}

TEST(Committee, OddMajorityIsSignOfVotes) {
  const BaggedCommittee all_same({leaf(kSeparable, 1), leaf(kSeparable, 1), leaf(kSeparable, 1)});
  const BaggedCommittee two_one({leaf(kSeparable, 1), leaf(kEntangled, 1), leaf(kEntangled, 1)});
  const RVector x = RVector::Zero(1);
  EXPECT_EQ(all_same.predict(row_span(x)), kSeparable);
  EXPECT_EQ(two_one.predict(row_span(x)), kEntangled);
  EXPECT_EQ(two_one.vote(row_span(x)), 1);
}

TEST(Bagging, SingleTreeIsOneBootstrapTree) {
  const TrainingSet ts = make_training_set(extended_two_qubit().train, FeatureMode::kRaw);
  Rng rng(12);
  const BaggedCommittee c = train_bagging(ts, 1, TreeParams{}, rng);
  Rng draw = rng.split(0);
  std::vector<int> w(static_cast<std::size_t>(ts.size()), 0);
  for (Eigen::Index i = 0; i < ts.size(); ++i) ++w[draw.index(static_cast<std::size_t>(ts.size()))];
  const DecisionTree ref = train_tree(ts, TreeParams{}, w);
  ASSERT_EQ(c.trees()[0].nodes().size(), ref.nodes().size());
  for (std::size_t i = 0; i < ref.nodes().size(); ++i) {
    EXPECT_EQ(c.trees()[0].nodes()[i].feature, ref.nodes()[i].feature);
    EXPECT_EQ(c.trees()[0].nodes()[i].threshold, ref.nodes()[i].threshold);
  }
}

TEST(Bagging, Deterministic) {
  const TrainingSet ts = make_training_set(extended_two_qubit().train, FeatureMode::kWithAlpha);
  Rng a(3), b(3);
  const BaggedCommittee ca = train_bagging(ts, 5, TreeParams{}, a);
  const BaggedCommittee cb = train_bagging(ts, 5, TreeParams{}, b);
  for (std::size_t t = 0; t < 5; ++t) ASSERT_EQ(ca.trees()[t].nodes().size(), cb.trees()[t].nodes().size());
  EXPECT_EQ(predict_rows(ca, ts.x), predict_rows(cb, ts.x));
}

TEST(Bcha, AlphaOnlyLabelsAreLearned) {
  // Labels defined by α < 1: the committee can do no worse than CHA itself (zero error).
  const auto& e = extended_two_qubit();
  auto relabel = [](LabeledDataset ds) {
    for (auto& r : ds.records) r.label = *r.alpha >= 1.0 ? kSeparable : kEntangled;
    return ds;
  };
  const LabeledDataset train = relabel(e.train), test = relabel(e.test);
  Rng rng(1);
  const BchaModel m = train_bcha(e.hull, train, 11, TreeParams{}, rng);
  const double cha = evaluate(cha_classifier(), test);
  EXPECT_EQ(cha, 0.0);
  EXPECT_LE(evaluate(committee_classifier(m.committee, FeatureMode::kWithAlpha), test), cha);
}

TEST(Bcha, BeatsChaAndOverridesNearBoundary) {
  const auto& e = extended_two_qubit();
  Rng rng(2);
  const BchaModel m = train_bcha(e.hull, e.train, 51, TreeParams{}, rng);
  EXPECT_LT(evaluate(committee_classifier(m.committee, FeatureMode::kWithAlpha), e.test),
            evaluate(cha_classifier(), e.test));
  int overridden = 0;
  for (const auto& r : e.test.records)
    if (*r.alpha < 1.0 && predict_bcha(m, r.coords, *r.alpha) == kSeparable) ++overridden;
  EXPECT_GT(overridden, 0);
  EXPECT_EQ(predict_bcha(m, maximally_mixed(Dims(2, 2))), kSeparable);
  CVector psi = CVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -psi(1);
  EXPECT_EQ(predict_bcha(m, to_density(PureState{Dims(2, 2), psi})), kEntangled);
}

TEST(Bcha, NeedsHullAndAlpha) {
  Rng rng(1);
  EXPECT_THROW(train_bcha(nullptr, extended_two_qubit().train, 3, TreeParams{}, rng), InvalidArgument);
  LabeledDataset raw = extended_two_qubit().train;
  raw.records[0].alpha.reset();
  EXPECT_THROW(make_training_set(raw, FeatureMode::kWithAlpha), InvalidArgument);
}

TEST(Evaluate, LossProperties) {
  const auto& e = extended_two_qubit();
  const Classifier perfect = [](const LabeledRecord& r) { return r.label; };
  const Classifier constant = [](const LabeledRecord&) { return kEntangled; };
  EXPECT_EQ(evaluate(perfect, e.test), 0.0);

  LabeledDataset balanced{Dims(2, 2), LabelSource::kPpt, {}};
  for (int i = 0; i < 10; ++i) balanced.records.push_back({RVector::Zero(15), 1.0, i % 2 ? kEntangled : kSeparable});
  EXPECT_EQ(evaluate(constant, balanced), 0.5);

  // Linearity over concatenation.
  LabeledDataset both = e.train;
  both.records.insert(both.records.end(), e.test.records.begin(), e.test.records.end());
  const double a = evaluate(cha_classifier(), e.train), b = evaluate(cha_classifier(), e.test);
  const double na = static_cast<double>(e.train.size()), nb = static_cast<double>(e.test.size());
  EXPECT_NEAR(evaluate(cha_classifier(), both), (na * a + nb * b) / (na + nb), 1e-15);
  EXPECT_THROW(evaluate(perfect, LabeledDataset{}), InvalidArgument);
}
