#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qmlcha/cha.hpp"
#include "qmlcha/sampling.hpp"

namespace qmlcha {

enum class SplitCriterion { kGini };

struct TreeParams {
  int max_depth = 24;
  int min_leaf = 5;
  SplitCriterion split_criterion = SplitCriterion::kGini;

  void validate() const;
};

/// Dense design matrix: one sample per row, labels in {−1, +1}.
struct TrainingSet {
  RMatrix x;  // n × dim, column-major so each feature is contiguous
  std::vector<int> y;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
};

enum class FeatureMode { kRaw, kWithAlpha };

/// Stacks coords (and alpha, for kWithAlpha) of every record.
/// Throws InvalidArgument if kWithAlpha is requested and a record lacks alpha.
TrainingSet make_training_set(const LabeledDataset& ds, FeatureMode mode);

/// CART tree stored as a flat node array; node 0 is the root.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  ///< −1 marks a leaf
    double threshold = 0.0;
    int left = -1;     ///< taken when x[feature] <= threshold
    int right = -1;
    int label = 0;     ///< leaf prediction
  };

  DecisionTree() = default;
  DecisionTree(int input_dim, std::vector<Node> nodes);

  int predict(std::span<const double> x) const;
  int input_dim() const { return input_dim_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;
  std::size_t leaf_count() const;

 private:
  int input_dim_ = 0;
  std::vector<Node> nodes_;
};

/// Greedy Gini CART. `weights` are per-sample multiplicities (a bootstrap
/// draw); empty means every sample once.
DecisionTree train_tree(const TrainingSet& ts, const TreeParams& params,
                        std::span<const int> weights = {});

/// Majority-vote committee of bootstrap trees.
class BaggedCommittee {
 public:
  BaggedCommittee() = default;
  BaggedCommittee(std::vector<DecisionTree> trees, int tie_label = kEntangled);

  int predict(std::span<const double> x) const;
  /// Sum of the ±1 votes.
  int vote(std::span<const double> x) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  int size() const { return static_cast<int>(trees_.size()); }
  int input_dim() const { return trees_.empty() ? 0 : trees_.front().input_dim(); }
  int tie_label() const { return tie_label_; }

 private:
  std::vector<DecisionTree> trees_;
  int tie_label_ = kEntangled;
};

/// L trees, tree t trained on a size-|ts| bootstrap drawn from rng.split(t).
BaggedCommittee train_bagging(const TrainingSet& ts, int trees, const TreeParams& params, Rng& rng,
                              int tie_label = kEntangled);
/// Serial reference for train_bagging.
BaggedCommittee train_bagging_serial(const TrainingSet& ts, int trees, const TreeParams& params,
                                     Rng& rng, int tie_label = kEntangled);

/// Committee over (coords, α) plus the hull that produces α.
struct BchaModel {
  BaggedCommittee committee;
  std::shared_ptr<const ConvexHull> hull;
  TreeParams params;
  std::string hull_hash;  ///< SHA-256 of the serialized hull, when known
};

/// Trains the committee on hull-extended features; computes α first when
/// the dataset does not carry it.
BchaModel train_bcha(std::shared_ptr<const ConvexHull> hull, const LabeledDataset& ds, int trees,
                     const TreeParams& params, Rng& rng, int tie_label = kEntangled);

int predict_bcha(const BchaModel& model, const DensityMatrix& rho);
int predict_bcha(const BchaModel& model, const RVector& coords, double alpha);

using Classifier = std::function<int(const LabeledRecord&)>;

/// Mean 0/1 loss over the records.
double evaluate(const Classifier& h, const LabeledDataset& ds);

/// Adapters for evaluate().
Classifier cha_classifier();  // uses the record's stored alpha
Classifier committee_classifier(const BaggedCommittee& c, FeatureMode mode);

/// Committee predictions for every row of `x`, OpenMP over rows.
std::vector<int> predict_rows(const BaggedCommittee& c, const RMatrix& x);
std::vector<int> predict_rows_serial(const BaggedCommittee& c, const RMatrix& x);

}  // namespace qmlcha
