#include "qmlcha/ensemble.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "qmlcha/parallel.hpp"

namespace qmlcha {

void TreeParams::validate() const {
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (min_leaf < 1) throw InvalidArgument("min_leaf must be >= 1");
}

TrainingSet make_training_set(const LabeledDataset& ds, FeatureMode mode) {
  const int fd = ds.dims.feature_dim();
  const int dim = fd + (mode == FeatureMode::kWithAlpha ? 1 : 0);
  TrainingSet ts{RMatrix(static_cast<Eigen::Index>(ds.size()), dim), {}};
  ts.y.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.records[i];
    const auto row = static_cast<Eigen::Index>(i);
    ts.x.row(row).head(fd) = r.coords.transpose();
    if (mode == FeatureMode::kWithAlpha) {
      if (!r.alpha) throw InvalidArgument("record " + std::to_string(i) + " has no alpha feature");
      ts.x(row, fd) = *r.alpha;
    }
    ts.y.push_back(r.label);
  }
  return ts;
}

DecisionTree::DecisionTree(int input_dim, std::vector<Node> nodes)
    : input_dim_(input_dim), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw InvalidArgument("a decision tree needs at least one node");
  const int count = static_cast<int>(nodes_.size());
  for (const auto& n : nodes_) {
    if (n.feature < 0) {
      if (n.label != kSeparable && n.label != kEntangled)
        throw InvalidArgument("leaf label must be -1 or +1");
      continue;
    }
    if (n.feature >= input_dim_) throw InvalidArgument("split feature outside input dimension");
    if (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count)
      throw InvalidArgument("split children out of range");
  }
}

int DecisionTree::predict(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_)
    throw InvalidDimension("tree expects " + std::to_string(input_dim_) + " inputs, got " +
                           std::to_string(x.size()));
  int at = 0;
  for (;;) {
    const Node& n = nodes_[static_cast<std::size_t>(at)];
    if (n.feature < 0) return n.label;
    at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  // Children are always appended after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    best = std::max(best, d[i]);
    if (n.feature >= 0) {
      d[static_cast<std::size_t>(n.left)] = d[i] + 1;
      d[static_cast<std::size_t>(n.right)] = d[i] + 1;
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

namespace {

using Orders = std::vector<std::vector<int>>;

Orders presort(const TrainingSet& ts) {
  Orders orders(static_cast<std::size_t>(ts.dim()));
  for (Eigen::Index f = 0; f < ts.dim(); ++f) {
    auto& o = orders[static_cast<std::size_t>(f)];
    o.resize(static_cast<std::size_t>(ts.size()));
    std::iota(o.begin(), o.end(), 0);
    const double* col = ts.x.col(f).data();
    std::stable_sort(o.begin(), o.end(), [col](int a, int b) { return col[a] < col[b]; });
  }
  return orders;
}

class CartBuilder {
 public:
  CartBuilder(const TrainingSet& ts, const TreeParams& params, std::span<const int> weights,
              const Orders& global)
      : ts_(ts), params_(params), weights_(weights), goes_left_(static_cast<std::size_t>(ts.size()), 0) {
    orders_.resize(global.size());
    for (std::size_t f = 0; f < global.size(); ++f) {
      orders_[f].reserve(global[f].size());
      for (int s : global[f])
        if (weights_[static_cast<std::size_t>(s)] > 0) orders_[f].push_back(s);
    }
    scratch_.resize(orders_.empty() ? 0 : orders_[0].size());
  }

  DecisionTree build() {
    const int n = orders_.empty() ? 0 : static_cast<int>(orders_[0].size());
    if (n == 0) throw InvalidArgument("cannot train a tree on an empty sample");
    grow(0, n, 0);
    return DecisionTree(static_cast<int>(ts_.dim()), std::move(nodes_));
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
  };

  int grow(int begin, int end, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double pos = 0.0, neg = 0.0;
    for (int i = begin; i < end; ++i) {
      const int s = orders_[0][static_cast<std::size_t>(i)];
      const double w = weights_[static_cast<std::size_t>(s)];
      (ts_.y[static_cast<std::size_t>(s)] > 0 ? pos : neg) += w;
    }
    const int label = pos >= neg ? kEntangled : kSeparable;
    const double total = pos + neg;
    const bool stop = depth >= params_.max_depth || pos == 0.0 || neg == 0.0 ||
                      total < 2.0 * params_.min_leaf;
    const Split split = stop ? Split{} : best_split(begin, end, pos, neg);
    if (split.feature < 0) {
      nodes_[static_cast<std::size_t>(id)].label = label;
      return id;
    }
    const int mid = partition(begin, end, split);
    const int left = grow(begin, mid, depth + 1);
    const int right = grow(mid, end, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    node.label = label;
    return id;
  }

  // Maximizes Σ_children (p² + n²)/w, i.e. minimizes the weighted Gini
  // impurity. Scanning features and thresholds in ascending order with a
  // strict comparison keeps the lowest feature, then lowest threshold, on ties.
  Split best_split(int begin, int end, double pos, double neg) const {
    const double total = pos + neg;
    const double parent = (pos * pos + neg * neg) / total;
    double best = parent + 1e-12 * total;
    const double min_leaf = params_.min_leaf;
    Split out;
    for (std::size_t f = 0; f < orders_.size(); ++f) {
      const auto& order = orders_[f];
      const double* col = ts_.x.col(static_cast<Eigen::Index>(f)).data();
      double lp = 0.0, ln = 0.0;
      for (int i = begin; i < end - 1; ++i) {
        const int s = order[static_cast<std::size_t>(i)];
        const double w = weights_[static_cast<std::size_t>(s)];
        (ts_.y[static_cast<std::size_t>(s)] > 0 ? lp : ln) += w;
        const double xa = col[s];
        const double xb = col[order[static_cast<std::size_t>(i + 1)]];
        if (!(xa < xb)) continue;
        const double wl = lp + ln;
        const double wr = total - wl;
        if (wl < min_leaf || wr < min_leaf) continue;
        const double rp = pos - lp, rn = neg - ln;
        const double score = (lp * lp + ln * ln) / wl + (rp * rp + rn * rn) / wr;
        if (score > best) {
          best = score;
          out.feature = static_cast<int>(f);
          double thr = 0.5 * (xa + xb);
          if (!(thr < xb)) thr = xa;
          out.threshold = thr;
        }
      }
    }
    return out;
  }

  int partition(int begin, int end, const Split& split) {
    const double* col = ts_.x.col(split.feature).data();
    int nleft = 0;
    for (int i = begin; i < end; ++i) {
      const int s = orders_[0][static_cast<std::size_t>(i)];
      const bool left = col[s] <= split.threshold;
      goes_left_[static_cast<std::size_t>(s)] = left ? 1 : 0;
      nleft += left;
    }
    for (auto& order : orders_) {
      int li = begin;
      int ri = 0;
      for (int i = begin; i < end; ++i) {
        const int s = order[static_cast<std::size_t>(i)];
        if (goes_left_[static_cast<std::size_t>(s)])
          order[static_cast<std::size_t>(li++)] = s;
        else
          scratch_[static_cast<std::size_t>(ri++)] = s;
      }
      std::copy(scratch_.begin(), scratch_.begin() + ri, order.begin() + li);
    }
    return begin + nleft;
  }

  const TrainingSet& ts_;
  const TreeParams& params_;
  std::span<const int> weights_;
  Orders orders_;
  std::vector<char> goes_left_;
  std::vector<int> scratch_;
  std::vector<DecisionTree::Node> nodes_;
};

void check_training_set(const TrainingSet& ts) {
  if (ts.size() == 0) throw InvalidArgument("cannot train on an empty dataset");
  if (static_cast<Eigen::Index>(ts.y.size()) != ts.size())
    throw InvalidArgument("label count does not match sample count");
  for (int y : ts.y)
    if (y != kSeparable && y != kEntangled) throw InvalidArgument("labels must be -1 or +1");
}

std::vector<int> bootstrap_weights(std::size_t n, Rng rng) {
  std::vector<int> w(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++w[rng.index(n)];
  return w;
}

}  // namespace

DecisionTree train_tree(const TrainingSet& ts, const TreeParams& params,
                        std::span<const int> weights) {
  check_training_set(ts);
  params.validate();
  std::vector<int> ones;
  if (weights.empty()) {
    ones.assign(static_cast<std::size_t>(ts.size()), 1);
    weights = ones;
  } else if (static_cast<Eigen::Index>(weights.size()) != ts.size()) {
    throw InvalidArgument("weight count does not match sample count");
  }
  const Orders global = presort(ts);
  return CartBuilder(ts, params, weights, global).build();
}

BaggedCommittee::BaggedCommittee(std::vector<DecisionTree> trees, int tie_label)
    : trees_(std::move(trees)), tie_label_(tie_label) {
  if (trees_.empty()) throw InvalidArgument("a committee needs at least one tree");
  if (tie_label_ != kSeparable && tie_label_ != kEntangled)
    throw InvalidArgument("tie label must be -1 or +1");
  for (const auto& t : trees_)
    if (t.input_dim() != trees_.front().input_dim())
      throw InvalidArgument("committee trees disagree on input dimension");
}

int BaggedCommittee::vote(std::span<const double> x) const {
  int sum = 0;
  for (const auto& t : trees_) sum += t.predict(x);
  return sum;
}

int BaggedCommittee::predict(std::span<const double> x) const {
  const int v = vote(x);
  if (v > 0) return kEntangled;
  if (v < 0) return kSeparable;
  return tie_label_;
}

BaggedCommittee train_bagging_serial(const TrainingSet& ts, int trees, const TreeParams& params,
                                     Rng& rng, int tie_label) {
  check_training_set(ts);
  params.validate();
  if (trees < 1) throw InvalidArgument("committee size must be >= 1");
  const Orders global = presort(ts);
  std::vector<DecisionTree> out;
  out.reserve(static_cast<std::size_t>(trees));
  for (int t = 0; t < trees; ++t) {
    const auto w = bootstrap_weights(static_cast<std::size_t>(ts.size()), rng.split(static_cast<std::uint64_t>(t)));
    out.push_back(CartBuilder(ts, params, w, global).build());
  }
  return BaggedCommittee(std::move(out), tie_label);
}

BaggedCommittee train_bagging(const TrainingSet& ts, int trees, const TreeParams& params, Rng& rng,
                              int tie_label) {
  check_training_set(ts);
  params.validate();
  if (trees < 1) throw InvalidArgument("committee size must be >= 1");
  const Orders global = presort(ts);
  std::vector<DecisionTree> out(static_cast<std::size_t>(trees));
  parallel_for(out.size(), [&](std::size_t t) {
    const auto w = bootstrap_weights(static_cast<std::size_t>(ts.size()), rng.split(t));
    out[t] = CartBuilder(ts, params, w, global).build();
  });
  return BaggedCommittee(std::move(out), tie_label);
}

BchaModel train_bcha(std::shared_ptr<const ConvexHull> hull, const LabeledDataset& ds, int trees,
                     const TreeParams& params, Rng& rng, int tie_label) {
  if (!hull) throw InvalidArgument("train_bcha needs a hull");
  const LabeledDataset extended = ds.has_alpha() ? ds : extend_dataset(*hull, ds);
  const TrainingSet ts = make_training_set(extended, FeatureMode::kWithAlpha);
  BchaModel model;
  model.committee = train_bagging(ts, trees, params, rng, tie_label);
  model.hull = std::move(hull);
  model.params = params;
  return model;
}

int predict_bcha(const BchaModel& model, const RVector& coords, double alpha_value) {
  RVector x(coords.size() + 1);
  x.head(coords.size()) = coords;
  x(coords.size()) = alpha_value;
  return model.committee.predict(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

int predict_bcha(const BchaModel& model, const DensityMatrix& rho) {
  if (!model.hull) throw InvalidArgument("BCHA model has no hull");
  const FeatureVector p = featurize(rho);
  const AlphaResult a = alpha(*model.hull, p);
  return predict_bcha(model, p.coords, a.alpha);
}

double evaluate(const Classifier& h, const LabeledDataset& ds) {
  if (ds.empty()) throw InvalidArgument("cannot evaluate on an empty dataset");
  std::size_t wrong = 0;
  for (const auto& r : ds.records) wrong += (h(r) != r.label);
  return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

Classifier cha_classifier() {
  return [](const LabeledRecord& r) {
    if (!r.alpha) throw InvalidArgument("CHA evaluation needs alpha on every record");
    return *r.alpha >= 1.0 ? kSeparable : kEntangled;
  };
}

Classifier committee_classifier(const BaggedCommittee& c, FeatureMode mode) {
  return [&c, mode](const LabeledRecord& r) {
    if (mode == FeatureMode::kRaw)
      return c.predict(std::span<const double>(r.coords.data(), static_cast<std::size_t>(r.coords.size())));
    if (!r.alpha) throw InvalidArgument("BCHA evaluation needs alpha on every record");
    RVector x(r.coords.size() + 1);
    x.head(r.coords.size()) = r.coords;
    x(r.coords.size()) = *r.alpha;
    return c.predict(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  };
}

std::vector<int> predict_rows_serial(const BaggedCommittee& c, const RMatrix& x) {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  RVector row(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    row = x.row(i).transpose();
    out[static_cast<std::size_t>(i)] = c.predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
  }
  return out;
}

std::vector<int> predict_rows(const BaggedCommittee& c, const RMatrix& x) {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  parallel_for(out.size(), [&](std::size_t i) {
    const RVector row = x.row(static_cast<Eigen::Index>(i)).transpose();
    out[i] = c.predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
  });
  return out;
}

}  // namespace qmlcha
