#pragma once

#include <cstdint>
#include <vector>

#include "qmlcha/cha.hpp"
#include "qmlcha/ensemble.hpp"
#include "qmlcha/kext.hpp"
#include "qmlcha/sampling.hpp"

// End-to-end experiment drivers shared by the CLI and the acceptance tests.
namespace qmlcha::protocols {

// Streams of a run seed reserved for hulls; dataset record i uses stream i.
inline constexpr std::uint64_t kHullStream = 1ULL << 62;
inline constexpr std::uint64_t kModelStream = (1ULL << 62) + 1;
inline constexpr std::uint64_t kProductStream = (1ULL << 62) + 2;

// Tiles-state α against nested two-qutrit hulls.
struct Table1Row {
  long m = 0;
  double alpha = 0.0;
  double residual = 0.0;
};
std::vector<Table1Row> table1(std::uint64_t seed, const std::vector<long>& ms);

struct Split {
  LabeledDataset train;
  LabeledDataset test;
};

/// PPT-labelled two-qubit states; the first `train` records train, the rest test.
Split two_qubit_split(std::uint64_t seed, std::size_t train, std::size_t test);

struct TwoQubitConfig {
  std::uint64_t seed = 11;
  std::size_t train = 25000;
  std::size_t test = 25000;
  int trees = 100;
  TreeParams params;
  std::vector<long> ms{1000, 2000, 5000, 10000};
};

struct ChaBchaRow {
  long m = 0;
  double cha_error = 0.0;
  double bcha_error = 0.0;
};

std::vector<ChaBchaRow> table_s1(const TwoQubitConfig& cfg);

struct LearnerRow {
  double bagging_error = 0.0;
  double tree_error = 0.0;
};

/// Raw-feature bagging and a single tree on the same split.
LearnerRow table_s2_partial(const TwoQubitConfig& cfg);

struct QutritConfig {
  std::uint64_t seed = 13;
  long oracle_m = 20000;
  std::vector<long> ms{2500, 5000, 10000};
  std::size_t train = 3000;
  std::size_t test = 1000;
  int trees = 100;
  TreeParams params;
};

struct QutritResult {
  double oracle_separable_fraction = 0.0;
  std::vector<ChaBchaRow> rows;
};

/// PPT two-qutrit states labelled by an oracle hull; sub-hulls are prefixes of it.
QutritResult table_s3_scaled(const QutritConfig& cfg);

struct FigS1Config {
  std::uint64_t seed = 17;
  int k_max = 12;
  int num_angles = 64;
  int product_states = 10000;
};

struct FigS1Result {
  std::vector<std::vector<BoundaryPoint>> curves;  ///< curves[k-1]
  ProjectedPoints products;
  std::vector<double> separable_support;
};

FigS1Result fig_s1(const FigS1Config& cfg);

/// Largest support increase from Θ_k to Θ_{k+1} over all angles and k.
double max_nesting_violation(const FigS1Result& r);
/// min over angles of (Θ_{k_max} support − product-state support).
double min_separable_gap(const FigS1Result& r);

/// Critical mixing weight of depolarize(rho, ·) under the PPT test, by bisection.
double ppt_critical_weight(const DensityMatrix& rho, double tol = 1e-10);

}  // namespace qmlcha::protocols
