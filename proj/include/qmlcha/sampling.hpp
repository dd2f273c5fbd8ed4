#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qmlcha/qstate.hpp"
#include "qmlcha/rng.hpp"

namespace qmlcha {

class ConvexHull;

/// Random-state measure: Haar unitary × Dirichlet spectrum with density
/// ∝ Π d_i^{−λ}, i.e. concentration 1 − λ per coordinate.
struct SamplerConfig {
  Dims dims{2, 2};
  double dirichlet_exponent = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

inline constexpr int kSeparable = -1;
inline constexpr int kEntangled = +1;

struct LabeledRecord {
  RVector coords;
  std::optional<double> alpha;
  int label = 0;
};

enum class LabelSource : std::uint8_t { kPpt = 0, kHullOracle = 1 };

struct LabeledDataset {
  Dims dims{2, 2};
  LabelSource label_source = LabelSource::kPpt;
  std::vector<LabeledRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  bool has_alpha() const;
  double separable_fraction() const;
};

/// Which states feed build_dataset.
enum class StateFilter { kAll, kPptOnly };

CMatrix haar_unitary(int n, Rng& rng);
RVector dirichlet_spectrum(int n, double exponent, Rng& rng);
DensityMatrix random_density(const SamplerConfig& cfg, Rng& rng);

/// |ψ_A⟩|ψ_B⟩ with each factor uniform on its unit sphere.
struct ProductSample {
  CVector psi_a;
  CVector psi_b;
};
CVector random_unit_vector(int d, Rng& rng);
ProductSample random_product_vectors(const Dims& dims, Rng& rng);
DensityMatrix random_pure_product(const Dims& dims, Rng& rng);
/// Feature vector of |a⟩⟨a| ⊗ |b⟩⟨b| written straight into `out`.
void product_features_into(const CVector& psi_a, const CVector& psi_b, double* out);

/// Rejection sampler. Record i draws from stream i of cfg.seed, so the
/// output does not depend on how the work is scheduled.
std::vector<DensityMatrix> sample_ppt_states(const SamplerConfig& cfg, std::size_t count);
/// Serial reference for sample_ppt_states.
std::vector<DensityMatrix> sample_ppt_states_serial(const SamplerConfig& cfg, std::size_t count);

/// Labeller for build_dataset: PPT criterion, or membership in a reference hull.
struct Labeler {
  LabelSource source = LabelSource::kPpt;
  const ConvexHull* hull = nullptr;

  static Labeler ppt() { return {}; }
  static Labeler hull_oracle(const ConvexHull& h) { return {LabelSource::kHullOracle, &h}; }
};

struct DatasetStats {
  std::size_t draws = 0;     ///< random_density calls, including rejected ones
  std::size_t accepted = 0;  ///< draws that were PPT
};

/// Draws `count` states (record i from stream i) and labels them.
/// Throws CriterionInsufficient for the PPT labeller when d_A·d_B > 6.
LabeledDataset build_dataset(const SamplerConfig& cfg, std::size_t count, const Labeler& labeler,
                             StateFilter filter = StateFilter::kAll, DatasetStats* stats = nullptr);
LabeledDataset build_dataset_serial(const SamplerConfig& cfg, std::size_t count,
                                    const Labeler& labeler, StateFilter filter = StateFilter::kAll,
                                    DatasetStats* stats = nullptr);

/// Fraction of `count` fresh random_density draws that are PPT.
double ppt_fraction(const SamplerConfig& cfg, std::size_t count);

}  // namespace qmlcha
