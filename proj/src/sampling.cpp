#include "qmlcha/sampling.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "qmlcha/cha.hpp"
#include "qmlcha/parallel.hpp"

namespace qmlcha {

void SamplerConfig::validate() const {
  if (!(dirichlet_exponent > 0.0 && dirichlet_exponent < 1.0))
    throw InvalidArgument("Dirichlet exponent must lie in (0,1), got " +
                          std::to_string(dirichlet_exponent));
}

bool LabeledDataset::has_alpha() const {
  if (records.empty()) return false;
  for (const auto& r : records)
    if (!r.alpha) return false;
  return true;
}

double LabeledDataset::separable_fraction() const {
  if (records.empty()) return 0.0;
  std::size_t sep = 0;
  for (const auto& r : records) sep += (r.label == kSeparable);
  return static_cast<double>(sep) / static_cast<double>(records.size());
}

CMatrix haar_unitary(int n, Rng& rng) {
  if (n < 1) throw InvalidDimension("haar_unitary: n must be >= 1");
  const double s = 1.0 / std::sqrt(2.0);
  CMatrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = Complex(s * rng.normal(), s * rng.normal());
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix& r = qr.matrixQR();
  // Fix the phase ambiguity of QR so Q is Haar distributed.
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

RVector dirichlet_spectrum(int n, double exponent, Rng& rng) {
  if (!(exponent > 0.0 && exponent < 1.0))
    throw InvalidArgument("Dirichlet exponent must lie in (0,1), got " + std::to_string(exponent));
  const double shape = 1.0 - exponent;
  RVector d(n);
  double total = 0.0;
  do {
    for (int i = 0; i < n; ++i) d(i) = rng.gamma(shape);
    total = d.sum();
  } while (!(total > 0.0));
  return d / total;
}

DensityMatrix random_density(const SamplerConfig& cfg, Rng& rng) {
  const int n = cfg.dims.n();
  const CMatrix u = haar_unitary(n, rng);
  const RVector d = dirichlet_spectrum(n, cfg.dirichlet_exponent, rng);
  CMatrix rho = u * d.cast<Complex>().asDiagonal() * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return DensityMatrix(cfg.dims, std::move(rho));
}

CVector random_unit_vector(int d, Rng& rng) {
  CVector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(rng.normal(), rng.normal());
  return v / v.norm();
}

ProductSample random_product_vectors(const Dims& dims, Rng& rng) {
  ProductSample s;
  s.psi_a = random_unit_vector(dims.d_a(), rng);
  s.psi_b = random_unit_vector(dims.d_b(), rng);
  return s;
}

DensityMatrix random_pure_product(const Dims& dims, Rng& rng) {
  const auto s = random_product_vectors(dims, rng);
  return to_density(tensor(s.psi_a, s.psi_b));
}

void product_features_into(const CVector& psi_a, const CVector& psi_b, double* out) {
  const PureState psi = tensor(psi_a, psi_b);
  const CMatrix rho = psi.amplitudes * psi.amplitudes.adjoint();
  featurize_into(psi.dims.n(), rho, out);
}

namespace {

DensityMatrix draw_ppt(const SamplerConfig& cfg, Rng& rng, std::size_t& draws) {
  for (;;) {
    ++draws;
    DensityMatrix rho = random_density(cfg, rng);
    if (is_ppt(rho)) return rho;
  }
}

struct Draw {
  RVector coords;
  int label = 0;
  std::size_t draws = 0;
  std::size_t accepted = 0;
};

Draw draw_record(const SamplerConfig& cfg, std::size_t i, const Labeler& labeler,
                 StateFilter filter) {
  Rng rng(cfg.seed, i);
  Draw out;
  std::optional<DensityMatrix> rho;
  bool ppt = false;
  if (filter == StateFilter::kPptOnly) {
    rho.emplace(draw_ppt(cfg, rng, out.draws));
    ppt = true;
    out.accepted = 1;
  } else {
    out.draws = 1;
    rho.emplace(random_density(cfg, rng));
    ppt = is_ppt(*rho);
    out.accepted = ppt ? 1 : 0;
  }
  out.coords = featurize(*rho).coords;
  if (labeler.source == LabelSource::kPpt) {
    out.label = ppt ? kSeparable : kEntangled;
  } else {
    const AlphaResult a = alpha(*labeler.hull, FeatureVector{cfg.dims, out.coords});
    out.label = a.alpha >= 1.0 ? kSeparable : kEntangled;
  }
  return out;
}

void check_dataset_request(const SamplerConfig& cfg, const Labeler& labeler) {
  cfg.validate();
  if (labeler.source == LabelSource::kPpt && cfg.dims.n() > 6)
    throw CriterionInsufficient("PPT labelling is only exact for d_A*d_B <= 6, got " +
                                to_string(cfg.dims));
  if (labeler.source == LabelSource::kHullOracle) {
    if (labeler.hull == nullptr) throw InvalidArgument("hull-oracle labeller needs a hull");
    if (!(labeler.hull->dims() == cfg.dims))
      throw InvalidDimension("oracle hull dims " + to_string(labeler.hull->dims()) +
                             " do not match sampler dims " + to_string(cfg.dims));
  }
}

LabeledDataset assemble(const SamplerConfig& cfg, const Labeler& labeler, std::vector<Draw>& draws,
                        DatasetStats* stats) {
  LabeledDataset ds;
  ds.dims = cfg.dims;
  ds.label_source = labeler.source;
  ds.records.reserve(draws.size());
  DatasetStats total;
  for (auto& d : draws) {
    total.draws += d.draws;
    total.accepted += d.accepted;
    ds.records.push_back(LabeledRecord{std::move(d.coords), std::nullopt, d.label});
  }
  if (stats) *stats = total;
  return ds;
}

}  // namespace

std::vector<DensityMatrix> sample_ppt_states_serial(const SamplerConfig& cfg, std::size_t count) {
  cfg.validate();
  std::vector<DensityMatrix> out;
  out.reserve(count);
  std::size_t draws = 0;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(cfg.seed, i);
    out.push_back(draw_ppt(cfg, rng, draws));
  }
  return out;
}

std::vector<DensityMatrix> sample_ppt_states(const SamplerConfig& cfg, std::size_t count) {
  cfg.validate();
  std::vector<std::optional<DensityMatrix>> slots(count);
  parallel_for(count, [&](std::size_t i) {
    Rng rng(cfg.seed, i);
    std::size_t draws = 0;
    slots[i].emplace(draw_ppt(cfg, rng, draws));
  });
  std::vector<DensityMatrix> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

LabeledDataset build_dataset_serial(const SamplerConfig& cfg, std::size_t count,
                                    const Labeler& labeler, StateFilter filter,
                                    DatasetStats* stats) {
  check_dataset_request(cfg, labeler);
  std::vector<Draw> draws;
  draws.reserve(count);
  for (std::size_t i = 0; i < count; ++i) draws.push_back(draw_record(cfg, i, labeler, filter));
  return assemble(cfg, labeler, draws, stats);
}

LabeledDataset build_dataset(const SamplerConfig& cfg, std::size_t count, const Labeler& labeler,
                             StateFilter filter, DatasetStats* stats) {
  check_dataset_request(cfg, labeler);
  std::vector<Draw> draws(count);
  parallel_for(count, [&](std::size_t i) { draws[i] = draw_record(cfg, i, labeler, filter); });
  return assemble(cfg, labeler, draws, stats);
}

double ppt_fraction(const SamplerConfig& cfg, std::size_t count) {
  cfg.validate();
  if (count == 0) return 0.0;
  std::vector<unsigned char> ppt(count, 0);
  parallel_for(count, [&](std::size_t i) {
    Rng rng(cfg.seed, i);
    ppt[i] = is_ppt(random_density(cfg, rng)) ? 1 : 0;
  });
  std::size_t hits = 0;
  for (auto v : ppt) hits += v;
  return static_cast<double>(hits) / static_cast<double>(count);
}

}  // namespace qmlcha
