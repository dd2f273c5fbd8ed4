#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "qmlcha/qstate.hpp"
#include "qmlcha/sampling.hpp"

using namespace qmlcha;

namespace {

CVector ket(int n, int i) {
  CVector v = CVector::Zero(n);
  v(i) = 1.0;
  return v;
}

DensityMatrix bell_singlet() {
  CVector psi = (ket(4, 1) - ket(4, 2)) / std::sqrt(2.0);
  return to_density(PureState{Dims(2, 2), psi});
}

}  // namespace

TEST(Dims, RejectsSmallFactors) {
  EXPECT_THROW(Dims(1, 2), InvalidDimension);
  EXPECT_THROW(Dims(3, 0), InvalidDimension);
  const Dims d(2, 3);
  EXPECT_EQ(d.n(), 6);
  EXPECT_EQ(d.feature_dim(), 35);
}

TEST(GellMann, QubitIsPauli) {
  const auto b = gellmann_basis(2);
  ASSERT_EQ(b.matrices.size(), 3u);
  CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  EXPECT_EQ(b.matrices[0], sx);
  EXPECT_EQ(b.matrices[1], sy);
  EXPECT_EQ(b.matrices[2], sz);
}

TEST(GellMann, MatchesDefiningFormulas) {
  for (int n : {2, 3, 4, 6, 9}) {
    const auto b = gellmann_basis(n);
    const auto ref = oracle::gellmann(n);
    ASSERT_EQ(b.matrices.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_LE((b.matrices[i] - ref[i]).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(GellMann, OrthogonalAndTraceless) {
  for (int n : {2, 3, 4, 6, 9}) {
    const auto b = gellmann_basis(n);
    ASSERT_EQ(static_cast<int>(b.matrices.size()), n * n - 1);
    for (std::size_t i = 0; i < b.matrices.size(); ++i) {
      EXPECT_LE(std::abs(b.matrices[i].trace()), 1e-12);
      for (std::size_t j = 0; j < b.matrices.size(); ++j) {
        const Complex t = (b.matrices[i] * b.matrices[j]).trace();
        EXPECT_LE(std::abs(t - Complex(i == j ? 2.0 : 0.0)), 1e-12) << n << " " << i << " " << j;
      }
    }
  }
  EXPECT_THROW(gellmann_basis(1), InvalidDimension);
}

TEST(Featurize, MaximallyMixedIsOrigin) {
  EXPECT_LE(featurize(maximally_mixed(Dims(2, 3))).coords.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Featurize, QubitGroundState) {
  // No 1-qubit Dims exists; check |00⟩ against its explicit trace formula instead.
  const CMatrix p0 = ket(2, 0) * ket(2, 0).adjoint();
  const DensityMatrix rho = tensor(p0, p0);
  const FeatureVector x = featurize(rho);
  const auto ref = oracle::gellmann(4);
  const double c = std::sqrt(4.0 / (2.0 * 3.0));
  for (std::size_t i = 0; i < ref.size(); ++i)
    EXPECT_NEAR(x.coords(static_cast<Eigen::Index>(i)), c * (rho.matrix() * ref[i]).trace().real(), 1e-14);
  EXPECT_NEAR(x.coords.norm(), 1.0, 1e-14);  // pure states lie on the unit sphere
  EXPECT_LE((defeaturize(x).matrix() - rho.matrix()).norm(), 1e-12);
}

TEST(Featurize, MatchesExplicitTraces) {
  SamplerConfig cfg;
  cfg.dims = Dims(2, 3);
  Rng rng(4);
  const auto ref = oracle::gellmann(6);
  const double c = std::sqrt(6.0 / 10.0);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_density(cfg, rng);
    const FeatureVector x = featurize(rho);
    for (std::size_t i = 0; i < ref.size(); ++i)
      EXPECT_NEAR(x.coords(static_cast<Eigen::Index>(i)), c * (rho.matrix() * ref[i]).trace().real(), 1e-13);
  }
}

TEST(Featurize, RoundTrips) {
  for (auto dims : {Dims(2, 2), Dims(2, 3), Dims(3, 3)}) {
    SamplerConfig cfg;
    cfg.dims = dims;
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
      const DensityMatrix rho = random_density(cfg, rng);
      EXPECT_LE((defeaturize(featurize(rho)).matrix() - rho.matrix()).norm(), 1e-12);
      RVector v = RVector::Random(dims.feature_dim());
      EXPECT_LE((featurize(dims, defeaturize(FeatureVector{dims, v}).matrix()).coords - v).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
  const FeatureVector tiles = featurize(tiles_state());
  EXPECT_EQ(tiles.coords.size(), 80);
  EXPECT_LE((defeaturize(tiles).matrix() - tiles_state().matrix()).norm(), 1e-12);
}

TEST(Featurize, RejectsNonHermitian) {
  CMatrix a = CMatrix::Identity(4, 4) / 4.0;
  a(0, 1) = 0.1;
  EXPECT_THROW(featurize(Dims(2, 2), a), InvariantViolation);
}

TEST(Defeaturize, ZeroAndPure) {
  EXPECT_LE((defeaturize(FeatureVector{Dims(2, 2), RVector::Zero(15)}).matrix() - CMatrix::Identity(4, 4) / 4.0).norm(),
            1e-15);
}

TEST(Defeaturize, ReportsNonPositive) {
  // Twice the unit vector of |00⟩: ρ = (8|00⟩⟨00| − I)/4, eigenvalues 7/4 and −1/4 (three times).
  const CMatrix p00 = ket(4, 0) * ket(4, 0).adjoint();
  const RVector x = 2.0 * featurize(Dims(2, 2), p00).coords;
  const DensityMatrix d = defeaturize(FeatureVector{Dims(2, 2), x});
  EXPECT_LE((d.matrix() - (8.0 * p00 - CMatrix::Identity(4, 4)) / 4.0).norm(), 1e-14);
  EXPECT_NEAR(d.min_eigenvalue(), -0.25, 1e-12);
  EXPECT_FALSE(d.is_positive());
  EXPECT_NEAR(d.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_THROW(DensityMatrix(Dims(2, 2), d.matrix()), InvariantViolation);
}

TEST(Tensor, Products) {
  const CMatrix half = CMatrix::Identity(2, 2) / 2.0;
  const DensityMatrix m = tensor(half, half);
  EXPECT_LE((m.matrix() - CMatrix::Identity(4, 4) / 4.0).norm(), 1e-15);
  const PureState p = tensor(ket(2, 0), ket(2, 1));
  EXPECT_EQ(p.amplitudes, ket(4, 1));
}

TEST(PartialTranspose, BellSpectrum) {
  RVector ev = hermitian_eigenvalues(partial_transpose(bell_singlet()));
  std::vector<double> got(ev.data(), ev.data() + ev.size());
  std::sort(got.begin(), got.end());
  EXPECT_NEAR(got[0], -0.5, 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(got[static_cast<std::size_t>(i)], 0.5, 1e-12);
  EXPECT_FALSE(is_ppt(bell_singlet()));
}

TEST(PartialTranspose, MatchesIndexSwapAndIsInvolution) {
  SamplerConfig cfg;
  cfg.dims = Dims(2, 3);
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_density(cfg, rng);
    const CMatrix pt = partial_transpose(rho);
    EXPECT_EQ(pt, oracle::partial_transpose(rho.matrix(), 2, 3));
    EXPECT_EQ(partial_transpose(cfg.dims, pt), rho.matrix());
    EXPECT_NEAR(std::abs(pt.trace() - Complex(1.0)), 0.0, 1e-14);
    EXPECT_LE((pt - pt.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(PartialTranspose, ProductStatesArePpt) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) EXPECT_TRUE(is_ppt(random_pure_product(Dims(3, 3), rng)));
}

TEST(Tiles, Properties) {
  const DensityMatrix t = tiles_state();
  EXPECT_NEAR(t.matrix().trace().real(), 1.0, 1e-14);
  EXPECT_TRUE(is_ppt(t));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(t.matrix());
  int rank = 0;
  for (Eigen::Index i = 0; i < 9; ++i) rank += es.eigenvalues()(i) > 1e-12;
  EXPECT_EQ(rank, 4);
  // The UPB vectors lie in the kernel.
  const CVector v1 = (ket(9, 0) - ket(9, 1)) / std::sqrt(2.0);
  const CVector v5 = CVector::Constant(9, Complex(1.0 / 3.0));
  EXPECT_NEAR(std::abs(v1.dot(t.matrix() * v1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v5.dot(t.matrix() * v5)), 0.0, 1e-15);
}

TEST(Depolarize, ScalesFeaturesLinearly) {
  const DensityMatrix t = tiles_state();
  EXPECT_LE((depolarize(t, 0.0).matrix() - maximally_mixed(t.dims()).matrix()).norm(), 1e-15);
  EXPECT_LE((depolarize(t, 1.0).matrix() - t.matrix()).norm(), 1e-15);
  for (double a : {0.5, 0.3, 0.87})
    EXPECT_LE((featurize(depolarize(t, a)).coords - a * featurize(t).coords).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(depolarize(t, 1.5), InvalidArgument);
  EXPECT_THROW(depolarize(t, -0.1), InvalidArgument);
}
