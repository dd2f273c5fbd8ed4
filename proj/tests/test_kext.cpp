#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qmlcha/kext.hpp"
#include "qmlcha/sampling.hpp"

using namespace qmlcha;

namespace {

// Permutation matrix on A⊗B_1⊗…⊗B_k swapping B_1 and B_j (1-based).
CMatrix swap_b(int da, int db, int k, int j) {
  long tail = 1;
  for (int i = 0; i < k; ++i) tail *= db;
  const long dim = da * tail;
  CMatrix p = CMatrix::Zero(dim, dim);
  for (long idx = 0; idx < dim; ++idx) {
    std::vector<int> digits(static_cast<std::size_t>(k));
    long r = idx % tail;
    for (int i = k - 1; i >= 0; --i) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(r % db);
      r /= db;
    }
    std::swap(digits[0], digits[static_cast<std::size_t>(j - 1)]);
    long out = 0;
    for (int d : digits) out = out * db + d;
    p(idx / tail * tail + out, idx) = 1.0;
  }
  return p;
}

// H = Σ_j H_{AB_j} assembled from Kronecker products and B-swaps.
CMatrix star_oracle(const CMatrix& h, int da, int db, int k) {
  long rest = 1;
  for (int i = 1; i < k; ++i) rest *= db;
  const CMatrix h1 = oracle::kron(h, CMatrix::Identity(rest, rest));
  CMatrix total = h1;
  for (int j = 2; j <= k; ++j) {
    const CMatrix p = swap_b(da, db, k, j);
    total += p * h1 * p.adjoint();
  }
  return total;
}

double ground_energy(const CMatrix& h) { return oracle::min_eig(h); }

CMatrix singlet_witness() {
  CVector psi = CVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -psi(1);
  return -(psi * psi.adjoint() - CMatrix::Identity(4, 4) / 4.0);
}

}  // namespace

TEST(TwoLocal, RandomIsUnitAndTraceless) {
  Rng a(1), b(2);
  const TwoLocalHamiltonian h = random_two_local(Dims(2, 3), a);
  EXPECT_NEAR(h.coeffs.norm(), 1.0, 1e-12);
  const CMatrix m = h.matrix();
  EXPECT_LE((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(std::abs(m.trace()), 0.0, 1e-14);
  EXPECT_NEAR(m.norm(), 1.0, 1e-12);  // orthonormal basis keeps the norm
  EXPECT_NE(h.coeffs, random_two_local(Dims(2, 3), b).coeffs);
}

TEST(TwoLocal, FromMatrixRoundTrip) {
  Rng rng(3);
  const TwoLocalHamiltonian h = random_two_local(Dims(2, 2), rng);
  const CMatrix shifted = 2.5 * h.matrix() + 0.7 * CMatrix::Identity(4, 4);
  const TwoLocalHamiltonian back = two_local_from_matrix(Dims(2, 2), shifted);
  EXPECT_LE((back.coeffs - h.coeffs).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(two_local_from_matrix(Dims(2, 2), CMatrix::Identity(4, 4)), InvalidArgument);
}

TEST(TwoLocal, ObservableCoords) {
  SamplerConfig cfg;
  Rng rng(4);
  const DensityMatrix rho = random_density(cfg, rng);
  const RVector b = observable_coords(rho);
  const auto basis = oracle::gellmann(4);
  for (std::size_t i = 0; i < basis.size(); ++i)
    EXPECT_NEAR(b(static_cast<Eigen::Index>(i)), (rho.matrix() * basis[i]).trace().real() / std::sqrt(2.0), 1e-14);
}

TEST(GroundMarginal, KOneIsGroundStateOfPair) {
  Rng rng(5);
  const TwoLocalHamiltonian h = random_two_local(Dims(2, 2), rng);
  const ThetaKPoint pt = ground_marginal(h, 1);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  EXPECT_NEAR(pt.energy, es.eigenvalues()(0), 1e-12);
  const CVector g = es.eigenvectors().col(0);
  EXPECT_LE((pt.marginal.matrix() - g * g.adjoint()).norm(), 1e-10);
}

TEST(GroundMarginal, EnergyIsKTimesPairEnergy) {
  // Brute force: E0 of the explicit star Hamiltonian, and E0 = k·Σ a_i b_i.
  Rng rng(6);
  for (int k = 1; k <= 4; ++k) {
    const TwoLocalHamiltonian h = random_two_local(Dims(2, 2), rng);
    const ThetaKPoint pt = ground_marginal(h, k);
    EXPECT_NEAR(pt.energy, ground_energy(star_oracle(h.matrix(), 2, 2, k)), 1e-10) << k;
    EXPECT_NEAR(pt.energy, k * h.coeffs.dot(pt.coords), 1e-9) << k;
    EXPECT_NEAR(pt.energy_per_pair(), (pt.marginal.matrix() * h.matrix()).trace().real(), 1e-9);
  }
}

TEST(GroundMarginal, LanczosMatchesDense) {
  Rng rng(7);
  const TwoLocalHamiltonian h = random_two_local(Dims(2, 2), rng);
  const int k = 7;  // 256 > dense threshold
  ASSERT_GT(2L << k, kDenseExtensionDim);
  const ThetaKPoint pt = ground_marginal(h, k);
  EXPECT_NEAR(pt.energy, ground_energy(star_oracle(h.matrix(), 2, 2, k)), 1e-9);
  EXPECT_NEAR(pt.energy, k * h.coeffs.dot(pt.coords), 1e-8);
  EXPECT_GE(pt.marginal.min_eigenvalue(), -1e-10);
  const ThetaKPoint q = ground_marginal(Dims(2, 3), random_two_local(Dims(2, 3), rng).matrix(), 3);
  EXPECT_GE(q.marginal.min_eigenvalue(), -1e-10);
}

TEST(GroundMarginal, SizeAndArgumentErrors) {
  Rng rng(8);
  const TwoLocalHamiltonian h = random_two_local(Dims(3, 3), rng);
  EXPECT_THROW(ground_marginal(h, 12), SizeError);
  EXPECT_THROW(ground_marginal(h, 0), InvalidArgument);
}

TEST(Witness, OwnMarginalIsNotFlagged) {
  Rng rng(9);
  for (int k = 1; k <= 5; ++k) {
    const TwoLocalHamiltonian h = random_two_local(Dims(2, 2), rng);
    EXPECT_FALSE(witness_check(ground_marginal(h, k).marginal, h, k));
  }
}

TEST(Witness, SingletIsNotTwoExtendible) {
  const CMatrix w = singlet_witness();
  const TwoLocalHamiltonian h = two_local_from_matrix(Dims(2, 2), w);
  // Brute force on the 8×8 space: maximal singlet fraction of a 2-extendible state is 3/4.
  const double scale = h.matrix().norm() / w.norm();
  const double e0 = ground_energy(star_oracle(w, 2, 2, 2));
  EXPECT_NEAR(e0, -1.0, 1e-12);
  EXPECT_NEAR(ground_marginal(h, 2).energy, e0 * scale, 1e-10);
  EXPECT_TRUE(witness_check(singlet_state(), h, 2));
  EXPECT_FALSE(witness_check(singlet_state(), h, 1));
}

TEST(Witness, NoFalsePositivesOnProducts) {
  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    const TwoLocalHamiltonian h = random_two_local(Dims(2, 2), rng);
    for (int k : {1, 3, 6}) {
      const double bound = ground_marginal(h, k).energy_per_pair();
      for (int s = 0; s < 10; ++s) {
        const DensityMatrix rho = random_pure_product(Dims(2, 2), rng);
        EXPECT_GE((rho.matrix() * h.matrix()).trace().real(), bound - 1e-10);
      }
    }
  }
}

TEST(Boundary, NestedAndSerialAgrees) {
  const CMatrix h1 = figure_observable_h1(), h2 = figure_observable_h2();
  EXPECT_NEAR(h1.norm(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(h2.trace()), 0.0, 1e-15);
  EXPECT_LE((h2 - h2.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  std::vector<std::vector<BoundaryPoint>> curves;
  for (int k = 1; k <= 4; ++k) curves.push_back(boundary_projection(Dims(2, 2), h1, h2, k, 16));
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 16; ++j) EXPECT_LE(curves[k + 1][j].support, curves[k][j].support + 1e-8);
  const auto serial = boundary_projection_serial(Dims(2, 2), h1, h2, 4, 16);
  for (int j = 0; j < 16; ++j) EXPECT_EQ(serial[j].support, curves[3][j].support);
  Rng rng(3);
  const auto pts = project_product_states(Dims(2, 2), h1, h2, 500, rng);
  const auto sup = projected_support(pts, 16);
  for (int j = 0; j < 16; ++j) EXPECT_LE(sup[j], curves[3][j].support + 1e-10);
}

TEST(Witness, BatchMatchesSingle) {
  Rng rng(11);
  const TwoLocalHamiltonian h = two_local_from_matrix(Dims(2, 2), singlet_witness());
  std::vector<DensityMatrix> states{singlet_state(), random_pure_product(Dims(2, 2), rng)};
  const std::vector<bool> batch = witness_check(states, h, 2);
  for (std::size_t i = 0; i < states.size(); ++i) EXPECT_EQ(batch[i], witness_check(states[i], h, 2));
  EXPECT_TRUE(batch[0]);
  EXPECT_FALSE(batch[1]);
}
