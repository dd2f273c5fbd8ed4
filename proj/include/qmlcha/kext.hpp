#pragma once

#include <span>
#include <vector>

#include "qmlcha/qstate.hpp"
#include "qmlcha/rng.hpp"

namespace qmlcha {

/// H_AB = Σ_i a_i O_i over the orthonormal traceless basis O_i = λ_i/√2
/// (Gell-Mann matrices of the joint space). The identity term is absent.
struct TwoLocalHamiltonian {
  Dims dims;
  RVector coeffs;

  CMatrix matrix() const;
};

/// Coefficients uniform on the unit sphere.
TwoLocalHamiltonian random_two_local(const Dims& dims, Rng& rng);

/// Traceless part of `h` expanded in the O_i, scaled to unit norm.
TwoLocalHamiltonian two_local_from_matrix(const Dims& dims, const CMatrix& h);

/// b_i = tr(ρ O_i).
RVector observable_coords(const DensityMatrix& rho);

/// Extreme point of the k-extendible set selected by H_AB.
struct ThetaKPoint {
  int k = 1;
  DensityMatrix marginal;  ///< ρ_H, the AB_1 marginal of the (k+1)-body ground state
  RVector coords;          ///< b_i = tr(ρ_H O_i)
  double energy = 0.0;     ///< E0, ground energy of Σ_i H_{AB_i}
  /// E0 / k = tr(ρ_H H_AB) = Σ a_i b_i; the witness bound.
  double energy_per_pair() const { return energy / k; }
};

/// Largest total dimension d_A·d_B^k accepted by ground_marginal.
inline constexpr long kMaxExtensionDim = 1L << 16;
/// Up to this dimension the Hamiltonian is diagonalized densely; above it
/// a matrix-free Lanczos iteration is used.
inline constexpr long kDenseExtensionDim = 128;

/// Ground state of H = Σ_{i=1..k} H_{AB_i} on A⊗B_1⊗…⊗B_k and its AB
/// marginal, averaged over the B parties (and over a degenerate ground
/// space in the dense path) so every AB_i marginal coincides.
ThetaKPoint ground_marginal(const TwoLocalHamiltonian& h, int k);
ThetaKPoint ground_marginal(const Dims& dims, const CMatrix& h_ab, int k);

/// True when tr(ρ H_AB) < E0/k − 1e-10: ρ has no k-symmetric extension and
/// is therefore entangled.
bool witness_check(const DensityMatrix& rho, const TwoLocalHamiltonian& h, int k);
/// Same test for many states against one ground-state computation.
std::vector<bool> witness_check(std::span<const DensityMatrix> states, const TwoLocalHamiltonian& h, int k);

struct BoundaryPoint {
  double theta = 0.0;
  double x1 = 0.0;       ///< tr(ρ_H H1)
  double x2 = 0.0;       ///< tr(ρ_H H2)
  /// max over the set of −(cos θ·x1 + sin θ·x2), i.e. −E0/k.
  double support = 0.0;
};

/// Supporting points of Θ_k projected onto span{H1, H2}, one per angle
/// θ_j = 2πj/num_angles, from H_AB = cos θ·H1 + sin θ·H2. OpenMP over angles.
std::vector<BoundaryPoint> boundary_projection(const Dims& dims, const CMatrix& h1,
                                               const CMatrix& h2, int k, int num_angles);
/// Serial reference for boundary_projection.
std::vector<BoundaryPoint> boundary_projection_serial(const Dims& dims, const CMatrix& h1,
                                                      const CMatrix& h2, int k, int num_angles);

/// (⟨H1⟩, ⟨H2⟩) of random pure product states, and the support of their
/// hull along the same directions as boundary_projection.
struct ProjectedPoints {
  std::vector<double> x1;
  std::vector<double> x2;
};
ProjectedPoints project_product_states(const Dims& dims, const CMatrix& h1, const CMatrix& h2,
                                       int count, Rng& rng);
std::vector<double> projected_support(const ProjectedPoints& pts, int num_angles);

/// The two observables spanning the plotted plane for two qubits:
/// |0⟩⟨0|⊗σ_z/√2 and (σ_y⊗σ_x − σ_x⊗σ_y)/2.
CMatrix figure_observable_h1();
CMatrix figure_observable_h2();

}  // namespace qmlcha
