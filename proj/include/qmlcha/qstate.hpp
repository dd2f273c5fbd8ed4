#pragma once

#include <vector>

#include "qmlcha/types.hpp"

namespace qmlcha {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

/// Whether a DensityMatrix constructor enforces positive semidefiniteness.
/// `kReport` is used for points produced by defeaturize, which may lie
/// outside the state set; call is_positive() to query.
enum class Positivity { kRequire, kReport };

/// Hermitian, unit-trace operator on A⊗B.
class DensityMatrix {
 public:
  DensityMatrix(Dims dims, CMatrix entries, Positivity positivity = Positivity::kRequire);

  const Dims& dims() const { return dims_; }
  const CMatrix& matrix() const { return entries_; }

  double min_eigenvalue() const;
  bool is_positive() const { return min_eigenvalue() >= -kPsdTol; }
  double purity() const;

 private:
  Dims dims_;
  CMatrix entries_;
};

/// Normalized pure state on A⊗B.
struct PureState {
  Dims dims;
  CVector amplitudes;
};

/// Gell-Mann coordinates of a state; the maximally mixed state is the origin.
struct FeatureVector {
  Dims dims;
  RVector coords;
};

/// Generalized Gell-Mann matrices in the fixed order: symmetric s_{j,k}
/// (j<k, lexicographic), antisymmetric a_{j,k}, then diagonal d_l.
struct GellMannBasis {
  int n = 0;
  std::vector<CMatrix> matrices;
};

GellMannBasis gellmann_basis(int n);

FeatureVector featurize(const DensityMatrix& rho);
/// Checked entry point for raw matrices: throws InvariantViolation if
/// `rho` is not Hermitian within kHermitianTol.
FeatureVector featurize(const Dims& dims, const CMatrix& rho);
/// Coordinates straight into `out` (length feature_dim); no validation.
void featurize_into(int n, const CMatrix& rho, double* out);

/// Inverse of featurize. The result is Hermitian and unit-trace but may be
/// non-positive.
DensityMatrix defeaturize(const FeatureVector& x);

DensityMatrix tensor(const CMatrix& rho_a, const CMatrix& rho_b);
PureState tensor(const CVector& psi_a, const CVector& psi_b);
DensityMatrix to_density(const PureState& psi);

/// Transpose on the B factor.  Exact index permutation, so it is an involution.
CMatrix partial_transpose(const Dims& dims, const CMatrix& rho);
inline CMatrix partial_transpose(const DensityMatrix& rho) {
  return partial_transpose(rho.dims(), rho.matrix());
}
/// Reduced state on A.
CMatrix partial_trace_b(const Dims& dims, const CMatrix& rho);

bool is_ppt(const DensityMatrix& rho);
double min_pt_eigenvalue(const DensityMatrix& rho);

/// Bound-entangled PPT state from the five-vector unextendible product basis.
DensityMatrix tiles_state();
DensityMatrix maximally_mixed(const Dims& dims);
/// |ψ⁻⟩ = (|01⟩ − |10⟩)/√2 as a density matrix.
DensityMatrix singlet_state();

/// alpha·ρ + (1−alpha)·I/n.
DensityMatrix depolarize(const DensityMatrix& rho, double alpha);

/// Eigenvalues of a Hermitian matrix in ascending order.
RVector hermitian_eigenvalues(const CMatrix& a);

}  // namespace qmlcha
