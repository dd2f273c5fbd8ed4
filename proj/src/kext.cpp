#include "qmlcha/kext.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qmlcha/parallel.hpp"
#include "qmlcha/sampling.hpp"

namespace qmlcha {
namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// H = Σ_i H_{AB_i} on A⊗B_1⊗…⊗B_k, applied without forming the matrix.
// Basis index: a·d_B^k + Σ_i b_i·d_B^(k−i).
class StarHamiltonian {
 public:
  StarHamiltonian(const Dims& dims, const CMatrix& h_ab, int k)
      : da_(dims.d_a()), db_(dims.d_b()), k_(k), h_(h_ab) {
    long pow = 1;
    for (int i = 0; i < k; ++i) pow *= db_;
    tail_ = pow;
    dim_ = pow * da_;
  }

  long dim() const { return dim_; }

  void apply(const CVector& x, CVector& y) const {
    y.setZero(dim_);
    const int local = da_ * db_;
    CVector g(local), hg(local);
    for (int i = 1; i <= k_; ++i) {
      long stride_b = 1;
      for (int j = i; j < k_; ++j) stride_b *= db_;
      for (long r = 0; r < tail_; ++r) {
        if ((r / stride_b) % db_ != 0) continue;
        for (int a = 0; a < da_; ++a)
          for (int b = 0; b < db_; ++b) g(a * db_ + b) = x(a * tail_ + b * stride_b + r);
        hg.noalias() = h_ * g;
        for (int a = 0; a < da_; ++a)
          for (int b = 0; b < db_; ++b) y(a * tail_ + b * stride_b + r) += hg(a * db_ + b);
      }
    }
  }

  CMatrix dense() const {
    CMatrix out(dim_, dim_);
    CVector e = CVector::Zero(dim_), col;
    for (long j = 0; j < dim_; ++j) {
      e(j) = 1.0;
      apply(e, col);
      out.col(j) = col;
      e(j) = 0.0;
    }
    return 0.5 * (out + out.adjoint());
  }

  // AB_i marginal averaged over i = 1..k.
  CMatrix symmetric_marginal(const CVector& psi) const {
    const int local = da_ * db_;
    CMatrix rho = CMatrix::Zero(local, local);
    const long rest = tail_ / db_;
    CMatrix m(local, rest);
    for (int i = 1; i <= k_; ++i) {
      long stride_b = 1;
      for (int j = i; j < k_; ++j) stride_b *= db_;
      for (int a = 0; a < da_; ++a)
        for (int b = 0; b < db_; ++b) {
          long c = 0;
          for (long r = 0; r < tail_; ++r) {
            if ((r / stride_b) % db_ != 0) continue;
            m(a * db_ + b, c++) = psi(a * tail_ + b * stride_b + r);
          }
        }
      rho.noalias() += m * m.adjoint();
    }
    rho /= static_cast<double>(k_);
    return rho;
  }

 private:
  int da_, db_, k_;
  CMatrix h_;
  long tail_ = 1;
  long dim_ = 1;
};

struct GroundState {
  double energy = 0.0;
  std::vector<CVector> vectors;  // orthonormal basis of the (numerical) ground space
};

GroundState dense_ground(const StarHamiltonian& op) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op.dense());
  if (es.info() != Eigen::Success) throw NumericalFailure("ground state eigensolver failed");
  GroundState gs;
  gs.energy = es.eigenvalues()(0);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) - gs.energy > 1e-10) break;
    gs.vectors.push_back(es.eigenvectors().col(i));
  }
  return gs;
}

// Lanczos with full reorthogonalization for the lowest eigenpair.
GroundState lanczos_ground(const StarHamiltonian& op) {
  const long n = op.dim();
  const int max_steps = static_cast<int>(std::min<long>(n, 400));
  Rng rng(0x6b657874ULL);
  CMatrix basis(n, max_steps);
  CVector v(n);
  for (long i = 0; i < n; ++i) v(i) = Complex(rng.normal(), rng.normal());
  basis.col(0) = v / v.norm();
  std::vector<double> diag, off;
  CVector w;
  for (int j = 0; j < max_steps; ++j) {
    op.apply(basis.col(j), w);
    const double a = basis.col(j).dot(w).real();
    diag.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      const CVector c = basis.leftCols(j + 1).adjoint() * w;
      w.noalias() -= basis.leftCols(j + 1) * c;
    }
    const double b = w.norm();
    const int m = j + 1;
    RMatrix t = RMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = diag[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = off[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<RMatrix> es(t);
    const double residual = std::abs(b * es.eigenvectors()(m - 1, 0));
    if (residual < 1e-11 || b < 1e-13 || m == max_steps) {
      if (residual > 1e-8) throw NumericalFailure("Lanczos did not converge, residual " + std::to_string(residual));
      GroundState gs;
      gs.energy = es.eigenvalues()(0);
      CVector g = basis.leftCols(m) * es.eigenvectors().col(0).cast<Complex>();
      gs.vectors.push_back(g / g.norm());
      return gs;
    }
    off.push_back(b);
    basis.col(j + 1) = w / b;
  }
  throw NumericalFailure("Lanczos exhausted its Krylov space");
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

void check_hermitian_local(const Dims& dims, const CMatrix& h) {
  if (h.rows() != dims.n() || h.cols() != dims.n())
    throw InvalidDimension("H_AB must be " + std::to_string(dims.n()) + "x" + std::to_string(dims.n()));
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvariantViolation("H_AB is not Hermitian");
}

}  // namespace

CMatrix TwoLocalHamiltonian::matrix() const {
  const int n = dims.n();
  if (coeffs.size() != dims.feature_dim()) throw InvalidDimension("two-local coefficient length mismatch");
  const GellMannBasis basis = gellmann_basis(n);
  CMatrix h = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) h += (coeffs(i) * kInvSqrt2) * basis.matrices[static_cast<std::size_t>(i)];
  return h;
}

RVector observable_coords(const DensityMatrix& rho) {
  const int n = rho.dims().n();
  // x_i = √(n/(2(n−1)))·tr(ρλ_i) and b_i = tr(ρλ_i)/√2.
  return featurize(rho).coords * (kInvSqrt2 / std::sqrt(n / (2.0 * (n - 1))));
}

TwoLocalHamiltonian random_two_local(const Dims& dims, Rng& rng) {
  RVector a(dims.feature_dim());
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.normal();
  return TwoLocalHamiltonian{dims, a / a.norm()};
}

TwoLocalHamiltonian two_local_from_matrix(const Dims& dims, const CMatrix& h) {
  check_hermitian_local(dims, h);
  const int n = dims.n();
  CMatrix traceless = h;
  traceless.diagonal().array() -= h.trace() / static_cast<double>(n);
  // a_i = tr(H O_i) = tr(Hλ_i)/√2, read off through featurize_into.
  RVector a(dims.feature_dim());
  featurize_into(n, traceless, a.data());
  a *= kInvSqrt2 / std::sqrt(n / (2.0 * (n - 1)));
  const double norm = a.norm();
  if (norm < 1e-14) throw InvalidArgument("H_AB has no traceless part");
  return TwoLocalHamiltonian{dims, a / norm};
}

ThetaKPoint ground_marginal(const Dims& dims, const CMatrix& h_ab, int k) {
  if (k < 1) throw InvalidArgument("extension order k must be >= 1");
  check_hermitian_local(dims, h_ab);
  long total = dims.d_a();
  for (int i = 0; i < k; ++i) {
    total *= dims.d_b();
    if (total > kMaxExtensionDim)
      throw SizeError("extension space d_A*d_B^k exceeds " + std::to_string(kMaxExtensionDim));
  }
  const StarHamiltonian op(dims, h_ab, k);
  const GroundState gs = total <= kDenseExtensionDim ? dense_ground(op) : lanczos_ground(op);
  CMatrix rho = CMatrix::Zero(dims.n(), dims.n());
  for (const auto& v : gs.vectors) rho += op.symmetric_marginal(v);
  rho /= static_cast<double>(gs.vectors.size());
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  DensityMatrix marginal(dims, std::move(rho), Positivity::kReport);
  RVector b = observable_coords(marginal);
  return ThetaKPoint{k, std::move(marginal), std::move(b), gs.energy};
}

ThetaKPoint ground_marginal(const TwoLocalHamiltonian& h, int k) {
  return ground_marginal(h.dims, h.matrix(), k);
}

bool witness_check(const DensityMatrix& rho, const TwoLocalHamiltonian& h, int k) {
  return witness_check(std::span<const DensityMatrix>(&rho, 1), h, k).front();
}

std::vector<bool> witness_check(std::span<const DensityMatrix> states, const TwoLocalHamiltonian& h, int k) {
  for (const auto& rho : states)
    if (!(rho.dims() == h.dims)) throw InvalidDimension("witness_check: dims mismatch");
  const double bound = ground_marginal(h, k).energy_per_pair() - 1e-10;
  const CMatrix hm = h.matrix();
  std::vector<bool> flagged;
  flagged.reserve(states.size());
  for (const auto& rho : states) flagged.push_back((rho.matrix() * hm).trace().real() < bound);
  return flagged;
}

namespace {

template <typename Loop>
std::vector<BoundaryPoint> boundary_impl(const Dims& dims, const CMatrix& h1, const CMatrix& h2, int k,
                                         int num_angles, Loop loop) {
  check_hermitian_local(dims, h1);
  check_hermitian_local(dims, h2);
  if (num_angles < 1) throw InvalidArgument("num_angles must be >= 1");
  std::vector<BoundaryPoint> out(static_cast<std::size_t>(num_angles));
  loop(out.size(), [&](std::size_t j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / num_angles;
    const CMatrix h = std::cos(theta) * h1 + std::sin(theta) * h2;
    const ThetaKPoint pt = ground_marginal(dims, h, k);
    BoundaryPoint bp;
    bp.theta = theta;
    bp.x1 = (pt.marginal.matrix() * h1).trace().real();
    bp.x2 = (pt.marginal.matrix() * h2).trace().real();
    bp.support = -pt.energy_per_pair();
    out[j] = bp;
  });
  return out;
}

}  // namespace

std::vector<BoundaryPoint> boundary_projection(const Dims& dims, const CMatrix& h1,
                                               const CMatrix& h2, int k, int num_angles) {
  return boundary_impl(dims, h1, h2, k, num_angles,
                       [](std::size_t n, const auto& f) { parallel_for(n, f); });
}

std::vector<BoundaryPoint> boundary_projection_serial(const Dims& dims, const CMatrix& h1,
                                                      const CMatrix& h2, int k, int num_angles) {
  return boundary_impl(dims, h1, h2, k, num_angles, [](std::size_t n, const auto& f) {
    for (std::size_t j = 0; j < n; ++j) f(j);
  });
}

ProjectedPoints project_product_states(const Dims& dims, const CMatrix& h1, const CMatrix& h2,
                                       int count, Rng& rng) {
  ProjectedPoints pts;
  pts.x1.reserve(static_cast<std::size_t>(count));
  pts.x2.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto s = random_product_vectors(dims, rng);
    const CVector psi = tensor(s.psi_a, s.psi_b).amplitudes;
    pts.x1.push_back(psi.dot(h1 * psi).real());
    pts.x2.push_back(psi.dot(h2 * psi).real());
  }
  return pts;
}

std::vector<double> projected_support(const ProjectedPoints& pts, int num_angles) {
  std::vector<double> out(static_cast<std::size_t>(num_angles));
  for (int j = 0; j < num_angles; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / num_angles;
    const double c = std::cos(theta), s = std::sin(theta);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.x1.size(); ++i) best = std::max(best, -(c * pts.x1[i] + s * pts.x2[i]));
    out[static_cast<std::size_t>(j)] = best;
  }
  return out;
}

CMatrix figure_observable_h1() {
  CMatrix p0 = CMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  CMatrix sz = CMatrix::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  return kron(p0, sz) * kInvSqrt2;
}

CMatrix figure_observable_h2() {
  const Complex i1(0.0, 1.0);
  CMatrix sx(2, 2), sy(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  sy << 0.0, -i1, i1, 0.0;
  return 0.5 * (kron(sy, sx) - kron(sx, sy));
}

}  // namespace qmlcha
