#include "qmlcha/qstate.hpp"

#include <cmath>
#include <string>

namespace qmlcha {
namespace {

double hermitian_defect(const CMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

void require_square(const CMatrix& a, int n, const char* what) {
  if (a.rows() != n || a.cols() != n)
    throw InvalidDimension(std::string(what) + ": expected " + std::to_string(n) + "x" +
                           std::to_string(n) + " matrix, got " + std::to_string(a.rows()) +
                           "x" + std::to_string(a.cols()));
}

}  // namespace

DensityMatrix::DensityMatrix(Dims dims, CMatrix entries, Positivity positivity)
    : dims_(dims), entries_(std::move(entries)) {
  require_square(entries_, dims_.n(), "DensityMatrix");
  if (const double h = hermitian_defect(entries_); h > kHermitianTol)
    throw InvariantViolation("density matrix is not Hermitian (defect " + std::to_string(h) + ")");
  if (const double t = std::abs(entries_.trace() - Complex(1.0)); t > kTraceTol)
    throw InvariantViolation("density matrix trace differs from 1 by " + std::to_string(t));
  if (positivity == Positivity::kRequire) {
    if (const double lmin = min_eigenvalue(); lmin < -kPsdTol)
      throw InvariantViolation("density matrix has negative eigenvalue " + std::to_string(lmin));
  }
}

double DensityMatrix::min_eigenvalue() const { return hermitian_eigenvalues(entries_)(0); }

double DensityMatrix::purity() const {
  return (entries_ * entries_).trace().real();
}

RVector hermitian_eigenvalues(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("Hermitian eigensolver did not converge");
  return es.eigenvalues();
}

GellMannBasis gellmann_basis(int n) {
  if (n < 2) throw InvalidDimension("Gell-Mann basis needs n >= 2, got " + std::to_string(n));
  GellMannBasis basis{n, {}};
  basis.matrices.reserve(static_cast<std::size_t>(n * n - 1));
  const Complex i1(0.0, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      CMatrix s = CMatrix::Zero(n, n);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      basis.matrices.push_back(std::move(s));
    }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      CMatrix a = CMatrix::Zero(n, n);
      a(j, k) = -i1;
      a(k, j) = i1;
      basis.matrices.push_back(std::move(a));
    }
  for (int l = 1; l < n; ++l) {
    CMatrix d = CMatrix::Zero(n, n);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) d(j, j) = scale;
    d(l, l) = -l * scale;
    basis.matrices.push_back(std::move(d));
  }
  return basis;
}

// tr(ρ s_jk) = 2 Re ρ_jk, tr(ρ a_jk) = −2 Im ρ_jk, and the diagonal family
// reduces to partial sums of the diagonal.
void featurize_into(int n, const CMatrix& rho, double* out) {
  const double scale = std::sqrt(n / (2.0 * (n - 1)));
  const int pairs = n * (n - 1) / 2;
  int idx = 0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k, ++idx) {
      const Complex z = 0.5 * (rho(j, k) + std::conj(rho(k, j)));
      out[idx] = scale * 2.0 * z.real();
      out[idx + pairs] = scale * -2.0 * z.imag();
    }
  idx = 2 * pairs;
  double partial = 0.0;
  for (int l = 1; l < n; ++l, ++idx) {
    partial += rho(l - 1, l - 1).real();
    out[idx] = scale * std::sqrt(2.0 / (l * (l + 1.0))) * (partial - l * rho(l, l).real());
  }
}

FeatureVector featurize(const DensityMatrix& rho) {
  const Dims& dims = rho.dims();
  FeatureVector x{dims, RVector(dims.feature_dim())};
  featurize_into(dims.n(), rho.matrix(), x.coords.data());
  return x;
}

FeatureVector featurize(const Dims& dims, const CMatrix& rho) {
  require_square(rho, dims.n(), "featurize");
  if (const double h = hermitian_defect(rho); h > kHermitianTol)
    throw InvariantViolation("featurize: input is not Hermitian (defect " + std::to_string(h) + ")");
  FeatureVector x{dims, RVector(dims.feature_dim())};
  featurize_into(dims.n(), rho, x.coords.data());
  return x;
}

DensityMatrix defeaturize(const FeatureVector& x) {
  const int n = x.dims.n();
  if (x.coords.size() != x.dims.feature_dim())
    throw InvalidDimension("defeaturize: expected " + std::to_string(x.dims.feature_dim()) +
                           " coordinates, got " + std::to_string(x.coords.size()));
  const double scale = std::sqrt(n * (n - 1) / 2.0) / n;
  const int pairs = n * (n - 1) / 2;
  CMatrix rho = CMatrix::Identity(n, n) / static_cast<double>(n);
  int idx = 0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k, ++idx) {
      const double re = scale * x.coords(idx);
      const double im = scale * x.coords(idx + pairs);
      // s_jk contributes re on both off-diagonals, a_jk contributes ∓i·im.
      rho(j, k) += Complex(re, -im);
      rho(k, j) += Complex(re, im);
    }
  idx = 2 * pairs;
  for (int l = 1; l < n; ++l, ++idx) {
    const double c = scale * x.coords(idx) * std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) rho(j, j) += c;
    rho(l, l) -= l * c;
  }
  return DensityMatrix(x.dims, std::move(rho), Positivity::kReport);
}

DensityMatrix tensor(const CMatrix& rho_a, const CMatrix& rho_b) {
  const auto da = static_cast<int>(rho_a.rows());
  const auto db = static_cast<int>(rho_b.rows());
  require_square(rho_a, da, "tensor");
  require_square(rho_b, db, "tensor");
  CMatrix out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = rho_a(i, j) * rho_b;
  return DensityMatrix(Dims(da, db), std::move(out));
}

PureState tensor(const CVector& psi_a, const CVector& psi_b) {
  const auto da = static_cast<int>(psi_a.size());
  const auto db = static_cast<int>(psi_b.size());
  PureState out{Dims(da, db), CVector(da * db)};
  for (int i = 0; i < da; ++i) out.amplitudes.segment(i * db, db) = psi_a(i) * psi_b;
  return out;
}

DensityMatrix to_density(const PureState& psi) {
  CMatrix rho = psi.amplitudes * psi.amplitudes.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return DensityMatrix(psi.dims, std::move(rho));
}

CMatrix partial_transpose(const Dims& dims, const CMatrix& rho) {
  const int da = dims.d_a();
  const int db = dims.d_b();
  require_square(rho, dims.n(), "partial_transpose");
  CMatrix out(dims.n(), dims.n());
  for (int ia = 0; ia < da; ++ia)
    for (int ib = 0; ib < db; ++ib)
      for (int ja = 0; ja < da; ++ja)
        for (int jb = 0; jb < db; ++jb)
          out(ia * db + ib, ja * db + jb) = rho(ia * db + jb, ja * db + ib);
  return out;
}

CMatrix partial_trace_b(const Dims& dims, const CMatrix& rho) {
  const int da = dims.d_a();
  const int db = dims.d_b();
  CMatrix out = CMatrix::Zero(da, da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      for (int b = 0; b < db; ++b) out(i, j) += rho(i * db + b, j * db + b);
  return out;
}

double min_pt_eigenvalue(const DensityMatrix& rho) {
  return hermitian_eigenvalues(partial_transpose(rho))(0);
}

bool is_ppt(const DensityMatrix& rho) { return min_pt_eigenvalue(rho) >= -kPsdTol; }

DensityMatrix tiles_state() {
  const Dims dims(3, 3);
  auto ket = [](int a, int b) {
    CVector v = CVector::Zero(9);
    v(3 * a + b) = 1.0;
    return v;
  };
  const double r2 = 1.0 / std::sqrt(2.0);
  std::vector<CVector> upb;
  upb.push_back(r2 * (ket(0, 0) - ket(0, 1)));
  upb.push_back(r2 * (ket(2, 1) - ket(2, 2)));
  upb.push_back(r2 * (ket(0, 2) - ket(1, 2)));
  upb.push_back(r2 * (ket(1, 0) - ket(2, 0)));
  upb.push_back(CVector::Constant(9, Complex(1.0 / 3.0)));
  CMatrix rho = CMatrix::Identity(9, 9);
  for (const auto& v : upb) rho -= v * v.adjoint();
  rho /= 4.0;
  return DensityMatrix(dims, std::move(rho));
}

DensityMatrix maximally_mixed(const Dims& dims) {
  return DensityMatrix(dims, CMatrix::Identity(dims.n(), dims.n()) / static_cast<double>(dims.n()));
}

DensityMatrix singlet_state() {
  CVector psi = CVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return to_density(PureState{Dims(2, 2), psi});
}

DensityMatrix depolarize(const DensityMatrix& rho, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidArgument("depolarize: alpha must lie in [0,1], got " + std::to_string(alpha));
  const int n = rho.dims().n();
  CMatrix out = alpha * rho.matrix();
  out.diagonal().array() += (1.0 - alpha) / n;
  return DensityMatrix(rho.dims(), std::move(out));
}

}  // namespace qmlcha
