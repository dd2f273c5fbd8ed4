#pragma once
// Independent reference computations used as test oracles.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qmlcha/types.hpp"

namespace oracle {

using qmlcha::CMatrix;
using qmlcha::Complex;
using qmlcha::CVector;

inline CMatrix unit(int n, int j, int k) {
  CMatrix e = CMatrix::Zero(n, n);
  e(j, k) = 1.0;
  return e;
}

// Generalized Gell-Mann matrices straight from their defining formulas.
inline std::vector<CMatrix> gellmann(int n) {
  std::vector<CMatrix> out;
  const Complex i1(0.0, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) out.push_back(unit(n, j, k) + unit(n, k, j));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) out.push_back(-i1 * (unit(n, j, k) - unit(n, k, j)));
  for (int l = 1; l < n; ++l) {
    CMatrix d = CMatrix::Zero(n, n);
    for (int j = 0; j < l; ++j) d(j, j) = 1.0;
    d(l, l) = -static_cast<double>(l);
    out.push_back(std::sqrt(2.0 / (l * (l + 1.0))) * d);
  }
  return out;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Partial transpose on B by explicit index swap.
inline CMatrix partial_transpose(const CMatrix& rho, int da, int db) {
  CMatrix out(rho.rows(), rho.cols());
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b)
      for (int a2 = 0; a2 < da; ++a2)
        for (int b2 = 0; b2 < db; ++b2) out(a * db + b, a2 * db + b2) = rho(a * db + b2, a2 * db + b);
  return out;
}

inline double min_eig(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Two-sided Kolmogorov-Smirnov statistic against U[0,1).
inline double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d;
}

}  // namespace oracle
