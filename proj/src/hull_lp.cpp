#include "qmlcha/hull_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qmlcha {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Column layout: [0, m) hull points, m origin, m+1 alpha, m+2+i artificial i.
class HullSimplex {
 public:
  HullSimplex(const Eigen::Ref<const RMatrix>& points, bool include_origin,
              const Eigen::Ref<const RVector>& p, const HullLpOptions& opt)
      : pts_(points),
        p_(p),
        opt_(opt),
        d_(static_cast<int>(points.rows())),
        r_(d_ + 1),
        m_(static_cast<int>(points.cols())),
        origin_(include_origin),
        basic_row_(static_cast<std::size_t>(m_ + 2 + r_), -1),
        retired_(static_cast<std::size_t>(m_ + 2 + r_), 0),
        upper_zero_(static_cast<std::size_t>(r_), 0) {}

  HullLpSolution solve() {
    basis_.resize(r_);
    for (int i = 0; i < r_; ++i) basis_[i] = art(i);
    if (origin_) basis_[d_] = origin_col();
    for (int i = 0; i < r_; ++i) basic_row_[basis_[i]] = i;
    // Artificials that start nonbasic can never enter.
    for (int i = 0; i < r_; ++i)
      if (basic_row_[art(i)] < 0) retired_[art(i)] = 1;
    refactor();

    if (!origin_) {
      phase_ = 1;
      if (!iterate()) throw NumericalFailure("hull LP: phase 1 unbounded (should not happen)");
      double infeas = 0.0;
      for (int i = 0; i < r_; ++i)
        if (is_art(basis_[i])) infeas += std::max(0.0, x_(i));
      if (infeas > 1e-7)
        throw LpInfeasible("hull LP infeasible: no alpha >= 0 puts alpha*p inside the hull");
    }
    phase_ = 2;
    for (int i = 0; i < r_; ++i)
      if (is_art(basis_[i])) upper_zero_[i] = 1;
    const bool bounded = iterate();

    HullLpSolution sol;
    sol.iterations = iterations_;
    if (!bounded) {
      sol.status = HullLpStatus::kUnbounded;
      sol.alpha = kInf;
      return sol;
    }
    refactor();
    for (int i = 0; i < r_; ++i) {
      const int j = basis_[i];
      const double v = x_(i);
      if (j == alpha_col()) {
        sol.alpha = std::max(0.0, v);
      } else if (j == origin_col()) {
        sol.origin_weight = v;
      } else if (j < m_ && v > 0.0) {
        sol.weights.emplace_back(j, v);
      }
    }
    std::sort(sol.weights.begin(), sol.weights.end());
    return sol;
  }

 private:
  int origin_col() const { return m_; }
  int alpha_col() const { return m_ + 1; }
  int art(int i) const { return m_ + 2 + i; }
  bool is_art(int j) const { return j >= m_ + 2; }

  double cost(int j) const {
    if (phase_ == 1) return is_art(j) ? -1.0 : 0.0;
    return j == alpha_col() ? 1.0 : 0.0;
  }

  // B^{-1} a_j
  RVector ftran(int j) const {
    if (j < m_) return binv_.leftCols(d_) * pts_.col(j) + binv_.col(d_);
    if (j == origin_col()) return binv_.col(d_);
    if (j == alpha_col()) return -(binv_.leftCols(d_) * p_);
    return binv_.col(j - (m_ + 2));
  }

  RVector column(int j) const {
    RVector a = RVector::Zero(r_);
    if (j < m_) {
      a.head(d_) = pts_.col(j);
      a(d_) = 1.0;
    } else if (j == origin_col()) {
      a(d_) = 1.0;
    } else if (j == alpha_col()) {
      a.head(d_) = -p_;
    } else {
      a(j - (m_ + 2)) = 1.0;
    }
    return a;
  }

  void refactor() {
    RMatrix b(r_, r_);
    for (int i = 0; i < r_; ++i) b.col(i) = column(basis_[i]);
    Eigen::PartialPivLU<RMatrix> lu(b);
    binv_ = lu.inverse();
    RVector rhs = RVector::Zero(r_);
    rhs(d_) = 1.0;
    x_ = binv_ * rhs;
    since_refactor_ = 0;
  }

  void compute_duals() {
    RVector cb(r_);
    for (int i = 0; i < r_; ++i) cb(i) = cost(basis_[i]);
    y_ = binv_.transpose() * cb;
  }

  // Reduced cost of a non-hull structural column.
  double reduced_cost_special(int j) const {
    if (j == origin_col()) return cost(j) - y_(d_);
    return cost(j) + y_.head(d_).dot(p_);  // alpha column is (−p, 0)
  }

  bool eligible(int j) const {
    if (basic_row_[j] >= 0 || retired_[j]) return false;
    if (j == origin_col() && !origin_) return false;
    return true;
  }

  // Returns the entering column or -1 when the basis is optimal.
  int price(bool bland) {
    const double tol = opt_.dual_tol;
    int best = -1;
    double best_rc = tol;
    auto consider = [&](int j, double rc) {
      if (!eligible(j) || rc <= tol) return;
      if (bland) {
        if (best < 0 || j < best) {
          best = j;
          best_rc = rc;
        }
      } else if (rc > best_rc) {
        best = j;
        best_rc = rc;
      }
    };
    consider(origin_col(), reduced_cost_special(origin_col()));
    consider(alpha_col(), reduced_cost_special(alpha_col()));

    const int block = (opt_.pricing_block > 0 && !bland) ? opt_.pricing_block : m_;
    const int nblocks = m_ == 0 ? 0 : (m_ + block - 1) / block;
    for (int b = 0; b < nblocks; ++b) {
      const int blk = (next_block_ + b) % nblocks;
      const int start = blk * block;
      const int len = std::min(block, m_ - start);
      w_.noalias() = pts_.middleCols(start, len).transpose() * y_.head(d_);
      for (int k = 0; k < len; ++k) consider(start + k, -(w_(k) + y_(d_)));  // hull columns cost 0
      if (best >= 0 && !bland) {
        next_block_ = (blk + 1) % nblocks;
        break;
      }
    }
    return best;
  }

  struct Leave {
    int row = -1;
    double step = kInf;
  };

  Leave ratio_test(const RVector& dir, bool bland) const {
    const double ptol = opt_.primal_tol;
    const double piv = opt_.pivot_tol;
    double tmax = kInf;
    for (int i = 0; i < r_; ++i) {
      const double di = dir(i);
      if (di > piv) {
        tmax = std::min(tmax, (x_(i) + ptol) / di);
      } else if (di < -piv && upper_zero_[i]) {
        tmax = std::min(tmax, (ptol - x_(i)) / (-di));
      }
    }
    Leave out;
    if (tmax == kInf) return out;
    double best_abs = 0.0;
    for (int i = 0; i < r_; ++i) {
      const double di = dir(i);
      double ratio;
      if (di > piv) {
        ratio = x_(i) / di;
      } else if (di < -piv && upper_zero_[i]) {
        ratio = -x_(i) / (-di);
      } else {
        continue;
      }
      if (ratio > tmax) continue;
      const bool better = bland ? (out.row < 0 || basis_[i] < basis_[out.row])
                                : std::abs(di) > best_abs;
      if (better) {
        out.row = i;
        out.step = std::max(0.0, ratio);
        best_abs = std::abs(di);
      }
    }
    return out;
  }

  void pivot(int entering, int row, const RVector& dir, double step) {
    x_ -= step * dir;
    x_(row) = step;
    const int leaving = basis_[row];
    basic_row_[leaving] = -1;
    if (is_art(leaving)) retired_[leaving] = 1;
    upper_zero_[row] = 0;
    basis_[row] = entering;
    basic_row_[entering] = row;

    const double pv = dir(row);
    binv_.row(row) /= pv;
    for (int i = 0; i < r_; ++i) {
      if (i == row || dir(i) == 0.0) continue;
      binv_.row(i) -= dir(i) * binv_.row(row);
    }
    if (++since_refactor_ >= opt_.refactor_every) refactor();
  }

  // Runs the current phase to optimality. Returns false if unbounded.
  bool iterate() {
    int degenerate_run = 0;
    for (;;) {
      if (iterations_ >= opt_.max_iterations)
        throw NumericalFailure("hull LP: iteration limit " + std::to_string(opt_.max_iterations) +
                               " reached");
      const bool bland = degenerate_run > 50;
      compute_duals();
      int entering = price(bland);
      if (entering < 0) {
        if (since_refactor_ == 0) return true;
        refactor();
        compute_duals();
        entering = price(bland);
        if (entering < 0) return true;
      }
      const RVector dir = ftran(entering);
      const Leave leave = ratio_test(dir, bland);
      if (leave.row < 0) return false;
      degenerate_run = leave.step <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(entering, leave.row, dir, leave.step);
      ++iterations_;
    }
  }

  const Eigen::Ref<const RMatrix>& pts_;
  const Eigen::Ref<const RVector>& p_;
  HullLpOptions opt_;
  int d_;
  int r_;
  int m_;
  bool origin_;
  int phase_ = 2;
  int iterations_ = 0;
  int since_refactor_ = 0;
  int next_block_ = 0;

  std::vector<int> basis_;
  std::vector<int> basic_row_;
  std::vector<char> retired_;
  std::vector<char> upper_zero_;  // per basis row: variable fixed at zero
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> binv_;
  RVector x_;
  RVector y_;
  RVector w_;
};

}  // namespace

HullLpSolution solve_hull_lp(const Eigen::Ref<const RMatrix>& points, bool include_origin,
                             const Eigen::Ref<const RVector>& p, const HullLpOptions& options) {
  if (p.size() != points.rows())
    throw InvalidDimension("hull LP: point has " + std::to_string(p.size()) +
                           " coordinates, hull has " + std::to_string(points.rows()));
  if (points.cols() == 0 && !include_origin)
    throw LpInfeasible("hull LP: empty hull without origin");
  HullSimplex simplex(points, include_origin, p, options);
  return simplex.solve();
}

}  // namespace qmlcha
