#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qmlcha {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Base of every error raised by the library.  `Kind` lets the CLI map
/// failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  enum class Kind { kValidation, kNumerical };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class InvalidDimension : public Error {
 public:
  explicit InvalidDimension(const std::string& what) : Error(Kind::kValidation, what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error(Kind::kValidation, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(Kind::kValidation, what) {}
};

/// PPT labelling requested where PPT is not sufficient for separability.
class CriterionInsufficient : public Error {
 public:
  explicit CriterionInsufficient(const std::string& what) : Error(Kind::kValidation, what) {}
};

class LpInfeasible : public Error {
 public:
  explicit LpInfeasible(const std::string& what) : Error(Kind::kNumerical, what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(Kind::kNumerical, what) {}
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error(Kind::kValidation, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(Kind::kValidation, what) {}
};

/// Local dimensions of a bipartite system A⊗B.
class Dims {
 public:
  Dims(int d_a, int d_b) : d_a_(d_a), d_b_(d_b) {
    if (d_a < 2 || d_b < 2)
      throw InvalidDimension("subsystem dimensions must be >= 2, got " + std::to_string(d_a) +
                             "x" + std::to_string(d_b));
  }

  int d_a() const { return d_a_; }
  int d_b() const { return d_b_; }
  int n() const { return d_a_ * d_b_; }
  int feature_dim() const { return n() * n() - 1; }

  friend bool operator==(const Dims&, const Dims&) = default;

 private:
  int d_a_;
  int d_b_;
};

inline std::string to_string(const Dims& d) {
  return std::to_string(d.d_a()) + "x" + std::to_string(d.d_b());
}

}  // namespace qmlcha
