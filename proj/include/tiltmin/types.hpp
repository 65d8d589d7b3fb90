#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tiltmin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent arguments (dimension mismatch, point outside X, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The truncated search domain has no usable points.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A map produced a value outside its declared feasible set.
class RangeViolationError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine hit its iteration cap; carries the last iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, Vector last_iterate)
      : Error(what), last_iterate_(std::move(last_iterate)) {}

  const Vector& last_iterate() const { return last_iterate_; }

 private:
  Vector last_iterate_;
};

inline bool same_vector(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.size() == 0 || a == b);
}

inline bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

}  // namespace tiltmin
