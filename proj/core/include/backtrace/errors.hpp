#pragma once

#include <stdexcept>
#include <string>

namespace backtrace {

/// A speed or state fell outside the interval a flux was validated on.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed or inconsistent arguments (empty grids, bad paths, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The target profile violates the Oleinik decay bound, so no initial datum
/// reaches it. Carries the witness pair x < x + y with p(x) > p(x + y).
class AdmissibilityError : public std::runtime_error {
 public:
  AdmissibilityError(const std::string& what, double x, double y_shift, double margin)
      : std::runtime_error(what), x_(x), y_(y_shift), margin_(margin) {}

  double witness_x() const noexcept { return x_; }
  double witness_shift() const noexcept { return y_; }
  /// p(x) - p(x + y) > 0.
  double margin() const noexcept { return margin_; }

 private:
  double x_;
  double y_;
  double margin_;
};

/// A candidate expected to be an attaining datum is not one.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when asked to decompose the extremal datum, which is the vertex of
/// the cone and lies on no nontrivial face.
class NoFaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace backtrace
