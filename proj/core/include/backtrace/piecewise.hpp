#pragma once

#include <optional>
#include <span>
#include <vector>

namespace backtrace {

/// Value a + b (x - x_lo) on the half-open interval ]x_lo, x_hi].
struct Piece {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double a = 0.0;
  double b = 0.0;

  double at(double x) const noexcept { return a + b * (x - x_lo); }
  double start() const noexcept { return a; }
  double end() const noexcept { return a + b * (x_hi - x_lo); }
  double length() const noexcept { return x_hi - x_lo; }

  friend bool operator==(const Piece&, const Piece&) = default;
};

enum class Side { kLeft, kRight, kPrecise };

/// A discontinuity of a profile: value x-, value x+.
struct Jump {
  double x = 0.0;
  double left = 0.0;
  double right = 0.0;
};

/// Bounded, piecewise-linear function of x with possible jumps at the
/// breakpoints and constant extensions to the left and right of the covered
/// interval. The left-continuous representative is used: at a breakpoint the
/// value comes from the piece ending there.
class PiecewiseProfile {
 public:
  /// The constant function.
  explicit PiecewiseProfile(double constant = 0.0);
  PiecewiseProfile(std::vector<Piece> pieces, double ext_left, double ext_right);

  /// `left` on x <= at, `right` on x > at.
  static PiecewiseProfile step(double at, double left, double right);
  /// Continuous interpolant through (xs[i], values[i]), constant outside.
  static PiecewiseProfile interpolate(std::span<const double> xs, std::span<const double> values);

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  double ext_left() const noexcept { return ext_left_; }
  double ext_right() const noexcept { return ext_right_; }
  bool empty() const noexcept { return pieces_.empty(); }
  /// Breakpoints x_0 < x_1 < ... < x_n (empty for a constant with no pieces).
  std::vector<double> breakpoints() const;
  double front() const;
  double back() const;

  double left(double x) const;
  double right(double x) const;
  double operator()(double x) const { return left(x); }
  /// Precise representative: the common one-sided limit, or nullopt when the
  /// one-sided limits differ (x is not a Lebesgue point).
  std::optional<double> precise(double x) const;
  std::optional<double> eval(double x, Side side) const;
  /// Slope of the piece containing x (0 on the extensions).
  double slope(double x) const;

  double integrate(double a, double b) const;
  double sup_norm() const;
  double min_value() const;
  double max_value() const;
  double total_variation() const;
  /// Breakpoints where |left - right| > tol.
  std::vector<Jump> jumps(double tol = 1e-12) const;

  /// x -> p(-x). Values at former jump points switch to the other side.
  PiecewiseProfile reflect() const;
  /// Adds height on ]lo, hi].
  PiecewiseProfile add_indicator(double lo, double hi, double height) const;
  /// Replaces the restriction to ]lo, hi] with `inner` (which must cover it).
  PiecewiseProfile splice(double lo, double hi, const PiecewiseProfile& inner) const;
  /// Explicit pieces covering [lo, hi], extensions included.
  std::vector<Piece> restrict(double lo, double hi) const;
  /// Merges pieces that continue one another and drops pieces equal to the
  /// adjacent extension.
  PiecewiseProfile simplified(double tol = 1e-13) const;

  PiecewiseProfile operator-() const;
  PiecewiseProfile& operator*=(double s);

 private:
  std::size_t locate_left(double x) const;
  std::size_t locate_right(double x) const;

  std::vector<Piece> pieces_;
  double ext_left_ = 0.0;
  double ext_right_ = 0.0;
};

/// alpha * p + beta * q, exact on the union of breakpoints.
PiecewiseProfile linear_combination(double alpha, const PiecewiseProfile& p, double beta,
                                    const PiecewiseProfile& q);
PiecewiseProfile operator+(const PiecewiseProfile& p, const PiecewiseProfile& q);
PiecewiseProfile operator-(const PiecewiseProfile& p, const PiecewiseProfile& q);
PiecewiseProfile operator*(double s, const PiecewiseProfile& p);

double integrate(const PiecewiseProfile& p, double a, double b);
/// Exact integral of |pa - pb| over [a, b].
double l1_distance(const PiecewiseProfile& pa, const PiecewiseProfile& pb, double a, double b);
/// Exact integral of pa * pb over [a, b].
double inner_product(const PiecewiseProfile& pa, const PiecewiseProfile& pb, double a, double b);
/// sup |pa - pb| over [a, b] (one-sided values at breakpoints included).
double sup_distance(const PiecewiseProfile& pa, const PiecewiseProfile& pb, double a, double b);

/// Builds a profile left to right, skipping pieces shorter than `min_length`.
class ProfileBuilder {
 public:
  explicit ProfileBuilder(double start, double min_length = 1e-13);
  /// Appends a piece from the current position to x_hi, starting at value `a`
  /// with slope `b`. Pieces shorter than min_length are absorbed.
  void add(double x_hi, double a, double b);
  /// Appends a piece joining (current, a) to (x_hi, end) linearly.
  void add_linear(double x_hi, double a, double end);
  double position() const noexcept { return cursor_; }
  PiecewiseProfile finish(double ext_left, double ext_right) &&;

 private:
  double cursor_;
  double min_length_;
  std::vector<Piece> pieces_;
};

/// U(x) = offset + integral of `profile` from `base` to x. Continuous and
/// Lipschitz with constant sup|profile|.
class PiecewisePrimitive {
 public:
  PiecewisePrimitive(PiecewiseProfile profile, double base, double offset = 0.0);

  double operator()(double x) const;
  const PiecewiseProfile& derivative() const noexcept { return profile_; }
  double base_point() const noexcept { return base_; }
  double offset() const noexcept { return offset_; }
  PiecewisePrimitive with_offset(double offset) const;
  PiecewisePrimitive shifted(double delta) const { return with_offset(offset_ + delta); }

 private:
  /// Integral of the profile from its first breakpoint (or 0) to x.
  double raw(double x) const;

  PiecewiseProfile profile_;
  std::vector<double> xs_;
  std::vector<double> prefix_;
  double base_;
  double offset_;
  double raw_base_ = 0.0;
};

PiecewisePrimitive primitive(const PiecewiseProfile& p, double base, double offset = 0.0);

}  // namespace backtrace
