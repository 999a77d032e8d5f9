#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace backtrace {

/// A uniformly convex flux f on a bounded state interval [u_min, u_max],
/// normalized so that f(0) = min f = 0.
///
/// Besides f, f' and f'' it provides the inverse speed map g = (f')^{-1} and
/// the Legendre transform f*(lambda) = lambda g(lambda) - f(g(lambda)).
/// Instances are immutable once built and can be shared between threads.
class ConvexFlux {
 public:
  enum class Kind { kBurgers, kPolynomial, kCustom };

  using Scalar = std::function<double(double)>;

  /// f(u) = u^2 / 2.
  static ConvexFlux burgers(double u_min = -1.0e3, double u_max = 1.0e3);

  /// f(u) = sum_k coeffs[k] u^k, validated on [u_min, u_max].
  static ConvexFlux polynomial(std::vector<double> coeffs, double u_min, double u_max);

  /// f(u) = cosh(u) - 1, a non-quadratic flux with f'' = cosh >= 1.
  static ConvexFlux cosh(double u_min = -2.0, double u_max = 2.0);

  /// Arbitrary C^2 flux given by its value and first two derivatives.
  static ConvexFlux custom(std::string name, Scalar f, Scalar df, Scalar ddf, double u_min,
                           double u_max);

  double f(double u) const;
  double df(double u) const;
  double ddf(double u) const;

  /// Inverse of f'. Throws RangeError outside speed_range().
  double g(double lambda) const;

  /// Convex conjugate f*(lambda). Throws RangeError outside speed_range().
  double legendre(double lambda) const;

  /// v f'(v) - f(v), i.e. f*(f'(v)) without the inversion.
  double conjugate_at_state(double v) const { return v * df(v) - f(v); }

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  /// Polynomial coefficients (Burgers reports {0, 0, 0.5}); empty for custom fluxes.
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

  /// True when f'' is constant, so that g, f* and every derived map are affine
  /// or quadratic and can be handled in closed form.
  bool is_quadratic() const noexcept { return quadratic_; }

  double convexity_floor() const noexcept { return convexity_floor_; }
  /// Largest sampled f'' on the state range.
  double convexity_ceiling() const noexcept { return convexity_ceiling_; }

  std::pair<double, double> state_range() const noexcept { return {u_min_, u_max_}; }
  std::pair<double, double> speed_range() const noexcept { return {df(u_min_), df(u_max_)}; }

  /// max |f'(u)| over u in [lo, hi].
  double max_speed(double lo, double hi) const;

 private:
  ConvexFlux() = default;
  void validate();

  Kind kind_ = Kind::kBurgers;
  std::string name_;
  std::vector<double> coeffs_;
  Scalar f_;
  Scalar df_;
  Scalar ddf_;
  bool quadratic_ = false;
  double u_min_ = 0.0;
  double u_max_ = 0.0;
  double convexity_floor_ = 0.0;
  double convexity_ceiling_ = 0.0;
};

}  // namespace backtrace
