#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "backtrace/flux.hpp"
#include "backtrace/piecewise.hpp"

namespace backtrace {

/// Which analytic branch of the minimization produced a minimizer: a fixed
/// breakpoint of the datum (centered fan) or a stationary point inside a
/// piece (transported value). Pieces are indexed from -1 (left extension) to
/// n (right extension).
struct Family {
  enum class Kind { kBreakpoint, kPiece };
  Kind kind = Kind::kPiece;
  int index = -1;
  /// Minimizer location when the family was identified.
  double y = 0.0;

  bool same_branch(const Family& other) const noexcept {
    return kind == other.kind && index == other.index;
  }
};

/// Smallest and largest global minimizers of y -> s(t, x, y). They differ
/// only where a shock sits at x.
struct Minimizer {
  double y_left = 0.0;
  double y_right = 0.0;
  double value = 0.0;
  Family left_family;
  Family right_family;
};

/// Minimal-characteristic view of the solution at (t, x).
struct VariationalState {
  double t = 0.0;
  double x = 0.0;
  double minimizer_y = 0.0;
  double value_s = 0.0;
  double state_u = 0.0;
};

struct StateSample {
  double left = 0.0;
  double right = 0.0;
};

/// Hopf-Lax evaluator for an initial potential U0 (and its derivative u0).
///
///   s(t, x, y) = t f*((x - y) / t) + U0(y),
///   U(t, x) = min_y s(t, x, y),
///   u(t, x) = g((x - y*) / t).
///
/// The minimization is global: every breakpoint of u0 in the domain of
/// dependence is a candidate, as is every stationary point
/// u0(y) = g((x - y) / t) inside a piece.
class LaxHopfSolver {
 public:
  LaxHopfSolver(PiecewisePrimitive potential, ConvexFlux flux);
  /// Potential with base point 0 and no offset.
  LaxHopfSolver(const PiecewiseProfile& u0, ConvexFlux flux);

  const ConvexFlux& flux() const noexcept { return flux_; }
  const PiecewisePrimitive& potential() const noexcept { return potential_; }
  const PiecewiseProfile& datum() const noexcept { return potential_.derivative(); }

  double s_value(double t, double x, double y) const;
  Minimizer minimize(double t, double x) const;
  VariationalState state(double t, double x) const;
  StateSample sample(double t, double x) const;
  double value(double t, double x) const { return minimize(t, x).value; }

  /// Value of the solution at (t, x) if the minimizer stayed on `family`.
  double family_state(const Family& family, double t, double x) const;

  /// The solution at time t as a profile on [lo, hi]. Shock positions are
  /// located by bisection on the minimizer branch; between them each branch
  /// is linear in x for quadratic fluxes (reproduced exactly) and is sampled
  /// at spacing dx otherwise. The extensions carry u(t, lo) and u(t, hi).
  PiecewiseProfile evolve_profile(double t, double lo, double hi, double dx) const;

 private:
  struct Cell {
    double lo;
    double hi;
    double a;  // value at lo (or the constant on an extension)
    double b;
    int index;
  };

  void stationary_points(const Cell& cell, double t, double x, double y_lo, double y_hi,
                         std::vector<Family>& out) const;
  double cell_value(const Cell& cell, double y) const {
    return std::isfinite(cell.lo) ? cell.a + cell.b * (y - cell.lo) : cell.a;
  }
  double speed_state(double lambda) const;
  const Cell& cell(int index) const { return cells_[static_cast<std::size_t>(index + 1)]; }

  PiecewisePrimitive potential_;
  ConvexFlux flux_;
  std::vector<Cell> cells_;
  std::vector<double> breakpoints_;
  double v_min_;
  double v_max_;
};

/// s(t, x, y) = t f*((x - y) / t) + U0(y).
double s_value(const PiecewisePrimitive& potential, const ConvexFlux& flux, double t, double x,
               double y);

/// Conservation-law solution S_t u0 sampled at xs (left and right traces).
std::vector<StateSample> evolve_cl(const PiecewiseProfile& u0, const ConvexFlux& flux, double t,
                                   std::span<const double> xs);

/// Hamilton-Jacobi solution (S_t U0)(x) sampled at xs.
std::vector<double> evolve_hj(const PiecewisePrimitive& potential, const ConvexFlux& flux,
                              double t, std::span<const double> xs);

/// S_t u0 as a profile on [lo, hi]; see LaxHopfSolver::evolve_profile.
PiecewiseProfile evolve_cl_profile(const PiecewiseProfile& u0, const ConvexFlux& flux, double t,
                                   double lo, double hi, double dx = 1e-3);

/// An interval [lo, hi] outside of which S_t u0 equals the constant
/// extensions of u0, padded by `margin`.
std::pair<double, double> wave_window(const PiecewiseProfile& u0, const ConvexFlux& flux,
                                      double t, double margin = 1.0);

/// Piecewise-linear path t -> gamma(t) given by samples.
class LipschitzPath {
 public:
  LipschitzPath(std::vector<double> times, std::vector<double> positions,
                double max_lipschitz = 1e6);
  static LipschitzPath constant(double x0, double horizon);
  static LipschitzPath linear(double x0, double speed, double horizon);

  double operator()(double t) const;
  double velocity(double t) const;
  double start_time() const noexcept { return times_.front(); }
  double end_time() const noexcept { return times_.back(); }

 private:
  std::size_t segment(double t) const;
  std::vector<double> times_;
  std::vector<double> positions_;
};

/// Hamilton-Jacobi potential rebuilt from the conservation-law solution
/// along a path:
///   U(t, x) = int_{gamma(t)}^x u(t, .) + int_0^t (gamma' u - f(u))(tau, gamma(tau)) dtau + c,
/// with composite Simpson in time at step dt.
std::vector<double> lift_cl_to_hj(const PiecewiseProfile& u0, const ConvexFlux& flux,
                                  const LipschitzPath& path, double c, double t,
                                  std::span<const double> xs, double dt = 1e-3);

}  // namespace backtrace
