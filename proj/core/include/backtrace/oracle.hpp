#pragma once

#include <limits>
#include <vector>

#include "backtrace/flux.hpp"
#include "backtrace/piecewise.hpp"

namespace backtrace {

/// Uniform finite-volume grid of cell averages on [x_lo, x_hi].
struct FvGrid {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double dx = 0.0;
  std::vector<double> cells;
  double t = 0.0;
  double cfl = 0.9;

  double center(std::size_t i) const { return x_lo + (static_cast<double>(i) + 0.5) * dx; }
  double mass() const;
};

/// Cell averages of `u0` on [x_lo, x_hi] with cells of width about dx.
FvGrid make_grid(const PiecewiseProfile& u0, double x_lo, double x_hi, double dx,
                 double cfl = 0.9);

/// Exact Riemann flux at an interface for a convex flux:
/// min f on [a, b] when a <= b, max f on [b, a] otherwise.
double godunov_flux(const ConvexFlux& flux, double a, double b);

/// One Godunov step with dt = cfl dx / max|f'| (capped by max_dt) and
/// zero-gradient outflow boundaries. Returns the advanced grid.
FvGrid godunov_step(const FvGrid& grid, const ConvexFlux& flux,
                    double max_dt = std::numeric_limits<double>::infinity());

/// Godunov evolution of u0 to time T on a grid covering [lo, hi], padded by
/// T max|f'| on each side so the outflow boundaries stay clear of the
/// window. Returns the piecewise-constant cell averages.
PiecewiseProfile evolve_fv(const PiecewiseProfile& u0, const ConvexFlux& flux, double T,
                           double dx, double lo, double hi, double cfl = 0.9);

}  // namespace backtrace
