#include "backtrace/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "backtrace/errors.hpp"

namespace backtrace {

double FvGrid::mass() const {
  return dx * std::accumulate(cells.begin(), cells.end(), 0.0);
}

FvGrid make_grid(const PiecewiseProfile& u0, double x_lo, double x_hi, double dx, double cfl) {
  if (!(x_lo < x_hi) || !(dx > 0.0)) throw ArgumentError("grid needs x_lo < x_hi and dx > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ArgumentError("CFL number must lie in ]0, 1]");
  FvGrid grid;
  const auto n = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / dx));
  grid.x_lo = x_lo;
  grid.dx = dx;
  grid.x_hi = x_lo + static_cast<double>(n) * dx;
  grid.cfl = cfl;
  grid.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x_lo + static_cast<double>(i) * dx;
    grid.cells[i] = u0.integrate(a, a + dx) / dx;
  }
  return grid;
}

double godunov_flux(const ConvexFlux& flux, double a, double b) {
  // f attains its minimum at 0.
  if (a <= b) return flux.f(std::clamp(0.0, a, b));
  return std::max(flux.f(a), flux.f(b));
}

FvGrid godunov_step(const FvGrid& grid, const ConvexFlux& flux, double max_dt) {
  if (grid.cells.empty()) throw ArgumentError("godunov_step on an empty grid");
  const auto [lo_it, hi_it] = std::minmax_element(grid.cells.begin(), grid.cells.end());
  const double speed = flux.max_speed(*lo_it, *hi_it);
  double dt = speed > 0.0 ? grid.cfl * grid.dx / speed : grid.cfl * grid.dx;
  dt = std::min(dt, max_dt);

  const std::size_t n = grid.cells.size();
  std::vector<double> interface(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double a = grid.cells[i == 0 ? 0 : i - 1];
    const double b = grid.cells[i == n ? n - 1 : i];
    interface[i] = godunov_flux(flux, a, b);
  }
  FvGrid next = grid;
  const double r = dt / grid.dx;
  for (std::size_t i = 0; i < n; ++i) next.cells[i] -= r * (interface[i + 1] - interface[i]);
  next.t = grid.t + dt;
  return next;
}

PiecewiseProfile evolve_fv(const PiecewiseProfile& u0, const ConvexFlux& flux, double T,
                           double dx, double lo, double hi, double cfl) {
  if (T < 0.0) throw ArgumentError("evolve_fv needs T >= 0");
  const double pad = T * flux.max_speed(u0.min_value(), u0.max_value()) + 4.0 * dx;
  FvGrid grid = make_grid(u0, lo - pad, hi + pad, dx, cfl);
  while (grid.t < T) {
    grid = godunov_step(grid, flux, T - grid.t);
    if (T - grid.t < 1e-14 * std::max(1.0, T)) break;
  }
  std::vector<Piece> pieces;
  pieces.reserve(grid.cells.size());
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const double a = grid.x_lo + static_cast<double>(i) * dx;
    pieces.push_back({a, a + dx, grid.cells[i], 0.0});
  }
  // Make the cell edges exactly contiguous.
  for (std::size_t i = 1; i < pieces.size(); ++i) pieces[i].x_lo = pieces[i - 1].x_hi;
  return PiecewiseProfile(std::move(pieces), grid.cells.front(), grid.cells.back());
}

}  // namespace backtrace
