#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "backtrace/errors.hpp"
#include "backtrace/oracle.hpp"

using namespace backtrace;

namespace {

const ConvexFlux kBurgers = ConvexFlux::burgers();

const PiecewiseProfile kFan({{0.0, 1.0, 0.0, 1.0}}, 0.0, 1.0);

double rarefaction_error(double dx) {
  const PiecewiseProfile u = evolve_fv(PiecewiseProfile::step(0.0, 0.0, 1.0), kBurgers, 1.0, dx, -2.0, 3.0);
  return l1_distance(u, kFan, -2.0, 3.0);
}

}  // namespace

TEST_CASE("interface flux of the exact Riemann solver") {
  CHECK(godunov_flux(kBurgers, 1.0, 0.0) == doctest::Approx(0.5));   // shock
  CHECK(godunov_flux(kBurgers, -1.0, 1.0) == doctest::Approx(0.0));  // transonic fan
  CHECK(godunov_flux(kBurgers, 0.5, 1.0) == doctest::Approx(0.125));
  CHECK(godunov_flux(kBurgers, -1.0, -0.5) == doctest::Approx(0.125));
  CHECK(godunov_flux(kBurgers, 0.3, -0.8) == doctest::Approx(0.32));
}

TEST_CASE("a constant state is a fixed point of the step") {
  FvGrid g = make_grid(PiecewiseProfile(0.4), -1.0, 1.0, 0.01);
  const FvGrid next = godunov_step(g, kBurgers);
  for (double c : next.cells) CHECK(c == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(next.t > 0.0);
}

TEST_CASE("zero speed falls back to dt = cfl dx") {
  FvGrid g = make_grid(PiecewiseProfile(0.0), -1.0, 1.0, 0.01, 0.5);
  CHECK(godunov_step(g, kBurgers).t == doctest::Approx(0.005));
}

TEST_CASE("empty grids and bad Courant numbers are rejected") {
  FvGrid empty;
  empty.dx = 0.1;
  CHECK_THROWS_AS(godunov_step(empty, kBurgers), ArgumentError);
  CHECK_THROWS_AS(make_grid(PiecewiseProfile(0.0), 0.0, 1.0, 0.1, 1.5), ArgumentError);
  CHECK_THROWS_AS(make_grid(PiecewiseProfile(0.0), 0.0, 1.0, 0.1, 0.0), ArgumentError);
}

TEST_CASE("shock position for the Riemann shock") {
  const double dx = 1e-3;
  const PiecewiseProfile u = evolve_fv(PiecewiseProfile::step(0.0, 1.0, 0.0), kBurgers, 1.0, dx, -2.0, 3.0);
  double crossing = NAN;
  for (const Piece& p : u.pieces()) {
    if (p.a < 0.5) {
      crossing = p.x_lo;
      break;
    }
  }
  CHECK(std::abs(crossing - 0.5) <= dx);
}

TEST_CASE("rarefaction converges at first order up to a logarithm") {
  const double e1 = rarefaction_error(1e-3);
  const double e2 = rarefaction_error(5e-4);
  const double e3 = rarefaction_error(2.5e-4);
  MESSAGE("rarefaction L1 errors " << e1 << " " << e2 << " " << e3);
  CHECK(e1 <= 1e-2);
  CHECK(e1 / e2 >= 1.8);
  CHECK(e2 / e3 >= 1.8);
}

TEST_CASE("maximum principle and conservation per step") {
  const PiecewiseProfile u0({{-1.0, 0.0, -0.5, 1.5}, {0.0, 1.0, 1.0, -1.8}}, -0.5, -0.8);
  FvGrid g = make_grid(u0, -4.0, 4.0, 0.01);
  const double lo = *std::min_element(g.cells.begin(), g.cells.end());
  const double hi = *std::max_element(g.cells.begin(), g.cells.end());
  for (int step = 0; step < 300; ++step) {
    const double before = g.mass();
    const double left = kBurgers.f(g.cells.front());
    const double right = kBurgers.f(g.cells.back());
    const FvGrid next = godunov_step(g, kBurgers);
    const double dt = next.t - g.t;
    // Outflow boundaries: the boundary fluxes are f of the end cells.
    CHECK(std::abs(next.mass() - before - dt * (left - right)) <= 1e-12);
    g = next;
    for (double c : g.cells) {
      REQUIRE(c >= lo - 1e-14);
      REQUIRE(c <= hi + 1e-14);
    }
  }
}

TEST_CASE("evolve_fv reaches the requested time exactly") {
  const PiecewiseProfile u = evolve_fv(PiecewiseProfile(0.25), kBurgers, 0.0, 0.1, -1.0, 1.0);
  CHECK(u.left(0.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(evolve_fv(PiecewiseProfile(0.0), kBurgers, -1.0, 0.1, -1.0, 1.0), ArgumentError);
}

TEST_CASE("discrete slopes of the speed respect the decay estimate") {
  const PiecewiseProfile u0({{-1.0, 0.0, 1.0, -1.0}, {0.0, 1.0, -0.2, 1.2}}, 1.0, 1.0);
  const double dx = 2e-3;
  const double t = 0.8;
  const PiecewiseProfile u = evolve_fv(u0, kBurgers, t, dx, -3.0, 3.0);
  const auto& pieces = u.pieces();
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const double slope = (kBurgers.df(pieces[i + 1].a) - kBurgers.df(pieces[i].a)) / dx;
    CHECK(slope <= 1.0 / t + 0.1);
  }
}
