#include <doctest.h>

#include <cmath>
#include <random>

#include "backtrace/errors.hpp"
#include "backtrace/flux.hpp"

using backtrace::ConvexFlux;

namespace {

// Root of sinh(u) = target by plain bisection, independent of the library.
double bisect_sinh(double target, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::sinh(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// sup_u (lambda u - f(u)) by a coarse grid followed by golden refinement.
double grid_conjugate(const ConvexFlux& f, double lambda) {
  auto [lo, hi] = f.state_range();
  double best_u = lo;
  double best = -INFINITY;
  for (int i = 0; i <= 4000; ++i) {
    const double u = lo + (hi - lo) * i / 4000.0;
    const double v = lambda * u - f.f(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  double a = std::max(lo, best_u - (hi - lo) / 4000.0);
  double b = std::min(hi, best_u + (hi - lo) / 4000.0);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double c = b - r * (b - a);
    const double d = a + r * (b - a);
    if (lambda * c - f.f(c) > lambda * d - f.f(d)) b = d; else a = c;
  }
  const double u = 0.5 * (a + b);
  return lambda * u - f.f(u);
}

}  // namespace

TEST_CASE("Burgers inverse speed is the identity") {
  const ConvexFlux f = ConvexFlux::burgers();
  CHECK(f.g(0.7) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(f.is_quadratic());
  CHECK(f.convexity_floor() == doctest::Approx(1.0));
}

TEST_CASE("quartic flux inverts its own speed") {
  const ConvexFlux f = ConvexFlux::polynomial({0.0, 0.0, 0.5, 0.0, 1.0 / 12.0}, -3.0, 3.0);
  CHECK_FALSE(f.is_quadratic());
  CHECK(std::abs(f.g(f.df(0.3)) - 0.3) <= 1e-12);
  for (double u : {-2.9, -1.0, -1e-3, 0.0, 0.5, 2.0, 2.99}) {
    CHECK(std::abs(f.g(f.df(u)) - u) <= 1e-10);
  }
}

TEST_CASE("cosh flux: g against a bisection oracle") {
  const ConvexFlux f = ConvexFlux::cosh(-2.0, 2.0);
  const double oracle = bisect_sinh(1.0, -2.0, 2.0);
  CHECK(f.g(1.0) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(f.g(1.0) == doctest::Approx(std::asinh(1.0)).epsilon(1e-12));
  CHECK(std::abs(f.df(f.g(1.0)) - 1.0) <= 1e-12);
}

TEST_CASE("Legendre transform values") {
  const ConvexFlux b = ConvexFlux::burgers();
  for (double l : {-1.0, 0.5, 2.0}) CHECK(b.legendre(l) == doctest::Approx(l * l / 2.0));
  CHECK(b.legendre(0.0) == 0.0);

  const ConvexFlux c = ConvexFlux::cosh(-2.0, 2.0);
  CHECK(c.legendre(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  const double expected = std::asinh(1.0) - (std::sqrt(2.0) - 1.0);
  CHECK(c.legendre(1.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(c.legendre(1.0) == doctest::Approx(grid_conjugate(c, 1.0)).epsilon(1e-9));
  CHECK(c.legendre(1.0) == doctest::Approx(0.467160).epsilon(1e-6));
}

TEST_CASE("speeds outside the validated range are rejected with the interval") {
  const ConvexFlux c = ConvexFlux::cosh(-2.0, 2.0);
  CHECK_THROWS_AS(c.g(10.0), backtrace::RangeError);
  try {
    c.g(10.0);
  } catch (const backtrace::RangeError& e) {
    CHECK(std::string(e.what()).find("3.62") != std::string::npos);
  }
  CHECK_THROWS_AS(c.legendre(-10.0), backtrace::RangeError);
}

TEST_CASE("construction rejects non-convex or unnormalized fluxes") {
  CHECK_THROWS(ConvexFlux::polynomial({0.0, 0.0, -0.5}, -1.0, 1.0));
  CHECK_THROWS(ConvexFlux::polynomial({1.0, 0.0, 0.5}, -1.0, 1.0));  // f(0) != 0
  CHECK_THROWS(ConvexFlux::polynomial({0.0, 1.0, 0.5}, -1.0, 1.0));  // min not at 0
  CHECK_THROWS(ConvexFlux::polynomial({0.0, 0.0, 0.0, 1.0}, -1.0, 1.0));  // f'' changes sign
  CHECK_THROWS(ConvexFlux::burgers(1.0, 2.0));  // range must contain 0
}

TEST_CASE("Fenchel-Young inequality and equality case") {
  const ConvexFlux fluxes[] = {ConvexFlux::burgers(-3.0, 3.0), ConvexFlux::cosh(-2.0, 2.0),
                               ConvexFlux::polynomial({0.0, 0.0, 0.5, 0.0, 1.0 / 12.0}, -2.0, 2.0)};
  std::mt19937_64 rng(11);
  for (const ConvexFlux& f : fluxes) {
    auto [umin, umax] = f.state_range();
    auto [smin, smax] = f.speed_range();
    std::uniform_real_distribution<double> du(umin, umax);
    std::uniform_real_distribution<double> dl(smin, smax);
    int violations = 0;
    for (int k = 0; k < 10000; ++k) {
      const double u = du(rng);
      const double l = dl(rng);
      if (l * u > f.f(u) + f.legendre(l) + 1e-10) ++violations;
      const double tight = f.df(u);
      if (std::abs(tight * u - f.f(u) - f.legendre(tight)) > 1e-8 * std::max(1.0, std::abs(tight * u))) {
        ++violations;
      }
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("derivative of the Legendre transform is g") {
  const ConvexFlux fluxes[] = {ConvexFlux::burgers(-3.0, 3.0), ConvexFlux::cosh(-2.0, 2.0)};
  for (const ConvexFlux& f : fluxes) {
    auto [smin, smax] = f.speed_range();
    const double h = 1e-5;
    for (int i = 1; i < 50; ++i) {
      const double l = smin + (smax - smin) * i / 50.0;
      const double fd = (f.legendre(l + h) - f.legendre(l - h)) / (2.0 * h);
      CHECK(std::abs(fd - f.g(l)) <= 1e-6);
    }
  }
}

TEST_CASE("the Legendre transform is strictly convex") {
  const ConvexFlux f = ConvexFlux::cosh(-2.0, 2.0);
  std::mt19937_64 rng(5);
  auto [smin, smax] = f.speed_range();
  std::uniform_real_distribution<double> dl(smin, smax);
  for (int k = 0; k < 1000; ++k) {
    const double h = 0.05 + 0.1 * (k % 7);
    const double l = std::clamp(dl(rng), smin + h, smax - h);
    CHECK(f.legendre(l - h) - 2.0 * f.legendre(l) + f.legendre(l + h) > 0.0);
  }
}
