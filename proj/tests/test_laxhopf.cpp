#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "backtrace/errors.hpp"
#include "backtrace/laxhopf.hpp"

using namespace backtrace;

namespace {

const ConvexFlux kBurgers = ConvexFlux::burgers();

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * (i + 0.5) / n;
  return xs;
}

PiecewiseProfile random_datum(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> len(0.2, 0.8);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<Piece> pieces;
  double x = -2.0;
  for (int k = 0; k < 6; ++k) {
    const double l = len(rng);
    const double a = val(rng);
    pieces.push_back({x, x + l, a, (val(rng) - a) / l});
    x += l;
  }
  return PiecewiseProfile(pieces, val(rng), val(rng));
}

}  // namespace

TEST_CASE("action values") {
  const PiecewisePrimitive zero = primitive(PiecewiseProfile(0.0), 0.0);
  CHECK(s_value(zero, kBurgers, 1.0, 0.3, -0.2) == doctest::Approx(0.125));
  CHECK(s_value(zero, kBurgers, 2.5, 0.7, 0.7) == 0.0);

  const LaxHopfSolver ones(PiecewiseProfile(1.0), kBurgers);
  CHECK(ones.s_value(1.0, 0.0, 0.4) == doctest::Approx(0.08 + 0.4));
  const Minimizer m = ones.minimize(1.0, 0.0);
  CHECK(m.y_left == doctest::Approx(-1.0));
  CHECK(ones.state(1.0, 0.0).state_u == doctest::Approx(1.0));
  CHECK(m.value == doctest::Approx(-0.5));
}

TEST_CASE("Riemann problems for Burgers") {
  const auto xs = grid(-2.0, 3.0, 501);
  const auto shock = evolve_cl(PiecewiseProfile::step(0.0, 1.0, 0.0), kBurgers, 1.0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - 0.5) < 1e-9) continue;
    const double expected = xs[i] < 0.5 ? 1.0 : 0.0;
    CHECK(shock[i].left == doctest::Approx(expected));
  }
  const LaxHopfSolver solver(PiecewiseProfile::step(0.0, 1.0, 0.0), kBurgers);
  const StateSample at = solver.sample(1.0, 0.5);
  CHECK(at.left == doctest::Approx(1.0));
  CHECK(at.right == doctest::Approx(0.0));

  const auto fan = evolve_cl(PiecewiseProfile::step(0.0, 0.0, 1.0), kBurgers, 1.0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(fan[i].left == doctest::Approx(std::clamp(xs[i], 0.0, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("constants are invariant") {
  const auto xs = grid(-3.0, 3.0, 50);
  for (double t : {0.1, 1.0, 7.0}) {
    for (const StateSample& s : evolve_cl(PiecewiseProfile(-0.3), kBurgers, t, xs)) {
      CHECK(s.left == doctest::Approx(-0.3));
    }
  }
  CHECK_THROWS_AS(evolve_cl(PiecewiseProfile(0.0), kBurgers, 0.0, xs), ArgumentError);
}

TEST_CASE("Hamilton-Jacobi solutions") {
  const auto xs = grid(-3.0, 3.0, 60);
  const auto zero = evolve_hj(primitive(PiecewiseProfile(0.0), 0.0), kBurgers, 1.0, xs);
  for (double v : zero) CHECK(v == doctest::Approx(0.0));
  const auto line = evolve_hj(primitive(PiecewiseProfile(1.0), 0.0), kBurgers, 0.8, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(line[i] == doctest::Approx(xs[i] - 0.4));
}

TEST_CASE("space derivative of the HJ solution is the CL solution") {
  const PiecewiseProfile u0 = PiecewiseProfile::step(0.0, 0.0, 1.0);
  const PiecewisePrimitive U = primitive(u0, 0.0);
  const double h = 1e-4;
  for (double x : {-0.5, 0.1, 0.37, 0.8, 1.6}) {
    const double pts[] = {x - h, x + h};
    const auto v = evolve_hj(U, kBurgers, 1.0, pts);
    const double ux[] = {x};
    CHECK(std::abs((v[1] - v[0]) / (2.0 * h) - evolve_cl(u0, kBurgers, 1.0, ux)[0].left) <= 1e-6);
  }
}

TEST_CASE("the minimizer is global and the smallest one") {
  std::mt19937_64 rng(43);
  const PiecewiseProfile u0 = random_datum(rng);
  const LaxHopfSolver solver(u0, kBurgers);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double x = pos(rng);
    const Minimizer m = solver.minimize(0.9, x);
    double brute = INFINITY;
    for (int i = 0; i <= 20000; ++i) {
      const double y = x - 2.0 + 4.0 * i / 20000.0;
      brute = std::min(brute, solver.s_value(0.9, x, y));
    }
    CHECK(m.value <= brute + 1e-10);
    CHECK(m.y_left <= m.y_right);
  }
}

TEST_CASE("non-quadratic flux: Riemann problems and profile evolution") {
  const ConvexFlux cosh = ConvexFlux::cosh(-2.0, 2.0);
  const PiecewiseProfile u0 = PiecewiseProfile::step(0.0, 1.0, -0.5);
  const double speed = (cosh.f(-0.5) - cosh.f(1.0)) / (-0.5 - 1.0);
  const PiecewiseProfile u = evolve_cl_profile(u0, cosh, 1.0, -3.0, 3.0);
  double position = NAN;
  for (const Jump& j : u.jumps()) {
    if (j.left - j.right > 1.0) position = j.x;
  }
  CHECK(position == doctest::Approx(speed).epsilon(1e-9));

  const PiecewiseProfile fan0 = PiecewiseProfile::step(0.0, -0.5, 1.0);
  const PiecewiseProfile fan = evolve_cl_profile(fan0, cosh, 1.0, -3.0, 3.0, 1e-3);
  for (double x : {-0.3, 0.0, 0.4, 1.0}) CHECK(fan.left(x) == doctest::Approx(std::asinh(x)).epsilon(1e-6));
}

TEST_CASE("semigroup property") {
  std::mt19937_64 rng(47);
  const PiecewiseProfile u0 = random_datum(rng);
  const PiecewiseProfile once = evolve_cl_profile(u0, kBurgers, 1.0, -6.0, 6.0);
  const PiecewiseProfile half = evolve_cl_profile(u0, kBurgers, 0.4, -6.0, 6.0);
  const PiecewiseProfile twice = evolve_cl_profile(half, kBurgers, 0.6, -6.0, 6.0);
  CHECK(l1_distance(once, twice, -3.0, 3.0) <= 2e-3);
}

TEST_CASE("profile evolution agrees with pointwise evaluation") {
  std::mt19937_64 rng(53);
  const PiecewiseProfile u0 = random_datum(rng);
  const PiecewiseProfile u = evolve_cl_profile(u0, kBurgers, 0.7, -4.0, 4.0);
  const auto xs = grid(-4.0, 4.0, 997);
  const auto samples = evolve_cl(u0, kBurgers, 0.7, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(u.left(xs[i]) == doctest::Approx(samples[i].left).epsilon(1e-9));
  }
}

TEST_CASE("outputs satisfy the one-sided decay estimate") {
  std::mt19937_64 rng(59);
  const PiecewiseProfile u0 = random_datum(rng);
  const double t = 0.6;
  const auto xs = grid(-4.0, 4.0, 4000);
  const auto u = evolve_cl(u0, kBurgers, t, xs);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  for (int k = 0; k < 10000; ++k) {
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    CHECK(kBurgers.df(u[j].left) - kBurgers.df(u[i].left) <= (xs[j] - xs[i]) / t + 1e-8);
  }
}

TEST_CASE("mass balance across vertical boundaries") {
  // Both boundaries see a continuous state (fan interior and a constant).
  const PiecewiseProfile u0 = PiecewiseProfile::step(0.0, 0.0, 1.0);
  const double a = 0.2;
  const double b = 0.7;
  const double t1 = 0.3;
  const double t2 = 0.9;
  const double m1 = evolve_cl_profile(u0, kBurgers, t1, -3.0, 3.0).integrate(a, b);
  const double m2 = evolve_cl_profile(u0, kBurgers, t2, -3.0, 3.0).integrate(a, b);
  const LaxHopfSolver solver(u0, kBurgers);
  const int n = 2000;
  double flux_in = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double tau = t1 + (t2 - t1) * i / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    flux_in += w * (kBurgers.f(solver.sample(tau, a).right) - kBurgers.f(solver.sample(tau, b).right));
  }
  flux_in *= (t2 - t1) / (3.0 * n);
  CHECK(std::abs((m2 - m1) - flux_in) <= 1e-5);
}

TEST_CASE("L1 contraction") {
  std::mt19937_64 rng(67);
  const PiecewiseProfile u = random_datum(rng);
  const PiecewiseProfile v = u.add_indicator(-0.5, 0.3, 0.7).add_indicator(1.0, 1.2, -1.1);
  const double before = l1_distance(u, v, -10.0, 10.0);
  const double after = l1_distance(evolve_cl_profile(u, kBurgers, 1.0, -8.0, 8.0),
                                   evolve_cl_profile(v, kBurgers, 1.0, -8.0, 8.0), -8.0, 8.0);
  CHECK(after <= before + 1e-6);
}

TEST_CASE("submodularity of the action") {
  std::mt19937_64 rng(71);
  const PiecewisePrimitive U = primitive(random_datum(rng), 0.0);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> gap(1e-2, 2.0);
  for (int k = 0; k < 10000; ++k) {
    const double x1 = pos(rng);
    const double x2 = x1 + gap(rng);
    const double y1 = pos(rng);
    const double y2 = y1 + gap(rng);
    const double lhs = s_value(U, kBurgers, 1.0, x1, y1) + s_value(U, kBurgers, 1.0, x2, y2);
    const double rhs = s_value(U, kBurgers, 1.0, x1, y2) + s_value(U, kBurgers, 1.0, x2, y1);
    REQUIRE(lhs < rhs);
  }
}

TEST_CASE("lifting the conservation law to the potential") {
  const auto xs = grid(-5.0, 5.0, 1000);

  const auto zero = lift_cl_to_hj(PiecewiseProfile(0.0), kBurgers, LipschitzPath::constant(0.0, 1.0),
                                  0.0, 1.0, xs);
  for (double v : zero) CHECK(v == doctest::Approx(0.0));

  const auto ones = lift_cl_to_hj(PiecewiseProfile(1.0), kBurgers, LipschitzPath::constant(0.0, 1.0),
                                  0.0, 0.6, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(ones[i] == doctest::Approx(xs[i] - 0.3));

  const PiecewiseProfile shock = PiecewiseProfile::step(0.0, 1.0, 0.0);
  const PiecewisePrimitive U = primitive(shock, -2.0);
  const auto lifted = lift_cl_to_hj(shock, kBurgers, LipschitzPath::constant(-2.0, 1.0), 0.0, 1.0, xs);
  const auto direct = evolve_hj(U, kBurgers, 1.0, xs);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(lifted[i] - direct[i]));
  CHECK(worst <= 1e-5);
}

TEST_CASE("Lipschitz paths validate their samples") {
  CHECK_THROWS_AS(LipschitzPath({0.0, 1.0}, {0.0, 1e9}), ArgumentError);
  CHECK_THROWS_AS(LipschitzPath({0.0, 0.0}, {0.0, 1.0}), ArgumentError);
  const LipschitzPath p = LipschitzPath::linear(1.0, -0.5, 2.0);
  CHECK(p(2.0) == doctest::Approx(0.0));
  CHECK(p.velocity(1.0) == doctest::Approx(-0.5));
}
