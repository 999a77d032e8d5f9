#include <doctest.h>

#include <cmath>
#include <random>

#include "backtrace/errors.hpp"
#include "backtrace/oleinik.hpp"

using namespace backtrace;

namespace {

const ConvexFlux kBurgers = ConvexFlux::burgers();

PiecewiseProfile clamp_ramp(double slope) {
  return PiecewiseProfile({{0.0, 1.0 / slope, 0.0, slope}}, 0.0, 1.0);
}

// Direct pairwise search for p(x) > p(x + y), independent of PMap.
bool pairwise_monotone(const PiecewiseProfile& w, const ConvexFlux& f, double T, int pairs,
                       unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> near(0.0, 0.5);
  auto p = [&](double x) { return x - T * f.df(w.left(x)); };
  for (int k = 0; k < pairs; ++k) {
    const double x = pos(rng);
    const double y = k % 2 ? near(rng) : std::abs(pos(rng) - x);
    if (p(x) - p(x + y) > 1e-10) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("p-map of the shock target") {
  const PMap p(PiecewiseProfile::step(0.0, 1.0, 0.0), kBurgers, 1.0);
  CHECK(p(-0.5) == doctest::Approx(-1.5));
  CHECK(p(0.0) == doctest::Approx(-1.0));
  CHECK(p(0.3) == doctest::Approx(0.3));
  CHECK(p.right(0.0) == doctest::Approx(0.0));
  const auto jumps = p.jumps();
  REQUIRE(jumps.size() == 1);
  CHECK(jumps[0].x == 0.0);
  CHECK(jumps[0].p_left == doctest::Approx(-1.0));
  CHECK(jumps[0].p_right == doctest::Approx(0.0));
}

TEST_CASE("p-map of the rarefaction target has a flat segment") {
  const PMap p(clamp_ramp(1.0), kBurgers, 1.0);
  CHECK(p(-1.0) == doctest::Approx(-1.0));
  CHECK(p(0.5) == doctest::Approx(0.0));
  CHECK(p(2.0) == doctest::Approx(1.0));
  int flat = 0;
  for (const PSegment& s : p.segments()) flat += s.kind == SegmentKind::kFlat;
  CHECK(flat == 1);
  CHECK(p.jumps().empty());
}

TEST_CASE("constant target: pure shift") {
  const PMap p(PiecewiseProfile(0.7), kBurgers, 2.0);
  CHECK(p(3.0) == doctest::Approx(3.0 - 1.4));
  REQUIRE(p.segments().size() == 1);
  CHECK(p.segments()[0].kind == SegmentKind::kIncreasing);
}

TEST_CASE("p matches its definition on samples") {
  const ConvexFlux cosh = ConvexFlux::cosh(-2.0, 2.0);
  const PiecewiseProfile w({{-1.0, 0.0, 0.5, -0.3}, {0.0, 2.0, 0.1, 0.05}}, 0.5, 0.2);
  const PMap p(w, cosh, 1.3);
  for (int i = 0; i <= 200; ++i) {
    const double x = -3.0 + 6.0 * i / 200.0;
    CHECK(std::abs(p(x) - (x - 1.3 * cosh.df(w.left(x)))) <= 1e-10);
  }
}

TEST_CASE("decay bound: steep ramp is refuted with a witness") {
  const PMap p(clamp_ramp(2.0), kBurgers, 1.0);
  const OleinikVerdict v = check_oleinik(p);
  CHECK_FALSE(v.admissible);
  REQUIRE(v.witness.has_value());
  const double x = v.witness->x;
  const double y = v.witness->shift;
  CHECK(y > 0.0);
  CHECK(x > 0.0);
  CHECK(x + y < 0.5 + 1e-12);
  CHECK(p(x) - p(x + y) == doctest::Approx(v.witness->margin));
  CHECK(v.witness->margin == doctest::Approx(y));
}

TEST_CASE("decay bound: slope exactly 1/T is admissible") {
  CHECK(check_oleinik(PMap(clamp_ramp(1.0), kBurgers, 1.0)).admissible);
}

TEST_CASE("decay bound: jumps") {
  CHECK(check_oleinik(PMap(PiecewiseProfile::step(0.0, 1.0, 0.0), kBurgers, 1.0)).admissible);
  const PMap up(PiecewiseProfile::step(0.0, 0.0, 1.0), kBurgers, 1.0);
  const OleinikVerdict v = check_oleinik(up);
  CHECK_FALSE(v.admissible);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->x <= 0.0);
  CHECK(v.witness->x + v.witness->shift > 0.0);
  CHECK(up(v.witness->x) > up(v.witness->x + v.witness->shift));
}

TEST_CASE("partition of the shock, rarefaction and constant targets") {
  const Partition shock = partition(PMap(PiecewiseProfile::step(0.0, 1.0, 0.0), kBurgers, 1.0));
  REQUIRE(shock.xii.size() == 1);
  CHECK(shock.xii[0].x == 0.0);
  CHECK(shock.xii[0].lo == doctest::Approx(-1.0));
  CHECK(shock.xii[0].hi == doctest::Approx(0.0));
  REQUIRE(shock.xi.size() == 2);
  CHECK(std::isinf(shock.xi[0].lo));
  CHECK(shock.xi[0].hi == doctest::Approx(-1.0));
  CHECK(shock.xi[1].lo == doctest::Approx(0.0));
  CHECK(shock.covered_length(-5.0, 5.0) == doctest::Approx(10.0));

  const Partition rare = partition(PMap(clamp_ramp(1.0), kBurgers, 1.0));
  CHECK(rare.xii.empty());
  REQUIRE(rare.exceptional.size() == 1);
  CHECK(rare.exceptional[0] == doctest::Approx(0.0));
  CHECK(rare.covered_length(-5.0, 5.0) == doctest::Approx(10.0));

  const Partition flat = partition(PMap(PiecewiseProfile(0.3), kBurgers, 1.0));
  REQUIRE(flat.xi.size() == 1);
  CHECK(std::isinf(flat.xi[0].lo));
  CHECK(std::isinf(flat.xi[0].hi));
  CHECK(flat.xii.empty());
}

TEST_CASE("partition of an inadmissible target throws with the witness") {
  try {
    (void)partition(PMap(clamp_ramp(2.0), kBurgers, 1.0));
    FAIL("expected AdmissibilityError");
  } catch (const AdmissibilityError& e) {
    CHECK(e.witness_shift() > 0.0);
    CHECK(e.margin() > 0.0);
  }
}

TEST_CASE("gap endpoints follow the backward characteristics") {
  const ConvexFlux cosh = ConvexFlux::cosh(-2.0, 2.0);
  const PiecewiseProfile w({{-1.0, 0.5, 1.2, -0.2}, {0.5, 2.0, -0.4, 0.1}}, 1.5, -0.25);
  const double T = 0.8;
  const PMap p(w, cosh, T);
  for (const PBreak& br : p.jumps()) {
    CHECK(br.p_left == doctest::Approx(br.x - T * cosh.df(br.w_left)).epsilon(1e-14));
    CHECK(br.p_right == doctest::Approx(br.x - T * cosh.df(br.w_right)).epsilon(1e-14));
    CHECK(br.p_right - br.p_left ==
          doctest::Approx(T * (cosh.df(br.w_left) - cosh.df(br.w_right))));
  }
  CHECK(p.jumps().size() == 2);
}

TEST_CASE("non-quadratic flux: sampled classification agrees with the pairwise oracle") {
  const ConvexFlux quartic = ConvexFlux::polynomial({0.0, 0.0, 0.5, 0.0, 1.0 / 12.0}, -3.0, 3.0);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> slope(-1.0, 2.0);
  int disagreements = 0;
  for (int k = 0; k < 40; ++k) {
    const double b = slope(rng);
    const PiecewiseProfile w({{-1.0, 0.0, 0.2, b}, {0.0, 1.0, 0.2 + b, -0.1}}, 0.2, 0.1 + b);
    const bool verdict = check_oleinik(PMap(w, quartic, 1.0)).admissible;
    disagreements += verdict != pairwise_monotone(w, quartic, 1.0, 10000, 100 + k);
  }
  CHECK(disagreements == 0);
}

TEST_CASE("out-of-range targets and non-positive horizons are rejected") {
  CHECK_THROWS_AS(PMap(PiecewiseProfile(5.0), ConvexFlux::cosh(-2.0, 2.0), 1.0), RangeError);
  CHECK_THROWS(PMap(PiecewiseProfile(0.0), kBurgers, 0.0));
}
