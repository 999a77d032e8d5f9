#include <doctest.h>

#include "backtrace/errors.hpp"
#include "backtrace/inverse.hpp"
#include "backtrace/oleinik.hpp"
#include "backtrace_tools/suite.hpp"

using namespace backtrace;

namespace {
const ConvexFlux kBurgers = ConvexFlux::burgers();
}

TEST_CASE("generated targets are attainable") {
  for (std::uint64_t seed : {1u, 7u, 42u}) {
    for (const PiecewiseProfile& w : suite::corpus_generate(seed, 40, kBurgers, 1.0)) {
      REQUIRE(check_oleinik(build_pmap(w, kBurgers, 1.0)).admissible);
      CHECK(suite::pairwise_admissible(w, kBurgers, 1.0, 2000, seed));
    }
  }
  const ConvexFlux cosh = ConvexFlux::cosh();
  for (const PiecewiseProfile& w : suite::corpus_generate(5, 20, cosh, 0.7)) {
    CHECK(check_oleinik(build_pmap(w, cosh, 0.7)).admissible);
  }
}

TEST_CASE("violating targets are refused by both tests") {
  for (const PiecewiseProfile& w : suite::corpus_violating(7, 30, kBurgers, 1.0)) {
    CHECK_FALSE(check_oleinik(build_pmap(w, kBurgers, 1.0)).admissible);
    CHECK_FALSE(suite::pairwise_admissible(w, kBurgers, 1.0, 20000, 7));
  }
}

TEST_CASE("every fourth target is jump-free and only those are singletons") {
  const auto targets = suite::corpus_generate(11, 24, kBurgers, 1.0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const InverseProblem prob(targets[i], kBurgers, 1.0);
    const bool jump_free = prob.pmap().jumps().empty();
    CHECK(jump_free == (i % 4 == 3));
    CHECK((uniqueness_probe(prob) == Uniqueness::kSingleton) == jump_free);
  }
}

TEST_CASE("sharp data of jumpy targets carry a two-parameter face") {
  const auto targets = suite::corpus_generate(13, 12, kBurgers, 1.0);
  for (const PiecewiseProfile& w : targets) {
    const InverseProblem prob(w, kBurgers, 1.0);
    const auto jumps = prob.pmap().jumps();
    if (jumps.empty()) continue;
    const PiecewiseProfile sharp = construct_sharp(prob, jumps.front().x);
    CHECK(tent_family(prob, sharp, 2).members.size() == 3);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = suite::corpus_generate(99, 10, kBurgers, 1.0);
  const auto b = suite::corpus_generate(99, 10, kBurgers, 1.0);
  const auto c = suite::corpus_generate(100, 10, kBurgers, 1.0);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(sup_distance(a[i], b[i], -10.0, 10.0) == 0.0);
    differs = differs || sup_distance(a[i], c[i], -10.0, 10.0) > 0.0;
  }
  CHECK(differs);
}
