#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "backtrace/flux.hpp"
#include "backtrace/piecewise.hpp"

namespace backtrace::suite {

/// Random targets that honor the decay bound by construction: piecewise
/// linear with f'(w) rising no faster than 0.95 / T and only downward jumps.
/// Every fourth target (index 3, 7, ...) is jump-free; the others carry at
/// least one jump.
std::vector<PiecewiseProfile> corpus_generate(std::uint64_t seed, int count,
                                              const ConvexFlux& flux, double horizon);

/// Targets that violate the decay bound: alternately an upward jump and a
/// piece on which f'(w) rises at rate 2 / T.
std::vector<PiecewiseProfile> corpus_violating(std::uint64_t seed, int count,
                                               const ConvexFlux& flux, double horizon);

/// Pairwise oracle: looks for x < x + y in [-window, window] with
/// p(x) > p(x + y), mixing global pairs with pairs at distance < 0.5.
bool pairwise_admissible(const PiecewiseProfile& w, const ConvexFlux& flux, double horizon,
                         int pairs, std::uint64_t seed, double window = 5.0);

/// The Riemann shock w = 1 on x <= 0, 0 after.
PiecewiseProfile shock_target();

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Ids 1..12.
int criterion_count();
CriterionResult run_criterion(int id, std::uint64_t seed);
std::vector<CriterionResult> run_acceptance(std::uint64_t seed);

/// Fixed-width summary, one line per criterion and a totals line.
void print_summary(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace backtrace::suite
