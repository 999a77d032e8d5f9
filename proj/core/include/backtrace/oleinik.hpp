#pragma once

#include <optional>
#include <vector>

#include "backtrace/flux.hpp"
#include "backtrace/piecewise.hpp"

namespace backtrace {

/// How the map p behaves on one piece of the target profile.
enum class SegmentKind {
  kIncreasing,  ///< p' > 0 throughout
  kFlat,        ///< p' = 0 throughout (a centered rarefaction at time 0)
  kMixed,       ///< non-quadratic flux, p' >= 0 with near-zero samples
  kDecreasing,  ///< p' < 0 somewhere: violates the decay bound
};

const char* to_string(SegmentKind kind);

struct PSegment {
  SegmentKind kind = SegmentKind::kIncreasing;
  /// Source interval ]x_lo, x_hi]; infinite for the two constant extensions.
  double x_lo = 0.0;
  double x_hi = 0.0;
  /// w(x_lo+), w(x_hi-) and the slope of w on the piece.
  double w_lo = 0.0;
  double w_hi = 0.0;
  double w_slope = 0.0;
  /// p(x_lo+) and p(x_hi).
  double p_lo = 0.0;
  double p_hi = 0.0;
  /// Smallest (sampled, or exact for quadratic flux) value of p' on the piece.
  double min_slope = 1.0;
  /// a-priori bound |p'| <= 1 + T sup f'' |w'|.
  double slope_bound = 1.0;
};

/// Breakpoint of w, with the one-sided values of w and of p there.
struct PBreak {
  double x = 0.0;
  double w_left = 0.0;
  double w_right = 0.0;
  double p_left = 0.0;
  double p_right = 0.0;
  /// p is differentiable at x (no jump of w, no change of slope).
  bool smooth = false;
  bool jump = false;
};

/// The foot of the minimal backward characteristic,
/// p(x) = x - T f'(w(x)), for a target w at time T.
class PMap {
 public:
  PMap(PiecewiseProfile w, ConvexFlux flux, double horizon);

  double operator()(double x) const { return left(x); }
  double left(double x) const;
  double right(double x) const;

  double horizon() const noexcept { return horizon_; }
  const PiecewiseProfile& source() const noexcept { return w_; }
  const ConvexFlux& flux() const noexcept { return flux_; }

  /// Segments in increasing x, the two extensions first and last.
  const std::vector<PSegment>& segments() const noexcept { return segments_; }
  /// Every breakpoint of w in increasing order.
  const std::vector<PBreak>& breaks() const noexcept { return breaks_; }
  std::vector<PBreak> jumps() const;

  /// x with p(x) = y on an increasing or mixed segment.
  double invert(const PSegment& seg, double y) const;

 private:
  PiecewiseProfile w_;
  ConvexFlux flux_;
  double horizon_;
  std::vector<PSegment> segments_;
  std::vector<PBreak> breaks_;
};

PMap build_pmap(const PiecewiseProfile& w, const ConvexFlux& flux, double horizon);

struct OleinikWitness {
  double x = 0.0;
  double shift = 0.0;   ///< y > 0
  double margin = 0.0;  ///< p(x) - p(x + y) > 0
};

struct OleinikVerdict {
  bool admissible = true;
  std::optional<OleinikWitness> witness;
  explicit operator bool() const noexcept { return admissible; }
};

/// True iff p is nondecreasing, i.e. f'(w(x + y)) - f'(w(x)) <= y / T for all
/// x and y > 0. Otherwise returns a violating pair.
OleinikVerdict check_oleinik(const PMap& pmap);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
};

/// ]lo, hi[ = ]p(x-), p(x+)[, the initial positions absorbed by the shock at x.
struct ShockGap {
  double x = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Split of the initial line into positions carrying transported values,
/// positions feeding shocks, and a finite exceptional set.
struct Partition {
  std::vector<Interval> xi;
  std::vector<ShockGap> xii;
  std::vector<double> exceptional;

  /// Measure of (X_i u X_ii) inside [a, b].
  double covered_length(double a, double b) const;
};

/// Throws AdmissibilityError when check_oleinik fails.
Partition partition(const PMap& pmap);

}  // namespace backtrace
