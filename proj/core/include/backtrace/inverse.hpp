#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "backtrace/flux.hpp"
#include "backtrace/oleinik.hpp"
#include "backtrace/piecewise.hpp"

namespace backtrace {

/// Numerical knobs of the membership tests and constructions.
struct InverseSettings {
  /// Acceptance tolerance on every membership clause. Defaults to 1e-8 for
  /// quadratic fluxes (all integrals closed form) and 1e-5 otherwise.
  std::optional<double> membership_tol;
  /// Margins below -certified_factor * tol are reported as certified failures.
  double certified_factor = 10.0;
  /// Interior samples per increasing segment for the transported-value clause.
  int segment_samples = 128;
  /// Points of the v-grid across each shock (Chebyshev spaced, endpoints included).
  int shock_samples = 64;
  /// Output resolution for sampled constructions (non-quadratic flux).
  double dx_out = 1e-3;
};

/// Target w at time T for a convex flux, checked for attainability at
/// construction (throws AdmissibilityError with the violating pair).
class InverseProblem {
 public:
  InverseProblem(PiecewiseProfile target, ConvexFlux flux, double horizon,
                 InverseSettings settings = {});

  const PiecewiseProfile& target() const noexcept { return pmap_.source(); }
  const ConvexFlux& flux() const noexcept { return pmap_.flux(); }
  double horizon() const noexcept { return pmap_.horizon(); }
  const PMap& pmap() const noexcept { return pmap_; }
  const Partition& partition() const noexcept { return partition_; }
  const InverseSettings& settings() const noexcept { return settings_; }
  double tolerance() const noexcept { return tol_; }

  /// W(x) = offset + int_0^x w.
  PiecewisePrimitive target_potential(double offset = 0.0) const;
  /// The extremal datum, built by characteristic pullback.
  const PiecewiseProfile& extremal() const noexcept { return extremal_; }
  /// Breakpoint record of the shock at jump_x; throws ArgumentError if w is
  /// continuous there.
  const PBreak& shock(double jump_x) const;

 private:
  PMap pmap_;
  Partition partition_;
  InverseSettings settings_;
  double tol_;
  PiecewiseProfile extremal_;
};

// --- constructions ----------------------------------------------------------

/// Extremal datum: w pulled back along p on the transported part, the fan
/// g((x - y) / T) inside each shock gap, upward jumps at images of flat
/// segments.
PiecewiseProfile construct_extremal_pullback(const InverseProblem& prob);

/// Extremal datum from the space-reversed forward problem:
/// u*(x) = v(T, -x), v solving the same law with v(0, x) = w(-x).
PiecewiseProfile construct_extremal_reverse(const InverseProblem& prob);

/// Extremal datum with the shock at jump_x prolonged straight back to t = 0
/// at its Rankine-Hugoniot speed.
PiecewiseProfile construct_sharp(const InverseProblem& prob, double jump_x);

/// u* + theta (u0 - u*). Requires u0 to be a member and theta >= 0.
PiecewiseProfile cone_combination(const InverseProblem& prob, const PiecewiseProfile& u0,
                                  double theta);

struct TentFamily {
  std::vector<PiecewiseProfile> members;  ///< v_0, v_1, ..., v_N
  double jump_x = 0.0;
  double center = 0.0;      ///< y-bar
  double half_width = 0.0;  ///< eta
  double epsilon = 0.0;
};

/// N + 1 members averaging to u0 with linearly independent differences,
/// obtained by carving N disjoint tents out of a strict-inequality region of
/// the shock condition. Throws NoFaceError when u0 is the extremal datum.
TentFamily tent_family(const InverseProblem& prob, const PiecewiseProfile& u0, int count);

struct Spoiler {
  PiecewiseProfile profile;
  double height = 0.0;  ///< signed value added on ]lo, hi]
  double lo = 0.0;
  double hi = 0.0;
  double l1_norm() const noexcept { return std::abs(height) * (hi - lo); }
};

/// u0 - C 1_[p(x-), p(x-) + 1/n] with C one above the bound that forces a
/// violation of the shock inequality at jump_x.
Spoiler spoiler_negative(const InverseProblem& prob, const PiecewiseProfile& u0, double jump_x,
                         int n);

/// u0 + 1 on ]p(x) - 1/n, p(x) + 1/n[ for x on an increasing segment: breaks
/// the transported-value clause at x.
Spoiler spoiler_bump(const InverseProblem& prob, const PiecewiseProfile& u0, double x_bar, int n);

/// A point on an increasing segment with room for a bump (on the right
/// extension, one unit past the last breakpoint image).
double default_bump_site(const InverseProblem& prob);

enum class Uniqueness { kSingleton, kFamily };
const char* to_string(Uniqueness u);

/// The attaining set is a single datum iff w has no jumps.
Uniqueness uniqueness_probe(const InverseProblem& prob);

// --- membership -------------------------------------------------------------

enum class Clause {
  kTransported,    ///< CL: one-sided values of u0 at p(x) equal w(x)
  kUpperIntegral,  ///< CL: integral over [x - T f'(v), p(x+)] bounded above
  kLowerIntegral,  ///< CL: integral over [p(x-), x - T f'(v)] bounded below
  kFanBalance,     ///< CL: the two bounds saturate across the whole gap
  kDifferenceQuotient,  ///< HJ: quotients of U0 through p tend to w(x)
  kHopfLaxBound,   ///< HJ: U0(y) + T f*((x - y) / T) >= W(x) in the gap
  kHopfLaxEquality,  ///< HJ: equality at p(x-) and p(x+)
  kAnchor,         ///< HJ: U0(p(x)) + T f*((x - p(x)) / T) = W(x) on X_i
};

const char* to_string(Clause clause);

struct PointFailure {
  Clause clause = Clause::kTransported;
  double x = 0.0;
  double measured = 0.0;
  double expected = 0.0;
  double margin = 0.0;
};

struct ShockFailure {
  Clause clause = Clause::kUpperIntegral;
  double jump_x = 0.0;
  /// v for the integral clauses, y for the Hopf-Lax clauses.
  double probe = 0.0;
  double margin = 0.0;
};

struct FanResidual {
  double jump_x = 0.0;
  double residual = 0.0;
};

struct MembershipReport {
  bool verdict = true;
  double tolerance = 0.0;
  /// Smallest margin seen over all checked clauses (>= -tolerance on pass).
  double worst_margin = 0.0;
  std::vector<PointFailure> condition_i_failures;
  std::vector<ShockFailure> condition_ii_failures;
  std::vector<FanResidual> total_fan_balance;

  /// Refuted with a margin well beyond the arithmetic noise.
  bool certified_fail(double factor = 10.0) const noexcept {
    return !verdict && worst_margin < -factor * tolerance;
  }
};

/// Decides u0 in I_T(w) through the transported-value clause on X_i and the
/// two integral inequalities at every shock.
MembershipReport membership_cl(const InverseProblem& prob, const PiecewiseProfile& u0);

/// Decides S_T U0 = W through difference quotients of U0 through p, the
/// Hopf-Lax bound inside each shock gap with equality at its ends, and an
/// anchor on every transported segment that pins the additive constant.
MembershipReport membership_hj(const InverseProblem& prob, const PiecewisePrimitive& potential,
                               const PiecewisePrimitive& target_potential);

/// Primitive of u0 whose additive constant makes S_T U0 = W, for W the
/// target potential with offset 0.
PiecewisePrimitive aligned_potential(const InverseProblem& prob, const PiecewiseProfile& u0);

}  // namespace backtrace
