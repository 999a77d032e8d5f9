#include "backtrace/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "backtrace/errors.hpp"
#include "backtrace/laxhopf.hpp"

namespace backtrace {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool transports(const PSegment& seg) {
  return seg.kind == SegmentKind::kIncreasing || seg.kind == SegmentKind::kMixed;
}

// Breakpoint span of a datum, or {0, 0} for a constant.
std::pair<double, double> span_of(const PiecewiseProfile& u) {
  if (u.empty()) return {0.0, 0.0};
  return {u.front(), u.back()};
}

// Bounded y-range on which a segment image is probed. Infinite ends are cut
// one unit past every breakpoint of u0 and of the finite end.
std::pair<double, double> probe_range(const PSegment& seg, const PiecewiseProfile& u0) {
  auto [b0, bn] = span_of(u0);
  double lo = seg.p_lo;
  double hi = seg.p_hi;
  if (!std::isfinite(lo) && !std::isfinite(hi)) return {b0 - 1.0, bn + 1.0};
  if (!std::isfinite(lo)) lo = std::min(b0, hi) - 1.0;
  if (!std::isfinite(hi)) hi = std::max(bn, lo) + 1.0;
  return {lo, hi};
}

struct Probe {
  double x;
  double y;
  const PSegment* seg;
};

// Points of X_i where the transported values are checked: evenly spaced
// interior samples of each segment image plus every breakpoint of u0 that
// falls strictly inside one.
std::vector<Probe> transport_probes(const InverseProblem& prob, const PiecewiseProfile& u0) {
  const PMap& pmap = prob.pmap();
  const int n = std::max(1, prob.settings().segment_samples);
  const std::vector<double> u_breaks = u0.breakpoints();
  std::vector<Probe> out;
  for (const PSegment& seg : pmap.segments()) {
    if (!transports(seg)) continue;
    auto [lo, hi] = probe_range(seg, u0);
    if (!(hi > lo)) continue;
    for (int j = 0; j < n; ++j) {
      const double y = lo + (hi - lo) * (j + 0.5) / n;
      out.push_back({pmap.invert(seg, y), y, &seg});
    }
    for (double y : u_breaks) {
      if (y > seg.p_lo && y < seg.p_hi) out.push_back({pmap.invert(seg, y), y, &seg});
    }
  }
  return out;
}

std::vector<double> chebyshev_states(double lo, double hi, int count) {
  count = std::max(count, 2);
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * j / (count - 1)));
    v[static_cast<std::size_t>(j)] = lo + (hi - lo) * s;
  }
  v.front() = lo;
  v.back() = hi;
  return v;
}

void note_margin(MembershipReport& r, double margin) {
  r.worst_margin = std::min(r.worst_margin, margin);
  if (margin < -r.tolerance) r.verdict = false;
}

// Appends samples of y -> value(y) on [cursor, hi] as linear pieces.
template <typename Fn>
void add_sampled(ProfileBuilder& b, double hi, double dx, Fn value) {
  const double lo = b.position();
  if (!(hi > lo)) return;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / dx)));
  double prev = value(lo);
  for (int j = 1; j <= n; ++j) {
    const double y = j == n ? hi : lo + (hi - lo) * j / n;
    const double v = value(y);
    b.add_linear(y, prev, v);
    prev = v;
  }
}

}  // namespace

InverseProblem::InverseProblem(PiecewiseProfile target, ConvexFlux flux, double horizon,
                               InverseSettings settings)
    : pmap_(std::move(target), std::move(flux), horizon),
      partition_(backtrace::partition(pmap_)),
      settings_(settings) {
  tol_ = settings_.membership_tol.value_or(pmap_.flux().is_quadratic() ? 1e-8 : 1e-5);
  if (!(tol_ > 0.0)) throw ArgumentError("membership tolerance must be positive");
  if (!(settings_.dx_out > 0.0)) throw ArgumentError("dx_out must be positive");
  extremal_ = construct_extremal_pullback(*this);
}

PiecewisePrimitive InverseProblem::target_potential(double offset) const {
  return primitive(target(), 0.0, offset);
}

const PBreak& InverseProblem::shock(double jump_x) const {
  for (const PBreak& br : pmap_.breaks()) {
    if (br.jump && std::abs(br.x - jump_x) <= 1e-9 * std::max(1.0, std::abs(jump_x))) return br;
  }
  std::ostringstream msg;
  msg << "target has no shock at x = " << jump_x;
  throw ArgumentError(msg.str());
}

PiecewiseProfile construct_extremal_pullback(const InverseProblem& prob) {
  const PMap& pmap = prob.pmap();
  const PiecewiseProfile& w = prob.target();
  if (pmap.breaks().empty()) return w;

  const ConvexFlux& flux = prob.flux();
  const double T = prob.horizon();
  const double dx = prob.settings().dx_out;
  const bool exact = flux.is_quadratic();
  const auto& segs = pmap.segments();
  const auto& breaks = pmap.breaks();

  ProfileBuilder b(breaks.front().p_left);
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    const PBreak& br = breaks[k];
    if (br.jump) {
      if (exact) {
        b.add_linear(br.p_right, br.w_left, br.w_right);
      } else {
        add_sampled(b, br.p_right, dx, [&](double y) { return flux.g((br.x - y) / T); });
      }
    }
    if (k + 1 >= segs.size() - 1) break;
    const PSegment& seg = segs[k + 1];
    if (!transports(seg)) continue;  // flat: the image is a single point
    if (exact || seg.w_slope == 0.0) {
      b.add_linear(seg.p_hi, seg.w_lo, seg.w_hi);
    } else {
      add_sampled(b, seg.p_hi, dx, [&](double y) {
        const double x = pmap.invert(seg, std::clamp(y, seg.p_lo, seg.p_hi));
        return w.left(std::clamp(x, seg.x_lo, seg.x_hi));
      });
    }
  }
  return std::move(b).finish(w.ext_left(), w.ext_right()).simplified();
}

PiecewiseProfile construct_extremal_reverse(const InverseProblem& prob) {
  const PiecewiseProfile mirrored = prob.target().reflect();
  auto [lo, hi] = wave_window(mirrored, prob.flux(), prob.horizon(), 1.0);
  LaxHopfSolver solver(mirrored, prob.flux());
  return solver.evolve_profile(prob.horizon(), lo, hi, prob.settings().dx_out)
      .reflect()
      .simplified();
}

PiecewiseProfile construct_sharp(const InverseProblem& prob, double jump_x) {
  const PBreak& br = prob.shock(jump_x);
  const ConvexFlux& flux = prob.flux();
  const double speed = (flux.f(br.w_right) - flux.f(br.w_left)) / (br.w_right - br.w_left);
  const double x_sharp = br.x - speed * prob.horizon();
  PiecewiseProfile inner({{br.p_left, x_sharp, br.w_left, 0.0}, {x_sharp, br.p_right, br.w_right, 0.0}},
                         br.w_left, br.w_right);
  return prob.extremal().splice(br.p_left, br.p_right, inner).simplified();
}

PiecewiseProfile cone_combination(const InverseProblem& prob, const PiecewiseProfile& u0,
                                  double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw ArgumentError("cone coefficient theta must be finite and nonnegative");
  }
  if (!membership_cl(prob, u0).verdict) {
    throw PreconditionError("cone combination requires a datum that attains the target");
  }
  return linear_combination(1.0 - theta, prob.extremal(), theta, u0).simplified();
}

TentFamily tent_family(const InverseProblem& prob, const PiecewiseProfile& u0, int count) {
  if (count < 1) throw ArgumentError("tent family needs at least one tent");
  if (!membership_cl(prob, u0).verdict) {
    throw PreconditionError("tent family requires a datum that attains the target");
  }
  const ConvexFlux& flux = prob.flux();
  const double T = prob.horizon();
  const std::vector<double> u_breaks = u0.breakpoints();

  struct Best {
    const PBreak* br = nullptr;
    double y = 0.0;
    double margin = -kInf;
  } best;

  const std::vector<PBreak> jumps = prob.pmap().jumps();
  for (const PBreak& br : jumps) {
    const PiecewisePrimitive U = primitive(u0, br.p_left);
    const double base = T * flux.legendre((br.x - br.p_left) / T);
    auto margin = [&](double y) { return U(y) + T * flux.legendre((br.x - y) / T) - base; };
    const double len = br.p_right - br.p_left;
    constexpr int kGrid = 2048;
    auto consider = [&](double y) {
      const double m = margin(y);
      if (m > best.margin) best = {&br, y, m};
    };
    for (int i = 1; i < kGrid; ++i) consider(br.p_left + len * i / kGrid);
    for (double y : u_breaks) {
      if (y > br.p_left && y < br.p_right) consider(y);
    }
  }
  if (best.br == nullptr || best.margin <= 10.0 * prob.tolerance()) {
    throw NoFaceError(
        "datum is the extremal point of the attaining set: no strict slack inside any shock gap");
  }

  const PBreak& br = *best.br;
  const PiecewisePrimitive U = primitive(u0, br.p_left);
  const double base = T * flux.legendre((br.x - br.p_left) / T);
  auto margin = [&](double y) { return U(y) + T * flux.legendre((br.x - y) / T) - base; };
  const double eps = 0.5 * best.margin;

  // Largest interval around the peak on which the margin stays above eps.
  const double len = br.p_right - br.p_left;
  const double step = len / 4096.0;
  auto edge = [&](double dir) {
    double inside = best.y;
    double outside = best.y;
    while (true) {
      const double next = inside + dir * step;
      if (next <= br.p_left || next >= br.p_right) {
        outside = dir < 0 ? br.p_left : br.p_right;
        break;
      }
      if (margin(next) < eps) {
        outside = next;
        break;
      }
      inside = next;
    }
    for (int it = 0; it < 100 && std::abs(outside - inside) > 1e-15 * std::max(1.0, std::abs(inside));
         ++it) {
      const double mid = 0.5 * (inside + outside);
      if (margin(mid) >= eps) inside = mid; else outside = mid;
    }
    return inside;
  };
  const double a = edge(-1.0);
  const double b = edge(+1.0);
  double center = 0.5 * (a + b);
  double eta = 0.999 * 0.5 * (b - a);

  auto holds = [&](double c, double h) {
    constexpr int kCheck = 512;
    for (int i = 0; i <= kCheck; ++i) {
      if (margin(c - h + 2.0 * h * i / kCheck) < eps * (1.0 - 1e-9)) return false;
    }
    return true;
  };
  for (int attempt = 0; attempt < 60 && !holds(center, eta); ++attempt) {
    center = best.y;
    eta = 0.5 * std::min({eta, best.y - a, b - best.y});
  }
  if (!(eta > 0.0)) throw NoFaceError("no room for a tent inside the shock gap");

  TentFamily fam;
  fam.jump_x = br.x;
  fam.center = center;
  fam.half_width = eta;
  fam.epsilon = eps;

  const double half = eta / count;
  const double slope = eps / half;
  std::vector<PiecewiseProfile> tents;
  tents.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    const double yk = center + (eta / count) * (2.0 * k - 1.0 - count);
    tents.emplace_back(std::vector<Piece>{{yk - half, yk, slope, 0.0}, {yk, yk + half, -slope, 0.0}},
                       0.0, 0.0);
  }
  // A_k' is the derivative of the tent; V_k = U0 - A_k.
  PiecewiseProfile v0 = u0;
  for (const PiecewiseProfile& t : tents) v0 = v0 + t;
  fam.members.push_back(v0.simplified());
  for (const PiecewiseProfile& t : tents) fam.members.push_back((u0 - t).simplified());
  return fam;
}

Spoiler spoiler_negative(const InverseProblem& prob, const PiecewiseProfile& u0, double jump_x,
                         int n) {
  if (n < 1) throw ArgumentError("spoiler index n must be >= 1");
  const PBreak& br = prob.shock(jump_x);
  const double c = u0.sup_norm() - br.w_left + 1.0;
  Spoiler s;
  s.lo = br.p_left;
  s.hi = br.p_left + 1.0 / n;
  s.height = -c;
  s.profile = u0.add_indicator(s.lo, s.hi, s.height);
  return s;
}

Spoiler spoiler_bump(const InverseProblem& prob, const PiecewiseProfile& u0, double x_bar, int n) {
  if (n < 1) throw ArgumentError("spoiler index n must be >= 1");
  const PMap& pmap = prob.pmap();
  const PSegment* home = nullptr;
  for (const PSegment& seg : pmap.segments()) {
    if (x_bar > seg.x_lo && x_bar < seg.x_hi) home = &seg;
  }
  if (home == nullptr || !transports(*home)) {
    std::ostringstream msg;
    msg << "x = " << x_bar << " is not interior to an increasing segment of p";
    throw ArgumentError(msg.str());
  }
  const double y = pmap(x_bar);
  Spoiler s;
  s.lo = y - 1.0 / n;
  s.hi = y + 1.0 / n;
  s.height = 1.0;
  s.profile = u0.add_indicator(s.lo, s.hi, s.height);
  return s;
}

double default_bump_site(const InverseProblem& prob) {
  const PSegment& last = prob.pmap().segments().back();
  return std::isfinite(last.x_lo) ? last.x_lo + 1.0 : 0.0;
}

const char* to_string(Uniqueness u) {
  return u == Uniqueness::kSingleton ? "singleton" : "family";
}

Uniqueness uniqueness_probe(const InverseProblem& prob) {
  return prob.pmap().jumps().empty() ? Uniqueness::kSingleton : Uniqueness::kFamily;
}

const char* to_string(Clause clause) {
  switch (clause) {
    case Clause::kTransported: return "transported";
    case Clause::kUpperIntegral: return "upper_integral";
    case Clause::kLowerIntegral: return "lower_integral";
    case Clause::kFanBalance: return "fan_balance";
    case Clause::kDifferenceQuotient: return "difference_quotient";
    case Clause::kHopfLaxBound: return "hopf_lax_bound";
    case Clause::kHopfLaxEquality: return "hopf_lax_equality";
    case Clause::kAnchor: return "anchor";
  }
  return "unknown";
}

MembershipReport membership_cl(const InverseProblem& prob, const PiecewiseProfile& u0) {
  MembershipReport r;
  r.tolerance = prob.tolerance();
  const ConvexFlux& flux = prob.flux();
  const double T = prob.horizon();
  const PiecewiseProfile& w = prob.target();

  for (const Probe& pr : transport_probes(prob, u0)) {
    const double expected = w.left(pr.x);
    const double l = u0.left(pr.y);
    const double rv = u0.right(pr.y);
    const double measured = std::abs(l - expected) >= std::abs(rv - expected) ? l : rv;
    const double margin = -std::abs(measured - expected);
    note_margin(r, margin);
    if (margin < -r.tolerance) {
      r.condition_i_failures.push_back({Clause::kTransported, pr.x, measured, expected, margin});
    }
  }

  for (const PBreak& br : prob.pmap().jumps()) {
    const double cs_left = flux.conjugate_at_state(br.w_left);
    const double cs_right = flux.conjugate_at_state(br.w_right);
    for (double v : chebyshev_states(br.w_right, br.w_left, prob.settings().shock_samples)) {
      const double yv = br.x - T * flux.df(v);
      const double cs_v = flux.conjugate_at_state(v);
      const double upper = (cs_v - cs_right) - u0.integrate(yv, br.p_right) / T;
      const double lower = u0.integrate(br.p_left, yv) / T - (cs_left - cs_v);
      note_margin(r, upper);
      note_margin(r, lower);
      if (upper < -r.tolerance) {
        r.condition_ii_failures.push_back({Clause::kUpperIntegral, br.x, v, upper});
      }
      if (lower < -r.tolerance) {
        r.condition_ii_failures.push_back({Clause::kLowerIntegral, br.x, v, lower});
      }
    }
    const double residual =
        u0.integrate(br.p_left, br.p_right) / T - (cs_left - cs_right);
    r.total_fan_balance.push_back({br.x, residual});
    note_margin(r, -std::abs(residual));
    if (std::abs(residual) > r.tolerance) {
      r.condition_ii_failures.push_back({Clause::kFanBalance, br.x, br.w_right, -std::abs(residual)});
    }
  }
  return r;
}

MembershipReport membership_hj(const InverseProblem& prob, const PiecewisePrimitive& potential,
                               const PiecewisePrimitive& target_potential) {
  MembershipReport r;
  r.tolerance = prob.tolerance();
  const ConvexFlux& flux = prob.flux();
  const double T = prob.horizon();
  const PiecewiseProfile& w = prob.target();
  const PiecewiseProfile& u0 = potential.derivative();
  const std::vector<double> u_breaks = u0.breakpoints();

  // Distance from y to the nearest breakpoint of U0 other than y itself.
  auto clearance = [&](double y) {
    double d = kInf;
    auto it = std::lower_bound(u_breaks.begin(), u_breaks.end(), y);
    if (it != u_breaks.end()) {
      if (*it > y) d = std::min(d, *it - y);
      else if (std::next(it) != u_breaks.end()) d = std::min(d, *std::next(it) - y);
    }
    if (it != u_breaks.begin()) d = std::min(d, y - *std::prev(it));
    return d;
  };
  // Two-step extrapolated one-sided quotient; exact when U0 is quadratic on
  // the stencil.
  auto quotient = [&](double y, double h) {
    const double q1 = (potential(y + h) - potential(y)) / h;
    const double q2 = (potential(y + 2.0 * h) - potential(y)) / (2.0 * h);
    return 2.0 * q1 - q2;
  };

  const PSegment* anchored = nullptr;
  for (const Probe& pr : transport_probes(prob, u0)) {
    const double room = std::min({pr.y - pr.seg->p_lo, pr.seg->p_hi - pr.y, clearance(pr.y)});
    const double h = std::min(1e-5 * std::max(1.0, std::abs(pr.y)), 0.25 * room);
    const double expected = w.left(pr.x);
    const double qr = quotient(pr.y, h);
    const double ql = quotient(pr.y, -h);
    const double measured = std::abs(ql - expected) >= std::abs(qr - expected) ? ql : qr;
    const double margin = -std::abs(measured - expected);
    note_margin(r, margin);
    if (margin < -r.tolerance) {
      r.condition_i_failures.push_back({Clause::kDifferenceQuotient, pr.x, measured, expected, margin});
    }
    if (pr.seg != anchored) {
      anchored = pr.seg;
      const double value = potential(pr.y) + T * flux.legendre((pr.x - pr.y) / T);
      const double target = target_potential(pr.x);
      const double am = -std::abs(value - target);
      note_margin(r, am);
      if (am < -r.tolerance) {
        r.condition_i_failures.push_back({Clause::kAnchor, pr.x, value, target, am});
      }
    }
  }

  for (const PBreak& br : prob.pmap().jumps()) {
    const double target = target_potential(br.x);
    auto hopf_lax = [&](double y) { return potential(y) + T * flux.legendre((br.x - y) / T); };
    for (double y : {br.p_left, br.p_right}) {
      const double m = -std::abs(hopf_lax(y) - target);
      note_margin(r, m);
      if (m < -r.tolerance) r.condition_ii_failures.push_back({Clause::kHopfLaxEquality, br.x, y, m});
    }
    std::vector<double> ys;
    for (double v : chebyshev_states(br.w_right, br.w_left, prob.settings().shock_samples)) {
      ys.push_back(br.x - T * flux.df(v));
    }
    for (double y : u_breaks) {
      if (y > br.p_left && y < br.p_right) ys.push_back(y);
    }
    for (double y : ys) {
      const double m = hopf_lax(y) - target;
      note_margin(r, m);
      if (m < -r.tolerance) r.condition_ii_failures.push_back({Clause::kHopfLaxBound, br.x, y, m});
    }
  }
  return r;
}

PiecewisePrimitive aligned_potential(const InverseProblem& prob, const PiecewiseProfile& u0) {
  const PSegment& first = prob.pmap().segments().front();
  const double x = std::isfinite(first.x_hi) ? first.x_hi - 1.0 : 0.0;
  const double y = prob.pmap()(x);
  const PiecewisePrimitive raw = primitive(u0, 0.0);
  const double hl = raw(y) + prob.horizon() * prob.flux().legendre((x - y) / prob.horizon());
  return raw.with_offset(prob.target_potential()(x) - hl);
}

}  // namespace backtrace
