#include "backtrace/oleinik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "backtrace/errors.hpp"

namespace backtrace {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSubGrid = 256;
constexpr double kQuadraticFlatTol = 1e-12;
constexpr double kSampledFlatTol = 1e-9;
constexpr double kJumpTol = 1e-12;
constexpr double kPointTol = 1e-12;

}  // namespace

const char* to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kIncreasing:
      return "increasing";
    case SegmentKind::kFlat:
      return "flat";
    case SegmentKind::kMixed:
      return "mixed";
    case SegmentKind::kDecreasing:
      return "decreasing";
  }
  return "?";
}

PMap::PMap(PiecewiseProfile w, ConvexFlux flux, double horizon)
    : w_(std::move(w)), flux_(std::move(flux)), horizon_(horizon) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ArgumentError("T must be positive");
  const auto [u_lo, u_hi] = flux_.state_range();
  if (w_.min_value() < u_lo || w_.max_value() > u_hi) {
    throw RangeError("target values leave the flux state range");
  }
  const double T = horizon_;
  const double sup_ddf = flux_.convexity_ceiling();

  auto constant_segment = [&](double x_lo, double x_hi, double k) {
    PSegment seg;
    seg.kind = SegmentKind::kIncreasing;
    seg.x_lo = x_lo;
    seg.x_hi = x_hi;
    seg.w_lo = seg.w_hi = k;
    seg.w_slope = 0.0;
    seg.p_lo = x_lo - T * flux_.df(k);
    seg.p_hi = x_hi - T * flux_.df(k);
    seg.min_slope = 1.0;
    seg.slope_bound = 1.0;
    return seg;
  };

  const auto& pieces = w_.pieces();
  if (pieces.empty()) {
    segments_.push_back(constant_segment(-kInf, kInf, w_.ext_left()));
    return;
  }

  segments_.push_back(constant_segment(-kInf, pieces.front().x_lo, w_.ext_left()));
  for (const Piece& pc : pieces) {
    PSegment seg;
    seg.x_lo = pc.x_lo;
    seg.x_hi = pc.x_hi;
    seg.w_lo = pc.start();
    seg.w_hi = pc.end();
    seg.w_slope = pc.b;
    seg.p_lo = pc.x_lo - T * flux_.df(seg.w_lo);
    seg.p_hi = pc.x_hi - T * flux_.df(seg.w_hi);
    seg.slope_bound = 1.0 + T * sup_ddf * std::abs(pc.b);
    if (flux_.is_quadratic()) {
      const double s = 1.0 - T * flux_.ddf(0.0) * pc.b;
      seg.min_slope = s;
      if (s < -kQuadraticFlatTol) {
        seg.kind = SegmentKind::kDecreasing;
      } else if (s <= kQuadraticFlatTol) {
        seg.kind = SegmentKind::kFlat;
      } else {
        seg.kind = SegmentKind::kIncreasing;
      }
    } else {
      double lo = kInf;
      double hi = -kInf;
      for (int j = 0; j < kSubGrid; ++j) {
        const double x = pc.x_lo + pc.length() * j / (kSubGrid - 1);
        const double s = 1.0 - T * flux_.ddf(pc.at(x)) * pc.b;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      seg.min_slope = lo;
      if (lo < -kSampledFlatTol) {
        seg.kind = SegmentKind::kDecreasing;
      } else if (hi <= kSampledFlatTol) {
        seg.kind = SegmentKind::kFlat;
      } else if (lo > kSampledFlatTol) {
        seg.kind = SegmentKind::kIncreasing;
      } else {
        seg.kind = SegmentKind::kMixed;
      }
    }
    segments_.push_back(seg);
  }
  segments_.push_back(constant_segment(pieces.back().x_hi, kInf, w_.ext_right()));

  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    const PSegment& a = segments_[k];
    const PSegment& b = segments_[k + 1];
    PBreak br;
    br.x = a.x_hi;
    br.w_left = a.w_hi;
    br.w_right = b.w_lo;
    br.jump = std::abs(br.w_left - br.w_right) > kJumpTol * std::max(1.0, std::abs(br.w_left));
    br.p_left = br.x - T * flux_.df(br.w_left);
    br.p_right = br.jump ? br.x - T * flux_.df(br.w_right) : br.p_left;
    br.smooth = !br.jump && std::abs(a.w_slope - b.w_slope) <=
                                kJumpTol * std::max(1.0, std::abs(a.w_slope));
    breaks_.push_back(br);
  }
}

double PMap::left(double x) const { return x - horizon_ * flux_.df(w_.left(x)); }
double PMap::right(double x) const { return x - horizon_ * flux_.df(w_.right(x)); }

std::vector<PBreak> PMap::jumps() const {
  std::vector<PBreak> out;
  for (const PBreak& br : breaks_) {
    if (br.jump) out.push_back(br);
  }
  return out;
}

double PMap::invert(const PSegment& seg, double y) const {
  if (seg.kind == SegmentKind::kFlat || seg.kind == SegmentKind::kDecreasing) {
    throw ArgumentError("p is not invertible on a flat or decreasing segment");
  }
  if (seg.w_slope == 0.0) return y + horizon_ * flux_.df(seg.w_lo);
  if (flux_.is_quadratic()) return seg.x_lo + (y - seg.p_lo) / seg.min_slope;
  double lo = seg.x_lo;
  double hi = seg.x_hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (left(mid) < y) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

PMap build_pmap(const PiecewiseProfile& w, const ConvexFlux& flux, double horizon) {
  return PMap(w, flux, horizon);
}

OleinikVerdict check_oleinik(const PMap& pmap) {
  OleinikVerdict verdict;
  auto record = [&](double x, double y) {
    const double margin = pmap(x) - pmap(x + y);
    if (margin > 0.0 && (!verdict.witness || margin > verdict.witness->margin)) {
      verdict.witness = OleinikWitness{x, y, margin};
    }
    verdict.admissible = false;
  };

  for (const PSegment& seg : pmap.segments()) {
    if (seg.kind != SegmentKind::kDecreasing) continue;
    const double len = seg.x_hi - seg.x_lo;
    if (pmap.flux().is_quadratic()) {
      record(seg.x_lo + 0.25 * len, 0.5 * len);
      continue;
    }
    // Centre the pair on the most negative sampled slope.
    double worst_x = seg.x_lo;
    double worst = kInf;
    const double T = pmap.horizon();
    for (int j = 0; j < kSubGrid; ++j) {
      const double x = seg.x_lo + len * j / (kSubGrid - 1);
      const double s = 1.0 - T * pmap.flux().ddf(pmap.source().left(x)) * seg.w_slope;
      if (s < worst) {
        worst = s;
        worst_x = x;
      }
    }
    double h = 0.25 * len;
    for (int it = 0; it < 60; ++it, h *= 0.5) {
      const double x = std::clamp(worst_x - h, seg.x_lo + 1e-3 * h, seg.x_hi - 2.0 * h);
      if (pmap(x) > pmap(x + 2.0 * h)) {
        record(x, 2.0 * h);
        break;
      }
    }
    verdict.admissible = false;
  }

  const auto& segs = pmap.segments();
  for (std::size_t k = 0; k < pmap.breaks().size(); ++k) {
    const PBreak& br = pmap.breaks()[k];
    if (!br.jump || br.p_right >= br.p_left) continue;
    const PSegment& next = segs[k + 1];
    double y = std::isfinite(next.x_hi) ? 0.5 * (next.x_hi - next.x_lo) : 1.0;
    for (int it = 0; it < 80; ++it, y *= 0.5) {
      if (pmap(br.x + y) < pmap(br.x)) {
        record(br.x, y);
        break;
      }
    }
    verdict.admissible = false;
  }
  return verdict;
}

double Partition::covered_length(double a, double b) const {
  double sum = 0.0;
  auto clip = [&](double lo, double hi) {
    const double l = std::max(lo, a);
    const double h = std::min(hi, b);
    return h > l ? h - l : 0.0;
  };
  for (const Interval& iv : xi) sum += clip(iv.lo, iv.hi);
  for (const ShockGap& gap : xii) sum += clip(gap.lo, gap.hi);
  return sum;
}

Partition partition(const PMap& pmap) {
  const OleinikVerdict verdict = check_oleinik(pmap);
  if (!verdict) {
    const OleinikWitness wit = verdict.witness.value_or(OleinikWitness{});
    std::ostringstream msg;
    msg.precision(17);
    msg << "target violates the Oleinik bound: p(" << wit.x << ") > p(" << wit.x + wit.shift
        << ") by " << wit.margin;
    throw AdmissibilityError(msg.str(), wit.x, wit.shift, wit.margin);
  }

  Partition out;
  const auto& segs = pmap.segments();
  const auto& breaks = pmap.breaks();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const PSegment& seg = segs[k];
    if (seg.kind == SegmentKind::kFlat) {
      out.exceptional.push_back(seg.p_lo);
      continue;
    }
    const bool continues = !out.xi.empty() && k > 0 && !breaks[k - 1].jump &&
                           segs[k - 1].kind != SegmentKind::kFlat;
    if (continues) {
      out.xi.back().hi = seg.p_hi;
    } else {
      out.xi.push_back({seg.p_lo, seg.p_hi});
    }
  }
  for (const PBreak& br : breaks) {
    if (br.jump) {
      out.xii.push_back({br.x, br.p_left, br.p_right});
      out.exceptional.push_back(br.p_left);
      out.exceptional.push_back(br.p_right);
    } else if (!br.smooth) {
      out.exceptional.push_back(br.p_left);
    }
  }
  std::sort(out.exceptional.begin(), out.exceptional.end());
  std::vector<double> unique_points;
  for (double y : out.exceptional) {
    if (unique_points.empty() || y - unique_points.back() > kPointTol * std::max(1.0, std::abs(y))) {
      unique_points.push_back(y);
    }
  }
  out.exceptional = std::move(unique_points);
  return out;
}

}  // namespace backtrace
