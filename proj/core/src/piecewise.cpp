#include "backtrace/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "backtrace/errors.hpp"

namespace backtrace {
namespace {

// Sorted, de-duplicated breakpoints of both profiles inside ]a, b[, framed by
// a and b.
std::vector<double> merged_nodes(const PiecewiseProfile& pa, const PiecewiseProfile& pb, double a,
                                 double b) {
  std::vector<double> nodes{a, b};
  for (const auto* p : {&pa, &pb}) {
    for (double x : p->breakpoints()) {
      if (x > a && x < b) nodes.push_back(x);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

double abs_linear_integral(double len, double v0, double v1) {
  if ((v0 >= 0.0 && v1 >= 0.0) || (v0 <= 0.0 && v1 <= 0.0)) {
    return 0.5 * len * std::abs(v0 + v1);
  }
  const double r = v0 / (v0 - v1);
  return 0.5 * len * (r * std::abs(v0) + (1.0 - r) * std::abs(v1));
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseProfile

PiecewiseProfile::PiecewiseProfile(double constant) : ext_left_(constant), ext_right_(constant) {
  if (!std::isfinite(constant)) throw ArgumentError("profile values must be finite");
}

PiecewiseProfile::PiecewiseProfile(std::vector<Piece> pieces, double ext_left, double ext_right)
    : pieces_(std::move(pieces)), ext_left_(ext_left), ext_right_(ext_right) {
  if (!std::isfinite(ext_left_) || !std::isfinite(ext_right_)) {
    throw ArgumentError("profile extensions must be finite");
  }
  if (pieces_.empty() && ext_left_ != ext_right_) {
    throw ArgumentError("a profile without pieces must be constant");
  }
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const Piece& pc = pieces_[k];
    if (!std::isfinite(pc.x_lo) || !std::isfinite(pc.x_hi) || !std::isfinite(pc.a) ||
        !std::isfinite(pc.b)) {
      throw ArgumentError("piece " + std::to_string(k) + " has non-finite data");
    }
    if (!(pc.x_lo < pc.x_hi)) {
      throw ArgumentError("piece " + std::to_string(k) + " has x_lo >= x_hi");
    }
    if (k > 0 && pieces_[k - 1].x_hi != pc.x_lo) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "pieces " << k - 1 << " and " << k << " are not contiguous (" << pieces_[k - 1].x_hi
          << " != " << pc.x_lo << ")";
      throw ArgumentError(msg.str());
    }
  }
}

PiecewiseProfile PiecewiseProfile::step(double at, double left, double right) {
  if (left == right) return PiecewiseProfile(left);
  // One unit-length piece on each side keeps the jump at a breakpoint.
  return PiecewiseProfile({{at - 1.0, at, left, 0.0}, {at, at + 1.0, right, 0.0}}, left, right);
}

PiecewiseProfile PiecewiseProfile::interpolate(std::span<const double> xs,
                                               std::span<const double> values) {
  if (xs.size() != values.size() || xs.empty()) {
    throw ArgumentError("interpolate needs matching, non-empty node arrays");
  }
  if (xs.size() == 1) return PiecewiseProfile(values[0]);
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double len = xs[i + 1] - xs[i];
    pieces.push_back({xs[i], xs[i + 1], values[i], (values[i + 1] - values[i]) / len});
  }
  return PiecewiseProfile(std::move(pieces), values.front(), values.back());
}

std::vector<double> PiecewiseProfile::breakpoints() const {
  std::vector<double> xs;
  if (pieces_.empty()) return xs;
  xs.reserve(pieces_.size() + 1);
  for (const Piece& pc : pieces_) xs.push_back(pc.x_lo);
  xs.push_back(pieces_.back().x_hi);
  return xs;
}

double PiecewiseProfile::front() const {
  if (pieces_.empty()) throw ArgumentError("constant profile has no breakpoints");
  return pieces_.front().x_lo;
}

double PiecewiseProfile::back() const {
  if (pieces_.empty()) throw ArgumentError("constant profile has no breakpoints");
  return pieces_.back().x_hi;
}

std::size_t PiecewiseProfile::locate_left(double x) const {
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x,
                             [](const Piece& pc, double v) { return pc.x_hi < v; });
  return static_cast<std::size_t>(it - pieces_.begin());
}

std::size_t PiecewiseProfile::locate_right(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Piece& pc) { return v < pc.x_hi; });
  return static_cast<std::size_t>(it - pieces_.begin());
}

double PiecewiseProfile::left(double x) const {
  if (pieces_.empty() || x <= pieces_.front().x_lo) return ext_left_;
  if (x > pieces_.back().x_hi) return ext_right_;
  return pieces_[locate_left(x)].at(x);
}

double PiecewiseProfile::right(double x) const {
  if (pieces_.empty() || x < pieces_.front().x_lo) return ext_left_;
  if (x >= pieces_.back().x_hi) return ext_right_;
  return pieces_[locate_right(x)].at(x);
}

std::optional<double> PiecewiseProfile::precise(double x) const {
  const double l = left(x);
  const double r = right(x);
  if (l == r) return l;
  return std::nullopt;
}

std::optional<double> PiecewiseProfile::eval(double x, Side side) const {
  switch (side) {
    case Side::kLeft:
      return left(x);
    case Side::kRight:
      return right(x);
    case Side::kPrecise:
      return precise(x);
  }
  return std::nullopt;
}

double PiecewiseProfile::slope(double x) const {
  if (pieces_.empty() || x <= pieces_.front().x_lo || x > pieces_.back().x_hi) return 0.0;
  return pieces_[locate_left(x)].b;
}

double PiecewiseProfile::integrate(double a, double b) const {
  if (a > b) return -integrate(b, a);
  if (pieces_.empty()) return ext_left_ * (b - a);
  const double x0 = pieces_.front().x_lo;
  const double xn = pieces_.back().x_hi;
  double sum = 0.0;
  if (a < x0) sum += ext_left_ * (std::min(b, x0) - a);
  if (b > xn) sum += ext_right_ * (b - std::max(a, xn));
  const double lo = std::max(a, x0);
  const double hi = std::min(b, xn);
  if (lo < hi) {
    for (std::size_t k = locate_right(lo); k < pieces_.size() && pieces_[k].x_lo < hi; ++k) {
      const Piece& pc = pieces_[k];
      const double l = std::max(lo, pc.x_lo);
      const double h = std::min(hi, pc.x_hi);
      if (h > l) sum += (h - l) * (pc.a + pc.b * (0.5 * (h + l) - pc.x_lo));
    }
  }
  return sum;
}

double PiecewiseProfile::min_value() const {
  double m = std::min(ext_left_, ext_right_);
  for (const Piece& pc : pieces_) m = std::min({m, pc.start(), pc.end()});
  return m;
}

double PiecewiseProfile::max_value() const {
  double m = std::max(ext_left_, ext_right_);
  for (const Piece& pc : pieces_) m = std::max({m, pc.start(), pc.end()});
  return m;
}

double PiecewiseProfile::sup_norm() const {
  return std::max(std::abs(min_value()), std::abs(max_value()));
}

double PiecewiseProfile::total_variation() const {
  if (pieces_.empty()) return 0.0;
  double tv = std::abs(pieces_.front().start() - ext_left_);
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    tv += std::abs(pieces_[k].b) * pieces_[k].length();
    const double next = k + 1 < pieces_.size() ? pieces_[k + 1].start() : ext_right_;
    tv += std::abs(next - pieces_[k].end());
  }
  return tv;
}

std::vector<Jump> PiecewiseProfile::jumps(double tol) const {
  std::vector<Jump> out;
  for (double x : breakpoints()) {
    const double l = left(x);
    const double r = right(x);
    if (std::abs(l - r) > tol) out.push_back({x, l, r});
  }
  return out;
}

PiecewiseProfile PiecewiseProfile::reflect() const {
  std::vector<Piece> out;
  out.reserve(pieces_.size());
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    out.push_back({-it->x_hi, -it->x_lo, it->end(), -it->b});
  }
  return PiecewiseProfile(std::move(out), ext_right_, ext_left_);
}

PiecewiseProfile PiecewiseProfile::add_indicator(double lo, double hi, double height) const {
  if (!(lo < hi)) throw ArgumentError("indicator needs lo < hi");
  return *this + PiecewiseProfile({{lo, hi, height, 0.0}}, 0.0, 0.0);
}

std::vector<Piece> PiecewiseProfile::restrict(double lo, double hi) const {
  std::vector<Piece> out;
  if (!(lo < hi)) return out;
  if (pieces_.empty()) {
    out.push_back({lo, hi, ext_left_, 0.0});
    return out;
  }
  const double x0 = pieces_.front().x_lo;
  const double xn = pieces_.back().x_hi;
  if (lo < x0) out.push_back({lo, std::min(hi, x0), ext_left_, 0.0});
  const double l0 = std::max(lo, x0);
  const double h0 = std::min(hi, xn);
  if (l0 < h0) {
    for (std::size_t k = locate_right(l0); k < pieces_.size() && pieces_[k].x_lo < h0; ++k) {
      const Piece& pc = pieces_[k];
      const double l = std::max(l0, pc.x_lo);
      const double h = std::min(h0, pc.x_hi);
      if (h > l) out.push_back({l, h, pc.at(l), pc.b});
    }
  }
  if (hi > xn) out.push_back({std::max(lo, xn), hi, ext_right_, 0.0});
  return out;
}

PiecewiseProfile PiecewiseProfile::splice(double lo, double hi,
                                          const PiecewiseProfile& inner) const {
  if (!(lo < hi)) throw ArgumentError("splice needs lo < hi");
  const double first = pieces_.empty() ? lo : std::min(lo, pieces_.front().x_lo);
  const double last = pieces_.empty() ? hi : std::max(hi, pieces_.back().x_hi);
  std::vector<Piece> out = restrict(first, lo);
  for (const Piece& pc : inner.restrict(lo, hi)) out.push_back(pc);
  for (const Piece& pc : restrict(hi, last)) out.push_back(pc);
  return PiecewiseProfile(std::move(out), ext_left_, ext_right_);
}

PiecewiseProfile PiecewiseProfile::simplified(double tol) const {
  std::vector<Piece> merged;
  for (const Piece& pc : pieces_) {
    if (!merged.empty()) {
      Piece& last = merged.back();
      const double scale = std::max({1.0, std::abs(last.end()), std::abs(pc.a)});
      if (std::abs(last.end() - pc.a) <= tol * scale &&
          std::abs(last.b - pc.b) <= tol * std::max(1.0, std::abs(pc.b))) {
        last.x_hi = pc.x_hi;
        continue;
      }
    }
    merged.push_back(pc);
  }
  auto is_const = [tol](const Piece& pc, double v) {
    return std::abs(pc.b) * pc.length() <= tol * std::max(1.0, std::abs(v)) &&
           std::abs(pc.a - v) <= tol * std::max(1.0, std::abs(v));
  };
  std::size_t first = 0;
  while (first < merged.size() && is_const(merged[first], ext_left_)) ++first;
  std::size_t last = merged.size();
  while (last > first && is_const(merged[last - 1], ext_right_)) --last;
  std::vector<Piece> kept(merged.begin() + static_cast<std::ptrdiff_t>(first),
                          merged.begin() + static_cast<std::ptrdiff_t>(last));
  if (kept.empty() && ext_left_ != ext_right_) {
    // Keep the jump location when the whole body collapsed.
    if (!merged.empty()) {
      const double at = first > 0 ? merged[first - 1].x_hi : merged.front().x_lo;
      return step(at, ext_left_, ext_right_);
    }
  }
  return PiecewiseProfile(std::move(kept), ext_left_, ext_right_);
}

PiecewiseProfile PiecewiseProfile::operator-() const {
  PiecewiseProfile out = *this;
  out *= -1.0;
  return out;
}

PiecewiseProfile& PiecewiseProfile::operator*=(double s) {
  for (Piece& pc : pieces_) {
    pc.a *= s;
    pc.b *= s;
  }
  ext_left_ *= s;
  ext_right_ *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Free functions

PiecewiseProfile linear_combination(double alpha, const PiecewiseProfile& p, double beta,
                                    const PiecewiseProfile& q) {
  std::vector<double> nodes = p.breakpoints();
  for (double x : q.breakpoints()) nodes.push_back(x);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const double el = alpha * p.ext_left() + beta * q.ext_left();
  const double er = alpha * p.ext_right() + beta * q.ext_right();
  if (nodes.size() < 2) {
    if (el == er) return PiecewiseProfile(el);
    // A single shared breakpoint can only occur for degenerate inputs.
    return PiecewiseProfile::step(nodes.front(), el, er);
  }
  std::vector<Piece> pieces;
  pieces.reserve(nodes.size() - 1);
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double lo = nodes[k];
    const double hi = nodes[k + 1];
    const double mid = 0.5 * (lo + hi);
    pieces.push_back({lo, hi, alpha * p.right(lo) + beta * q.right(lo),
                      alpha * p.slope(mid) + beta * q.slope(mid)});
  }
  return PiecewiseProfile(std::move(pieces), el, er);
}

PiecewiseProfile operator+(const PiecewiseProfile& p, const PiecewiseProfile& q) {
  return linear_combination(1.0, p, 1.0, q);
}

PiecewiseProfile operator-(const PiecewiseProfile& p, const PiecewiseProfile& q) {
  return linear_combination(1.0, p, -1.0, q);
}

PiecewiseProfile operator*(double s, const PiecewiseProfile& p) {
  PiecewiseProfile out = p;
  out *= s;
  return out;
}

double integrate(const PiecewiseProfile& p, double a, double b) { return p.integrate(a, b); }

double l1_distance(const PiecewiseProfile& pa, const PiecewiseProfile& pb, double a, double b) {
  if (a > b) throw ArgumentError("l1_distance needs a <= b");
  const auto nodes = merged_nodes(pa, pb, a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double lo = nodes[k];
    const double hi = nodes[k + 1];
    if (!(hi > lo)) continue;
    sum += abs_linear_integral(hi - lo, pa.right(lo) - pb.right(lo), pa.left(hi) - pb.left(hi));
  }
  return sum;
}

double inner_product(const PiecewiseProfile& pa, const PiecewiseProfile& pb, double a, double b) {
  if (a > b) throw ArgumentError("inner_product needs a <= b");
  const auto nodes = merged_nodes(pa, pb, a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double lo = nodes[k];
    const double hi = nodes[k + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    // Simpson is exact for the quadratic product of two linear pieces.
    const double f0 = pa.right(lo) * pb.right(lo);
    const double f1 = pa.left(mid) * pb.left(mid);
    const double f2 = pa.left(hi) * pb.left(hi);
    sum += (hi - lo) / 6.0 * (f0 + 4.0 * f1 + f2);
  }
  return sum;
}

double sup_distance(const PiecewiseProfile& pa, const PiecewiseProfile& pb, double a, double b) {
  if (a > b) throw ArgumentError("sup_distance needs a <= b");
  const auto nodes = merged_nodes(pa, pb, a, b);
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double lo = nodes[k];
    const double hi = nodes[k + 1];
    m = std::max({m, std::abs(pa.right(lo) - pb.right(lo)), std::abs(pa.left(hi) - pb.left(hi))});
  }
  return m;
}

// ---------------------------------------------------------------------------
// ProfileBuilder

ProfileBuilder::ProfileBuilder(double start, double min_length)
    : cursor_(start), min_length_(min_length) {}

void ProfileBuilder::add(double x_hi, double a, double b) {
  if (x_hi - cursor_ < min_length_) return;
  pieces_.push_back({cursor_, x_hi, a, b});
  cursor_ = x_hi;
}

void ProfileBuilder::add_linear(double x_hi, double a, double end) {
  const double len = x_hi - cursor_;
  if (len < min_length_) return;
  add(x_hi, a, (end - a) / len);
}

PiecewiseProfile ProfileBuilder::finish(double ext_left, double ext_right) && {
  if (pieces_.empty() && ext_left != ext_right) {
    return PiecewiseProfile::step(cursor_, ext_left, ext_right);
  }
  return PiecewiseProfile(std::move(pieces_), ext_left, ext_right);
}

// ---------------------------------------------------------------------------
// PiecewisePrimitive

PiecewisePrimitive::PiecewisePrimitive(PiecewiseProfile profile, double base, double offset)
    : profile_(std::move(profile)), base_(base), offset_(offset) {
  if (!std::isfinite(base) || !std::isfinite(offset)) {
    throw ArgumentError("primitive base and offset must be finite");
  }
  xs_ = profile_.breakpoints();
  prefix_.assign(xs_.size(), 0.0);
  if (!xs_.empty()) {
    const auto& pcs = profile_.pieces();
    for (std::size_t k = 0; k < pcs.size(); ++k) {
      prefix_[k + 1] = prefix_[k] + pcs[k].length() * 0.5 * (pcs[k].start() + pcs[k].end());
    }
  }
  raw_base_ = raw(base_);
}

double PiecewisePrimitive::raw(double x) const {
  if (xs_.empty()) return profile_.ext_left() * x;
  if (x <= xs_.front()) return profile_.ext_left() * (x - xs_.front());
  if (x >= xs_.back()) return prefix_.back() + profile_.ext_right() * (x - xs_.back());
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto k = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const Piece& pc = profile_.pieces()[k];
  const double d = x - pc.x_lo;
  return prefix_[k] + d * (pc.a + 0.5 * pc.b * d);
}

double PiecewisePrimitive::operator()(double x) const { return offset_ + raw(x) - raw_base_; }

PiecewisePrimitive PiecewisePrimitive::with_offset(double offset) const {
  PiecewisePrimitive out = *this;
  out.offset_ = offset;
  return out;
}

PiecewisePrimitive primitive(const PiecewiseProfile& p, double base, double offset) {
  return PiecewisePrimitive(p, base, offset);
}

}  // namespace backtrace
