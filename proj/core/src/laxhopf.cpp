#include "backtrace/laxhopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "backtrace/errors.hpp"
#include "backtrace/parallel.hpp"

namespace backtrace {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRootSubsamples = 64;
constexpr double kRootTol = 1e-12;
constexpr double kTieTol = 1e-12;

}  // namespace

LaxHopfSolver::LaxHopfSolver(PiecewisePrimitive potential, ConvexFlux flux)
    : potential_(std::move(potential)), flux_(std::move(flux)) {
  const PiecewiseProfile& u0 = potential_.derivative();
  v_min_ = u0.min_value();
  v_max_ = u0.max_value();
  const auto [u_lo, u_hi] = flux_.state_range();
  if (v_min_ < u_lo || v_max_ > u_hi) {
    throw RangeError("initial datum leaves the flux state range");
  }
  breakpoints_ = u0.breakpoints();
  if (u0.empty()) {
    cells_.push_back({-kInf, kInf, u0.ext_left(), 0.0, -1});
    return;
  }
  const auto& pieces = u0.pieces();
  cells_.push_back({-kInf, pieces.front().x_lo, u0.ext_left(), 0.0, -1});
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Piece& pc = pieces[k];
    cells_.push_back({pc.x_lo, pc.x_hi, pc.a, pc.b, static_cast<int>(k)});
  }
  cells_.push_back({pieces.back().x_hi, kInf, u0.ext_right(), 0.0, static_cast<int>(pieces.size())});
}

LaxHopfSolver::LaxHopfSolver(const PiecewiseProfile& u0, ConvexFlux flux)
    : LaxHopfSolver(PiecewisePrimitive(u0, 0.0), std::move(flux)) {}

double LaxHopfSolver::speed_state(double lambda) const {
  const auto [s_lo, s_hi] = flux_.speed_range();
  return flux_.g(std::clamp(lambda, s_lo, s_hi));
}

double LaxHopfSolver::s_value(double t, double x, double y) const {
  return t * flux_.legendre((x - y) / t) + potential_(y);
}

void LaxHopfSolver::stationary_points(const Cell& c, double t, double x, double y_lo,
                                      double y_hi, std::vector<Family>& out) const {
  const double l = std::max(c.lo, y_lo);
  const double h = std::min(c.hi, y_hi);
  if (!(l <= h)) return;
  auto inside = [&](double y) { return y > c.lo && y < c.hi && y >= y_lo && y <= y_hi; };

  if (c.b == 0.0) {
    const double y = x - t * flux_.df(c.a);
    if (inside(y)) out.push_back({Family::Kind::kPiece, c.index, y});
    return;
  }
  if (flux_.is_quadratic()) {
    const double c1 = flux_.coefficients()[1];
    const double alpha = 1.0 / flux_.ddf(0.0);
    const double slope = c.b + alpha / t;
    // h(y) = u0(y) - g((x - y) / t) is affine; a root is a minimum of s only
    // when h increases through it.
    if (!(slope > 0.0)) return;
    const double y = c.lo + (alpha * ((x - c.lo) / t - c1) - c.a) / slope;
    if (inside(y)) out.push_back({Family::Kind::kPiece, c.index, y});
    return;
  }
  auto residual = [&](double y) { return cell_value(c, y) - speed_state((x - y) / t); };
  double y_prev = l;
  double r_prev = residual(l);
  for (int j = 1; j <= kRootSubsamples; ++j) {
    const double y = l + (h - l) * j / kRootSubsamples;
    const double r = residual(y);
    if (r_prev < 0.0 && r >= 0.0) {
      double a = y_prev;
      double b = y;
      while (b - a > kRootTol * std::max(1.0, std::abs(a))) {
        const double mid = 0.5 * (a + b);
        if (residual(mid) < 0.0) a = mid; else b = mid;
      }
      const double root = 0.5 * (a + b);
      if (inside(root)) out.push_back({Family::Kind::kPiece, c.index, root});
    } else if (r_prev == 0.0 && j > 1 && inside(y_prev)) {
      out.push_back({Family::Kind::kPiece, c.index, y_prev});
    }
    y_prev = y;
    r_prev = r;
  }
}

Minimizer LaxHopfSolver::minimize(double t, double x) const {
  if (!(t > 0.0)) throw ArgumentError("evolution time must be positive");
  const double y_lo = x - t * flux_.df(v_max_);
  const double y_hi = x - t * flux_.df(v_min_);

  std::vector<Family> candidates;
  auto first = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), y_lo);
  auto last = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y_hi);
  // A breakpoint minimizes s only if s' changes sign there, that is
  // u0(y-) <= g((x - y) / t) <= u0(y+). Dropping the others keeps near-ties
  // with an interior stationary point from selecting the wrong branch.
  const PiecewiseProfile& u0 = potential_.derivative();
  for (auto it = first; it != last; ++it) {
    const double y = *it;
    const double v = speed_state((x - y) / t);
    const double slack = 1e-9 * std::max(1.0, std::abs(v));
    if (v < u0.left(y) - slack || v > u0.right(y) + slack) continue;
    candidates.push_back(
        {Family::Kind::kBreakpoint, static_cast<int>(it - breakpoints_.begin()), y});
  }
  // Cells are ordered; the first one that can reach y_lo sits just before
  // the first breakpoint above it.
  const auto start = static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y_lo) - breakpoints_.begin());
  for (std::size_t k = start; k < cells_.size() && cells_[k].lo <= y_hi; ++k) {
    stationary_points(cells_[k], t, x, y_lo, y_hi, candidates);
  }
  if (candidates.empty()) {
    // Cannot happen for bounded data; guard against degenerate rounding.
    candidates.push_back({Family::Kind::kPiece, cells_.front().index, y_lo});
  }

  std::vector<double> values(candidates.size());
  double best = kInf;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    values[i] = s_value(t, x, candidates[i].y);
    best = std::min(best, values[i]);
  }
  const double tie = kTieTol * std::max(1.0, std::abs(best));
  Minimizer m;
  m.value = best;
  m.y_left = kInf;
  m.y_right = -kInf;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (values[i] > best + tie) continue;
    if (candidates[i].y < m.y_left) {
      m.y_left = candidates[i].y;
      m.left_family = candidates[i];
    }
    if (candidates[i].y > m.y_right) {
      m.y_right = candidates[i].y;
      m.right_family = candidates[i];
    }
  }
  return m;
}

VariationalState LaxHopfSolver::state(double t, double x) const {
  const Minimizer m = minimize(t, x);
  return {t, x, m.y_left, m.value, speed_state((x - m.y_left) / t)};
}

StateSample LaxHopfSolver::sample(double t, double x) const {
  const Minimizer m = minimize(t, x);
  return {speed_state((x - m.y_left) / t), speed_state((x - m.y_right) / t)};
}

double LaxHopfSolver::family_state(const Family& family, double t, double x) const {
  if (family.kind == Family::Kind::kBreakpoint) {
    return speed_state((x - breakpoints_[static_cast<std::size_t>(family.index)]) / t);
  }
  const Cell& c = cell(family.index);
  if (c.b == 0.0) return c.a;
  if (flux_.is_quadratic()) {
    const double c1 = flux_.coefficients()[1];
    const double alpha = 1.0 / flux_.ddf(0.0);
    const double slope = c.b + alpha / t;
    if (slope > 0.0) {
      const double y = c.lo + (alpha * ((x - c.lo) / t - c1) - c.a) / slope;
      return cell_value(c, y);
    }
  } else {
    std::vector<Family> roots;
    stationary_points(c, t, x, x - t * flux_.df(v_max_), x - t * flux_.df(v_min_), roots);
    if (!roots.empty()) {
      auto best = std::min_element(roots.begin(), roots.end(), [&](const Family& a, const Family& b) {
        return std::abs(a.y - family.y) < std::abs(b.y - family.y);
      });
      return speed_state((x - best->y) / t);
    }
  }
  return sample(t, x).left;
}

PiecewiseProfile LaxHopfSolver::evolve_profile(double t, double lo, double hi, double dx) const {
  if (!(t > 0.0)) throw ArgumentError("evolution time must be positive");
  if (!(lo < hi) || !(dx > 0.0)) throw ArgumentError("evolve_profile needs lo < hi and dx > 0");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / dx)));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = lo + (hi - lo) * static_cast<double>(i) / n;
  grid.back() = hi;
  std::vector<Family> fam(n + 1);
  parallel_for(n + 1, [&](std::size_t i) { fam[i] = minimize(t, grid[i]).left_family; });

  // Branch switches: (x where the branch starts, branch).
  std::vector<std::pair<double, Family>> runs{{lo, fam[0]}};
  for (std::size_t i = 0; i < n; ++i) {
    double a = grid[i];
    const double b = grid[i + 1];
    for (int guard = 0; guard < 64 && !runs.back().second.same_branch(fam[i + 1]); ++guard) {
      const Family cur = runs.back().second;
      double l = a;
      double h = b;
      Family next = fam[i + 1];
      for (int it = 0; it < 200 && h - l > 1e-14 * std::max(1.0, std::abs(l)); ++it) {
        const double mid = 0.5 * (l + h);
        const Family fm = minimize(t, mid).left_family;
        if (fm.same_branch(cur)) {
          l = mid;
        } else {
          h = mid;
          next = fm;
        }
      }
      runs.emplace_back(h, next);
      a = h;
    }
  }

  ProfileBuilder builder(lo);
  const bool exact = flux_.is_quadratic();
  for (std::size_t j = 0; j < runs.size(); ++j) {
    const double x0 = runs[j].first;
    const double x1 = j + 1 < runs.size() ? runs[j + 1].first : hi;
    const Family& f = runs[j].second;
    if (!(x1 > x0)) continue;
    if (exact) {
      builder.add_linear(x1, family_state(f, t, x0), family_state(f, t, x1));
      continue;
    }
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil((x1 - x0) / dx)));
    double prev_u = family_state(f, t, x0);
    for (std::size_t k = 1; k <= m; ++k) {
      const double xk = k == m ? x1 : x0 + (x1 - x0) * static_cast<double>(k) / m;
      const double uk = family_state(f, t, xk);
      builder.add_linear(xk, prev_u, uk);
      prev_u = uk;
    }
  }
  const double left_value = family_state(runs.front().second, t, lo);
  const double right_value = family_state(runs.back().second, t, hi);
  return std::move(builder).finish(left_value, right_value);
}

// ---------------------------------------------------------------------------

double s_value(const PiecewisePrimitive& potential, const ConvexFlux& flux, double t, double x,
               double y) {
  if (!(t > 0.0)) throw ArgumentError("evolution time must be positive");
  return t * flux.legendre((x - y) / t) + potential(y);
}

std::vector<StateSample> evolve_cl(const PiecewiseProfile& u0, const ConvexFlux& flux, double t,
                                   std::span<const double> xs) {
  if (!(t > 0.0)) throw ArgumentError("evolution time must be positive");
  const LaxHopfSolver solver(u0, flux);
  std::vector<StateSample> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = solver.sample(t, xs[i]); });
  return out;
}

std::vector<double> evolve_hj(const PiecewisePrimitive& potential, const ConvexFlux& flux,
                              double t, std::span<const double> xs) {
  if (!(t > 0.0)) throw ArgumentError("evolution time must be positive");
  const LaxHopfSolver solver(potential, flux);
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = solver.value(t, xs[i]); });
  return out;
}

PiecewiseProfile evolve_cl_profile(const PiecewiseProfile& u0, const ConvexFlux& flux, double t,
                                   double lo, double hi, double dx) {
  return LaxHopfSolver(u0, flux).evolve_profile(t, lo, hi, dx);
}

std::pair<double, double> wave_window(const PiecewiseProfile& u0, const ConvexFlux& flux,
                                      double t, double margin) {
  if (u0.empty()) return {-margin, margin};
  const double reach = t * flux.max_speed(u0.min_value(), u0.max_value());
  return {u0.front() - reach - margin, u0.back() + reach + margin};
}

// ---------------------------------------------------------------------------

LipschitzPath::LipschitzPath(std::vector<double> times, std::vector<double> positions,
                             double max_lipschitz)
    : times_(std::move(times)), positions_(std::move(positions)) {
  if (times_.size() != positions_.size() || times_.size() < 2) {
    throw ArgumentError("path needs at least two (time, position) samples");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(positions_[i])) {
      throw ArgumentError("path samples must be finite");
    }
    if (i > 0) {
      const double dt = times_[i] - times_[i - 1];
      if (!(dt > 0.0)) throw ArgumentError("path times must be strictly increasing");
      const double speed = std::abs(positions_[i] - positions_[i - 1]) / dt;
      if (speed > max_lipschitz) {
        std::ostringstream msg;
        msg << "path is not Lipschitz: slope " << speed << " exceeds " << max_lipschitz;
        throw ArgumentError(msg.str());
      }
    }
  }
}

LipschitzPath LipschitzPath::constant(double x0, double horizon) {
  return LipschitzPath({0.0, horizon}, {x0, x0});
}

LipschitzPath LipschitzPath::linear(double x0, double speed, double horizon) {
  return LipschitzPath({0.0, horizon}, {x0, x0 + speed * horizon});
}

std::size_t LipschitzPath::segment(double t) const {
  if (t < times_.front() || t > times_.back()) {
    throw ArgumentError("time outside the path's sampled interval");
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto k = static_cast<std::size_t>(it - times_.begin());
  return std::min(k == 0 ? 0 : k - 1, times_.size() - 2);
}

double LipschitzPath::operator()(double t) const {
  const std::size_t k = segment(t);
  const double r = (t - times_[k]) / (times_[k + 1] - times_[k]);
  return positions_[k] + r * (positions_[k + 1] - positions_[k]);
}

double LipschitzPath::velocity(double t) const {
  const std::size_t k = segment(t);
  return (positions_[k + 1] - positions_[k]) / (times_[k + 1] - times_[k]);
}

std::vector<double> lift_cl_to_hj(const PiecewiseProfile& u0, const ConvexFlux& flux,
                                  const LipschitzPath& path, double c, double t,
                                  std::span<const double> xs, double dt) {
  if (!(t > 0.0)) throw ArgumentError("evolution time must be positive");
  if (!(dt > 0.0)) throw ArgumentError("time step must be positive");
  if (path.start_time() > 0.0 || path.end_time() < t) {
    throw ArgumentError("path must cover [0, t]");
  }
  const LaxHopfSolver solver(u0, flux);
  const double anchor = path(t);

  auto [lo, hi] = wave_window(u0, flux, t);
  for (double x : xs) {
    lo = std::min(lo, x - 1.0);
    hi = std::max(hi, x + 1.0);
  }
  lo = std::min(lo, anchor - 1.0);
  hi = std::max(hi, anchor + 1.0);
  const PiecewiseProfile ut = solver.evolve_profile(t, lo, hi, 1e-3);

  auto integrand = [&](double tau) {
    const double g = path(tau);
    double u;
    if (tau <= 0.0) {
      u = u0.precise(g).value_or(u0.right(g));
    } else {
      u = solver.sample(tau, g).left;
    }
    return path.velocity(tau) * u - flux.f(u);
  };
  auto steps = static_cast<std::size_t>(std::ceil(t / dt));
  if (steps % 2 == 1) ++steps;
  const double h = t / static_cast<double>(steps);
  double acc = integrand(0.0) + integrand(t);
  for (std::size_t k = 1; k < steps; ++k) {
    acc += (k % 2 == 1 ? 4.0 : 2.0) * integrand(h * static_cast<double>(k));
  }
  const double time_part = acc * h / 3.0;

  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = ut.integrate(anchor, xs[i]) + time_part + c;
  return out;
}

}  // namespace backtrace
