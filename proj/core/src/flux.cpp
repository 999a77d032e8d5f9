#include "backtrace/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "backtrace/errors.hpp"

namespace backtrace {
namespace {

constexpr int kValidationGrid = 1000;
constexpr int kMaxNewton = 100;

double horner(const std::vector<double>& c, double u) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

}  // namespace

ConvexFlux ConvexFlux::burgers(double u_min, double u_max) {
  ConvexFlux flux;
  flux.kind_ = Kind::kBurgers;
  flux.name_ = "burgers";
  flux.coeffs_ = {0.0, 0.0, 0.5};
  flux.f_ = [](double u) { return 0.5 * u * u; };
  flux.df_ = [](double u) { return u; };
  flux.ddf_ = [](double) { return 1.0; };
  flux.u_min_ = u_min;
  flux.u_max_ = u_max;
  flux.validate();
  return flux;
}

ConvexFlux ConvexFlux::polynomial(std::vector<double> coeffs, double u_min, double u_max) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() < 3) throw ArgumentError("polynomial flux needs degree >= 2");
  ConvexFlux flux;
  flux.kind_ = Kind::kPolynomial;
  flux.name_ = "poly";
  flux.coeffs_ = coeffs;
  auto d1 = derivative(coeffs);
  auto d2 = derivative(d1);
  flux.f_ = [coeffs](double u) { return horner(coeffs, u); };
  flux.df_ = [d1](double u) { return horner(d1, u); };
  flux.ddf_ = [d2](double u) { return horner(d2, u); };
  flux.u_min_ = u_min;
  flux.u_max_ = u_max;
  flux.validate();
  return flux;
}

ConvexFlux ConvexFlux::cosh(double u_min, double u_max) {
  return custom(
      "cosh", [](double u) { return std::cosh(u) - 1.0; }, [](double u) { return std::sinh(u); },
      [](double u) { return std::cosh(u); }, u_min, u_max);
}

ConvexFlux ConvexFlux::custom(std::string name, Scalar f, Scalar df, Scalar ddf, double u_min,
                              double u_max) {
  ConvexFlux flux;
  flux.kind_ = Kind::kCustom;
  flux.name_ = std::move(name);
  flux.f_ = std::move(f);
  flux.df_ = std::move(df);
  flux.ddf_ = std::move(ddf);
  flux.u_min_ = u_min;
  flux.u_max_ = u_max;
  flux.validate();
  return flux;
}

void ConvexFlux::validate() {
  if (!(u_min_ < u_max_) || !std::isfinite(u_min_) || !std::isfinite(u_max_)) {
    throw ArgumentError("flux state range must be a finite interval [u_min, u_max]");
  }
  if (!(u_min_ <= 0.0 && 0.0 <= u_max_)) {
    throw ArgumentError("flux state range must contain 0, where f attains its minimum");
  }
  quadratic_ = kind_ == Kind::kBurgers || (kind_ == Kind::kPolynomial && coeffs_.size() == 3);

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double f_scale = 1.0;
  for (int i = 0; i <= kValidationGrid; ++i) {
    const double u = u_min_ + (u_max_ - u_min_) * i / kValidationGrid;
    const double c = ddf(u);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    f_scale = std::max(f_scale, std::abs(f(u)));
  }
  if (!(lo > 0.0)) {
    std::ostringstream msg;
    msg << "flux is not uniformly convex on [" << u_min_ << ", " << u_max_
        << "]: min sampled f'' = " << lo;
    throw ArgumentError(msg.str());
  }
  convexity_floor_ = lo;
  convexity_ceiling_ = hi;

  if (std::abs(f(0.0)) > 1e-12 || std::abs(df(0.0)) > 1e-9) {
    throw ArgumentError("flux must be normalized so that f(0) = min f = 0");
  }
  for (int i = 0; i <= kValidationGrid; ++i) {
    const double u = u_min_ + (u_max_ - u_min_) * i / kValidationGrid;
    if (f(u) < -1e-12 * f_scale) throw ArgumentError("flux takes negative values");
  }
  if (!quadratic_) {
    for (int i = 0; i <= kValidationGrid; ++i) {
      const double u = u_min_ + (u_max_ - u_min_) * i / kValidationGrid;
      if (std::abs(g(df(u)) - u) > 1e-10 * std::max(1.0, std::abs(u))) {
        throw ArgumentError("inverse of f' is inconsistent on the state range");
      }
    }
  }
}

double ConvexFlux::f(double u) const { return f_(u); }
double ConvexFlux::df(double u) const { return df_(u); }
double ConvexFlux::ddf(double u) const { return ddf_(u); }

double ConvexFlux::g(double lambda) const {
  const double s_lo = df(u_min_);
  const double s_hi = df(u_max_);
  const double slack = 1e-12 * std::max(1.0, std::abs(lambda));
  if (!(lambda >= s_lo - slack && lambda <= s_hi + slack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "speed " << lambda << " outside admissible interval [" << s_lo << ", " << s_hi << "]";
    throw RangeError(msg.str());
  }
  if (quadratic_) {
    // f'(u) = c1 + 2 c2 u
    return (lambda - coeffs_[1]) / (2.0 * coeffs_[2]);
  }
  if (lambda <= s_lo) return u_min_;
  if (lambda >= s_hi) return u_max_;

  const double tol = 1e-12 * std::max(1.0, std::abs(lambda));
  double lo = u_min_;
  double hi = u_max_;
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxNewton; ++it) {
    const double r = df(u) - lambda;
    if (std::abs(r) <= tol) return u;
    if (r > 0.0) hi = u; else lo = u;
    const double step = r / ddf(u);
    double next = u - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    u = next;
  }
  // Newton did not settle; plain bisection on the remaining bracket.
  while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u))) {
    u = 0.5 * (lo + hi);
    const double r = df(u) - lambda;
    if (std::abs(r) <= tol) return u;
    if (r > 0.0) hi = u; else lo = u;
  }
  return 0.5 * (lo + hi);
}

double ConvexFlux::legendre(double lambda) const {
  if (quadratic_) {
    // Closed form keeps the conjugate exact to rounding: for
    // f = c1 u + c2 u^2, f*(l) = (l - c1)^2 / (4 c2).
    g(lambda);  // range check
    const double d = lambda - coeffs_[1];
    return d * d / (4.0 * coeffs_[2]);
  }
  const double u = g(lambda);
  return lambda * u - f(u);
}

double ConvexFlux::max_speed(double lo, double hi) const {
  return std::max(std::abs(df(lo)), std::abs(df(hi)));
}

}  // namespace backtrace
