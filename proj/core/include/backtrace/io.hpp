#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "backtrace/flux.hpp"
#include "backtrace/piecewise.hpp"

namespace backtrace::io {

inline constexpr const char* kSchema = "backtrace/1";

/// Malformed input. `where` is either "line L, column C" for syntax errors or
/// a JSON path such as "pieces[2].x1" for field errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Parses text as JSON, translating syntax errors into ParseError.
nlohmann::json parse_json(const std::string& text, const std::string& source = "<input>");
nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& doc);

/// {"type":"burgers"}, {"type":"poly","coeffs":[...],"range":[a,b]} or
/// {"type":"cosh","range":[a,b]}. Burgers accepts an optional "range".
ConvexFlux flux_from_json(const nlohmann::json& doc);
nlohmann::json flux_to_json(const ConvexFlux& flux);

/// {"pieces":[{"x0":..,"x1":..,"a":..,"b":..},...],"ext_left":..,"ext_right":..}
/// where a is the value at x0 and b the slope. "ext_left"/"ext_right" may be
/// omitted when there is at least one piece and default to the end values.
PiecewiseProfile profile_from_json(const nlohmann::json& doc);
nlohmann::json profile_to_json(const PiecewiseProfile& profile);

ConvexFlux load_flux(const std::string& path);
PiecewiseProfile load_profile(const std::string& path);

/// Formats with 17 significant digits.
std::string format_number(double v);

/// Uniform grid lo, lo + dx, ..., up to hi inclusive.
struct GridSpec {
  double lo = -5.0;
  double hi = 5.0;
  double dx = 1e-3;
  std::vector<double> points() const;
};

/// Parses "lo:hi:dx".
GridSpec parse_grid(const std::string& text);

/// Rows x,value_left,value_right.
void write_profile_csv(std::ostream& os, const PiecewiseProfile& profile,
                       std::span<const double> xs);
/// Rows x,value_left,value_right from left/right trace columns.
void write_traces_csv(std::ostream& os, std::span<const double> xs,
                      std::span<const double> left, std::span<const double> right);
/// Rows x,U.
void write_potential_csv(std::ostream& os, std::span<const double> xs,
                         std::span<const double> values);

}  // namespace backtrace::io
