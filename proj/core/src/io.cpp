#include "backtrace/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "backtrace/errors.hpp"

namespace backtrace::io {
namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path.empty() ? "<root>" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(path.empty() ? key : path + "." + key, "missing required field");
  }
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number, got " + std::string(v.type_name()));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(path, "expected a finite number");
  return d;
}

std::pair<double, double> range_field(const json& obj, const std::string& key) {
  const json& r = require(obj, key, "");
  if (!r.is_array() || r.size() != 2) throw ParseError(key, "expected [lo, hi]");
  const double lo = number(r[0], key + "[0]");
  const double hi = number(r[1], key + "[1]");
  if (!(lo < hi)) throw ParseError(key, "expected lo < hi");
  return {lo, hi};
}

void check_schema(const json& doc) {
  if (!doc.is_object()) throw ParseError("<root>", "expected an object");
  auto it = doc.find("schema");
  if (it != doc.end() && (!it->is_string() || it->get<std::string>() != kSchema)) {
    throw ParseError("schema", std::string("unsupported schema, expected \"") + kSchema + "\"");
  }
}

// Construction failures of a validated flux are reported against the field.
template <typename Fn>
ConvexFlux build_flux(const char* field, Fn make) {
  try {
    return make();
  } catch (const std::exception& e) {
    throw ParseError(field, e.what());
  }
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Locate the byte offset as line/column for the diagnostic.
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream where;
    where << source << ": line " << line << ", column " << col;
    throw ParseError(where.str(), "malformed JSON");
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

ConvexFlux flux_from_json(const json& doc) {
  check_schema(doc);
  const json& type = require(doc, "type", "");
  if (!type.is_string()) throw ParseError("type", "expected a string");
  const std::string kind = type.get<std::string>();
  if (kind == "burgers") {
    if (!doc.contains("range")) return ConvexFlux::burgers();
    auto [lo, hi] = range_field(doc, "range");
    return build_flux("range", [&] { return ConvexFlux::burgers(lo, hi); });
  }
  if (kind == "poly") {
    const json& c = require(doc, "coeffs", "");
    if (!c.is_array() || c.empty()) throw ParseError("coeffs", "expected a non-empty array");
    std::vector<double> coeffs;
    for (std::size_t i = 0; i < c.size(); ++i) {
      coeffs.push_back(number(c[i], "coeffs[" + std::to_string(i) + "]"));
    }
    auto [lo, hi] = range_field(doc, "range");
    return build_flux("coeffs", [&] { return ConvexFlux::polynomial(coeffs, lo, hi); });
  }
  if (kind == "cosh") {
    auto [lo, hi] = range_field(doc, "range");
    return build_flux("range", [&] { return ConvexFlux::cosh(lo, hi); });
  }
  throw ParseError("type", "unknown flux type \"" + kind + "\" (burgers, poly, cosh)");
}

json flux_to_json(const ConvexFlux& flux) {
  auto [lo, hi] = flux.state_range();
  json doc;
  doc["schema"] = kSchema;
  switch (flux.kind()) {
    case ConvexFlux::Kind::kBurgers:
      doc["type"] = "burgers";
      break;
    case ConvexFlux::Kind::kPolynomial:
      doc["type"] = "poly";
      doc["coeffs"] = flux.coefficients();
      break;
    case ConvexFlux::Kind::kCustom:
      if (flux.name() != "cosh") {
        throw ArgumentError("flux \"" + flux.name() + "\" has no JSON form");
      }
      doc["type"] = "cosh";
      break;
  }
  doc["range"] = {lo, hi};
  return doc;
}

PiecewiseProfile profile_from_json(const json& doc) {
  check_schema(doc);
  const json& pieces = require(doc, "pieces", "");
  if (!pieces.is_array()) throw ParseError("pieces", "expected an array");
  std::vector<Piece> out;
  out.reserve(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string path = "pieces[" + std::to_string(i) + "]";
    const json& p = pieces[i];
    Piece piece;
    piece.x_lo = number(require(p, "x0", path), path + ".x0");
    piece.x_hi = number(require(p, "x1", path), path + ".x1");
    piece.a = number(require(p, "a", path), path + ".a");
    piece.b = p.contains("b") ? number(p["b"], path + ".b") : 0.0;
    if (!(piece.x_lo < piece.x_hi)) throw ParseError(path, "expected x0 < x1");
    if (!out.empty() && piece.x_lo != out.back().x_hi) {
      throw ParseError(path + ".x0", "pieces must be contiguous (x0 equal to the previous x1)");
    }
    out.push_back(piece);
  }
  auto ext = [&](const char* key, double fallback) {
    if (doc.contains(key)) return number(doc[key], key);
    if (out.empty()) throw ParseError(key, "missing required field");
    return fallback;
  };
  const double left = ext("ext_left", out.empty() ? 0.0 : out.front().start());
  const double right = ext("ext_right", out.empty() ? 0.0 : out.back().end());
  if (out.empty() && left != right) {
    throw ParseError("ext_right", "a profile without pieces must be constant");
  }
  try {
    return PiecewiseProfile(std::move(out), left, right);
  } catch (const std::exception& e) {
    throw ParseError("pieces", e.what());
  }
}

json profile_to_json(const PiecewiseProfile& profile) {
  json pieces = json::array();
  for (const Piece& p : profile.pieces()) {
    pieces.push_back({{"x0", p.x_lo}, {"x1", p.x_hi}, {"a", p.a}, {"b", p.b}});
  }
  json doc;
  doc["schema"] = kSchema;
  doc["pieces"] = std::move(pieces);
  doc["ext_left"] = profile.ext_left();
  doc["ext_right"] = profile.ext_right();
  return doc;
}

ConvexFlux load_flux(const std::string& path) { return flux_from_json(read_json(path)); }

PiecewiseProfile load_profile(const std::string& path) {
  return profile_from_json(read_json(path));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> GridSpec::points() const {
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / dx + 1e-9));
  std::vector<double> xs;
  xs.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) xs.push_back(lo + static_cast<double>(i) * dx);
  return xs;
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ArgumentError("grid must be lo:hi:dx, got \"" + text + "\"");
  try {
    std::size_t used = 0;
    auto field = [&](const std::string& s) {
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    };
    g.lo = field(text.substr(0, c1));
    g.hi = field(text.substr(c1 + 1, c2 - c1 - 1));
    g.dx = field(text.substr(c2 + 1));
  } catch (const std::logic_error&) {
    throw ArgumentError("grid must be lo:hi:dx with numeric fields, got \"" + text + "\"");
  }
  if (!(g.lo < g.hi) || !(g.dx > 0.0) || !std::isfinite(g.hi - g.lo)) {
    throw ArgumentError("grid needs lo < hi and dx > 0");
  }
  return g;
}

void write_profile_csv(std::ostream& os, const PiecewiseProfile& profile,
                       std::span<const double> xs) {
  os << "x,value_left,value_right\n";
  for (double x : xs) {
    os << format_number(x) << ',' << format_number(profile.left(x)) << ','
       << format_number(profile.right(x)) << '\n';
  }
}

void write_traces_csv(std::ostream& os, std::span<const double> xs, std::span<const double> left,
                      std::span<const double> right) {
  os << "x,value_left,value_right\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << format_number(xs[i]) << ',' << format_number(left[i]) << ','
       << format_number(right[i]) << '\n';
  }
}

void write_potential_csv(std::ostream& os, std::span<const double> xs,
                         std::span<const double> values) {
  os << "x,U\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << format_number(xs[i]) << ',' << format_number(values[i]) << '\n';
  }
}

}  // namespace backtrace::io
