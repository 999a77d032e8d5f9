#include "backtrace_tools/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "backtrace/errors.hpp"
#include "backtrace/inverse.hpp"
#include "backtrace/io.hpp"
#include "backtrace/laxhopf.hpp"
#include "backtrace/oleinik.hpp"
#include "backtrace/oracle.hpp"
#include "backtrace_tools/suite.hpp"

namespace backtrace::cli {
namespace {

using nlohmann::json;

struct RunConfig {
  std::string profile;
  std::string target;
  std::string candidate;
  std::string flux;
  std::string output;
  std::string out_dir;
  std::string format = "json";
  std::string mode = "cl";
  std::string kind;
  std::string grid = "-5:5:0.001";
  std::string window;
  double horizon = 1.0;
  double dx = 1e-3;
  double cfl = 0.9;
  std::optional<double> jump;
  std::optional<double> site;
  std::optional<double> tol;
  std::optional<double> theta;
  int count = 3;
  int n = 10;
  std::uint64_t seed = 7;
  bool expect_member = false;
};

ConvexFlux load_flux(const RunConfig& cfg) {
  return cfg.flux.empty() ? ConvexFlux::burgers() : io::load_flux(cfg.flux);
}

InverseProblem load_problem(const RunConfig& cfg) {
  InverseSettings settings;
  settings.membership_tol = cfg.tol;
  settings.dx_out = cfg.dx;
  return InverseProblem(io::load_profile(cfg.target), load_flux(cfg), cfg.horizon, settings);
}

// Writes text to cfg.output, or to `out` when no file was requested.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw ArgumentError("cannot write " + cfg.output);
  f << text;
}

void emit_json(const RunConfig& cfg, std::ostream& out, const json& doc) {
  emit(cfg, out, doc.dump(2) + "\n");
}

// Unbounded interval ends are written as the strings "-inf" and "inf".
json endpoint(double v) {
  if (std::isfinite(v)) return v;
  return v < 0 ? "-inf" : "inf";
}

json partition_json(const Partition& part) {
  json xi = json::array();
  for (const Interval& iv : part.xi) xi.push_back({endpoint(iv.lo), endpoint(iv.hi)});
  json xii = json::array();
  for (const ShockGap& g : part.xii) xii.push_back({{"x", g.x}, {"lo", g.lo}, {"hi", g.hi}});
  return {{"schema", io::kSchema}, {"verdict", true}, {"xi", xi}, {"xii", xii},
          {"exceptional", part.exceptional}};
}

// Long failure lists are cut to the worst entries; the counts stay exact.
constexpr std::size_t kMaxListed = 32;

template <class Failure>
std::vector<Failure> worst(std::vector<Failure> failures) {
  std::stable_sort(failures.begin(), failures.end(),
                   [](const Failure& a, const Failure& b) { return a.margin < b.margin; });
  if (failures.size() > kMaxListed) failures.resize(kMaxListed);
  return failures;
}

json report_json(const MembershipReport& r, const char* mode) {
  json ci = json::array();
  for (const PointFailure& f : worst(r.condition_i_failures)) {
    ci.push_back({{"clause", to_string(f.clause)}, {"x", f.x}, {"measured", f.measured},
                  {"expected", f.expected}, {"margin", f.margin}});
  }
  json cii = json::array();
  for (const ShockFailure& f : worst(r.condition_ii_failures)) {
    cii.push_back({{"clause", to_string(f.clause)}, {"jump_x", f.jump_x}, {"probe", f.probe},
                   {"margin", f.margin}});
  }
  json fan = json::array();
  for (const FanResidual& f : r.total_fan_balance) {
    fan.push_back({{"jump_x", f.jump_x}, {"residual", f.residual}});
  }
  return {{"mode", mode},
          {"verdict", r.verdict},
          {"certified_fail", r.certified_fail()},
          {"tolerance", r.tolerance},
          {"worst_margin", r.worst_margin},
          {"condition_i_count", r.condition_i_failures.size()},
          {"condition_ii_count", r.condition_ii_failures.size()},
          {"condition_i_failures", ci},
          {"condition_ii_failures", cii},
          {"total_fan_balance", fan}};
}

double default_jump(const InverseProblem& prob, const RunConfig& cfg) {
  if (cfg.jump) return *cfg.jump;
  const auto jumps = prob.pmap().jumps();
  if (jumps.empty()) throw ArgumentError("target has no shock; nothing to select with --jump");
  return jumps.front().x;
}

int cmd_partition(const RunConfig& cfg, std::ostream& out) {
  const PMap pmap(io::load_profile(cfg.profile), load_flux(cfg), cfg.horizon);
  emit_json(cfg, out, partition_json(partition(pmap)));
  return kOk;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  const PiecewiseProfile u0 = io::load_profile(cfg.profile);
  const ConvexFlux flux = load_flux(cfg);
  const std::vector<double> xs = io::parse_grid(cfg.grid).points();
  std::ostringstream text;
  if (cfg.mode == "cl") {
    const auto samples = evolve_cl(u0, flux, cfg.horizon, xs);
    std::vector<double> left;
    std::vector<double> right;
    for (const StateSample& s : samples) {
      left.push_back(s.left);
      right.push_back(s.right);
    }
    if (cfg.format == "csv") {
      io::write_traces_csv(text, xs, left, right);
    } else {
      text << json{{"schema", io::kSchema}, {"mode", "cl"}, {"t", cfg.horizon}, {"x", xs},
                   {"value_left", left}, {"value_right", right}}
                  .dump(2)
           << '\n';
    }
  } else if (cfg.mode == "hj") {
    const auto values = evolve_hj(primitive(u0, 0.0), flux, cfg.horizon, xs);
    if (cfg.format == "csv") {
      io::write_potential_csv(text, xs, values);
    } else {
      text << json{{"schema", io::kSchema}, {"mode", "hj"}, {"t", cfg.horizon}, {"x", xs},
                   {"U", values}}
                  .dump(2)
           << '\n';
    }
  } else {
    throw ArgumentError("--mode must be cl or hj");
  }
  emit(cfg, out, text.str());
  return kOk;
}

int cmd_construct(const RunConfig& cfg, std::ostream& out) {
  const InverseProblem prob = load_problem(cfg);
  PiecewiseProfile u;
  if (cfg.kind == "extremal") {
    u = prob.extremal();
  } else if (cfg.kind == "extremal-reverse") {
    u = construct_extremal_reverse(prob);
  } else if (cfg.kind == "sharp") {
    u = construct_sharp(prob, default_jump(prob, cfg));
  } else if (cfg.kind == "cone") {
    if (cfg.candidate.empty() || !cfg.theta) {
      throw ArgumentError("--kind cone needs --candidate and --theta");
    }
    u = cone_combination(prob, io::load_profile(cfg.candidate), *cfg.theta);
  } else {
    throw ArgumentError("--kind must be extremal, extremal-reverse, sharp or cone");
  }
  emit_json(cfg, out, io::profile_to_json(u));
  return kOk;
}

int cmd_member(const RunConfig& cfg, std::ostream& out) {
  const InverseProblem prob = load_problem(cfg);
  const PiecewiseProfile u0 = io::load_profile(cfg.candidate);
  json doc{{"schema", io::kSchema}};
  bool verdict = true;
  if (cfg.mode == "cl" || cfg.mode == "both") {
    const MembershipReport r = membership_cl(prob, u0);
    verdict = verdict && r.verdict;
    doc["cl"] = report_json(r, "cl");
  }
  if (cfg.mode == "hj" || cfg.mode == "both") {
    const MembershipReport r =
        membership_hj(prob, aligned_potential(prob, u0), prob.target_potential());
    verdict = verdict && r.verdict;
    doc["hj"] = report_json(r, "hj");
  }
  if (!doc.contains("cl") && !doc.contains("hj")) throw ArgumentError("--mode must be cl, hj or both");
  doc["verdict"] = verdict;
  emit_json(cfg, out, doc);
  return (cfg.expect_member && !verdict) ? kRefuted : kOk;
}

int cmd_face(const RunConfig& cfg, std::ostream& out) {
  const InverseProblem prob = load_problem(cfg);
  const TentFamily fam = tent_family(prob, io::load_profile(cfg.candidate), cfg.count);
  json files = json::array();
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
  for (std::size_t k = 0; k < fam.members.size(); ++k) {
    if (cfg.out_dir.empty()) continue;
    const auto path = std::filesystem::path(cfg.out_dir) / ("member_" + std::to_string(k) + ".json");
    io::write_json(path.string(), io::profile_to_json(fam.members[k]));
    files.push_back(path.string());
  }
  json doc{{"schema", io::kSchema}, {"jump_x", fam.jump_x},   {"center", fam.center},
           {"half_width", fam.half_width}, {"epsilon", fam.epsilon}, {"N", cfg.count},
           {"files", files}};
  if (cfg.out_dir.empty()) {
    json members = json::array();
    for (const auto& m : fam.members) members.push_back(io::profile_to_json(m));
    doc["members"] = members;
  }
  emit_json(cfg, out, doc);
  return kOk;
}

int cmd_spoiler(const RunConfig& cfg, std::ostream& out) {
  const InverseProblem prob = load_problem(cfg);
  const PiecewiseProfile u0 = io::load_profile(cfg.candidate);
  Spoiler s;
  if (cfg.kind == "negative") {
    s = spoiler_negative(prob, u0, default_jump(prob, cfg), cfg.n);
  } else if (cfg.kind == "bump") {
    s = spoiler_bump(prob, u0, cfg.site.value_or(default_bump_site(prob)), cfg.n);
  } else {
    throw ArgumentError("--kind must be negative or bump");
  }
  json doc = io::profile_to_json(s.profile);
  doc["perturbation"] = {{"lo", s.lo}, {"hi", s.hi}, {"height", s.height}, {"l1", s.l1_norm()}};
  emit_json(cfg, out, doc);
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const PiecewiseProfile u0 = io::load_profile(cfg.profile);
  const ConvexFlux flux = load_flux(cfg);
  double lo = 0.0;
  double hi = 0.0;
  if (cfg.window.empty()) {
    std::tie(lo, hi) = wave_window(u0, flux, cfg.horizon, 1.0);
  } else {
    const io::GridSpec g = io::parse_grid(cfg.window + ":1");
    lo = g.lo;
    hi = g.hi;
  }
  const PiecewiseProfile u = evolve_fv(u0, flux, cfg.horizon, cfg.dx, lo, hi, cfg.cfl);
  if (cfg.format == "csv") {
    std::vector<double> xs;
    for (const Piece& p : u.pieces()) {
      if (p.x_hi > lo && p.x_lo < hi) xs.push_back(0.5 * (p.x_lo + p.x_hi));
    }
    std::ostringstream text;
    io::write_profile_csv(text, u, xs);
    emit(cfg, out, text.str());
  } else {
    emit_json(cfg, out, io::profile_to_json(u));
  }
  return kOk;
}

int cmd_corpus(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto targets = suite::corpus_generate(cfg.seed, cfg.count, load_flux(cfg), cfg.horizon);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const auto path = std::filesystem::path(cfg.out_dir) / ("target_" + std::to_string(k) + ".json");
      io::write_json(path.string(), io::profile_to_json(targets[k]));
    }
  }
  const auto results = suite::run_acceptance(cfg.seed);
  std::ostringstream text;
  suite::print_summary(text, results);
  emit(cfg, out, text.str());
  for (const auto& r : results) {
    if (!r.pass) return kSuiteFailed;
  }
  return kOk;
}

void add_flux(CLI::App* app, RunConfig& cfg) {
  app->add_option("--flux", cfg.flux, "flux JSON file (default: Burgers)");
}

void add_problem(CLI::App* app, RunConfig& cfg) {
  app->add_option("--target", cfg.target, "target profile w (JSON)")->required();
  add_flux(app, cfg);
  app->add_option("--T", cfg.horizon, "time horizon T > 0")->required();
  app->add_option("--tol", cfg.tol, "membership tolerance override");
  app->add_option("--dx-out", cfg.dx, "output resolution of sampled constructions");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Inverse design for convex scalar conservation laws"};
  app.require_subcommand(1);
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--output,-o", cfg.output, "write the result to a file instead of stdout");

  auto* partition_cmd = app.add_subcommand("partition", "split the initial line for a target");
  partition_cmd->add_option("--profile", cfg.profile, "target profile (JSON)")->required();
  add_flux(partition_cmd, cfg);
  partition_cmd->add_option("--T", cfg.horizon, "time horizon")->required();

  auto* evolve_cmd = app.add_subcommand("evolve", "evolve a datum forward in time");
  evolve_cmd->add_option("--profile", cfg.profile, "initial datum (JSON)")->required();
  add_flux(evolve_cmd, cfg);
  evolve_cmd->add_option("--t", cfg.horizon, "time")->required();
  evolve_cmd->add_option("--mode", cfg.mode, "cl or hj")->check(CLI::IsMember({"cl", "hj"}));
  evolve_cmd->add_option("--grid", cfg.grid, "sample grid lo:hi:dx");
  evolve_cmd->add_option("--out", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* construct_cmd = app.add_subcommand("construct", "build an attaining datum");
  construct_cmd->add_option("--kind", cfg.kind, "extremal, extremal-reverse, sharp or cone")
      ->required();
  add_problem(construct_cmd, cfg);
  construct_cmd->add_option("--jump", cfg.jump, "shock position for --kind sharp");
  construct_cmd->add_option("--candidate", cfg.candidate, "member for --kind cone");
  construct_cmd->add_option("--theta", cfg.theta, "cone coefficient >= 0");

  auto* member_cmd = app.add_subcommand("member", "decide whether a datum attains the target");
  member_cmd->add_option("--candidate", cfg.candidate, "candidate datum (JSON)")->required();
  add_problem(member_cmd, cfg);
  member_cmd->add_option("--mode", cfg.mode, "cl, hj or both")
      ->check(CLI::IsMember({"cl", "hj", "both"}));
  member_cmd->add_flag("--expect-member", cfg.expect_member, "exit 3 when refuted");

  auto* face_cmd = app.add_subcommand("face", "split a member into N + 1 averaging members");
  face_cmd->add_option("--candidate", cfg.candidate, "member to split (JSON)")->required();
  add_problem(face_cmd, cfg);
  face_cmd->add_option("--N", cfg.count, "number of tents")->check(CLI::PositiveNumber);
  face_cmd->add_option("--out-dir", cfg.out_dir, "directory for member_k.json files");

  auto* spoiler_cmd = app.add_subcommand("spoiler", "perturb a member into a non-member");
  spoiler_cmd->add_option("--kind", cfg.kind, "negative or bump")->required();
  spoiler_cmd->add_option("--candidate", cfg.candidate, "member to perturb (JSON)")->required();
  add_problem(spoiler_cmd, cfg);
  spoiler_cmd->add_option("--n", cfg.n, "perturbation width 1/n")->check(CLI::PositiveNumber);
  spoiler_cmd->add_option("--jump", cfg.jump, "shock position for --kind negative");
  spoiler_cmd->add_option("--at", cfg.site, "transported point for --kind bump");

  auto* oracle_cmd = app.add_subcommand("oracle", "Godunov finite-volume reference solution");
  oracle_cmd->add_option("--profile", cfg.profile, "initial datum (JSON)")->required();
  add_flux(oracle_cmd, cfg);
  oracle_cmd->add_option("--T", cfg.horizon, "time")->required();
  oracle_cmd->add_option("--dx", cfg.dx, "cell width")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--cfl", cfg.cfl, "CFL number in ]0, 1]");
  oracle_cmd->add_option("--window", cfg.window, "domain lo:hi (default: wave window)");
  oracle_cmd->add_option("--out", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* corpus_cmd = app.add_subcommand("corpus", "run the acceptance suite on a seeded corpus");
  corpus_cmd->add_option("--seed", cfg.seed, "corpus seed");
  corpus_cmd->add_option("--count", cfg.count, "targets written with --out-dir")
      ->check(CLI::PositiveNumber);
  corpus_cmd->add_option("--out-dir", cfg.out_dir, "also write generated targets here");
  add_flux(corpus_cmd, cfg);

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("backtrace");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  if (!(cfg.horizon > 0.0)) {
    err << "error: T must be positive\n";
    return kBadInput;
  }

  try {
    if (*partition_cmd) return cmd_partition(cfg, out);
    if (*evolve_cmd) return cmd_evolve(cfg, out);
    if (*construct_cmd) return cmd_construct(cfg, out);
    if (*member_cmd) return cmd_member(cfg, out);
    if (*face_cmd) return cmd_face(cfg, out);
    if (*spoiler_cmd) return cmd_spoiler(cfg, out);
    if (*oracle_cmd) return cmd_oracle(cfg, out);
    if (*corpus_cmd) return cmd_corpus(cfg, out);
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const AdmissibilityError& e) {
    json witness{{"x", e.witness_x()}, {"y", e.witness_shift()}, {"margin", e.margin()}};
    out << json{{"schema", io::kSchema}, {"verdict", false}, {"witness", witness}}.dump(2) << '\n';
    err << "error: " << e.what() << '\n';
    return kInadmissible;
  } catch (const NoFaceError& e) {
    err << "error: " << e.what() << '\n';
    return kNoFace;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kRefuted;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}

}  // namespace backtrace::cli
