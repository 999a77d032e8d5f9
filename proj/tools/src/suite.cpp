#include "backtrace_tools/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "backtrace/errors.hpp"
#include "backtrace/inverse.hpp"
#include "backtrace/laxhopf.hpp"
#include "backtrace/oleinik.hpp"
#include "backtrace/oracle.hpp"

namespace backtrace::suite {
namespace {

constexpr double kT = 1.0;
constexpr double kL = 5.0;
constexpr int kCorpusSize = 20;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> sorted_nodes(std::mt19937_64& rng, int count) {
  while (true) {
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (double& x : xs) x = uniform(rng, -3.0, 3.0);
    std::sort(xs.begin(), xs.end());
    bool spaced = true;
    for (std::size_t i = 1; i < xs.size(); ++i) spaced = spaced && xs[i] - xs[i - 1] >= 0.25;
    if (spaced) return xs;
  }
}

// States stay in [-kAmplitude, kAmplitude] except after the forced jump.
constexpr double kAmplitude = 1.0;

PiecewiseProfile random_target(std::mt19937_64& rng, const ConvexFlux& flux, double horizon,
                               bool jumps) {
  constexpr double A = kAmplitude;
  const int m = std::uniform_int_distribution<int>(2, 6)(rng);
  const std::vector<double> xs = sorted_nodes(rng, m + 1);
  const double cap = 0.95 / (horizon * flux.convexity_ceiling());
  auto chance = [&](double p) { return uniform(rng, 0.0, 1.0) < p; };
  auto drop_below = [&](double v) { return v - uniform(rng, 0.2, std::min(0.8, v + A)); };

  double a = uniform(rng, -A, A);
  double ext_left = a;
  if (jumps && a <= A - 0.2 && chance(0.3)) ext_left = a + uniform(rng, 0.2, A - a);

  std::vector<Piece> pieces;
  for (int k = 0; k < m; ++k) {
    const double len = xs[static_cast<std::size_t>(k + 1)] - xs[static_cast<std::size_t>(k)];
    double b = (uniform(rng, -A, A) - a) / len;
    b = std::min({b, cap, (A - a) / len});
    pieces.push_back({xs[static_cast<std::size_t>(k)], xs[static_cast<std::size_t>(k + 1)], a, b});
    const double end = a + b * len;
    a = (jumps && end >= 0.2 - A && chance(0.4)) ? drop_below(end) : end;
  }
  const double last = pieces.back().end();
  double ext_right = last;
  if (jumps && last >= 0.2 - A && chance(0.3)) ext_right = drop_below(last);

  PiecewiseProfile w(pieces, ext_left, ext_right);
  if (jumps && w.jumps().empty()) {
    // Lower everything right of the middle node by 0.5.
    const std::size_t k = pieces.size() / 2;
    for (std::size_t i = k; i < pieces.size(); ++i) pieces[i].a -= 0.5;
    w = PiecewiseProfile(pieces, ext_left, ext_right - 0.5);
  }
  return w;
}

template <typename Fn>
double seconds_of(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Tally {
  int checks = 0;
  int failures = 0;
  std::string first_failure;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      if (failures == 0) first_failure = what;
      ++failures;
    }
  }
  bool pass() const { return failures == 0; }
  std::string summary(const std::string& extra = {}) const {
    std::ostringstream os;
    os << checks - failures << "/" << checks << " checks";
    if (!extra.empty()) os << ", " << extra;
    if (failures > 0) os << "; first failure: " << first_failure;
    return os.str();
  }
};

struct Corpus {
  ConvexFlux flux = ConvexFlux::burgers();
  std::vector<PiecewiseProfile> targets;
  std::vector<InverseProblem> problems;
};

Corpus make_corpus(std::uint64_t seed) {
  Corpus c;
  c.targets = corpus_generate(seed, kCorpusSize, c.flux, kT);
  for (const PiecewiseProfile& w : c.targets) c.problems.emplace_back(w, c.flux, kT);
  return c;
}

// Members with a known membership verdict of true, labelled.
std::vector<std::pair<std::string, PiecewiseProfile>> known_members(const InverseProblem& prob) {
  std::vector<std::pair<std::string, PiecewiseProfile>> out;
  out.emplace_back("extremal", prob.extremal());
  PiecewiseProfile base = prob.extremal();
  for (const PBreak& br : prob.pmap().jumps()) {
    out.emplace_back("sharp@" + fmt("%.4g", br.x), construct_sharp(prob, br.x));
  }
  if (out.size() > 1) base = out[1].second;
  for (double theta : {0.0, 0.5, 1.0, 3.0, 7.0}) {
    out.emplace_back("cone" + fmt("%.2g", theta), cone_combination(prob, base, theta));
  }
  if (!prob.pmap().jumps().empty()) {
    const TentFamily fam = tent_family(prob, base, 2);
    for (std::size_t k = 0; k < fam.members.size(); ++k) {
      out.emplace_back("tent" + std::to_string(k), fam.members[k]);
    }
  }
  return out;
}

struct Verdicts {
  MembershipReport cl;
  MembershipReport hj;
};

Verdicts decide(const InverseProblem& prob, const PiecewiseProfile& u0) {
  return {membership_cl(prob, u0),
          membership_hj(prob, aligned_potential(prob, u0), prob.target_potential())};
}

// ---------------------------------------------------------------------------

CriterionResult attainability_gate(std::uint64_t seed) {
  const ConvexFlux flux = ConvexFlux::burgers();
  Tally tally;
  const auto good = corpus_generate(seed, 50, flux, kT);
  const auto bad = corpus_violating(seed + 1, 20, flux, kT);
  int idx = 0;
  auto judge = [&](const PiecewiseProfile& w, bool expected, const char* family) {
    const bool oracle = pairwise_admissible(w, flux, kT, 10000, seed + 100 + idx);
    const bool verdict = check_oleinik(build_pmap(w, flux, kT)).admissible;
    tally.expect(verdict == oracle && verdict == expected,
                 std::string(family) + " target " + std::to_string(idx));
    ++idx;
  };
  for (const auto& w : good) judge(w, true, "admissible");
  for (const auto& w : bad) judge(w, false, "violating");
  return {1, "attainability gate", tally.pass(), tally.summary("50 admissible + 20 violating")};
}

CriterionResult round_trip(const Corpus& c) {
  Tally tally;
  double worst_exact = 0.0;
  double worst_fv = 0.0;
  for (std::size_t i = 0; i < c.problems.size(); ++i) {
    const InverseProblem& prob = c.problems[i];
    const PiecewiseProfile& u = prob.extremal();
    const PiecewiseProfile forward = evolve_cl_profile(u, c.flux, kT, -kL - 1.0, kL + 1.0);
    const double e1 = l1_distance(forward, prob.target(), -kL, kL);
    const PiecewiseProfile fv = evolve_fv(u, c.flux, kT, 1e-3, -kL, kL);
    const double e2 = l1_distance(fv, prob.target(), -kL, kL);
    worst_exact = std::max(worst_exact, e1);
    worst_fv = std::max(worst_fv, e2);
    tally.expect(e1 <= 1e-4, "target " + std::to_string(i) + " exact L1 " + fmt("%.3g", e1));
    tally.expect(e2 <= 1e-2, "target " + std::to_string(i) + " Godunov L1 " + fmt("%.3g", e2));
  }
  return {2, "round trip through the forward solvers", tally.pass(),
          tally.summary("max L1 exact " + fmt("%.2e", worst_exact) + ", Godunov " +
                        fmt("%.2e", worst_fv))};
}

CriterionResult construction_equality(const Corpus& c) {
  Tally tally;
  double worst = 0.0;
  for (std::size_t i = 0; i < c.problems.size(); ++i) {
    const InverseProblem& prob = c.problems[i];
    const double d = l1_distance(prob.extremal(), construct_extremal_reverse(prob), -kL, kL);
    worst = std::max(worst, d);
    tally.expect(d <= 1e-6, "target " + std::to_string(i) + " L1 " + fmt("%.3g", d));
  }
  return {3, "pullback equals reversed evolution", tally.pass(),
          tally.summary("max L1 " + fmt("%.2e", worst))};
}

CriterionResult membership_characterization(const Corpus& c) {
  Tally tally;
  int members = 0;
  int spoilers = 0;
  int agree = 0;
  int total = 0;
  for (std::size_t i = 0; i < c.problems.size(); ++i) {
    const InverseProblem& prob = c.problems[i];
    const std::string tag = "target " + std::to_string(i) + " ";
    auto record = [&](const Verdicts& v) {
      ++total;
      if (v.cl.verdict == v.hj.verdict) ++agree;
      tally.expect(v.cl.verdict == v.hj.verdict, tag + "CL/HJ disagreement");
    };
    const auto list = known_members(prob);
    for (const auto& [name, u0] : list) {
      const Verdicts v = decide(prob, u0);
      record(v);
      ++members;
      tally.expect(v.cl.verdict, tag + name + " rejected by CL, margin " +
                                     fmt("%.3g", v.cl.worst_margin));
      tally.expect(v.hj.verdict, tag + name + " rejected by HJ, margin " +
                                     fmt("%.3g", v.hj.worst_margin));
    }
    const PiecewiseProfile& base = list.size() > 1 ? list[1].second : list[0].second;
    for (int n : {10, 100}) {
      std::vector<std::pair<std::string, Spoiler>> spoiled;
      for (const PBreak& br : prob.pmap().jumps()) {
        spoiled.emplace_back("negative", spoiler_negative(prob, base, br.x, n));
      }
      spoiled.emplace_back("bump", spoiler_bump(prob, base, default_bump_site(prob), n));
      for (const auto& [name, s] : spoiled) {
        const Verdicts v = decide(prob, s.profile);
        record(v);
        ++spoilers;
        tally.expect(v.cl.certified_fail(), tag + name + " spoiler not certified by CL");
        tally.expect(v.hj.certified_fail(), tag + name + " spoiler not certified by HJ");
      }
    }
  }
  std::ostringstream extra;
  extra << members << " members, " << spoilers << " spoilers, CL/HJ agreement " << agree << "/"
        << total;
  return {4, "membership characterization", tally.pass(), tally.summary(extra.str())};
}

CriterionResult face_structure() {
  const ConvexFlux flux = ConvexFlux::burgers();
  const InverseProblem prob(shock_target(), flux, kT);
  const PiecewiseProfile u0 = construct_sharp(prob, 0.0);
  Tally tally;
  double worst_avg = 0.0;
  double min_eig = INFINITY;
  for (int n = 1; n <= 5; ++n) {
    const TentFamily fam = tent_family(prob, u0, n);
    PiecewiseProfile avg(0.0);
    for (const PiecewiseProfile& v : fam.members) avg = avg + v;
    avg *= 1.0 / static_cast<double>(fam.members.size());
    const double dev = sup_distance(avg, u0, -3.0, 3.0);
    worst_avg = std::max(worst_avg, dev);
    tally.expect(dev <= 1e-12, "N=" + std::to_string(n) + " average deviates by " + fmt("%.3g", dev));

    Eigen::MatrixXd gram(n, n);
    std::vector<PiecewiseProfile> diffs;
    for (int k = 1; k <= n; ++k) diffs.push_back(fam.members[static_cast<std::size_t>(k)] - fam.members[0]);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        gram(a, b) = inner_product(diffs[static_cast<std::size_t>(a)], diffs[static_cast<std::size_t>(b)], -3.0, 3.0);
      }
    }
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().minCoeff();
    min_eig = std::min(min_eig, lo);
    tally.expect(lo > 0.0, "N=" + std::to_string(n) + " Gram matrix singular, " + fmt("%.3g", lo));
    for (std::size_t k = 0; k < fam.members.size(); ++k) {
      tally.expect(membership_cl(prob, fam.members[k]).verdict,
                   "N=" + std::to_string(n) + " member " + std::to_string(k) + " rejected");
    }
  }
  return {5, "face structure of the tent family", tally.pass(),
          tally.summary("max average deviation " + fmt("%.2e", worst_avg) +
                        ", min Gram eigenvalue " + fmt("%.3e", min_eig))};
}

CriterionResult vertex_uniqueness(const Corpus& c) {
  Tally tally;
  for (std::size_t i = 0; i < c.problems.size(); ++i) {
    const InverseProblem& prob = c.problems[i];
    const std::string tag = "target " + std::to_string(i) + " ";
    bool raised = false;
    try {
      (void)tent_family(prob, prob.extremal(), 2);
    } catch (const NoFaceError&) {
      raised = true;
    }
    tally.expect(raised, tag + "extremal datum admitted a face");
    if (prob.pmap().jumps().empty()) continue;
    for (const auto& [name, u0] : known_members(prob)) {
      if (name == "extremal" || name == "cone0") continue;
      bool ok = true;
      try {
        ok = tent_family(prob, u0, 2).members.size() == 3;
      } catch (const std::exception&) {
        ok = false;
      }
      tally.expect(ok, tag + name + " admitted no face");
    }
  }
  return {6, "vertex uniqueness", tally.pass(), tally.summary()};
}

CriterionResult singleton_criterion(const Corpus& c) {
  Tally tally;
  int singletons = 0;
  for (std::size_t i = 0; i < c.problems.size(); ++i) {
    const bool jump_free = c.targets[i].jumps().empty();
    const Uniqueness u = uniqueness_probe(c.problems[i]);
    singletons += u == Uniqueness::kSingleton;
    tally.expect((u == Uniqueness::kSingleton) == jump_free, "target " + std::to_string(i));
  }
  return {7, "singleton criterion", tally.pass(),
          tally.summary(std::to_string(singletons) + " singletons")};
}

CriterionResult submodularity(const Corpus& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tally tally;
  const PiecewisePrimitive U = primitive(c.targets.front(), 0.0);
  double min_margin = INFINITY;
  for (int k = 0; k < 10000; ++k) {
    const double x1 = uniform(rng, -kL, kL);
    const double x2 = x1 + uniform(rng, 1e-2, 2.0);
    const double y1 = uniform(rng, -kL, kL);
    const double y2 = y1 + uniform(rng, 1e-2, 2.0);
    const double margin = (s_value(U, c.flux, kT, x1, y2) + s_value(U, c.flux, kT, x2, y1)) -
                          (s_value(U, c.flux, kT, x1, y1) + s_value(U, c.flux, kT, x2, y2));
    min_margin = std::min(min_margin, margin);
    if (!(margin > 0.0)) tally.expect(false, "quadruple " + std::to_string(k));
  }
  tally.checks = 10000;
  return {8, "submodularity of the action", tally.pass(),
          tally.summary("min margin " + fmt("%.3e", min_margin))};
}

CriterionResult closedness(const Corpus& c) {
  Tally tally;
  std::vector<const InverseProblem*> probs;
  const InverseProblem shock(shock_target(), c.flux, kT);
  probs.push_back(&shock);
  for (const InverseProblem& p : c.problems) {
    if (!p.pmap().jumps().empty() && probs.size() < 6) probs.push_back(&p);
  }
  constexpr double kThetaStar = 1.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const InverseProblem& prob = *probs[i];
    const PiecewiseProfile sharp = construct_sharp(prob, prob.pmap().jumps().front().x);
    const PiecewiseProfile limit = cone_combination(prob, sharp, kThetaStar);
    const double scale = l1_distance(sharp, prob.extremal(), -kL - 3, kL + 3);
    double prev = INFINITY;
    for (int n = 1; n <= 64; n *= 2) {
      const PiecewiseProfile un = cone_combination(prob, sharp, kThetaStar + 1.0 / n);
      const double d = l1_distance(un, limit, -kL - 3, kL + 3);
      tally.expect(d < prev && std::abs(d - scale / n) <= 1e-9 * std::max(1.0, scale),
                   "problem " + std::to_string(i) + " n=" + std::to_string(n));
      prev = d;
    }
    const Verdicts v = decide(prob, limit);
    tally.expect(v.cl.verdict && v.hj.verdict, "problem " + std::to_string(i) + " limit rejected");
  }
  return {9, "closedness under L1 limits", tally.pass(), tally.summary()};
}

CriterionResult empty_interior(const Corpus& c) {
  Tally tally;
  for (std::size_t i = 0; i < c.problems.size(); ++i) {
    const InverseProblem& prob = c.problems[i];
    const double site = default_bump_site(prob);
    for (const auto& [name, m] : known_members(prob)) {
      for (int n : {10, 100}) {
        const Spoiler s = spoiler_bump(prob, m, site, n);
        const MembershipReport r = membership_cl(prob, s.profile);
        tally.expect(r.certified_fail() && s.l1_norm() <= (2.0 / n) * (1.0 + 1e-12),
                     "target " + std::to_string(i) + " " + name + " n=" + std::to_string(n));
      }
    }
  }
  return {10, "empty interior", tally.pass(), tally.summary()};
}

CriterionResult partition_measure(const Corpus& c) {
  Tally tally;
  std::size_t max_points = 0;
  for (std::size_t i = 0; i < c.problems.size(); ++i) {
    const InverseProblem& prob = c.problems[i];
    const Partition& part = prob.partition();
    std::vector<Interval> cover = part.xi;
    for (const ShockGap& g : part.xii) cover.push_back({g.lo, g.hi});
    std::sort(cover.begin(), cover.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    // Uncovered points of [-L, L] sit between consecutive intervals.
    std::size_t points = 0;
    double reach = -INFINITY;
    bool holes = cover.empty() || cover.front().lo > -kL;
    for (const Interval& iv : cover) {
      if (std::isfinite(reach) && iv.lo >= reach - 1e-12) {
        if (iv.lo - reach > 1e-9) holes = true;
        if (reach > -kL && reach < kL) ++points;
      }
      reach = std::max(reach, iv.hi);
    }
    holes = holes || reach < kL;
    const std::size_t pieces = prob.target().pieces().size() + 2;
    const std::size_t jumps = prob.pmap().jumps().size();
    max_points = std::max(max_points, points);
    const double covered = part.covered_length(-kL, kL);
    tally.expect(!holes && std::abs(covered - 2.0 * kL) <= 1e-9 && points <= pieces + jumps,
                 "target " + std::to_string(i) + " uncovered points " + std::to_string(points));
  }
  return {11, "partition measure", tally.pass(),
          tally.summary("max uncovered points " + std::to_string(max_points))};
}

CriterionResult solver_cross_validation() {
  const ConvexFlux flux = ConvexFlux::burgers();
  Tally tally;
  constexpr double dx = 1e-3;

  const PiecewiseProfile shock = PiecewiseProfile::step(0.0, 1.0, 0.0);
  const PiecewiseProfile exact_profile = evolve_cl_profile(shock, flux, 1.0, -2.0, 3.0);
  const auto jumps = exact_profile.jumps();
  double x_cl = INFINITY;
  double size = 0.0;
  for (const Jump& j : jumps) {
    if (std::abs(j.left - j.right) > size) {
      size = std::abs(j.left - j.right);
      x_cl = j.x;
    }
  }
  tally.expect(std::abs(x_cl - 0.5) <= dx, "Lax-Hopf shock at " + fmt("%.6g", x_cl));

  const PiecewiseProfile fv = evolve_fv(shock, flux, 1.0, dx, -2.0, 3.0);
  // Level-1/2 crossing of the smeared numerical shock.
  double x_fv = INFINITY;
  for (const Piece& p : fv.pieces()) {
    if (p.a < 0.5) {
      x_fv = p.x_lo;
      break;
    }
  }
  tally.expect(std::abs(x_fv - 0.5) <= dx, "Godunov shock at " + fmt("%.6g", x_fv));

  const PiecewiseProfile rare = PiecewiseProfile::step(0.0, 0.0, 1.0);
  const PiecewiseProfile fan({{0.0, 1.0, 0.0, 1.0}}, 0.0, 1.0);
  const double e_cl = l1_distance(evolve_cl_profile(rare, flux, 1.0, -2.0, 3.0), fan, -2.0, 3.0);
  const double e_fv = l1_distance(evolve_fv(rare, flux, 1.0, dx, -2.0, 3.0), fan, -2.0, 3.0);
  tally.expect(e_cl <= 1e-2, "Lax-Hopf rarefaction L1 " + fmt("%.3g", e_cl));
  tally.expect(e_fv <= 1e-2, "Godunov rarefaction L1 " + fmt("%.3g", e_fv));

  double worst_lift = 0.0;
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = -kL + 2.0 * kL * (i + 0.5) / xs.size();
  const std::pair<PiecewiseProfile, LipschitzPath> cases[] = {
      {shock, LipschitzPath::constant(-1.0, 1.0)},
      {rare, LipschitzPath::linear(-0.5, 0.8, 1.0)},
  };
  for (const auto& [u0, path] : cases) {
    const PiecewisePrimitive U = primitive(u0, 0.0);
    const auto lifted = lift_cl_to_hj(u0, flux, path, U(path(0.0)), 1.0, xs);
    const auto direct = evolve_hj(U, flux, 1.0, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      worst_lift = std::max(worst_lift, std::abs(lifted[i] - direct[i]));
    }
  }
  tally.expect(worst_lift <= 1e-5, "lifted potential off by " + fmt("%.3g", worst_lift));

  std::ostringstream extra;
  extra << "shock |dx| " << fmt("%.1e", std::abs(x_cl - 0.5)) << "/"
        << fmt("%.1e", std::abs(x_fv - 0.5)) << ", fan L1 " << fmt("%.1e", e_cl) << "/"
        << fmt("%.1e", e_fv) << ", lift sup " << fmt("%.1e", worst_lift);
  return {12, "solver cross-validation", tally.pass(), tally.summary(extra.str())};
}

const char* const kTitles[] = {"",
                               "attainability gate",
                               "round trip through the forward solvers",
                               "pullback equals reversed evolution",
                               "membership characterization",
                               "face structure of the tent family",
                               "vertex uniqueness",
                               "singleton criterion",
                               "submodularity of the action",
                               "closedness under L1 limits",
                               "empty interior",
                               "partition measure",
                               "solver cross-validation"};

CriterionResult dispatch(int id, std::uint64_t seed, const Corpus* corpus) {
  std::optional<Corpus> own;
  auto need = [&]() -> const Corpus& {
    if (corpus != nullptr) return *corpus;
    if (!own) own = make_corpus(seed);
    return *own;
  };
  switch (id) {
    case 1: return attainability_gate(seed);
    case 2: return round_trip(need());
    case 3: return construction_equality(need());
    case 4: return membership_characterization(need());
    case 5: return face_structure();
    case 6: return vertex_uniqueness(need());
    case 7: return singleton_criterion(need());
    case 8: return submodularity(need(), seed);
    case 9: return closedness(need());
    case 10: return empty_interior(need());
    case 11: return partition_measure(need());
    case 12: return solver_cross_validation();
    default: throw ArgumentError("unknown criterion " + std::to_string(id));
  }
}

CriterionResult guarded(int id, std::uint64_t seed, const Corpus* corpus) {
  CriterionResult r;
  const double secs = seconds_of([&] {
    try {
      r = dispatch(id, seed, corpus);
    } catch (const std::exception& e) {
      r = {id, kTitles[id], false, std::string("exception: ") + e.what()};
    }
  });
  r.seconds = secs;
  return r;
}

}  // namespace

std::vector<PiecewiseProfile> corpus_generate(std::uint64_t seed, int count,
                                              const ConvexFlux& flux, double horizon) {
  if (count < 1) throw ArgumentError("corpus size must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<PiecewiseProfile> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(random_target(rng, flux, horizon, i % 4 != 3));
  return out;
}

std::vector<PiecewiseProfile> corpus_violating(std::uint64_t seed, int count,
                                               const ConvexFlux& flux, double horizon) {
  std::mt19937_64 rng(seed);
  std::vector<PiecewiseProfile> out;
  for (int i = 0; i < count; ++i) {
    PiecewiseProfile w = random_target(rng, flux, horizon, true);
    std::vector<Piece> pieces = w.pieces();
    const std::size_t k =
        std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng);
    double ext_right = w.ext_right();
    if (i % 2 == 0) {
      // Upward jump at the start of piece k: raise it and everything after.
      const double before = k == 0 ? w.ext_left() : pieces[k - 1].end();
      const double lift = before - pieces[k].a + uniform(rng, 0.3, 1.0);
      for (std::size_t j = k; j < pieces.size(); ++j) pieces[j].a += lift;
      ext_right += lift;
    } else {
      pieces[k].b = 2.0 / (horizon * flux.convexity_floor());
    }
    out.emplace_back(pieces, w.ext_left(), ext_right);
  }
  return out;
}

bool pairwise_admissible(const PiecewiseProfile& w, const ConvexFlux& flux, double horizon,
                         int pairs, std::uint64_t seed, double window) {
  std::mt19937_64 rng(seed);
  auto p = [&](double x) { return x - horizon * flux.df(w.left(x)); };
  for (int k = 0; k < pairs; ++k) {
    const double x = uniform(rng, -window, window);
    const double y = k % 2 == 0 ? uniform(rng, 0.0, 2.0 * window) : uniform(rng, 0.0, 0.5);
    if (p(x) - p(x + y) > 1e-10) return false;
  }
  return true;
}

PiecewiseProfile shock_target() { return PiecewiseProfile::step(0.0, 1.0, 0.0); }

int criterion_count() { return 12; }

CriterionResult run_criterion(int id, std::uint64_t seed) { return guarded(id, seed, nullptr); }

std::vector<CriterionResult> run_acceptance(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  std::optional<Corpus> corpus;
  try {
    corpus = make_corpus(seed);
  } catch (const std::exception&) {
  }
  for (int id = 1; id <= criterion_count(); ++id) {
    out.push_back(guarded(id, seed, corpus ? &*corpus : nullptr));
  }
  return out;
}

void print_summary(std::ostream& os, const std::vector<CriterionResult>& results) {
  int passed = 0;
  double total = 0.0;
  for (const CriterionResult& r : results) {
    char head[96];
    std::snprintf(head, sizeof head, "[%s] %2d %-40s %7.2fs  ", r.pass ? "PASS" : "FAIL", r.id,
                  r.title.c_str(), r.seconds);
    os << head << r.detail << '\n';
    passed += r.pass;
    total += r.seconds;
  }
  char tail[96];
  std::snprintf(tail, sizeof tail, "%d/%zu criteria passed in %.2fs", passed, results.size(), total);
  os << tail << '\n';
}

}  // namespace backtrace::suite
