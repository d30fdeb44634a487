// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   1 worked examples E1..E5            (< 1 s each)
//   2 exact metric identities           (1000 IC/Mallows profiles, n <= 50, m <= 8)
//   3 axiom audit                       (10^4 profiles per cell, n <= 6, m <= 5)
//   4 matching-domination oracle        (10^4 instances, n <= 6, m <= 5)
//   5 characteristic elections
//   6 1-center Mallows sweep            (n = 1000, m = 10, 50 profiles, +-0.03)
//   7 Euclidean gaussian claim          (1000 trials, n = 100, m = 10)
//   8 PrefLib ingestion invariants and bundled fixture

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "conflict_select.hpp"
#include "oracles.hpp"

using namespace conflict_select;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds_since(t0);
}

// ---- 1 ----
Check worked_examples() {
  Check c;
  double worst = 0;

  worst = std::max(worst, timed([&] {
    const auto p = fixtures::e1();
    const auto ab = p.pair("a", "b"), xy = p.pair("x", "y");
    c.expect(conflict_score(p, ab, ConflictMode::sum) == 6 && conflict_score(p, xy, ConflictMode::sum) == 6, "E1 conf_sum = 6, 6");
    c.expect(conflict_score(p, ab, ConflictMode::nash) == 5, "E1 conf_nash{a,b} = 5");
    c.expect(conflict_score(p, xy, ConflictMode::nash) == 9, "E1 conf_nash{x,y} = 9");
    c.expect(swap_score(p, ab) == 1 && swap_score(p, xy) == 3, "E1 swap 1 vs 3");
    const auto sum = select(RuleId::max_sum(), p);
    c.expect(sum.selects(ab) && sum.selects(xy) && sum.score_of(ab) == sum.score_of(xy), "E1 MaxSum ties {a,b} and {x,y}");
    c.expect(select(RuleId::max_nash(), p).winners == std::vector<Pair>{xy}, "E1 MaxNash {x,y}");
    c.expect(select(RuleId::max_swap(), p).winners == std::vector<Pair>{xy}, "E1 MaxSwap {x,y}");
  }));

  worst = std::max(worst, timed([&] {
    const auto p = fixtures::e2();
    const auto ab = p.pair("a", "b"), xy = p.pair("x", "y");
    c.expect(phi(p, xy) == Rational(1, 2) && phi(p, ab) == Rational(1, 4), "E2 phi 1/2, 1/4");
    c.expect(select(RuleId::max_swap(), p).winners == std::vector<Pair>{ab}, "E2 MaxSwap {a,b}");
    c.expect(select(RuleId::max_nash(), p).winners == std::vector<Pair>{ab}, "E2 MaxNash {a,b}");
    c.expect(select(RuleId::max_sum(), p).winners == std::vector<Pair>{xy}, "E2 MaxSum {x,y}");
    c.expect(select(RuleId::max_polar(Rational(2)), p).winners == std::vector<Pair>{xy}, "E2 2-MaxPolar {x,y}");
  }));

  worst = std::max(worst, timed([&] {
    const auto p = fixtures::e3();
    const auto ab = p.pair("a", "b"), cd = p.pair("c", "d");
    const auto swap = select(RuleId::max_swap(), p);
    c.expect(swap.selects(ab) && swap.selects(cd), "E3 MaxSwap selects {a,b} and {c,d}");
    c.expect(matching_dominates(p, cd, ab), "E3 {c,d} dominates {a,b}");
    c.expect(!check_axiom(AxiomId::matching_domination, RuleId::max_swap(), p).holds, "E3 MatchingDomination FAIL for MaxSwap");
    for (const auto& r : {RuleId::max_sum(), RuleId::max_nash(), RuleId::max_polar(Rational(2))}) {
      c.expect(check_axiom(AxiomId::matching_domination, r, p).holds, "E3 MatchingDomination PASS for " + r.name());
    }
  }));

  worst = std::max(worst, timed([&] {
    const auto p = fixtures::e4();
    std::vector<Pair> conflicting;
    for (const auto& pr : p.pairs()) {
      if (is_conflicting(p, pr)) conflicting.push_back(pr);
    }
    c.expect(conflicting == std::vector<Pair>{p.pair("b", "c")}, "E4 only {b,c} conflicts");
    for (const auto& r : RuleId::conflictual()) {
      c.expect(select(r, p).winners == conflicting, "E4 " + r.name() + " selects {b,c}");
      c.expect(!check_axiom(AxiomId::unanimity, r, p).holds, "E4 unanimity fails for " + r.name());
    }
  }));

  worst = std::max(worst, timed([&] {
    const auto p = fixtures::e5();
    c.expect(matching_dominates(p, p.pair("a", "b"), p.pair("x", "y")), "E5 {a,b} dominates {x,y}");
  }));

  c.expect(worst < 1.0, "each example under 1 s");
  c.note("slowest example " + fmt(worst * 1000, 2) + " ms");
  return c;
}

// ---- 2 ----
Check identities() {
  Check c;
  std::size_t pairs = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    auto rng = make_rng(777, t);
    GeneratorConfig g;
    g.kind = t % 2 == 0 ? GeneratorKind::impartial_culture : GeneratorKind::mallows;
    g.voters = std::uniform_int_distribution<std::int64_t>(1, 50)(rng);
    g.candidates = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    g.psi = std::uniform_real_distribution<double>(0, 1)(rng);
    g.seed = rng();
    const auto p = generate(g);
    const Rational n(p.voter_weight());
    const auto mi = static_cast<std::int64_t>(p.candidate_count());
    const Rational m1(mi - 1);
    std::int64_t budget = 0;
    Rational best(0);
    for (const auto& tl : tally_all(p)) {
      const auto a = assess_pair(tl);
      const auto bnm = a.beta * n * m1;
      if (Rational(a.swap_score) != bnm * (Rational(1) - a.phi) / Rational(2)) c.expect(false, "swap identity, trial " + std::to_string(t));
      if (Rational(a.conf_nash) != bnm * bnm * (Rational(1) - a.phi * a.phi) / Rational(4)) {
        c.expect(false, "nash identity, trial " + std::to_string(t));
      }
      if (a.beta == Rational(1) && a.alpha > Rational(0) && a.gamma != Rational(1)) c.expect(false, "beta=1 => gamma=1, trial " + std::to_string(t));
      budget += tl.total_distance();
      best = std::max(best, a.beta);
      ++pairs;
    }
    if (budget != p.voter_weight() * (mi - 1) * mi * (mi + 1) / 6) c.expect(false, "discrepancy budget, trial " + std::to_string(t));
    if (!(best > Rational(1, 3))) c.expect(false, "max beta > 1/3, trial " + std::to_string(t));
    if (c.notes.size() > 5) break;
  }
  c.note(std::to_string(pairs) + " pairs checked");
  return c;
}

// ---- 3 ----
Check axiom_audit() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  SearchSpace space;
  space.generator.kind = GeneratorKind::impartial_culture;
  space.min_voters = 2;
  space.max_voters = 6;
  space.min_candidates = 3;
  space.max_candidates = 5;
  const std::uint64_t budget = 10000;
  const auto rules = RuleId::conflictual();

  auto passes = [&](AxiomId axiom, const RuleId& rule) {
    const auto found = search_counterexample(axiom, rule, space, budget, 42);
    if (found) c.note(rule.name() + " " + std::string(to_string(axiom)) + ": " + found->report.witness->description);
    return !found;
  };

  for (const auto& r : rules) {
    for (auto a : {AxiomId::reverse_stability, AxiomId::conflict_consistency, AxiomId::antagonization_consistency}) {
      c.expect(passes(a, r), r.name() + " " + std::string(to_string(a)) + " PASS");
    }
    const bool md = passes(AxiomId::matching_domination, r);
    if (r.kind() == RuleKind::max_swap) {
      c.expect(!check_axiom(AxiomId::matching_domination, r, fixtures::e3()).holds, "MaxSwap MatchingDomination FAIL on E3");
      c.note("MaxSwap MatchingDomination random search " + std::string(md ? "found no witness" : "found a witness"));
    } else {
      c.expect(md, r.name() + " MatchingDomination PASS");
    }
    const auto cm = search_counterexample(AxiomId::conflict_monotonicity, r, space, budget, 42);
    c.expect(cm.has_value(), r.name() + " ConflictMonotonicity witness");
    if (cm) {
      // The witness must replay.
      c.expect(!check_axiom(AxiomId::conflict_monotonicity, r, cm->report.witness->profile).holds, r.name() + " CM witness replays");
    }
    const bool bp = passes(AxiomId::balance_preference, r);
    if (r.kind() == RuleKind::max_nash || r.kind() == RuleKind::max_swap) {
      c.expect(bp, r.name() + " BalancePreference PASS");
    } else {
      const bool e2_fails = !check_axiom(AxiomId::balance_preference, r, fixtures::e2()).holds;
      c.expect(e2_fails || !bp, r.name() + " BalancePreference FAIL");
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 300, "runtime under 5 min");
  c.note(std::to_string(budget) + " profiles per cell, " + fmt(secs, 1) + " s");
  return c;
}

// ---- 4 ----
Check matching_oracle() {
  Check c;
  SearchSpace space;
  space.generator.kind = GeneratorKind::impartial_culture;
  space.min_voters = 2;
  space.max_voters = 6;
  space.min_candidates = 3;
  space.max_candidates = 5;
  std::size_t instances = 0, disagreements = 0, positives = 0;
  for (std::uint64_t t = 0; instances < 10000; ++t) {
    const auto p = space.sample(99, t);
    std::vector<Pair> conflicting;
    for (const auto& pr : p.pairs()) {
      if (is_conflicting(p, pr)) conflicting.push_back(pr);
    }
    if (conflicting.empty()) continue;
    auto rng = make_rng(100, t);
    std::uniform_int_distribution<std::size_t> pick(0, conflicting.size() - 1);
    const auto hi = conflicting[pick(rng)];
    const auto lo = conflicting[pick(rng)];
    const bool fast = matching_dominates(p, hi, lo);
    positives += fast;
    if (fast != oracle::matching_dominates(p, hi, lo)) ++disagreements;
    ++instances;
  }
  c.expect(disagreements == 0, "zero disagreements");
  c.note(std::to_string(instances) + " instances, " + std::to_string(positives) + " dominated, " + std::to_string(disagreements) +
         " disagreements");
  return c;
}

// ---- 5 ----
Check characteristic() {
  Check c;
  auto extremes = [](const Profile& p) {
    Rational a(0), b(0);
    for (const auto& tl : tally_all(p)) {
      a = std::max(a, alpha(tl));
      b = std::max(b, beta(tl));
    }
    return std::pair{a, b};
  };
  for (std::size_t m = 3; m <= 8; ++m) {
    const auto [ai, bi] = extremes(fixtures::identity(m, 10));
    c.expect(ai == Rational(0) && bi == Rational(1), "ID m=" + std::to_string(m));
    const auto [aa, ba] = extremes(fixtures::antagonism(m, 10));
    c.expect(aa == Rational(1) && ba == Rational(1), "AN m=" + std::to_string(m));
  }
  for (std::int64_t m = 3; m <= 5; ++m) {
    const auto [au, bu] = extremes(fixtures::uniformity(static_cast<std::size_t>(m)));
    c.expect(au == Rational(1) && bu == Rational(m + 1, 3 * (m - 1)), "UN m=" + std::to_string(m) + " beta " + bu.str());
  }
  return c;
}

// ---- 6 ----
Check mallows_sweep_check() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> psis{0.1, 0.3, 0.6};
  const double alpha_ref[] = {0.231, 0.567, 0.828};
  const double beta_ref[] = {0.858, 0.669, 0.515};
  const double tol = 0.03;
  const auto rows = mallows_sweep(psis, 1000, 10, 50, 1, 2024);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    c.expect(std::abs(r.mean_alpha - alpha_ref[k]) <= tol, "psi=" + fmt(r.psi, 1) + " mean alpha");
    c.expect(std::abs(r.max_beta - beta_ref[k]) <= tol, "psi=" + fmt(r.psi, 1) + " max beta");
    c.note("psi=" + fmt(r.psi, 1) + ": mean alpha " + fmt(r.mean_alpha) + " (ref " + fmt(alpha_ref[k], 3) + "), max beta " +
           fmt(r.max_beta) + " (ref " + fmt(beta_ref[k], 3) + ")");
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 600, "runtime under 10 min");
  c.note(fmt(secs, 1) + " s");
  return c;
}

// ---- 7 ----
Check euclidean() {
  Check c;
  ExperimentSpec spec;
  GeneratorConfig g;
  g.kind = GeneratorKind::euclidean;
  g.voters = 100;
  g.candidates = 10;
  g.voter_distribution = SpatialDistribution::gaussian;
  g.candidate_distribution = SpatialDistribution::gaussian;
  spec.generator = g;
  spec.rules = RuleId::all_default();
  spec.trials = 1000;
  spec.seed = 61;
  const auto result = run_experiment(spec);
  std::map<std::string, RuleSummary> by_rule;
  for (const auto& s : summarize(spec, result)) by_rule.emplace(s.rule, s);
  const auto dist = [&](const std::string& r) { return by_rule.at(r).distance->mean; };
  const auto beta = [&](const std::string& r) { return by_rule.at(r).beta.mean; };

  c.expect(dist("MaxNash") > dist("Borda2"), "MaxNash distance > Borda2 distance");
  for (const auto& r : spec.rules) {
    if (r.name() != "Borda2") c.expect(dist("Borda2") <= dist(r.name()), "Borda2 distance <= " + r.name());
  }
  for (const auto& r : RuleId::conflictual()) {
    c.expect(beta(r.name()) > beta("Borda2") && beta(r.name()) > beta("CC2"), r.name() + " beta above Borda2/CC2");
  }
  std::string line;
  for (const auto& r : spec.rules) {
    line += r.name() + " d=" + fmt(dist(r.name()), 3) + " b=" + fmt(beta(r.name()), 3) + "; ";
  }
  c.note(line + "Random d=" + fmt(dist("Random"), 3));
  return c;
}

// ---- 8 ----
Check preflib_check(const std::string& data_dir) {
  Check c;
  std::ifstream in(data_dir + "/mini.soi");
  std::stringstream text;
  text << in.rdbuf();
  c.expect(static_cast<bool>(in), "fixture file readable");
  const auto raw = parse_preflib(text.str());
  c.expect(parse_preflib(serialize_preflib(raw)) == raw, "fixture round-trip");
  bool has_tie = false, has_truncation = false, has_fraction = false;
  for (const auto& e : raw.entries) {
    for (const auto& g : e.groups) has_tie = has_tie || g.size() > 1;
    has_truncation = has_truncation || e.ranked_count() < raw.names.size();
    has_fraction = has_fraction || !e.weight.is_integer();
  }
  c.expect(has_tie && has_truncation && has_fraction, "fixture exercises ties, truncation and weights");

  IngestPolicy policy;
  policy.weight_scale = 10;
  const auto m = materialize(raw, policy, 3);
  c.expect(m.dropped_incomplete == 1 && m.profile.voter_weight() == 30 + 25 + 3 + 2, "fixture materialization");
  c.expect(m.profile == materialize(raw, policy, 3).profile, "materialize deterministic");

  // Random raw elections: round-trip, projection and rounding bounds.
  std::size_t checked = 0;
  for (std::uint64_t t = 0; t < 500; ++t) {
    auto rng = make_rng(8, t);
    const std::size_t cands = std::uniform_int_distribution<std::size_t>(2, 7)(rng);
    RawElection r;
    for (std::size_t i = 0; i < cands; ++i) r.names.push_back("c" + std::to_string(i));
    const int entries = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int e = 0; e < entries; ++e) {
      auto order = random_ballot(cands, rng);
      RankingEntry entry;
      entry.weight = Rational(std::uniform_int_distribution<std::int64_t>(1, 40)(rng), std::uniform_int_distribution<std::int64_t>(1, 8)(rng));
      for (auto x : order.order()) {
        if (!entry.groups.empty() && std::bernoulli_distribution(0.2)(rng)) {
          entry.groups.back().push_back(x.index);
        } else {
          entry.groups.push_back({x.index});
        }
      }
      r.entries.push_back(entry);
    }
    if (!(parse_preflib(serialize_preflib(r)) == r)) c.expect(false, "random round-trip, trial " + std::to_string(t));

    IngestPolicy pol;
    pol.weight_scale = std::uniform_int_distribution<std::int64_t>(1, 20)(rng);
    Materialized full{Profile(1, {{Ballot::identity(1), 1}})};
    try {
      full = materialize(r, pol, t);
    } catch (const data_error&) {
      continue;  // every entry rounded to zero
    }
    // Rounding: each kept entry is within 1/2 of weight * scale.
    std::size_t k = 0;
    for (const auto& e : r.entries) {
      const Rational target = e.weight * Rational(pol.weight_scale);
      const auto mult = static_cast<std::int64_t>(std::llround(static_cast<double>(target)));
      if (mult == 0 && target < Rational(1, 2)) continue;
      const auto got = full.profile.ballots()[k++].multiplicity;
      if ((Rational(got) - target).abs() > Rational(1, 2)) c.expect(false, "rounding bound, trial " + std::to_string(t));
    }
    // Projection onto a random subset keeps every retained pair's order.
    std::vector<std::size_t> subset(cands);
    std::iota(subset.begin(), subset.end(), 0);
    std::shuffle(subset.begin(), subset.end(), rng);
    subset.resize(std::uniform_int_distribution<std::size_t>(2, cands)(rng));
    pol.candidate_subset = subset;
    const auto proj = materialize(r, pol, t);
    for (std::size_t b = 0; b < proj.profile.ballots().size(); ++b) {
      const auto& pb = proj.profile.ballots()[b].ballot;
      const auto& fb = full.profile.ballots()[b].ballot;
      for (const auto& pr : proj.profile.pairs()) {
        const CandidateId x{subset[pr.first().index]}, y{subset[pr.second().index]};
        if (pb.prefers(pr.first(), pr.second()) != fb.prefers(x, y)) c.expect(false, "projection order, trial " + std::to_string(t));
      }
    }
    ++checked;
    if (c.notes.size() > 5) break;
  }
  c.note(std::to_string(checked) + " random elections; survey-data tables not reproducible without the data");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string data_dir = argc > 1 ? argv[1] : TEST_DATA_DIR;
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"worked examples", worked_examples},
      {"exact metric identities", identities},
      {"axiom audit", axiom_audit},
      {"matching-domination oracle", matching_oracle},
      {"characteristic elections", characteristic},
      {"Mallows sweep", mallows_sweep_check},
      {"Euclidean claim", euclidean},
      {"PrefLib ingestion", [&] { return preflib_check(data_dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.note(std::string("exception: ") + e.what());
    }
    std::cout << "CRITERION " << i + 1 << ' ' << (c.ok ? "PASS" : "FAIL") << " (" << criteria[i].first << ")";
    for (const auto& n : c.notes) std::cout << " | " << n;
    std::cout << std::endl;
    failed += !c.ok;
  }
  return failed == 0 ? 0 : 1;
}
