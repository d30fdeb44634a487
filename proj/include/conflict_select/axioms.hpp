#pragma once

/**
 * @file axioms.hpp
 * @brief Decision procedures for the conflict axioms on concrete
 *        (rule, profile) instances, and a seeded counterexample search.
 *
 * A failed check carries a witness: the profile it failed on, the pairs
 * involved, and for the mutation-based axioms the derived profile. Running
 * check_axiom again on the witness profile reproduces the failure.
 */

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "conflict_select/core.hpp"
#include "conflict_select/errors.hpp"
#include "conflict_select/generators.hpp"
#include "conflict_select/metrics.hpp"
#include "conflict_select/rules.hpp"

namespace conflict_select {

enum class AxiomId {
  reverse_stability,
  conflict_consistency,
  unanimity,
  antagonization_consistency,
  matching_domination,
  conflict_monotonicity,
  balance_preference,
};

inline constexpr AxiomId all_axioms[] = {
    AxiomId::reverse_stability,   AxiomId::conflict_consistency,  AxiomId::unanimity,
    AxiomId::antagonization_consistency, AxiomId::matching_domination, AxiomId::conflict_monotonicity,
    AxiomId::balance_preference,
};

inline std::string_view to_string(AxiomId a) {
  switch (a) {
    case AxiomId::reverse_stability: return "ReverseStability";
    case AxiomId::conflict_consistency: return "ConflictConsistency";
    case AxiomId::unanimity: return "Unanimity";
    case AxiomId::antagonization_consistency: return "AntagonizationConsistency";
    case AxiomId::matching_domination: return "MatchingDomination";
    case AxiomId::conflict_monotonicity: return "ConflictMonotonicity";
    case AxiomId::balance_preference: return "BalancePreference";
  }
  return "?";
}

inline AxiomId parse_axiom(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (auto a : all_axioms) {
    std::string name;
    for (char c : to_string(a)) name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == name) return a;
  }
  throw config_error("unknown axiom '" + std::string(text) + "'");
}

struct AxiomWitness {
  Profile profile;
  std::optional<Profile> derived;  // mutated profile for monotonicity/antagonization/reversal
  std::vector<Pair> pairs;
  std::string description;
};

struct AxiomReport {
  AxiomId axiom;
  RuleId rule;
  bool holds = true;
  std::optional<AxiomWitness> witness;
  // Unanimity only: the weaker reading (top candidate in at least one winning pair).
  std::optional<bool> holds_some_winner;
};

namespace detail {

/// Multiplicity-weighted histogram of |v(ab)| split by group: [0] over
/// V^{a>b}, [1] over V^{b>a}. Index d holds the weight at distance d.
using DistanceHistograms = std::array<std::vector<std::int64_t>, 2>;

inline DistanceHistograms distance_histograms(const Profile& profile, const Pair& pair) {
  const auto m = profile.candidate_count();
  DistanceHistograms h{std::vector<std::int64_t>(m, 0), std::vector<std::int64_t>(m, 0)};
  for (const auto& wb : profile.ballots()) {
    const int d = rank_distance(wb.ballot, pair.first(), pair.second());
    h[d > 0 ? 0 : 1][static_cast<std::size_t>(std::abs(d))] += wb.multiplicity;
  }
  return h;
}

// Sorted descending, the first multiset dominates the second element-wise iff
// the sizes agree and every upper tail count of the first is at least the
// second's.
inline bool sorted_dominates(const std::vector<std::int64_t>& hi, const std::vector<std::int64_t>& lo) {
  std::int64_t tail_hi = 0;
  std::int64_t tail_lo = 0;
  for (std::size_t d = hi.size(); d-- > 1;) {
    tail_hi += hi[d];
    tail_lo += lo[d];
    if (tail_hi < tail_lo) return false;
  }
  return tail_hi == tail_lo;
}

inline std::int64_t weighted_total(const std::vector<std::int64_t>& h) {
  std::int64_t s = 0;
  for (std::size_t d = 0; d < h.size(); ++d) s += h[d] * static_cast<std::int64_t>(d);
  return s;
}

inline std::vector<std::int64_t> merged(const DistanceHistograms& h) {
  auto out = h[0];
  for (std::size_t d = 0; d < out.size(); ++d) out[d] += h[1][d];
  return out;
}

}  // namespace detail

/// Whether some group-respecting bijection of voters maps the dominator's
/// absolute distances onto the dominated pair's with >= everywhere and >
/// somewhere. Either orientation of the dominated pair may be matched.
inline bool matching_dominates(const Profile& profile, const Pair& dominator, const Pair& dominated) {
  if (!is_conflicting(profile, dominator) || !is_conflicting(profile, dominated)) {
    throw std::domain_error("matching domination is defined for conflicting pairs only");
  }
  const auto hd = detail::distance_histograms(profile, dominator);
  const auto hs = detail::distance_histograms(profile, dominated);
  // With equal group sizes and element-wise >=, equal totals force equality everywhere.
  if (detail::weighted_total(detail::merged(hd)) <= detail::weighted_total(detail::merged(hs))) return false;
  const bool straight = detail::sorted_dominates(hd[0], hs[0]) && detail::sorted_dominates(hd[1], hs[1]);
  const bool crossed = detail::sorted_dominates(hd[0], hs[1]) && detail::sorted_dominates(hd[1], hs[0]);
  return straight || crossed;
}

namespace detail {

inline std::string pair_list(const Profile& p, const std::vector<Pair>& pairs) {
  std::string s;
  for (const auto& x : pairs) s += (s.empty() ? "" : " ") + p.pair_label(x);
  return s.empty() ? "(none)" : s;
}

inline AxiomReport fail(AxiomId axiom, const RuleId& rule, AxiomWitness w) {
  return AxiomReport{axiom, rule, false, std::move(w), std::nullopt};
}

/// Copy of the profile where one copy of ballot entry `index` is replaced by `replacement`.
inline Profile replace_one_copy(const Profile& profile, std::size_t index, Ballot replacement) {
  std::vector<WeightedBallot> ballots(profile.ballots().begin(), profile.ballots().end());
  if (--ballots[index].multiplicity == 0) ballots.erase(ballots.begin() + static_cast<std::ptrdiff_t>(index));
  ballots.push_back({std::move(replacement), 1});
  return Profile(profile.candidate_count(), std::move(ballots), profile.names());
}

inline Ballot swap_ranks(const Ballot& b, std::size_t rank_x, std::size_t rank_y) {
  std::vector<CandidateId> order(b.order().begin(), b.order().end());
  std::swap(order[rank_x - 1], order[rank_y - 1]);
  return Ballot(std::move(order));
}

}  // namespace detail

inline AxiomReport check_axiom(AxiomId axiom, const RuleId& rule, const Profile& profile) {
  const auto tallies = tally_all(profile);
  const auto outcome = select(rule, profile, tallies);
  AxiomReport ok{axiom, rule, true, std::nullopt, std::nullopt};

  switch (axiom) {
    case AxiomId::reverse_stability: {
      const auto reversed = reverse_profile(profile);
      const auto other = select(rule, reversed);
      if (other.winners != outcome.winners) {
        return detail::fail(axiom, rule,
                            {profile, reversed, outcome.winners,
                             "winners " + detail::pair_list(profile, outcome.winners) + " become " +
                                 detail::pair_list(profile, other.winners) + " on the reversed profile"});
      }
      return ok;
    }

    case AxiomId::conflict_consistency: {
      const bool any_conflict = std::any_of(tallies.begin(), tallies.end(), [](const auto& t) { return t.conflicting(); });
      if (!any_conflict) return ok;
      for (const auto& w : outcome.winners) {
        if (!is_conflicting(profile, w)) {
          return detail::fail(axiom, rule,
                              {profile, std::nullopt, {w}, "non-conflicting pair " + profile.pair_label(w) + " wins"});
        }
      }
      return ok;
    }

    case AxiomId::unanimity: {
      const CandidateId top = profile.ballots().front().ballot.at_rank(1);
      const bool unanimous = std::all_of(profile.ballots().begin(), profile.ballots().end(),
                                         [&](const auto& wb) { return wb.ballot.at_rank(1) == top; });
      if (!unanimous) {
        ok.holds_some_winner = true;
        return ok;
      }
      const bool every = std::all_of(outcome.winners.begin(), outcome.winners.end(), [&](const Pair& p) { return p.contains(top); });
      const bool some = std::any_of(outcome.winners.begin(), outcome.winners.end(), [&](const Pair& p) { return p.contains(top); });
      AxiomReport r{axiom, rule, every, std::nullopt, some};
      if (!every) {
        r.witness = AxiomWitness{profile, std::nullopt, outcome.winners,
                                 "unanimous top " + profile.name(top) + " is missing from a winning pair among " +
                                     detail::pair_list(profile, outcome.winners)};
      }
      return r;
    }

    case AxiomId::antagonization_consistency: {
      for (const auto& w : outcome.winners) {
        const auto antagonized = antagonize(profile, w);
        if (!select(rule, antagonized).selects(w)) {
          return detail::fail(axiom, rule,
                              {profile, antagonized, {w}, profile.pair_label(w) + " loses after antagonization"});
        }
      }
      return ok;
    }

    case AxiomId::matching_domination: {
      for (const auto& w : outcome.winners) {
        if (!is_conflicting(profile, w)) continue;
        for (const auto& t : tallies) {
          if (t.pair == w || !t.conflicting()) continue;
          if (matching_dominates(profile, t.pair, w)) {
            return detail::fail(axiom, rule,
                                {profile, std::nullopt, {w, t.pair},
                                 "winner " + profile.pair_label(w) + " is matching-dominated by " + profile.pair_label(t.pair)});
          }
        }
      }
      return ok;
    }

    case AxiomId::conflict_monotonicity: {
      const auto m = profile.candidate_count();
      const auto ballots = profile.ballots();
      for (const auto& w : outcome.winners) {
        for (std::size_t i = 0; i < ballots.size(); ++i) {
          const auto& b = ballots[i].ballot;
          const bool first_wins = b.prefers(w.first(), w.second());
          const auto top = static_cast<std::size_t>(b.position(first_wins ? w.first() : w.second()));
          const auto bottom = static_cast<std::size_t>(b.position(first_wins ? w.second() : w.first()));
          std::vector<Ballot> moves;
          if (top > 1) moves.push_back(detail::swap_ranks(b, top - 1, top));
          if (bottom < m) moves.push_back(detail::swap_ranks(b, bottom, bottom + 1));
          for (auto& moved : moves) {
            auto mutated = detail::replace_one_copy(profile, i, std::move(moved));
            const auto after = select(rule, mutated);
            if (!after.selects(w)) {
              return detail::fail(axiom, rule,
                                  {profile, std::move(mutated), {w},
                                   "widening " + profile.pair_label(w) + " in one copy of ballot " + std::to_string(i + 1) +
                                       " makes the winners " + detail::pair_list(profile, after.winners)});
            }
          }
        }
      }
      return ok;
    }

    case AxiomId::balance_preference: {
      std::vector<std::vector<std::int64_t>> abs_hist;
      for (const auto& t : tallies) abs_hist.push_back(detail::merged(detail::distance_histograms(profile, t.pair)));
      for (const auto& w : outcome.winners) {
        std::size_t wi = 0;
        while (tallies[wi].pair != w) ++wi;
        const auto net_w = std::abs(tallies[wi].net_distance());
        for (std::size_t k = 0; k < tallies.size(); ++k) {
          if (k == wi || abs_hist[k] != abs_hist[wi]) continue;
          if (std::abs(tallies[k].net_distance()) < net_w) {
            return detail::fail(axiom, rule,
                                {profile, std::nullopt, {w, tallies[k].pair},
                                 "winner " + profile.pair_label(w) + " has the same distance multiset as the more balanced " +
                                     profile.pair_label(tallies[k].pair)});
          }
        }
      }
      return ok;
    }
  }
  return ok;
}

/// Random profiles for the counterexample search: each trial draws n and m
/// uniformly from the ranges, then generates with the base config.
struct SearchSpace {
  GeneratorConfig generator;
  std::int64_t min_voters = 2;
  std::int64_t max_voters = 6;
  std::size_t min_candidates = 3;
  std::size_t max_candidates = 5;

  Profile sample(std::uint64_t seed, std::uint64_t trial) const {
    if (min_voters < 1 || min_voters > max_voters || min_candidates < 2 || min_candidates > max_candidates) {
      throw config_error("invalid search ranges");
    }
    auto rng = make_rng(seed, trial);
    GeneratorConfig c = generator;
    c.voters = std::uniform_int_distribution<std::int64_t>(min_voters, max_voters)(rng);
    c.candidates = std::uniform_int_distribution<std::size_t>(min_candidates, max_candidates)(rng);
    if (c.kind == GeneratorKind::antagonism && c.voters % 2 != 0) ++c.voters;
    c.seed = rng();
    return generate(c);
  }
};

/// Worker count: CONFLICT_SELECT_THREADS if set, else the hardware count.
inline unsigned worker_count() {
  if (const char* env = std::getenv("CONFLICT_SELECT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

struct SearchResult {
  std::uint64_t trial = 0;
  AxiomReport report;
};

/// Checks `budget` sampled profiles and returns the failing trial with the
/// smallest index, independent of the worker count.
inline std::optional<SearchResult> search_counterexample(AxiomId axiom, const RuleId& rule, const SearchSpace& space,
                                                         std::uint64_t budget, std::uint64_t seed) {
  if (budget < 1) throw config_error("search budget must be at least 1");
  const unsigned workers = std::min<std::uint64_t>(worker_count(), budget);
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  std::vector<std::optional<SearchResult>> found(workers);

  auto run = [&](unsigned w) {
    for (std::uint64_t t = w; t < budget && t < best.load(); t += workers) {
      auto report = check_axiom(axiom, rule, space.sample(seed, t));
      if (!report.holds) {
        found[w] = SearchResult{t, std::move(report)};
        std::uint64_t cur = best.load();
        while (t < cur && !best.compare_exchange_weak(cur, t)) {
        }
        return;
      }
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  std::optional<SearchResult> result;
  for (auto& f : found) {
    if (f && (!result || f->trial < result->trial)) result = std::move(f);
  }
  return result;
}

}  // namespace conflict_select
