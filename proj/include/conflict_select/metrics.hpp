#pragma once

/**
 * @file metrics.hpp
 * @brief Conflict scores and polarization metrics of a candidate pair.
 *
 * Every quantity here derives from four multiplicity-weighted totals of a
 * pair {a,b}: the weights of V^{a>b} and V^{b>a}, and the summed rank
 * distances inside each group. PairTally carries those totals, so the
 * all-pairs pass costs one O(n * m^2) sweep over the ballots.
 *
 * Conflict scores are exact integers and the ratio metrics are exact
 * rationals; conversion to floating point happens only at output time.
 */

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <vector>

#include "conflict_select/core.hpp"
#include "conflict_select/rational.hpp"

namespace conflict_select {

enum class ConflictMode { sum, nash };

struct PairTally {
  Pair pair;
  std::int64_t weight_first = 0;     // |V^{a>b}|
  std::int64_t weight_second = 0;    // |V^{b>a}|
  std::int64_t distance_first = 0;   // sum over V^{a>b} of v(ab)
  std::int64_t distance_second = 0;  // sum over V^{b>a} of v(ba)
  std::int64_t voters = 0;
  std::size_t candidates = 0;

  std::int64_t total_distance() const { return distance_first + distance_second; }
  std::int64_t net_distance() const { return distance_first - distance_second; }
  bool conflicting() const { return weight_first > 0 && weight_second > 0; }
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(x, y, &out)) throw std::overflow_error("conflict score exceeds 64-bit range");
  return out;
}

inline std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(x, y, &out)) throw std::overflow_error("conflict score exceeds 64-bit range");
  return out;
}

inline void accumulate(PairTally& t, int d, std::int64_t w) {
  if (d > 0) {
    t.weight_first += w;
    t.distance_first += w * d;
  } else {
    t.weight_second += w;
    t.distance_second -= w * d;
  }
}

}  // namespace detail

inline PairTally tally(const Profile& profile, const Pair& pair) {
  PairTally t{pair};
  t.voters = profile.voter_weight();
  t.candidates = profile.candidate_count();
  for (const auto& wb : profile.ballots()) {
    detail::accumulate(t, rank_distance(wb.ballot, pair.first(), pair.second()), wb.multiplicity);
  }
  return t;
}

/// Tallies for every pair, in Profile::pairs() order.
inline std::vector<PairTally> tally_all(const Profile& profile) {
  const auto m = profile.candidate_count();
  std::vector<PairTally> out;
  for (const auto& p : profile.pairs()) {
    out.push_back(PairTally{p});
    out.back().voters = profile.voter_weight();
    out.back().candidates = m;
  }
  for (const auto& wb : profile.ballots()) {
    std::size_t k = 0;
    for (std::size_t a = 0; a < m; ++a) {
      const int pa = wb.ballot.position(CandidateId{a});
      for (std::size_t b = a + 1; b < m; ++b, ++k) {
        detail::accumulate(out[k], wb.ballot.position(CandidateId{b}) - pa, wb.multiplicity);
      }
    }
  }
  return out;
}

/// Conflict the pair induces between two ballots: zero when they agree on
/// its order, otherwise |v(ab)| combined with |v'(ba)| by + or x.
inline std::int64_t pairwise_conflict(const Ballot& v, const Ballot& w, const Pair& pair, ConflictMode mode) {
  const int dv = rank_distance(v, pair.first(), pair.second());
  const int dw = rank_distance(w, pair.first(), pair.second());
  if (dv * dw > 0) return 0;
  const std::int64_t x = std::abs(dv);
  const std::int64_t y = std::abs(dw);
  return mode == ConflictMode::sum ? x + y : x * y;
}

// Closed forms of the sum over unordered voter pairs.
inline std::int64_t conflict_score(const PairTally& t, ConflictMode mode) {
  using detail::checked_add;
  using detail::checked_mul;
  if (mode == ConflictMode::nash) return checked_mul(t.distance_first, t.distance_second);
  return checked_add(checked_mul(t.weight_second, t.distance_first), checked_mul(t.weight_first, t.distance_second));
}
inline std::int64_t conflict_score(const Profile& profile, const Pair& pair, ConflictMode mode) {
  return conflict_score(tally(profile, pair), mode);
}

/// Fewest adjacent swaps that make the pair non-conflicting.
inline std::int64_t swap_score(const PairTally& t) { return std::min(t.distance_first, t.distance_second); }
inline std::int64_t swap_score(const Profile& profile, const Pair& pair) { return swap_score(tally(profile, pair)); }

/// Partitioning ratio (2/n) min(|V^{a>b}|, |V^{b>a}|).
inline Rational alpha(const PairTally& t) {
  return Rational(2 * std::min(t.weight_first, t.weight_second), t.voters);
}
inline Rational alpha(const Profile& profile, const Pair& pair) { return alpha(tally(profile, pair)); }

/// Discrepancy: mean |v(ab)| normalised by m - 1.
inline Rational beta(const PairTally& t) {
  if (t.candidates < 2) throw std::domain_error("discrepancy needs at least two candidates");
  return Rational(t.total_distance(), detail::checked_mul(t.voters, static_cast<std::int64_t>(t.candidates - 1)));
}
inline Rational beta(const Profile& profile, const Pair& pair) { return beta(tally(profile, pair)); }

/// Mean distance inside each group; empty groups have no mean.
struct GroupMeans {
  std::optional<Rational> first;   // mu(a,b), over V^{a>b}
  std::optional<Rational> second;  // mu(b,a), over V^{b>a}
};

inline GroupMeans group_mu(const PairTally& t) {
  GroupMeans g;
  if (t.weight_first > 0) g.first = Rational(t.distance_first, t.weight_first);
  if (t.weight_second > 0) g.second = Rational(t.distance_second, t.weight_second);
  return g;
}
inline GroupMeans group_mu(const Profile& profile, const Pair& pair) { return group_mu(tally(profile, pair)); }

/// Discrepancy balance min(mu_ab/mu_ba, mu_ba/mu_ab); 0 when a group is empty.
inline Rational gamma(const PairTally& t) {
  const auto g = group_mu(t);
  if (!g.first || !g.second) return Rational{0};
  const Rational r = *g.first / *g.second;
  return r > Rational{1} ? *g.second / *g.first : r;
}
inline Rational gamma(const Profile& profile, const Pair& pair) { return gamma(tally(profile, pair)); }

/// Group discrepancy imbalance |sum v(ab)| / sum |v(ab)|.
inline Rational phi(const PairTally& t) {
  const auto net = t.net_distance();
  return Rational(net < 0 ? -net : net, t.total_distance());
}
inline Rational phi(const Profile& profile, const Pair& pair) { return phi(tally(profile, pair)); }

struct PairAssessment {
  Pair pair;
  std::int64_t conf_sum = 0;
  std::int64_t conf_nash = 0;
  std::int64_t swap_score = 0;
  Rational alpha;
  Rational beta;
  Rational gamma;
  Rational phi;
  std::optional<Rational> mu_first;
  std::optional<Rational> mu_second;
};

inline PairAssessment assess_pair(const PairTally& t) {
  const auto g = group_mu(t);
  return PairAssessment{
      .pair = t.pair,
      .conf_sum = conflict_score(t, ConflictMode::sum),
      .conf_nash = conflict_score(t, ConflictMode::nash),
      .swap_score = swap_score(t),
      .alpha = alpha(t),
      .beta = beta(t),
      .gamma = gamma(t),
      .phi = phi(t),
      .mu_first = g.first,
      .mu_second = g.second,
  };
}
inline PairAssessment assess_pair(const Profile& profile, const Pair& pair) { return assess_pair(tally(profile, pair)); }

inline std::vector<PairAssessment> assess_all(const Profile& profile) {
  std::vector<PairAssessment> out;
  for (const auto& t : tally_all(profile)) out.push_back(assess_pair(t));
  return out;
}

}  // namespace conflict_select
