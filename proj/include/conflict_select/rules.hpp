#pragma once

/**
 * @file rules.hpp
 * @brief Pair-selection rules: MaxSum, MaxNash, MaxSwap, p-MaxPolar and the
 *        Borda / Chamberlin-Courant baselines for committees of size two.
 *
 * Every rule scores each unordered pair and returns all pairs with the
 * maximal score. Scores are exact except for p-MaxPolar with a non-integer
 * exponent (or an integer exponent whose exact value overflows), which is
 * evaluated in long double and compared with a relative margin of 1e-12.
 */

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "conflict_select/core.hpp"
#include "conflict_select/errors.hpp"
#include "conflict_select/metrics.hpp"
#include "conflict_select/rational.hpp"

namespace conflict_select {

enum class RuleKind { max_sum, max_nash, max_swap, max_polar, borda2, cc2 };

class RuleId {
 public:
  static RuleId max_sum() { return RuleId(RuleKind::max_sum); }
  static RuleId max_nash() { return RuleId(RuleKind::max_nash); }
  static RuleId max_swap() { return RuleId(RuleKind::max_swap); }
  static RuleId borda2() { return RuleId(RuleKind::borda2); }
  static RuleId cc2() { return RuleId(RuleKind::cc2); }
  static RuleId max_polar(Rational p) {
    if (p <= Rational{0}) throw config_error("MaxPolar exponent must be positive, got " + p.str());
    RuleId r(RuleKind::max_polar);
    r.exponent_ = p;
    return r;
  }

  /// Accepts MaxSum, MaxNash, MaxSwap, Borda (Borda2), CC (CC2) and
  /// "<p>-MaxPolar" / "MaxPolar:<p>" with p an integer or a decimal/fraction.
  /// Case-insensitive.
  static RuleId parse(std::string_view text) {
    std::string s;
    for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "maxsum") return max_sum();
    if (s == "maxnash") return max_nash();
    if (s == "maxswap") return max_swap();
    if (s == "borda" || s == "borda2") return borda2();
    if (s == "cc" || s == "cc2") return cc2();
    std::string p;
    if (s.size() > 9 && s.ends_with("-maxpolar")) p = s.substr(0, s.size() - 9);
    if (s.size() > 9 && s.starts_with("maxpolar:")) p = s.substr(9);
    if (s == "maxpolar") p = "2";
    if (!p.empty()) return max_polar(parse_exponent(p));
    throw config_error("unknown rule '" + std::string(text) + "'");
  }

  /// The four rules built to select conflicting pairs.
  static std::vector<RuleId> conflictual() { return {max_sum(), max_nash(), max_swap(), max_polar(Rational{2})}; }
  static std::vector<RuleId> all_default() {
    auto rules = conflictual();
    rules.push_back(borda2());
    rules.push_back(cc2());
    return rules;
  }

  RuleKind kind() const { return kind_; }
  const Rational& exponent() const { return exponent_; }
  bool is_conflictual() const { return kind_ != RuleKind::borda2 && kind_ != RuleKind::cc2; }

  std::string name() const {
    switch (kind_) {
      case RuleKind::max_sum: return "MaxSum";
      case RuleKind::max_nash: return "MaxNash";
      case RuleKind::max_swap: return "MaxSwap";
      case RuleKind::max_polar: return exponent_.str() + "-MaxPolar";
      case RuleKind::borda2: return "Borda2";
      case RuleKind::cc2: return "CC2";
    }
    return "?";
  }

  friend bool operator==(const RuleId&, const RuleId&) = default;

 private:
  explicit RuleId(RuleKind kind) : kind_(kind) {}

  static Rational parse_exponent(const std::string& s) {
    try {
      std::size_t used = 0;
      if (auto slash = s.find('/'); slash != std::string::npos) {
        const auto num = std::stoll(s.substr(0, slash), &used);
        if (used != slash) throw std::invalid_argument(s);
        const auto den = std::stoll(s.substr(slash + 1), &used);
        if (used != s.size() - slash - 1) throw std::invalid_argument(s);
        return Rational(num, den);
      }
      auto dot = s.find('.');
      if (dot == std::string::npos) {
        const auto v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return Rational(v);
      }
      const std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      const auto frac = s.size() - dot - 1;
      if (frac > 12) throw std::invalid_argument(s);
      const auto v = std::stoll(digits, &used);
      if (used != digits.size()) throw std::invalid_argument(s);
      std::int64_t den = 1;
      for (std::size_t i = 0; i < frac; ++i) den *= 10;
      return Rational(v, den);
    } catch (const std::logic_error&) {
      throw config_error("invalid MaxPolar exponent '" + s + "'");
    }
  }

  RuleKind kind_;
  Rational exponent_{1};
};

/// A rule score: exact rational, or a long double approximation.
class Score {
 public:
  static constexpr long double relative_margin = 1e-12L;

  Score() = default;
  Score(Rational exact) : exact_(exact), value_(exact.to_long_double()) {}  // NOLINT(google-explicit-constructor)
  Score(std::int64_t exact) : Score(Rational{exact}) {}                     // NOLINT(google-explicit-constructor)
  static Score approximate(long double v) {
    Score s;
    s.exact_.reset();
    s.value_ = v;
    return s;
  }

  bool is_exact() const { return exact_.has_value(); }
  const std::optional<Rational>& exact() const { return exact_; }
  long double value() const { return value_; }

  /// -1, 0, +1. Approximate comparisons treat values within the relative
  /// margin as equal.
  int compare(const Score& other) const {
    if (exact_ && other.exact_) return *exact_ < *other.exact_ ? -1 : (*other.exact_ < *exact_ ? 1 : 0);
    const long double scale = std::max({1.0L, std::fabs(value_), std::fabs(other.value_)});
    if (std::fabs(value_ - other.value_) <= relative_margin * scale) return 0;
    return value_ < other.value_ ? -1 : 1;
  }

  std::string str() const {
    if (exact_) return exact_->str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17Lg", value_);
    return buf;
  }

  friend bool operator==(const Score& x, const Score& y) { return x.compare(y) == 0; }

 private:
  std::optional<Rational> exact_{Rational{0}};
  long double value_ = 0;
};

struct ScoredPair {
  Pair pair;
  Score score;
};

struct RuleOutcome {
  RuleId rule;
  std::vector<Pair> winners;       // ascending pair order
  std::vector<ScoredPair> scores;  // every pair, Profile::pairs() order
  bool approximate_tie = false;    // winners decided within the float margin

  bool selects(const Pair& p) const { return std::find(winners.begin(), winners.end(), p) != winners.end(); }

  const Score& score_of(const Pair& p) const {
    for (const auto& s : scores) {
      if (s.pair == p) return s.score;
    }
    throw std::domain_error("pair not scored");
  }
};

namespace detail {

inline Score polar_score(const PairTally& t, const Rational& p) {
  const Rational a = alpha(t);
  const Rational b = beta(t);
  if (p.is_integer() && p.numerator() <= 64) {
    try {
      return Score(a * pow(b, static_cast<unsigned>(p.numerator())));
    } catch (const std::overflow_error&) {
      // fall through to the approximate evaluation
    }
  }
  if (a.is_zero()) return Score(Rational{0});
  return Score::approximate(a.to_long_double() * std::pow(b.to_long_double(), p.to_long_double()));
}

inline std::vector<std::int64_t> borda_totals(const Profile& profile) {
  const auto m = profile.candidate_count();
  std::vector<std::int64_t> totals(m, 0);
  for (const auto& wb : profile.ballots()) {
    for (std::size_t c = 0; c < m; ++c) {
      totals[c] += wb.multiplicity * static_cast<std::int64_t>(m - static_cast<std::size_t>(wb.ballot.position(CandidateId{c})));
    }
  }
  return totals;
}

inline std::int64_t cc_score(const Profile& profile, const Pair& pair) {
  const auto m = static_cast<std::int64_t>(profile.candidate_count());
  std::int64_t total = 0;
  for (const auto& wb : profile.ballots()) {
    const int best = std::min(wb.ballot.position(pair.first()), wb.ballot.position(pair.second()));
    total += wb.multiplicity * (m - best);
  }
  return total;
}

inline Score tally_score(const RuleId& rule, const PairTally& t) {
  switch (rule.kind()) {
    case RuleKind::max_sum: return Score(conflict_score(t, ConflictMode::sum));
    case RuleKind::max_nash: return Score(conflict_score(t, ConflictMode::nash));
    case RuleKind::max_swap: return Score(swap_score(t));
    case RuleKind::max_polar: return polar_score(t, rule.exponent());
    default: break;
  }
  throw std::logic_error("rule is not tally-based");
}

}  // namespace detail

inline Score score(const RuleId& rule, const Profile& profile, const Pair& pair) {
  switch (rule.kind()) {
    case RuleKind::borda2: {
      const auto totals = detail::borda_totals(profile);
      return Score(totals[pair.first().index] + totals[pair.second().index]);
    }
    case RuleKind::cc2: return Score(detail::cc_score(profile, pair));
    default: return detail::tally_score(rule, tally(profile, pair));
  }
}

/// Scores every pair from precomputed tallies (Profile::pairs() order).
inline std::vector<ScoredPair> score_all(const RuleId& rule, const Profile& profile, const std::vector<PairTally>& tallies) {
  std::vector<ScoredPair> out;
  out.reserve(tallies.size());
  switch (rule.kind()) {
    case RuleKind::borda2: {
      const auto totals = detail::borda_totals(profile);
      for (const auto& t : tallies) {
        out.push_back({t.pair, Score(totals[t.pair.first().index] + totals[t.pair.second().index])});
      }
      break;
    }
    case RuleKind::cc2:
      for (const auto& t : tallies) out.push_back({t.pair, Score(detail::cc_score(profile, t.pair))});
      break;
    default:
      for (const auto& t : tallies) out.push_back({t.pair, detail::tally_score(rule, t)});
  }
  return out;
}

inline RuleOutcome select_from_scores(const RuleId& rule, std::vector<ScoredPair> scores) {
  if (scores.empty()) throw std::domain_error("selecting a pair needs at least two candidates");
  RuleOutcome out{rule, {}, {}};
  const Score* best = &scores.front().score;
  for (const auto& s : scores) {
    if (s.score.compare(*best) > 0) best = &s.score;
  }
  bool any_approx = false;
  for (const auto& s : scores) {
    if (s.score.compare(*best) == 0) {
      out.winners.push_back(s.pair);
      any_approx = any_approx || !s.score.is_exact() || !best->is_exact();
    }
  }
  out.approximate_tie = any_approx && out.winners.size() > 1;
  std::sort(out.winners.begin(), out.winners.end());
  out.scores = std::move(scores);
  return out;
}

inline RuleOutcome select(const RuleId& rule, const Profile& profile, const std::vector<PairTally>& tallies) {
  if (profile.candidate_count() < 2) throw std::domain_error("selecting a pair needs at least two candidates");
  return select_from_scores(rule, score_all(rule, profile, tallies));
}

inline RuleOutcome select(const RuleId& rule, const Profile& profile) {
  if (profile.candidate_count() < 2) throw std::domain_error("selecting a pair needs at least two candidates");
  return select(rule, profile, tally_all(profile));
}

}  // namespace conflict_select
