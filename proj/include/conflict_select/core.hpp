#pragma once

// Preference-profile data model: ballots, weighted profiles, candidate pairs
// and the permutation operations the rest of the library is built on.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conflict_select/errors.hpp"

namespace conflict_select {

struct CandidateId {
  std::size_t index = 0;

  friend constexpr auto operator<=>(CandidateId, CandidateId) = default;
};

/// A strict total order over candidates 0..m-1, most preferred first.
///
/// Keeps the inverse permutation alongside the order so position lookups
/// are O(1).
class Ballot {
 public:
  Ballot() = default;

  explicit Ballot(std::vector<CandidateId> order) : order_(std::move(order)), rank_(order_.size(), 0) {
    for (std::size_t i = 0; i < order_.size(); ++i) {
      const auto c = order_[i].index;
      if (c >= order_.size()) throw std::invalid_argument("ballot names candidate " + std::to_string(c) + " outside the roster");
      if (rank_[c] != 0) throw std::invalid_argument("ballot lists candidate " + std::to_string(c) + " twice");
      rank_[c] = static_cast<int>(i) + 1;
    }
  }

  static Ballot from_indices(std::span<const std::size_t> indices) {
    std::vector<CandidateId> order;
    order.reserve(indices.size());
    for (auto i : indices) order.push_back(CandidateId{i});
    return Ballot(std::move(order));
  }
  static Ballot from_indices(std::initializer_list<std::size_t> indices) {
    return from_indices(std::span<const std::size_t>(indices.begin(), indices.size()));
  }

  /// The order 0 > 1 > ... > m-1.
  static Ballot identity(std::size_t m) {
    std::vector<CandidateId> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = CandidateId{i};
    return Ballot(std::move(order));
  }

  std::size_t size() const { return order_.size(); }
  std::span<const CandidateId> order() const { return order_; }

  /// Candidate at 1-based rank r.
  CandidateId at_rank(std::size_t r) const {
    if (r == 0 || r > order_.size()) throw std::domain_error("rank out of range");
    return order_[r - 1];
  }

  /// 1-based position: one plus the number of candidates ranked above c.
  int position(CandidateId c) const {
    if (c.index >= rank_.size()) throw std::domain_error("unknown candidate " + std::to_string(c.index));
    return rank_[c.index];
  }

  bool prefers(CandidateId a, CandidateId b) const { return position(a) < position(b); }

  Ballot reversed() const {
    std::vector<CandidateId> order(order_.rbegin(), order_.rend());
    return Ballot(std::move(order));
  }

  friend bool operator==(const Ballot& x, const Ballot& y) { return x.order_ == y.order_; }
  friend auto operator<=>(const Ballot& x, const Ballot& y) { return x.order_ <=> y.order_; }

 private:
  std::vector<CandidateId> order_;
  std::vector<int> rank_;
};

/// Signed distance position(b) - position(a); positive iff a is preferred.
inline int rank_distance(const Ballot& ballot, CandidateId a, CandidateId b) {
  if (a == b) throw std::domain_error("rank distance needs two distinct candidates");
  return ballot.position(b) - ballot.position(a);
}

/// Unordered pair of distinct candidates, stored with first() < second().
class Pair {
 public:
  Pair(CandidateId x, CandidateId y) {
    if (x == y) throw std::domain_error("a pair needs two distinct candidates");
    first_ = std::min(x, y);
    second_ = std::max(x, y);
  }
  Pair(std::size_t x, std::size_t y) : Pair(CandidateId{x}, CandidateId{y}) {}

  CandidateId first() const { return first_; }
  CandidateId second() const { return second_; }
  bool contains(CandidateId c) const { return c == first_ || c == second_; }

  friend constexpr auto operator<=>(const Pair&, const Pair&) = default;

 private:
  CandidateId first_;
  CandidateId second_;
};

struct WeightedBallot {
  Ballot ballot;
  std::int64_t multiplicity = 1;

  friend bool operator==(const WeightedBallot&, const WeightedBallot&) = default;
};

/// Candidate roster plus a multiset of ballots.
class Profile {
 public:
  Profile(std::size_t m, std::vector<WeightedBallot> ballots, std::vector<std::string> names = {})
      : m_(m), ballots_(std::move(ballots)), names_(std::move(names)) {
    if (m_ == 0) throw std::invalid_argument("profile needs at least one candidate");
    if (names_.empty()) {
      names_.reserve(m_);
      for (std::size_t i = 0; i < m_; ++i) names_.push_back(std::to_string(i + 1));
    }
    if (names_.size() != m_) throw std::invalid_argument("candidate name table does not match roster size");
    for (std::size_t i = 0; i < m_; ++i) {
      if (names_[i].empty()) throw std::invalid_argument("empty candidate name");
      for (std::size_t j = 0; j < i; ++j) {
        if (names_[i] == names_[j]) throw std::invalid_argument("duplicate candidate name '" + names_[i] + "'");
      }
    }
    if (ballots_.empty()) throw std::invalid_argument("profile needs at least one ballot");
    for (const auto& wb : ballots_) {
      if (wb.ballot.size() != m_) throw std::invalid_argument("ballot length does not match roster size");
      if (wb.multiplicity <= 0) throw std::invalid_argument("ballot multiplicity must be positive");
      n_ += wb.multiplicity;
    }
  }

  /// Builds a profile from rankings written as names separated by '>' or
  /// whitespace, e.g. {2, "x > a > b > y"}.
  static Profile from_rankings(std::vector<std::string> names,
                               std::initializer_list<std::pair<std::int64_t, std::string_view>> rankings) {
    std::vector<WeightedBallot> ballots;
    for (const auto& [mult, text] : rankings) {
      std::string cleaned(text);
      std::replace(cleaned.begin(), cleaned.end(), '>', ' ');
      std::istringstream in(cleaned);
      std::vector<CandidateId> order;
      for (std::string tok; in >> tok;) {
        auto it = std::find(names.begin(), names.end(), tok);
        if (it == names.end()) throw std::invalid_argument("unknown candidate '" + tok + "'");
        order.push_back(CandidateId{static_cast<std::size_t>(it - names.begin())});
      }
      ballots.push_back({Ballot(std::move(order)), mult});
    }
    const auto m = names.size();
    return Profile(m, std::move(ballots), std::move(names));
  }

  std::size_t candidate_count() const { return m_; }
  std::int64_t voter_weight() const { return n_; }
  std::span<const WeightedBallot> ballots() const { return ballots_; }
  const std::vector<std::string>& names() const { return names_; }

  const std::string& name(CandidateId c) const {
    if (c.index >= m_) throw std::domain_error("unknown candidate " + std::to_string(c.index));
    return names_[c.index];
  }
  std::optional<CandidateId> find(std::string_view name) const {
    for (std::size_t i = 0; i < m_; ++i) {
      if (names_[i] == name) return CandidateId{i};
    }
    return std::nullopt;
  }
  CandidateId id(std::string_view name) const {
    if (auto c = find(name)) return *c;
    throw std::domain_error("unknown candidate '" + std::string(name) + "'");
  }
  Pair pair(std::string_view x, std::string_view y) const { return Pair(id(x), id(y)); }

  /// All unordered pairs in lexicographic order of (first, second).
  std::vector<Pair> pairs() const {
    std::vector<Pair> out;
    out.reserve(m_ * (m_ - 1) / 2);
    for (std::size_t a = 0; a < m_; ++a) {
      for (std::size_t b = a + 1; b < m_; ++b) out.emplace_back(a, b);
    }
    return out;
  }

  std::string pair_label(const Pair& p) const { return "{" + name(p.first()) + "," + name(p.second()) + "}"; }

  /// Merges identical ballots, keeping the order of first appearance.
  Profile compacted() const {
    std::vector<WeightedBallot> merged;
    std::map<std::span<const CandidateId>, std::size_t, OrderLess> seen;
    for (const auto& wb : ballots_) {
      auto [it, inserted] = seen.try_emplace(wb.ballot.order(), merged.size());
      if (inserted) {
        merged.push_back(wb);
      } else {
        merged[it->second].multiplicity += wb.multiplicity;
      }
    }
    return Profile(m_, std::move(merged), names_);
  }

  /// Same profile with every multiplicity multiplied by factor.
  Profile scaled(std::int64_t factor) const {
    if (factor <= 0) throw std::invalid_argument("scale factor must be positive");
    auto copy = ballots_;
    for (auto& wb : copy) wb.multiplicity *= factor;
    return Profile(m_, std::move(copy), names_);
  }

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  struct OrderLess {
    bool operator()(std::span<const CandidateId> x, std::span<const CandidateId> y) const {
      return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
    }
  };

  std::size_t m_ = 0;
  std::vector<WeightedBallot> ballots_;
  std::vector<std::string> names_;
  std::int64_t n_ = 0;
};

/// The electorate split on a pair: V^{first > second} and V^{second > first}.
struct PreferenceSplit {
  std::int64_t prefer_first = 0;
  std::int64_t prefer_second = 0;
  std::vector<std::size_t> first_group;   // indices into Profile::ballots()
  std::vector<std::size_t> second_group;
};

inline PreferenceSplit partition_by_preference(const Profile& profile, const Pair& pair) {
  PreferenceSplit split;
  const auto ballots = profile.ballots();
  for (std::size_t i = 0; i < ballots.size(); ++i) {
    if (rank_distance(ballots[i].ballot, pair.first(), pair.second()) > 0) {
      split.prefer_first += ballots[i].multiplicity;
      split.first_group.push_back(i);
    } else {
      split.prefer_second += ballots[i].multiplicity;
      split.second_group.push_back(i);
    }
  }
  return split;
}

/// True iff the voters do not order the pair unanimously.
inline bool is_conflicting(const Profile& profile, const Pair& pair) {
  bool first = false;
  bool second = false;
  for (const auto& wb : profile.ballots()) {
    (wb.ballot.prefers(pair.first(), pair.second()) ? first : second) = true;
    if (first && second) return true;
  }
  return false;
}

inline Profile reverse_profile(const Profile& profile) {
  std::vector<WeightedBallot> out;
  out.reserve(profile.ballots().size());
  for (const auto& wb : profile.ballots()) out.push_back({wb.ballot.reversed(), wb.multiplicity});
  return Profile(profile.candidate_count(), std::move(out), profile.names());
}

/// Moves the preferred member of the pair to the top and the other to the
/// bottom of every ballot; everyone else keeps their relative order.
inline Profile antagonize(const Profile& profile, const Pair& pair) {
  std::vector<WeightedBallot> out;
  out.reserve(profile.ballots().size());
  for (const auto& wb : profile.ballots()) {
    const bool first_wins = wb.ballot.prefers(pair.first(), pair.second());
    const CandidateId top = first_wins ? pair.first() : pair.second();
    const CandidateId bottom = first_wins ? pair.second() : pair.first();
    std::vector<CandidateId> order;
    order.reserve(wb.ballot.size());
    order.push_back(top);
    for (auto c : wb.ballot.order()) {
      if (!pair.contains(c)) order.push_back(c);
    }
    order.push_back(bottom);
    out.push_back({Ballot(std::move(order)), wb.multiplicity});
  }
  return Profile(profile.candidate_count(), std::move(out), profile.names());
}

}  // namespace conflict_select
