#pragma once

/**
 * @file preflib.hpp
 * @brief Reading real election data and the native profile document.
 *
 * Two PrefLib layouts are accepted for ordinal data (SOC/SOI/TOC/TOI):
 *
 *   current:  "# NUMBER ALTERNATIVES: 3", "# ALTERNATIVE NAME 1: x", ...
 *             then data lines "2: 1,{2,3}"
 *   legacy:   "3" / "1,x" / "2,y" / "3,z" / "voters,sum,unique"
 *             then data lines "2,1,{2,3}"
 *
 * Weights may be integers, decimals ("2.5") or fractions ("5/2"); they are
 * kept exact until materialize() turns them into integer multiplicities.
 *
 * The native profile document is
 *
 *   # optional comment lines
 *   <m> <n>
 *   <candidate name>        (m lines)
 *   <multiplicity>: i,j,... (1-based candidate indices, most preferred first)
 */

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conflict_select/core.hpp"
#include "conflict_select/errors.hpp"
#include "conflict_select/generators.hpp"
#include "conflict_select/rational.hpp"

namespace conflict_select {

struct RankingEntry {
  Rational weight{1};
  std::vector<std::vector<std::size_t>> groups;  // tie groups, best first; 0-based candidates

  std::size_t ranked_count() const {
    std::size_t k = 0;
    for (const auto& g : groups) k += g.size();
    return k;
  }

  friend bool operator==(const RankingEntry&, const RankingEntry&) = default;
};

struct RawElection {
  std::vector<std::string> names;
  std::vector<RankingEntry> entries;

  friend bool operator==(const RawElection&, const RawElection&) = default;
};

enum class TieBreak { seeded_random, by_candidate_index };
enum class IncompletePolicy { drop, error };

struct Subsample {
  std::int64_t voters = 100;
  std::uint64_t seed = 0;
};

struct IngestPolicy {
  TieBreak tie_break = TieBreak::seeded_random;
  IncompletePolicy incomplete = IncompletePolicy::drop;
  std::int64_t weight_scale = 1;
  std::optional<std::vector<std::size_t>> candidate_subset;  // 0-based, output order
  std::optional<Subsample> subsample;
};

inline TieBreak parse_tie_break(std::string_view s) {
  if (s == "random" || s == "seeded-random") return TieBreak::seeded_random;
  if (s == "index" || s == "by-candidate-index") return TieBreak::by_candidate_index;
  throw config_error("unknown tie-break policy '" + std::string(s) + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline Rational parse_weight(std::string_view s, std::size_t line) {
  s = trim(s);
  std::optional<Rational> w;
  try {
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
      auto n = to_int(s.substr(0, slash));
      auto d = to_int(s.substr(slash + 1));
      if (n && d && *d != 0) w = Rational(*n, *d);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
      const auto frac = s.substr(dot + 1);
      auto whole = s.substr(0, dot).empty() ? std::optional<std::int64_t>(0) : to_int(s.substr(0, dot));
      auto digits = frac.empty() ? std::optional<std::int64_t>(0) : to_int(frac);
      if (whole && digits && frac.size() <= 15 && !frac.starts_with('-') && !frac.starts_with('+')) {
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        w = Rational(*whole) + Rational(*digits, den);
      }
    } else if (auto v = to_int(s)) {
      w = Rational(*v);
    }
  } catch (const std::exception&) {
    w.reset();
  }
  if (!w) throw parse_error(line, "invalid weight '" + std::string(s) + "'");
  if (*w <= Rational{0}) throw parse_error(line, "weight must be positive");
  return *w;
}

inline RankingEntry parse_ranking(std::string_view s, std::size_t m, Rational weight, std::size_t line) {
  RankingEntry e{weight, {}};
  std::vector<bool> seen(m, false);
  auto add = [&](std::string_view tok, std::vector<std::size_t>& group) {
    auto v = to_int(tok);
    if (!v || *v < 1 || static_cast<std::size_t>(*v) > m) {
      throw parse_error(line, "invalid candidate '" + std::string(trim(tok)) + "'");
    }
    const auto c = static_cast<std::size_t>(*v - 1);
    if (seen[c]) throw data_error("line " + std::to_string(line) + ": candidate " + std::to_string(*v) + " ranked twice");
    seen[c] = true;
    group.push_back(c);
  };
  s = trim(s);
  while (!s.empty()) {
    std::vector<std::size_t> group;
    if (s.front() == '{') {
      const auto close = s.find('}');
      if (close == std::string_view::npos) throw parse_error(line, "unterminated tie group");
      auto inner = s.substr(1, close - 1);
      if (trim(inner).empty()) throw parse_error(line, "empty tie group");
      while (true) {
        const auto comma = inner.find(',');
        add(inner.substr(0, comma), group);
        if (comma == std::string_view::npos) break;
        inner.remove_prefix(comma + 1);
      }
      s.remove_prefix(close + 1);
      s = trim(s);
      if (!s.empty()) {
        if (s.front() != ',') throw parse_error(line, "expected ',' after tie group");
        s.remove_prefix(1);
        s = trim(s);
        if (s.empty()) throw parse_error(line, "trailing ','");
      }
    } else {
      const auto comma = s.find(',');
      add(s.substr(0, comma), group);
      if (comma == std::string_view::npos) {
        s = {};
      } else {
        s.remove_prefix(comma + 1);
        s = trim(s);
        if (s.empty()) throw parse_error(line, "trailing ','");
      }
    }
    e.groups.push_back(std::move(group));
  }
  if (e.groups.empty()) throw parse_error(line, "empty ranking");
  return e;
}

inline std::string weight_string(const Rational& w) {
  if (w.is_integer()) return std::to_string(w.numerator());
  auto d = w.denominator();
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) d /= 2, ++twos;
  while (d % 5 == 0) d /= 5, ++fives;
  if (d != 1 || std::max(twos, fives) > 15) return w.str();
  const int digits = std::max(twos, fives);
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const Rational scaled = w * Rational(scale);
  auto frac = std::to_string(scaled.numerator() % scale);
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  return std::to_string(scaled.numerator() / scale) + "." + frac;
}

}  // namespace detail

/// Parses PrefLib ordinal data in the current or the legacy layout.
inline RawElection parse_preflib(std::string_view text) {
  const auto lines = detail::split_lines(text);
  RawElection raw;
  std::optional<std::size_t> m;
  std::size_t i = 0;
  auto skip_blank = [&] {
    while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  };
  skip_blank();
  if (i == lines.size()) throw parse_error(1, "empty input");
  const bool modern = detail::trim(lines[i]).starts_with('#');

  if (modern) {
    std::vector<std::pair<std::size_t, std::string>> named;
    for (; i < lines.size(); ++i) {
      const auto line = detail::trim(lines[i]);
      if (!line.starts_with('#')) break;
      const auto body = detail::trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) continue;
      const auto key = detail::trim(body.substr(0, colon));
      const auto value = detail::trim(body.substr(colon + 1));
      if (key == "NUMBER ALTERNATIVES") {
        auto v = detail::to_int(value);
        if (!v || *v < 1) throw parse_error(i + 1, "invalid alternative count");
        m = static_cast<std::size_t>(*v);
      } else if (key.starts_with("ALTERNATIVE NAME")) {
        auto idx = detail::to_int(key.substr(16));
        if (!idx || *idx < 1) throw parse_error(i + 1, "invalid alternative index");
        named.emplace_back(static_cast<std::size_t>(*idx), std::string(value));
      }
    }
    if (!m) throw parse_error(i + 1, "missing '# NUMBER ALTERNATIVES' header");
    raw.names.resize(*m);
    for (std::size_t c = 0; c < *m; ++c) raw.names[c] = std::to_string(c + 1);
    for (auto& [idx, name] : named) {
      if (idx > *m) throw parse_error(0, "alternative name index " + std::to_string(idx) + " out of range");
      raw.names[idx - 1] = name;
    }
    for (; i < lines.size(); ++i) {
      const auto line = detail::trim(lines[i]);
      if (line.empty() || line.starts_with('#')) continue;
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) throw parse_error(i + 1, "expected 'count: ranking'");
      const auto w = detail::parse_weight(line.substr(0, colon), i + 1);
      raw.entries.push_back(detail::parse_ranking(line.substr(colon + 1), *m, w, i + 1));
    }
  } else {
    auto count = detail::to_int(lines[i]);
    if (!count || *count < 1) throw parse_error(i + 1, "expected the number of candidates");
    m = static_cast<std::size_t>(*count);
    ++i;
    raw.names.resize(*m);
    for (std::size_t c = 0; c < *m; ++c, ++i) {
      if (i >= lines.size()) throw parse_error(i + 1, "missing candidate name line");
      const auto line = detail::trim(lines[i]);
      const auto comma = line.find(',');
      auto idx = comma == std::string_view::npos ? std::nullopt : detail::to_int(line.substr(0, comma));
      if (!idx || *idx < 1 || static_cast<std::size_t>(*idx) > *m) throw parse_error(i + 1, "expected 'index,name'");
      raw.names[static_cast<std::size_t>(*idx - 1)] = std::string(detail::trim(line.substr(comma + 1)));
    }
    skip_blank();
    if (i >= lines.size()) throw parse_error(i + 1, "missing voter summary line");
    ++i;  // "voters,sum,unique" is informational
    for (; i < lines.size(); ++i) {
      const auto line = detail::trim(lines[i]);
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string_view::npos) throw parse_error(i + 1, "expected 'count,ranking'");
      const auto w = detail::parse_weight(line.substr(0, comma), i + 1);
      raw.entries.push_back(detail::parse_ranking(line.substr(comma + 1), *m, w, i + 1));
    }
  }
  for (std::size_t c = 0; c < raw.names.size(); ++c) {
    if (raw.names[c].empty()) throw parse_error(0, "candidate " + std::to_string(c + 1) + " has no name");
  }
  return raw;
}

/// Current-layout PrefLib text; parse_preflib(serialize_preflib(r)) == r.
inline std::string serialize_preflib(const RawElection& raw) {
  std::ostringstream out;
  out << "# NUMBER ALTERNATIVES: " << raw.names.size() << '\n';
  for (std::size_t c = 0; c < raw.names.size(); ++c) out << "# ALTERNATIVE NAME " << c + 1 << ": " << raw.names[c] << '\n';
  for (const auto& e : raw.entries) {
    out << detail::weight_string(e.weight) << ": ";
    for (std::size_t g = 0; g < e.groups.size(); ++g) {
      if (g) out << ',';
      const auto& group = e.groups[g];
      if (group.size() > 1) out << '{';
      for (std::size_t k = 0; k < group.size(); ++k) out << (k ? "," : "") << group[k] + 1;
      if (group.size() > 1) out << '}';
    }
    out << '\n';
  }
  return out.str();
}

/// Resolves candidate references (names, or 1-based indices) to 0-based indices.
inline std::vector<std::size_t> resolve_candidates(const std::vector<std::string>& names, const std::vector<std::string>& refs) {
  std::vector<std::size_t> out;
  for (const auto& r : refs) {
    auto it = std::find(names.begin(), names.end(), r);
    if (it != names.end()) {
      out.push_back(static_cast<std::size_t>(it - names.begin()));
    } else if (auto v = detail::to_int(r); v && *v >= 1 && static_cast<std::size_t>(*v) <= names.size()) {
      out.push_back(static_cast<std::size_t>(*v - 1));
    } else {
      throw config_error("unknown candidate '" + r + "'");
    }
  }
  return out;
}

struct Materialized {
  Profile profile;
  std::size_t dropped_incomplete = 0;
  std::size_t dropped_zero_weight = 0;
};

/// Resolves ties, applies the completeness policy and candidate subset, turns
/// weights into multiplicities round(weight * weight_scale) and optionally
/// draws a weighted subsample.
inline Materialized materialize(const RawElection& raw, const IngestPolicy& policy, std::uint64_t seed) {
  if (policy.weight_scale < 1) throw config_error("weight scale must be at least 1");
  const auto full_m = raw.names.size();
  std::vector<std::size_t> roster;
  if (policy.candidate_subset) {
    roster = *policy.candidate_subset;
    if (roster.size() < 1) throw config_error("candidate subset is empty");
    for (std::size_t k = 0; k < roster.size(); ++k) {
      if (roster[k] >= full_m) throw config_error("candidate subset index out of range");
      for (std::size_t j = 0; j < k; ++j) {
        if (roster[j] == roster[k]) throw config_error("candidate subset lists a candidate twice");
      }
    }
  } else {
    roster.resize(full_m);
    for (std::size_t c = 0; c < full_m; ++c) roster[c] = c;
  }
  std::vector<std::optional<std::size_t>> slot(full_m);
  for (std::size_t k = 0; k < roster.size(); ++k) slot[roster[k]] = k;

  std::vector<WeightedBallot> ballots;
  std::size_t incomplete = 0;
  std::size_t zero = 0;
  for (std::size_t e = 0; e < raw.entries.size(); ++e) {
    const auto& entry = raw.entries[e];
    auto rng = make_rng(seed, e);
    std::vector<CandidateId> order;
    for (auto group : entry.groups) {
      if (policy.tie_break == TieBreak::by_candidate_index) {
        std::sort(group.begin(), group.end());
      } else if (group.size() > 1) {
        std::shuffle(group.begin(), group.end(), rng);
      }
      for (auto c : group) {
        if (slot[c]) order.push_back(CandidateId{*slot[c]});
      }
    }
    if (order.size() != roster.size()) {
      if (policy.incomplete == IncompletePolicy::error) {
        throw data_error("ranking " + std::to_string(e + 1) + " does not rank every candidate");
      }
      ++incomplete;
      continue;
    }
    // Round half up: floor((2p + q) / 2q).
    const Rational scaled = entry.weight * Rational(policy.weight_scale);
    const __int128 p = scaled.numerator();
    const __int128 q = scaled.denominator();
    const auto mult = static_cast<std::int64_t>((2 * p + q) / (2 * q));
    if (mult == 0) {
      ++zero;
      continue;
    }
    ballots.push_back({Ballot(std::move(order)), mult});
  }
  if (ballots.empty()) throw data_error("no complete ranking with positive weight remains");

  if (policy.subsample) {
    if (policy.subsample->voters < 1) throw config_error("subsample size must be at least 1");
    std::vector<double> weights;
    for (const auto& wb : ballots) weights.push_back(static_cast<double>(wb.multiplicity));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    auto rng = make_rng(policy.subsample->seed, 0);
    std::vector<std::int64_t> counts(ballots.size(), 0);
    for (std::int64_t v = 0; v < policy.subsample->voters; ++v) ++counts[pick(rng)];
    std::vector<WeightedBallot> drawn;
    for (std::size_t k = 0; k < ballots.size(); ++k) {
      if (counts[k] > 0) drawn.push_back({ballots[k].ballot, counts[k]});
    }
    ballots = std::move(drawn);
  }

  std::vector<std::string> names;
  for (auto c : roster) names.push_back(raw.names[c]);
  return Materialized{Profile(roster.size(), std::move(ballots), std::move(names)), incomplete, zero};
}

/// Native profile document; `comments` lines are written with a leading '#'.
inline std::string write_profile(const Profile& profile, std::string_view comments = {}) {
  std::ostringstream out;
  for (auto line : detail::split_lines(comments)) out << "# " << line << '\n';
  out << profile.candidate_count() << ' ' << profile.voter_weight() << '\n';
  for (const auto& name : profile.names()) out << name << '\n';
  for (const auto& wb : profile.ballots()) {
    out << wb.multiplicity << ": ";
    const auto order = wb.ballot.order();
    for (std::size_t r = 0; r < order.size(); ++r) out << (r ? "," : "") << order[r].index + 1;
    out << '\n';
  }
  return out.str();
}

inline Profile read_profile(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t i = 0;
  auto next_content = [&]() -> std::optional<std::string_view> {
    while (i < lines.size()) {
      const auto line = detail::trim(lines[i++]);
      if (!line.empty() && !line.starts_with('#')) return line;
    }
    return std::nullopt;
  };
  const auto header = next_content();
  if (!header) throw parse_error(i == 0 ? 1 : i, "missing '<m> <n>' header");
  const std::size_t header_line = i;
  const auto space = header->find_first_of(" \t");
  auto m = space == std::string_view::npos ? std::nullopt : detail::to_int(header->substr(0, space));
  auto n = space == std::string_view::npos ? std::nullopt : detail::to_int(header->substr(space + 1));
  if (!m || !n || *m < 1 || *n < 1) throw parse_error(header_line, "expected '<m> <n>' header");

  std::vector<std::string> names;
  for (std::int64_t c = 0; c < *m; ++c) {
    auto name = next_content();
    if (!name) throw parse_error(i, "missing candidate name");
    names.emplace_back(*name);
  }
  std::vector<WeightedBallot> ballots;
  std::int64_t total = 0;
  while (auto line = next_content()) {
    const auto colon = line->find(':');
    if (colon == std::string_view::npos) throw parse_error(i, "expected '<multiplicity>: <ranking>'");
    auto mult = detail::to_int(line->substr(0, colon));
    if (!mult || *mult < 1) throw parse_error(i, "multiplicity must be a positive integer");
    const auto entry = detail::parse_ranking(line->substr(colon + 1), static_cast<std::size_t>(*m), Rational{1}, i);
    std::vector<CandidateId> order;
    for (const auto& g : entry.groups) {
      if (g.size() != 1) throw parse_error(i, "ties are not allowed in a profile");
      order.push_back(CandidateId{g.front()});
    }
    if (order.size() != static_cast<std::size_t>(*m)) throw parse_error(i, "ballot must rank every candidate");
    ballots.push_back({Ballot(std::move(order)), *mult});
    total += *mult;
  }
  if (ballots.empty()) throw data_error("profile has no ballots");
  if (total != *n) throw data_error("header declares " + std::to_string(*n) + " voters but ballots sum to " + std::to_string(total));
  try {
    return Profile(static_cast<std::size_t>(*m), std::move(ballots), std::move(names));
  } catch (const std::invalid_argument& e) {
    throw data_error(e.what());
  }
}

}  // namespace conflict_select
