#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "conflict_select/fixtures.hpp"
#include "conflict_select/preflib.hpp"

using namespace conflict_select;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/" + name);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* minimal = "# NUMBER ALTERNATIVES: 3\n2: 1,2,3\n";

}  // namespace

TEST(PrefLibParse, Minimal) {
  const auto raw = parse_preflib(minimal);
  ASSERT_EQ(raw.names.size(), 3U);
  ASSERT_EQ(raw.entries.size(), 1U);
  EXPECT_EQ(raw.entries[0].weight, Rational(2));
  EXPECT_EQ(raw.entries[0].groups.size(), 3U);
}

TEST(PrefLibParse, TiesAndTruncation) {
  const auto raw = parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,{2,3}\n1: 1,2\n");
  EXPECT_EQ(raw.entries[0].groups, (std::vector<std::vector<std::size_t>>{{0}, {1, 2}}));
  EXPECT_EQ(raw.entries[1].ranked_count(), 2U);
}

TEST(PrefLibParse, Fixture) {
  const auto raw = parse_preflib(slurp("mini.soi"));
  EXPECT_EQ(raw.names, (std::vector<std::string>{"Alpha", "Bravo", "Charlie", "Delta"}));
  ASSERT_EQ(raw.entries.size(), 5U);
  EXPECT_EQ(raw.entries[1].weight, Rational(5, 2));
  EXPECT_EQ(raw.entries[2].weight, Rational(1, 3));
  EXPECT_EQ(raw.entries[4].weight, Rational(1, 5));
}

TEST(PrefLibParse, Legacy) {
  const auto raw = parse_preflib(slurp("legacy.soc"));
  EXPECT_EQ(raw.names, (std::vector<std::string>{"Red", "Green", "Blue"}));
  ASSERT_EQ(raw.entries.size(), 2U);
  EXPECT_EQ(raw.entries[1].weight, Rational(2));
  EXPECT_EQ(raw.entries[1].groups.front(), std::vector<std::size_t>{2});
}

TEST(PrefLibParse, Errors) {
  try {
    parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,2,3\n1: 1,x,3\n");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 3U);
  }
  EXPECT_THROW(parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,2,1\n"), data_error);
  EXPECT_THROW(parse_preflib("# NUMBER ALTERNATIVES: 3\n1 1,2,3\n"), parse_error);
  EXPECT_THROW(parse_preflib("# NUMBER ALTERNATIVES: 3\n0: 1,2,3\n"), parse_error);
  EXPECT_THROW(parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,{2,3\n"), parse_error);
  EXPECT_THROW(parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,4\n"), parse_error);
  EXPECT_THROW(parse_preflib(""), parse_error);
}

TEST(PrefLibParse, RoundTrip) {
  for (const auto* name : {"mini.soi", "legacy.soc"}) {
    const auto raw = parse_preflib(slurp(name));
    EXPECT_EQ(parse_preflib(serialize_preflib(raw)), raw) << name;
  }
}

TEST(Materialize, WeightScaling) {
  RawElection raw{{"a", "b"}, {{Rational(5, 2), {{0}, {1}}}}};
  IngestPolicy policy;
  policy.weight_scale = 2;
  EXPECT_EQ(materialize(raw, policy, 0).profile.ballots()[0].multiplicity, 5);
  policy.weight_scale = 1;  // 2.5 rounds half up
  EXPECT_EQ(materialize(raw, policy, 0).profile.ballots()[0].multiplicity, 3);
}

TEST(Materialize, TieBreakByIndex) {
  const auto raw = parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,{3,2}\n");
  IngestPolicy policy;
  policy.tie_break = TieBreak::by_candidate_index;
  EXPECT_EQ(materialize(raw, policy, 0).profile.ballots()[0].ballot, Ballot::from_indices({0, 1, 2}));
}

TEST(Materialize, SeededTieBreakIsDeterministic) {
  const auto raw = parse_preflib(slurp("mini.soi"));
  IngestPolicy policy;
  policy.weight_scale = 10;
  EXPECT_EQ(materialize(raw, policy, 4).profile, materialize(raw, policy, 4).profile);
  bool differs = false;
  for (std::uint64_t s = 0; s < 20 && !differs; ++s) differs = !(materialize(raw, policy, s).profile == materialize(raw, policy, 0).profile);
  EXPECT_TRUE(differs);
}

TEST(Materialize, FixtureCounts) {
  const auto raw = parse_preflib(slurp("mini.soi"));
  IngestPolicy policy;
  const auto m = materialize(raw, policy, 1);
  EXPECT_EQ(m.dropped_incomplete, 1U);   // "3,1"
  EXPECT_EQ(m.dropped_zero_weight, 2U);  // 1/3 and 0.2 round to 0
  EXPECT_EQ(m.profile.voter_weight(), 6);
  policy.incomplete = IncompletePolicy::error;
  EXPECT_THROW(materialize(raw, policy, 1), data_error);
}

TEST(Materialize, SubsetProjection) {
  const auto e1 = fixtures::e1();
  RawElection raw{e1.names(), {}};
  for (const auto& wb : e1.ballots()) {
    RankingEntry e;
    for (auto c : wb.ballot.order()) e.groups.push_back({c.index});
    raw.entries.push_back(e);
  }
  IngestPolicy policy;
  policy.candidate_subset = resolve_candidates(raw.names, {"a", "b", "x", "y"});
  const auto p = materialize(raw, policy, 0).profile;
  EXPECT_EQ(p.names(), (std::vector<std::string>{"a", "b", "x", "y"}));
  EXPECT_EQ(p.ballots()[0].ballot, Profile::from_rankings({"a", "b", "x", "y"}, {{1, "a > x > y > b"}}).ballots()[0].ballot);
  // Sign of every retained pair survives the projection.
  for (std::size_t k = 0; k < e1.ballots().size(); ++k) {
    for (const auto& pr : p.pairs()) {
      const auto x = e1.id(p.name(pr.first()));
      const auto y = e1.id(p.name(pr.second()));
      EXPECT_EQ(p.ballots()[k].ballot.prefers(pr.first(), pr.second()), e1.ballots()[k].ballot.prefers(x, y));
    }
  }
}

TEST(Materialize, SubsetMakesTruncatedRankingsComplete) {
  const auto raw = parse_preflib(slurp("mini.soi"));
  IngestPolicy policy;
  policy.candidate_subset = resolve_candidates(raw.names, {"Charlie", "Alpha"});
  const auto m = materialize(raw, policy, 0);
  EXPECT_EQ(m.dropped_incomplete, 0U);
  EXPECT_EQ(m.profile.names(), (std::vector<std::string>{"Charlie", "Alpha"}));
}

TEST(Materialize, Subsample) {
  const auto raw = parse_preflib(slurp("mini.soi"));
  IngestPolicy policy;
  policy.weight_scale = 100;
  policy.subsample = Subsample{50, 9};
  const auto a = materialize(raw, policy, 0).profile;
  EXPECT_EQ(a.voter_weight(), 50);
  EXPECT_EQ(a, materialize(raw, policy, 0).profile);
}

TEST(Materialize, EmptyResultIsAnError) {
  const auto raw = parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,2\n");
  EXPECT_THROW(materialize(raw, {}, 0), data_error);
}

TEST(NativeProfile, RoundTrip) {
  for (const auto& [name, p] : fixtures::all()) {
    EXPECT_EQ(read_profile(write_profile(p, "fixture\nsecond line")), p) << name;
  }
}

TEST(NativeProfile, Errors) {
  EXPECT_THROW(read_profile("2 3\na\nb\n2: 1,2\n"), data_error);  // header n mismatch
  EXPECT_THROW(read_profile("2 1\na\nb\n1: 1\n"), parse_error);
  EXPECT_THROW(read_profile("2 1\na\nb\n1: {1,2}\n"), parse_error);
  EXPECT_THROW(read_profile("2 1\na\na\n1: 1,2\n"), data_error);
  EXPECT_THROW(read_profile("x\n"), parse_error);
}
