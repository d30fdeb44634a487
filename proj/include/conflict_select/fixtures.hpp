#pragma once

// Small hand-made profiles used throughout the docs, tests and the CLI:
// E1..E5 plus the characteristic elections.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "conflict_select/core.hpp"
#include "conflict_select/errors.hpp"
#include "conflict_select/generators.hpp"

namespace conflict_select::fixtures {

/// MaxSum ties {a,b}, {a,y}, {b,x} and {x,y}; MaxNash and MaxSwap prefer {x,y}.
inline Profile e1() {
  return Profile::from_rankings({"a", "b", "c", "d", "x", "y"}, {{1, "a > x > c > d > y > b"}, {1, "c > y > b > a > x > d"}});
}

/// MaxSum and 2-MaxPolar pick the unbalanced {x,y}; MaxNash and MaxSwap pick {a,b}.
inline Profile e2() {
  return Profile::from_rankings({"a", "b", "x", "y"}, {{2, "x > a > b > y"}, {1, "a > y > x > b"}, {1, "b > y > x > a"}});
}

/// MaxSwap ties {a,b} with {c,d} although {c,d} matching-dominates {a,b}.
inline Profile e3() {
  return Profile::from_rankings({"a", "b", "c", "d"}, {{10, "d > b > a > c"}, {1, "a > c > b > d"}, {1, "c > a > d > b"}});
}

/// Only {b,c} is conflicting.
inline Profile e4() { return Profile::from_rankings({"a", "b", "c"}, {{1, "a > b > c"}, {1, "a > c > b"}}); }

/// {a,b} matching-dominates {x,y}.
inline Profile e5() {
  return Profile::from_rankings({"a", "b", "x", "y"},
                                {{1, "a > x > y > b"}, {1, "a > y > x > b"}, {1, "b > x > a > y"}, {1, "b > y > a > x"}});
}

inline Profile characteristic(GeneratorKind kind, std::size_t m, std::int64_t n) {
  GeneratorConfig c;
  c.kind = kind;
  c.voters = n;
  c.candidates = m;
  return generate(c);
}

inline Profile identity(std::size_t m, std::int64_t n = 1) { return characteristic(GeneratorKind::identity, m, n); }
inline Profile antagonism(std::size_t m, std::int64_t n = 2) { return characteristic(GeneratorKind::antagonism, m, n); }
inline Profile uniformity(std::size_t m) { return characteristic(GeneratorKind::uniformity, m, 1); }

/// Every named fixture: E1..E5, ID4, AN4, UN3, UN4, UN5.
inline std::map<std::string, Profile, std::less<>> all() {
  std::map<std::string, Profile, std::less<>> out;
  out.emplace("E1", e1());
  out.emplace("E2", e2());
  out.emplace("E3", e3());
  out.emplace("E4", e4());
  out.emplace("E5", e5());
  out.emplace("ID4", identity(4));
  out.emplace("AN4", antagonism(4));
  for (std::size_t m = 3; m <= 5; ++m) out.emplace("UN" + std::to_string(m), uniformity(m));
  return out;
}

inline Profile by_name(std::string_view name) {
  auto table = all();
  auto it = table.find(name);
  if (it == table.end()) throw config_error("unknown fixture '" + std::string(name) + "'");
  return it->second;
}

}  // namespace conflict_select::fixtures
