#pragma once

/**
 * @file generators.hpp
 * @brief Synthetic profiles: the characteristic elections (identity,
 *        antagonism, uniformity), impartial culture, 1-/2-center Mallows and
 *        the 2D Euclidean model.
 *
 * Randomness is keyed by (seed, stream): derive_seed mixes the two with
 * splitmix64 and the result seeds a std::mt19937_64, so profile k of a batch
 * can be regenerated on its own without replaying profiles 0..k-1.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <locale>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conflict_select/core.hpp"
#include "conflict_select/errors.hpp"

namespace conflict_select {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) { return std::mt19937_64(derive_seed(seed, stream)); }

enum class GeneratorKind { identity, antagonism, uniformity, impartial_culture, mallows, euclidean };
enum class SpatialDistribution { uniform, gaussian };

/// How the second Mallows center is chosen when none is given explicitly.
enum class SecondCenter { reverse, random };

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::impartial_culture;
  std::int64_t voters = 1;
  std::size_t candidates = 2;
  std::uint64_t seed = 0;

  // Mallows
  double psi = 0.5;
  int centers = 1;
  std::vector<Ballot> center_override;  // empty: identity (and per second_center)
  SecondCenter second_center = SecondCenter::reverse;

  // Euclidean
  SpatialDistribution voter_distribution = SpatialDistribution::uniform;
  SpatialDistribution candidate_distribution = SpatialDistribution::uniform;
  double gaussian_sigma = 0.15;
};

inline std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::identity: return "identity";
    case GeneratorKind::antagonism: return "antagonism";
    case GeneratorKind::uniformity: return "uniformity";
    case GeneratorKind::impartial_culture: return "ic";
    case GeneratorKind::mallows: return "mallows";
    case GeneratorKind::euclidean: return "euclidean";
  }
  return "?";
}

inline GeneratorKind parse_generator_kind(std::string_view s) {
  if (s == "identity" || s == "id") return GeneratorKind::identity;
  if (s == "antagonism" || s == "an") return GeneratorKind::antagonism;
  if (s == "uniformity" || s == "un") return GeneratorKind::uniformity;
  if (s == "ic" || s == "impartial") return GeneratorKind::impartial_culture;
  if (s == "mallows") return GeneratorKind::mallows;
  if (s == "euclidean" || s == "euclidean2d") return GeneratorKind::euclidean;
  throw config_error("unknown generator '" + std::string(s) + "'");
}

inline SpatialDistribution parse_spatial_distribution(std::string_view s) {
  if (s == "uniform") return SpatialDistribution::uniform;
  if (s == "gaussian") return SpatialDistribution::gaussian;
  throw config_error("unknown spatial distribution '" + std::string(s) + "'");
}

inline std::string_view to_string(SpatialDistribution d) { return d == SpatialDistribution::uniform ? "uniform" : "gaussian"; }

/// Number of discordant pairs.
inline std::int64_t kendall_tau(const Ballot& x, const Ballot& y) {
  if (x.size() != y.size()) throw std::domain_error("kendall tau needs ballots over the same roster");
  std::int64_t d = 0;
  const auto order = x.order();
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (y.prefers(order[j], order[i])) ++d;
    }
  }
  return d;
}

inline Ballot random_ballot(std::size_t m, std::mt19937_64& rng) {
  std::vector<CandidateId> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = CandidateId{i};
  std::shuffle(order.begin(), order.end(), rng);
  return Ballot(std::move(order));
}

/// Repeated insertion: the j-th item of the center (j = 1..m) goes to
/// position i in 1..j with probability proportional to psi^(j-i), which
/// yields P(ballot) proportional to psi^KT(center, ballot).
class MallowsSampler {
 public:
  MallowsSampler(Ballot center, double psi) : center_(std::move(center)) {
    if (!(psi >= 0.0 && psi <= 1.0)) throw config_error("Mallows dispersion must lie in [0,1]");
    const auto m = center_.size();
    cumulative_.resize(m);
    for (std::size_t j = 1; j <= m; ++j) {
      auto& row = cumulative_[j - 1];
      row.resize(j);
      double acc = 0.0;
      for (std::size_t i = 1; i <= j; ++i) {
        acc += std::pow(psi, static_cast<double>(j - i));
        row[i - 1] = acc;
      }
    }
  }

  Ballot operator()(std::mt19937_64& rng) const {
    std::vector<CandidateId> order;
    order.reserve(center_.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t j = 1; j <= center_.size(); ++j) {
      const auto& row = cumulative_[j - 1];
      const double u = unit(rng) * row.back();
      auto slot = static_cast<std::size_t>(std::upper_bound(row.begin(), row.end(), u) - row.begin());
      slot = std::min(slot, j - 1);
      order.insert(order.begin() + static_cast<std::ptrdiff_t>(slot), center_.order()[j - 1]);
    }
    return Ballot(std::move(order));
  }

 private:
  Ballot center_;
  std::vector<std::vector<double>> cumulative_;
};

struct Point {
  double x = 0;
  double y = 0;
};

struct SpatialElection {
  Profile profile;
  std::vector<Point> voters;
  std::vector<Point> candidates;
};

namespace detail {

inline void validate(const GeneratorConfig& c) {
  if (c.voters < 1) throw config_error("generator needs at least one voter");
  if (c.candidates < 2) throw config_error("generator needs at least two candidates");
  if (c.kind == GeneratorKind::antagonism && c.voters % 2 != 0) throw config_error("antagonism needs an even number of voters");
  if (c.kind == GeneratorKind::uniformity && c.candidates > 9) throw config_error("uniformity is limited to m <= 9");
  if (c.kind == GeneratorKind::mallows) {
    if (!(c.psi >= 0.0 && c.psi <= 1.0)) throw config_error("Mallows dispersion must lie in [0,1]");
    if (c.centers != 1 && c.centers != 2) throw config_error("Mallows supports one or two centers");
  }
  if (c.kind == GeneratorKind::euclidean && !(c.gaussian_sigma > 0.0)) throw config_error("gaussian sigma must be positive");
  for (const auto& b : c.center_override) {
    if (b.size() != c.candidates) throw config_error("center ballot does not match the candidate count");
  }
}

inline Ballot first_center(const GeneratorConfig& c) {
  return c.center_override.empty() ? Ballot::identity(c.candidates) : c.center_override.front();
}

inline Point sample_point(SpatialDistribution d, double sigma, std::mt19937_64& rng) {
  if (d == SpatialDistribution::uniform) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    return {x, u(rng)};
  }
  std::normal_distribution<double> g(0.5, sigma);
  const double x = g(rng);
  return {x, g(rng)};
}

}  // namespace detail

/// Euclidean elections keep the sampled coordinates next to the profile.
inline SpatialElection generate_spatial(const GeneratorConfig& config) {
  detail::validate(config);
  if (config.kind != GeneratorKind::euclidean) throw config_error("spatial generation needs the euclidean generator");
  auto rng = make_rng(config.seed, 0);
  SpatialElection e{Profile(1, {{Ballot::identity(1), 1}}), {}, {}};
  for (std::size_t c = 0; c < config.candidates; ++c) {
    e.candidates.push_back(detail::sample_point(config.candidate_distribution, config.gaussian_sigma, rng));
  }
  std::vector<WeightedBallot> ballots;
  std::vector<std::pair<double, std::size_t>> dist(config.candidates);
  for (std::int64_t v = 0; v < config.voters; ++v) {
    const Point p = detail::sample_point(config.voter_distribution, config.gaussian_sigma, rng);
    e.voters.push_back(p);
    for (std::size_t c = 0; c < config.candidates; ++c) {
      const double dx = p.x - e.candidates[c].x;
      const double dy = p.y - e.candidates[c].y;
      dist[c] = {dx * dx + dy * dy, c};
    }
    std::sort(dist.begin(), dist.end());  // ties fall back to the candidate index
    std::vector<CandidateId> order;
    for (const auto& [d, c] : dist) order.push_back(CandidateId{c});
    ballots.push_back({Ballot(std::move(order)), 1});
  }
  e.profile = Profile(config.candidates, std::move(ballots)).compacted();
  return e;
}

inline Profile generate(const GeneratorConfig& config) {
  detail::validate(config);
  const auto m = config.candidates;
  const auto n = config.voters;
  std::vector<WeightedBallot> ballots;
  switch (config.kind) {
    case GeneratorKind::identity:
      ballots.push_back({detail::first_center(config), n});
      break;
    case GeneratorKind::antagonism: {
      const auto sigma = detail::first_center(config);
      ballots.push_back({sigma, n / 2});
      ballots.push_back({sigma.reversed(), n / 2});
      break;
    }
    case GeneratorKind::uniformity: {
      std::int64_t count = 1;
      for (std::size_t i = 2; i <= m; ++i) count *= static_cast<std::int64_t>(i);
      // Weight n is only reachable when m! divides it; otherwise one copy each.
      const std::int64_t each = n % count == 0 ? n / count : 1;
      std::vector<std::size_t> perm(m);
      for (std::size_t i = 0; i < m; ++i) perm[i] = i;
      do {
        ballots.push_back({Ballot::from_indices(perm), each});
      } while (std::next_permutation(perm.begin(), perm.end()));
      return Profile(m, std::move(ballots));
    }
    case GeneratorKind::impartial_culture: {
      auto rng = make_rng(config.seed, 0);
      for (std::int64_t v = 0; v < n; ++v) ballots.push_back({random_ballot(m, rng), 1});
      break;
    }
    case GeneratorKind::mallows: {
      auto rng = make_rng(config.seed, 0);
      std::vector<Ballot> centers{detail::first_center(config)};
      if (config.centers == 2) {
        if (config.center_override.size() >= 2) {
          centers.push_back(config.center_override[1]);
        } else if (config.second_center == SecondCenter::reverse) {
          centers.push_back(centers.front().reversed());
        } else {
          auto center_rng = make_rng(config.seed, 1);
          centers.push_back(random_ballot(m, center_rng));
        }
      }
      std::vector<MallowsSampler> samplers;
      for (const auto& c : centers) samplers.emplace_back(c, config.psi);
      std::bernoulli_distribution coin(0.5);
      for (std::int64_t v = 0; v < n; ++v) {
        const auto& sampler = samplers.size() == 1 || !coin(rng) ? samplers[0] : samplers[1];
        ballots.push_back({sampler(rng), 1});
      }
      break;
    }
    case GeneratorKind::euclidean:
      return generate_spatial(config).profile;
  }
  return Profile(m, std::move(ballots)).compacted();
}

/// Plain "key = value" lines; '#' starts a comment. Round-trips through
/// parse_generator_config except for center_override, which is not written.
inline std::string to_key_values(const GeneratorConfig& c) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "generator = " << to_string(c.kind) << '\n';
  out << "n = " << c.voters << '\n';
  out << "m = " << c.candidates << '\n';
  out << "seed = " << c.seed << '\n';
  if (c.kind == GeneratorKind::mallows) {
    out << "psi = " << c.psi << '\n';
    out << "centers = " << c.centers << '\n';
    out << "second_center = " << (c.second_center == SecondCenter::reverse ? "reverse" : "random") << '\n';
  }
  if (c.kind == GeneratorKind::euclidean) {
    out << "voter_distribution = " << to_string(c.voter_distribution) << '\n';
    out << "candidate_distribution = " << to_string(c.candidate_distribution) << '\n';
    out << "gaussian_sigma = " << c.gaussian_sigma << '\n';
  }
  return out.str();
}

inline GeneratorConfig parse_generator_config(std::string_view text) {
  GeneratorConfig c;
  std::istringstream in{std::string(text)};
  in.imbue(std::locale::classic());
  std::string line;
  std::size_t number = 0;
  auto num = [&](const std::string& v, auto& target) {
    std::istringstream vs(v);
    vs.imbue(std::locale::classic());
    vs >> target;
    if (!vs || !(vs >> std::ws).eof()) throw parse_error(number, "invalid value '" + v + "'");
  };
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    if (eq == std::string::npos) throw parse_error(number, "expected 'key = value'");
    const auto key = strip(line.substr(0, eq));
    const auto value = strip(line.substr(eq + 1));
    if (key == "generator") {
      c.kind = parse_generator_kind(value);
    } else if (key == "n") {
      num(value, c.voters);
    } else if (key == "m") {
      num(value, c.candidates);
    } else if (key == "seed") {
      num(value, c.seed);
    } else if (key == "psi") {
      num(value, c.psi);
    } else if (key == "centers") {
      num(value, c.centers);
    } else if (key == "second_center") {
      if (value == "reverse") {
        c.second_center = SecondCenter::reverse;
      } else if (value == "random") {
        c.second_center = SecondCenter::random;
      } else {
        throw parse_error(number, "second_center must be 'reverse' or 'random'");
      }
    } else if (key == "voter_distribution") {
      c.voter_distribution = parse_spatial_distribution(value);
    } else if (key == "candidate_distribution") {
      c.candidate_distribution = parse_spatial_distribution(value);
    } else if (key == "gaussian_sigma") {
      num(value, c.gaussian_sigma);
    } else {
      throw parse_error(number, "unknown key '" + key + "'");
    }
  }
  detail::validate(c);
  return c;
}

}  // namespace conflict_select
