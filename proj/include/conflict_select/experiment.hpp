#pragma once

/**
 * @file experiment.hpp
 * @brief Batch experiments: run rules over many generated (or subsampled)
 *        profiles and collect plot-ready rows.
 *
 * Trial t uses seed derive_seed(spec.seed, t), so every row can be
 * regenerated in isolation and the output does not depend on the number of
 * worker threads. Rows are always ordered by trial index.
 *
 * CSV schemas (header row, fixed column order, '.' decimal separator):
 *   winners    trial,rule,pair,alpha,beta,gamma,phi,score
 *   summary    rule,rows,alpha_mean,alpha_sd,beta_mean,beta_sd,gamma_mean,gamma_sd,phi_mean,phi_sd,distance_mean,distance_sd
 *   baseline   trial,pair,alpha,beta,gamma,phi
 *   positions  trial,rule,pair,x1,y1,x2,y2,distance_from_center
 *   profiles   trial,mean_alpha,max_beta,mean_gamma,mean_phi
 *   sweep      psi,profiles,mean_alpha,max_beta,mean_gamma,mean_phi
 */

#include <charconv>
#include <cmath>
#include <cstdint>
#include <atomic>
#include <exception>
#include <functional>
#include <iterator>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "conflict_select/axioms.hpp"
#include "conflict_select/core.hpp"
#include "conflict_select/errors.hpp"
#include "conflict_select/generators.hpp"
#include "conflict_select/metrics.hpp"
#include "conflict_select/preflib.hpp"
#include "conflict_select/rules.hpp"

namespace conflict_select {

/// Runs body(i) for i in [0, count) on worker_count() threads.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::min<std::uint64_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

struct DatasetSource {
  RawElection election;
  IngestPolicy policy;  // subsample seed is replaced per trial
};

struct ExperimentSpec {
  std::optional<GeneratorConfig> generator;  // seed is replaced per trial
  std::optional<DatasetSource> dataset;
  std::vector<RuleId> rules;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (generator.has_value() == dataset.has_value()) throw config_error("experiment needs exactly one of a generator or a dataset");
    if (trials < 1) throw config_error("experiment needs at least one trial");
    if (rules.empty()) throw config_error("experiment needs at least one rule");
  }
};

struct MetricValues {
  Rational alpha;
  Rational beta;
  Rational gamma;
  Rational phi;
};

struct WinnerRow {
  std::int64_t trial = 0;
  std::string rule;
  std::string pair;
  MetricValues metrics;
  Score score;
  std::size_t ties = 1;  // winners of this rule in this trial
};

struct BaselineRow {
  std::int64_t trial = 0;
  std::string pair;
  MetricValues metrics;
};

struct PositionRow {
  std::int64_t trial = 0;
  std::string rule;
  std::string pair;
  Point first;
  Point second;
  double distance_from_center = 0;  // mean of the two candidates' distances to (0.5, 0.5)
};

struct ProfileStats {
  std::int64_t trial = 0;
  double mean_alpha = 0;
  double max_beta = 0;
  double mean_gamma = 0;
  double mean_phi = 0;
};

struct ExperimentResult {
  std::vector<WinnerRow> winners;
  std::vector<BaselineRow> baseline;
  std::vector<PositionRow> positions;  // Euclidean runs only
  std::vector<ProfileStats> profiles;
};

namespace detail {

inline MetricValues metric_values(const PairAssessment& a) { return {a.alpha, a.beta, a.gamma, a.phi}; }

inline double distance_to_center(Point p) { return std::hypot(p.x - 0.5, p.y - 0.5); }

inline ProfileStats profile_stats(std::int64_t trial, const std::vector<PairAssessment>& all) {
  ProfileStats s;
  s.trial = trial;
  long double a = 0, g = 0, f = 0;
  Rational best{0};
  for (const auto& x : all) {
    a += x.alpha.to_long_double();
    g += x.gamma.to_long_double();
    f += x.phi.to_long_double();
    best = std::max(best, x.beta);
  }
  const auto k = static_cast<long double>(all.size());
  s.mean_alpha = static_cast<double>(a / k);
  s.max_beta = static_cast<double>(best.to_long_double());
  s.mean_gamma = static_cast<double>(g / k);
  s.mean_phi = static_cast<double>(f / k);
  return s;
}

}  // namespace detail

/// Draws the profile (and, for Euclidean generators, the coordinates) of one trial.
inline SpatialElection experiment_profile(const ExperimentSpec& spec, std::int64_t trial) {
  const auto trial_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(trial));
  if (spec.generator) {
    GeneratorConfig c = *spec.generator;
    c.seed = trial_seed;
    if (c.kind == GeneratorKind::euclidean) return generate_spatial(c);
    return SpatialElection{generate(c), {}, {}};
  }
  IngestPolicy policy = spec.dataset->policy;
  if (policy.subsample) policy.subsample->seed = trial_seed;
  return SpatialElection{materialize(spec.dataset->election, policy, trial_seed).profile, {}, {}};
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto trials = static_cast<std::size_t>(spec.trials);
  std::vector<ExperimentResult> per_trial(trials);

  parallel_for(trials, [&](std::size_t i) {
    const auto t = static_cast<std::int64_t>(i);
    auto& out = per_trial[i];
    const auto election = experiment_profile(spec, t);
    const auto& profile = election.profile;
    const auto tallies = tally_all(profile);
    std::vector<PairAssessment> assessed;
    assessed.reserve(tallies.size());
    for (const auto& tl : tallies) assessed.push_back(assess_pair(tl));
    auto find = [&](const Pair& p) -> const PairAssessment& {
      for (const auto& a : assessed) {
        if (a.pair == p) return a;
      }
      throw std::logic_error("pair missing from assessment");
    };

    for (const auto& rule : spec.rules) {
      const auto outcome = select(rule, profile, tallies);
      for (const auto& w : outcome.winners) {
        out.winners.push_back({t, rule.name(), profile.pair_label(w), detail::metric_values(find(w)), outcome.score_of(w),
                               outcome.winners.size()});
        if (!election.candidates.empty()) {
          const Point p1 = election.candidates[w.first().index];
          const Point p2 = election.candidates[w.second().index];
          out.positions.push_back({t, rule.name(), profile.pair_label(w), p1, p2,
                                   (detail::distance_to_center(p1) + detail::distance_to_center(p2)) / 2});
        }
      }
    }

    auto rng = make_rng(derive_seed(spec.seed, i), 1);
    const auto& random_pair = assessed[std::uniform_int_distribution<std::size_t>(0, assessed.size() - 1)(rng)];
    out.baseline.push_back({t, profile.pair_label(random_pair.pair), detail::metric_values(random_pair)});
    if (!election.candidates.empty()) {
      const Point p1 = election.candidates[random_pair.pair.first().index];
      const Point p2 = election.candidates[random_pair.pair.second().index];
      out.positions.push_back({t, "Random", profile.pair_label(random_pair.pair), p1, p2,
                               (detail::distance_to_center(p1) + detail::distance_to_center(p2)) / 2});
    }
    out.profiles.push_back(detail::profile_stats(t, assessed));
  });

  ExperimentResult result;
  for (auto& r : per_trial) {
    std::move(r.winners.begin(), r.winners.end(), std::back_inserter(result.winners));
    std::move(r.baseline.begin(), r.baseline.end(), std::back_inserter(result.baseline));
    std::move(r.positions.begin(), r.positions.end(), std::back_inserter(result.positions));
    std::move(r.profiles.begin(), r.profiles.end(), std::back_inserter(result.profiles));
  }
  return result;
}

struct MeanSd {
  double mean = 0;
  double sd = 0;  // population standard deviation
};

inline MeanSd mean_sd(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  long double s = 0;
  for (double x : xs) s += x;
  const long double mean = s / static_cast<long double>(xs.size());
  long double v = 0;
  for (double x : xs) v += (x - mean) * (x - mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(v / static_cast<long double>(xs.size())))};
}

struct RuleSummary {
  std::string rule;
  std::size_t rows = 0;
  MeanSd alpha, beta, gamma, phi;
  std::optional<MeanSd> distance;
};

/// Per-rule means over winner rows (ties count as separate rows), then the
/// random-pair baseline as rule "Random".
inline std::vector<RuleSummary> summarize(const ExperimentSpec& spec, const ExperimentResult& result) {
  std::vector<RuleSummary> out;
  auto build = [&](const std::string& name, auto&& rows) {
    RuleSummary s;
    s.rule = name;
    std::vector<double> a, b, g, f;
    for (const auto& r : rows) {
      a.push_back(static_cast<double>(r.metrics.alpha));
      b.push_back(static_cast<double>(r.metrics.beta));
      g.push_back(static_cast<double>(r.metrics.gamma));
      f.push_back(static_cast<double>(r.metrics.phi));
    }
    s.rows = a.size();
    s.alpha = mean_sd(a);
    s.beta = mean_sd(b);
    s.gamma = mean_sd(g);
    s.phi = mean_sd(f);
    std::vector<double> d;
    for (const auto& p : result.positions) {
      if (p.rule == name) d.push_back(p.distance_from_center);
    }
    if (!d.empty()) s.distance = mean_sd(d);
    out.push_back(std::move(s));
  };
  for (const auto& rule : spec.rules) {
    std::vector<WinnerRow> rows;
    for (const auto& w : result.winners) {
      if (w.rule == rule.name()) rows.push_back(w);
    }
    build(rule.name(), rows);
  }
  build("Random", result.baseline);
  return out;
}

struct SweepRow {
  double psi = 0;
  std::int64_t profiles = 0;
  double mean_alpha = 0;  // averaged over profiles of the per-profile mean over pairs
  double max_beta = 0;    // averaged over profiles of the per-profile maximum
  double mean_gamma = 0;
  double mean_phi = 0;
};

/// Mallows dispersion sweep: per psi, `profiles` profiles of n voters and m
/// candidates; metrics are taken over all pairs of each profile.
inline std::vector<SweepRow> mallows_sweep(const std::vector<double>& psis, std::int64_t n, std::size_t m, std::int64_t profiles,
                                           int centers, std::uint64_t seed, SecondCenter second = SecondCenter::reverse) {
  if (profiles < 1) throw config_error("sweep needs at least one profile per point");
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < psis.size(); ++k) {
    ExperimentSpec spec;
    GeneratorConfig g;
    g.kind = GeneratorKind::mallows;
    g.voters = n;
    g.candidates = m;
    g.psi = psis[k];
    g.centers = centers;
    g.second_center = second;
    spec.generator = g;
    spec.rules = {RuleId::max_sum()};  // unused; the sweep only reads profile statistics
    spec.trials = profiles;
    spec.seed = derive_seed(seed, k);
    spec.validate();
    std::vector<ProfileStats> stats(static_cast<std::size_t>(profiles));
    parallel_for(stats.size(), [&](std::size_t i) {
      const auto profile = experiment_profile(spec, static_cast<std::int64_t>(i)).profile;
      stats[i] = detail::profile_stats(static_cast<std::int64_t>(i), assess_all(profile));
    });
    SweepRow row;
    row.psi = psis[k];
    row.profiles = profiles;
    for (const auto& s : stats) {
      row.mean_alpha += s.mean_alpha;
      row.max_beta += s.max_beta;
      row.mean_gamma += s.mean_gamma;
      row.mean_phi += s.mean_phi;
    }
    const auto denom = static_cast<double>(profiles);
    row.mean_alpha /= denom;
    row.max_beta /= denom;
    row.mean_gamma /= denom;
    row.mean_phi /= denom;
    rows.push_back(row);
  }
  return rows;
}

// ---- CSV ----

namespace csv {

/// Shortest round-trip decimal; independent of the global locale.
inline std::string number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}
inline std::string number(const Rational& r) { return number(static_cast<double>(r)); }
inline std::string number(const Score& s) { return number(static_cast<double>(s.value())); }

inline std::string field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_winners(std::ostream& out, const std::vector<WinnerRow>& rows) {
  out << "trial,rule,pair,alpha,beta,gamma,phi,score\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << field(r.rule) << ',' << field(r.pair) << ',' << number(r.metrics.alpha) << ','
        << number(r.metrics.beta) << ',' << number(r.metrics.gamma) << ',' << number(r.metrics.phi) << ',' << number(r.score)
        << '\n';
  }
}

inline void write_summary(std::ostream& out, const std::vector<RuleSummary>& rows) {
  out << "rule,rows,alpha_mean,alpha_sd,beta_mean,beta_sd,gamma_mean,gamma_sd,phi_mean,phi_sd,distance_mean,distance_sd\n";
  for (const auto& s : rows) {
    out << field(s.rule) << ',' << s.rows;
    for (const auto* m : {&s.alpha, &s.beta, &s.gamma, &s.phi}) out << ',' << number(m->mean) << ',' << number(m->sd);
    if (s.distance) {
      out << ',' << number(s.distance->mean) << ',' << number(s.distance->sd) << '\n';
    } else {
      out << ",,\n";
    }
  }
}

inline void write_baseline(std::ostream& out, const std::vector<BaselineRow>& rows) {
  out << "trial,pair,alpha,beta,gamma,phi\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << field(r.pair) << ',' << number(r.metrics.alpha) << ',' << number(r.metrics.beta) << ','
        << number(r.metrics.gamma) << ',' << number(r.metrics.phi) << '\n';
  }
}

inline void write_positions(std::ostream& out, const std::vector<PositionRow>& rows) {
  out << "trial,rule,pair,x1,y1,x2,y2,distance_from_center\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << field(r.rule) << ',' << field(r.pair) << ',' << number(r.first.x) << ',' << number(r.first.y) << ','
        << number(r.second.x) << ',' << number(r.second.y) << ',' << number(r.distance_from_center) << '\n';
  }
}

inline void write_profiles(std::ostream& out, const std::vector<ProfileStats>& rows) {
  out << "trial,mean_alpha,max_beta,mean_gamma,mean_phi\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << number(r.mean_alpha) << ',' << number(r.max_beta) << ',' << number(r.mean_gamma) << ','
        << number(r.mean_phi) << '\n';
  }
}

inline void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "psi,profiles,mean_alpha,max_beta,mean_gamma,mean_phi\n";
  for (const auto& r : rows) {
    out << number(r.psi) << ',' << r.profiles << ',' << number(r.mean_alpha) << ',' << number(r.max_beta) << ','
        << number(r.mean_gamma) << ',' << number(r.mean_phi) << '\n';
  }
}

}  // namespace csv

}  // namespace conflict_select
