// conflict_select: most conflicting candidate pairs, their metrics, axiom
// audits, sampling, PrefLib ingestion and batch experiments.
//
// Exit codes: 0 success, 1 an axiom check failed, 2 usage error, 3 data error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "conflict_select.hpp"

namespace cs = conflict_select;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_axiom_fail = 1;
constexpr int exit_usage = 2;
constexpr int exit_data = 3;

// Input file errors are data errors, not usage errors.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path + ": cannot open");
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot write");
  out << content;
  if (!out) throw io_error(path + ": write failed");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

struct IngestOptions {
  std::int64_t weight_scale = 1;
  std::string tie_break = "random";
  std::string incomplete = "drop";
  std::string subset;
  std::int64_t subsample = 0;
  std::uint64_t seed = 0;

  cs::IngestPolicy policy(const std::vector<std::string>& names) const {
    cs::IngestPolicy p;
    p.weight_scale = weight_scale;
    p.tie_break = cs::parse_tie_break(tie_break);
    if (incomplete == "drop") {
      p.incomplete = cs::IncompletePolicy::drop;
    } else if (incomplete == "error") {
      p.incomplete = cs::IncompletePolicy::error;
    } else {
      throw cs::config_error("--incomplete must be 'drop' or 'error'");
    }
    if (!subset.empty()) p.candidate_subset = cs::resolve_candidates(names, split(subset, ','));
    if (subsample > 0) p.subsample = cs::Subsample{subsample, seed};
    return p;
  }

  void add_to(CLI::App* app) {
    app->add_option("--weight-scale", weight_scale, "Multiplicity = round(weight * scale)")->check(CLI::PositiveNumber);
    app->add_option("--tie-break", tie_break, "random | index")->check(CLI::IsMember({"random", "index"}));
    app->add_option("--incomplete", incomplete, "drop | error")->check(CLI::IsMember({"drop", "error"}));
    app->add_option("--subset", subset, "Comma-separated candidate names or 1-based indices to keep");
    app->add_option("--subsample", subsample, "Draw this many voters, proportional to weight");
  }
};

bool looks_like_preflib(std::string_view text) {
  if (text.find("# NUMBER ALTERNATIVES") != std::string_view::npos) return true;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    std::istringstream tokens(line);
    std::string a, extra;
    tokens >> a >> extra;
    return extra.empty();  // legacy PrefLib starts with the bare candidate count
  }
  return false;
}

/// "fixture:E1", a native profile document, or a PrefLib file.
cs::Profile load_profile(const std::string& source, const IngestOptions& ingest) {
  if (source.starts_with("fixture:")) return cs::fixtures::by_name(source.substr(8));
  const auto text = read_file(source);
  try {
    if (looks_like_preflib(text)) {
      const auto raw = cs::parse_preflib(text);
      return cs::materialize(raw, ingest.policy(raw.names), ingest.seed).profile;
    }
    return cs::read_profile(text);
  } catch (const cs::parse_error& e) {
    throw cs::data_error(source + ": " + e.what());
  } catch (const cs::data_error& e) {
    throw cs::data_error(source + ": " + e.what());
  }
}

std::vector<cs::RuleId> parse_rules(const std::vector<std::string>& names, std::vector<cs::RuleId> fallback) {
  if (names.empty()) return fallback;
  std::vector<cs::RuleId> rules;
  for (const auto& n : names) {
    for (const auto& part : split(n, ',')) rules.push_back(cs::RuleId::parse(part));
  }
  return rules;
}

struct GeneratorOptions {
  std::string generator = "ic";
  std::int64_t n = 100;
  std::size_t m = 10;
  double psi = 0.5;
  int centers = 1;
  std::string second_center = "reverse";
  std::string voter_dist = "gaussian";
  std::string candidate_dist = "gaussian";
  double sigma = 0.15;
  std::string config_file;

  void add_to(CLI::App* app, bool with_config = true) {
    app->add_option("--generator", generator, "identity | antagonism | uniformity | ic | mallows | euclidean");
    app->add_option("--n", n, "Voters");
    app->add_option("--m", m, "Candidates");
    app->add_option("--psi", psi, "Mallows dispersion in [0,1]");
    app->add_option("--centers", centers, "Mallows centers (1 or 2)");
    app->add_option("--second-center", second_center, "reverse | random")->check(CLI::IsMember({"reverse", "random"}));
    app->add_option("--voter-dist", voter_dist, "Euclidean voters: uniform | gaussian");
    app->add_option("--candidate-dist", candidate_dist, "Euclidean candidates: uniform | gaussian");
    app->add_option("--sigma", sigma, "Standard deviation of gaussian points around (0.5,0.5)");
    if (with_config) app->add_option("--config", config_file, "Generator key/value file (overrides the generator flags)");
  }

  cs::GeneratorConfig config(std::uint64_t seed) const {
    if (!config_file.empty()) {
      auto c = cs::parse_generator_config(read_file(config_file));
      return c;
    }
    cs::GeneratorConfig c;
    c.kind = cs::parse_generator_kind(generator);
    c.voters = n;
    c.candidates = m;
    c.seed = seed;
    c.psi = psi;
    c.centers = centers;
    c.second_center = second_center == "random" ? cs::SecondCenter::random : cs::SecondCenter::reverse;
    c.voter_distribution = cs::parse_spatial_distribution(voter_dist);
    c.candidate_distribution = cs::parse_spatial_distribution(candidate_dist);
    c.gaussian_sigma = sigma;
    return c;
  }
};

std::string safe_name(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

int cmd_fixtures(const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& [name, profile] : cs::fixtures::all()) {
    write_file((fs::path(dir) / (name + ".profile")).string(), cs::write_profile(profile, "fixture " + name));
  }
  return exit_ok;
}

int cmd_winners(const cs::Profile& profile, const std::vector<cs::RuleId>& rules) {
  std::cout << "rule,pair,score,ties,conflicting\n";
  const auto tallies = cs::tally_all(profile);
  for (const auto& rule : rules) {
    const auto outcome = cs::select(rule, profile, tallies);
    for (const auto& w : outcome.winners) {
      std::cout << cs::csv::field(rule.name()) << ',' << cs::csv::field(profile.pair_label(w)) << ','
                << cs::csv::number(outcome.score_of(w)) << ',' << outcome.winners.size() << ','
                << (cs::is_conflicting(profile, w) ? 1 : 0) << '\n';
    }
  }
  return exit_ok;
}

int cmd_metrics(const cs::Profile& profile, const std::vector<std::string>& pair_args) {
  std::vector<cs::Pair> pairs;
  for (const auto& arg : pair_args) {
    const auto parts = split(arg, ',');
    if (parts.size() != 2) throw cs::config_error("--pair expects 'a,b', got '" + arg + "'");
    const auto a = profile.find(parts[0]);
    const auto b = profile.find(parts[1]);
    if (!a || !b) throw cs::config_error("unknown candidate in --pair '" + arg + "'");
    pairs.emplace_back(*a, *b);
  }
  if (pairs.empty()) pairs = profile.pairs();
  std::cout << "pair,alpha,beta,gamma,phi,conf_sum,conf_nash,swap_score\n";
  for (const auto& p : pairs) {
    const auto a = cs::assess_pair(profile, p);
    std::cout << cs::csv::field(profile.pair_label(p)) << ',' << cs::csv::number(a.alpha) << ',' << cs::csv::number(a.beta)
              << ',' << cs::csv::number(a.gamma) << ',' << cs::csv::number(a.phi) << ',' << a.conf_sum << ',' << a.conf_nash
              << ',' << a.swap_score << '\n';
  }
  return exit_ok;
}

struct AxiomOptions {
  std::vector<std::string> rules;
  std::vector<std::string> axioms;
  std::string profile;
  std::uint64_t budget = 10000;
  std::string witness_dir;
  std::int64_t min_n = 2, max_n = 6;
  std::size_t min_m = 3, max_m = 5;
};

int cmd_axioms(const AxiomOptions& o, const GeneratorOptions& g, std::uint64_t seed, const IngestOptions& ingest, bool n_set,
               bool m_set) {
  const auto rules = parse_rules(o.rules, cs::RuleId::conflictual());
  std::vector<cs::AxiomId> axioms;
  for (const auto& a : o.axioms) {
    for (const auto& part : split(a, ',')) axioms.push_back(cs::parse_axiom(part));
  }
  if (axioms.empty()) axioms.assign(std::begin(cs::all_axioms), std::end(cs::all_axioms));

  std::optional<cs::Profile> fixed;
  if (!o.profile.empty()) fixed = load_profile(o.profile, ingest);
  cs::SearchSpace space;
  space.generator = g.config(seed);
  space.min_voters = n_set ? g.n : o.min_n;
  space.max_voters = n_set ? g.n : o.max_n;
  space.min_candidates = m_set ? g.m : o.min_m;
  space.max_candidates = m_set ? g.m : o.max_m;

  if (!o.witness_dir.empty()) fs::create_directories(o.witness_dir);
  bool any_fail = false;
  std::cout << "rule,axiom,result,trial,detail,witness\n";
  for (const auto& rule : rules) {
    for (auto axiom : axioms) {
      std::optional<cs::AxiomReport> report;
      std::string trial;
      if (fixed) {
        report = cs::check_axiom(axiom, rule, *fixed);
      } else if (auto found = cs::search_counterexample(axiom, rule, space, o.budget, seed)) {
        report = found->report;
        trial = std::to_string(found->trial);
      }
      std::string detail;
      std::string witness_path;
      const bool holds = !report || report->holds;
      if (!holds) {
        any_fail = true;
        const auto& w = *report->witness;
        detail = w.description;
        if (!o.witness_dir.empty()) {
          const auto stem = safe_name(rule.name()) + "_" + std::string(cs::to_string(axiom));
          witness_path = (fs::path(o.witness_dir) / (stem + ".profile")).string();
          write_file(witness_path, cs::write_profile(w.profile, std::string(cs::to_string(axiom)) + " witness for " + rule.name() +
                                                                    "\n" + w.description));
          if (w.derived) {
            write_file((fs::path(o.witness_dir) / (stem + "_derived.profile")).string(),
                       cs::write_profile(*w.derived, "derived profile of " + witness_path));
          }
        }
      } else if (report && report->holds_some_winner && !*report->holds_some_winner) {
        detail = "no selected pair is conflicting";
      }
      std::cout << cs::csv::field(rule.name()) << ',' << cs::to_string(axiom) << ',' << (holds ? "PASS" : "FAIL") << ',' << trial
                << ',' << cs::csv::field(detail) << ',' << cs::csv::field(witness_path) << '\n';
    }
  }
  return any_fail ? exit_axiom_fail : exit_ok;
}

int cmd_experiment(const GeneratorOptions& g, const std::vector<std::string>& rule_names, std::int64_t trials, std::uint64_t seed,
                   const std::string& dataset, const IngestOptions& ingest, const std::string& out_dir) {
  cs::ExperimentSpec spec;
  spec.rules = parse_rules(rule_names, cs::RuleId::all_default());
  spec.trials = trials;
  spec.seed = seed;
  if (!dataset.empty()) {
    const auto raw = cs::parse_preflib(read_file(dataset));
    auto policy = ingest.policy(raw.names);
    spec.dataset = cs::DatasetSource{raw, policy};
  } else {
    spec.generator = g.config(seed);
  }
  const auto result = cs::run_experiment(spec);
  const auto summary = cs::summarize(spec, result);
  if (out_dir.empty()) {
    cs::csv::write_summary(std::cout, summary);
    return exit_ok;
  }
  fs::create_directories(out_dir);
  auto emit = [&](const char* name, auto&& writer) {
    std::ostringstream s;
    writer(s);
    write_file((fs::path(out_dir) / name).string(), s.str());
  };
  emit("winners.csv", [&](std::ostream& s) { cs::csv::write_winners(s, result.winners); });
  emit("summary.csv", [&](std::ostream& s) { cs::csv::write_summary(s, summary); });
  emit("baseline.csv", [&](std::ostream& s) { cs::csv::write_baseline(s, result.baseline); });
  emit("profiles.csv", [&](std::ostream& s) { cs::csv::write_profiles(s, result.profiles); });
  if (!result.positions.empty()) emit("positions.csv", [&](std::ostream& s) { cs::csv::write_positions(s, result.positions); });
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Select the most conflicting pair of candidates and audit conflictual voting rules.\n"
               "Profiles are given as a file (native profile document or PrefLib), '-' for stdin, or fixture:<name>\n"
               "(E1..E5, ID4, AN4, UN3, UN4, UN5). Exit codes: 0 ok, 1 axiom FAIL, 2 usage error, 3 data error."};
  app.require_subcommand(0, 1);

  std::string fixtures_dir;
  app.add_option("--fixtures", fixtures_dir, "Write every example profile into this directory");

  std::uint64_t seed = 0;
  IngestOptions ingest;
  GeneratorOptions gen;
  std::vector<std::string> rules;
  std::string out;

  auto* winners = app.add_subcommand("winners", "Winning pairs per rule. CSV: rule,pair,score,ties,conflicting");
  std::string profile_src;
  winners->add_option("profile", profile_src, "Profile source")->required();
  winners->add_option("--rule", rules, "Rules (default: all six)");
  ingest.add_to(winners);
  winners->add_option("--seed", ingest.seed, "Seed for PrefLib tie-breaking and subsampling");

  auto* metrics = app.add_subcommand("metrics", "Metrics per pair. CSV: pair,alpha,beta,gamma,phi,conf_sum,conf_nash,swap_score");
  std::vector<std::string> pairs;
  metrics->add_option("profile", profile_src, "Profile source")->required();
  metrics->add_option("--pair", pairs, "Pair as 'a,b' (repeatable; default all pairs)");
  ingest.add_to(metrics);
  metrics->add_option("--seed", ingest.seed, "Seed for PrefLib tie-breaking and subsampling");

  auto* axioms = app.add_subcommand("axioms", "Axiom audit. CSV: rule,axiom,result,trial,detail,witness");
  AxiomOptions ax;
  axioms->add_option("--rule", ax.rules, "Rules (default: the four conflictual rules)");
  axioms->add_option("--axiom", ax.axioms, "Axioms (default: all)");
  axioms->add_option("--profile", ax.profile, "Check one profile instead of searching");
  axioms->add_option("--budget", ax.budget, "Random profiles per (rule, axiom)")->check(CLI::PositiveNumber);
  axioms->add_option("--seed", seed, "Search seed");
  axioms->add_option("--out", ax.witness_dir, "Directory for witness profiles");
  axioms->add_option("--min-n", ax.min_n, "Smallest voter count when --n is not given");
  axioms->add_option("--max-n", ax.max_n, "Largest voter count when --n is not given");
  axioms->add_option("--min-m", ax.min_m, "Smallest candidate count when --m is not given");
  axioms->add_option("--max-m", ax.max_m, "Largest candidate count when --m is not given");
  GeneratorOptions search_gen;
  search_gen.add_to(axioms, false);
  ingest.add_to(axioms);

  auto* experiment = app.add_subcommand(
      "experiment",
      "Batch experiment. Writes winners.csv (trial,rule,pair,alpha,beta,gamma,phi,score), summary.csv\n"
      "(rule,rows,alpha_mean,alpha_sd,...,distance_mean,distance_sd), baseline.csv (trial,pair,alpha,beta,gamma,phi),\n"
      "profiles.csv (trial,mean_alpha,max_beta,mean_gamma,mean_phi) and, for euclidean,\n"
      "positions.csv (trial,rule,pair,x1,y1,x2,y2,distance_from_center). Without --out prints the summary.");
  std::int64_t trials = 1000;
  std::string dataset;
  gen.add_to(experiment);
  experiment->add_option("--rule", rules, "Rules (default: all six)");
  experiment->add_option("--trials", trials, "Profiles")->check(CLI::PositiveNumber);
  experiment->add_option("--seed", seed, "Seed");
  experiment->add_option("--dataset", dataset, "PrefLib file to subsample instead of a generator");
  experiment->add_option("--out", out, "Output directory");
  ingest.add_to(experiment);

  auto* sweep = app.add_subcommand("sweep", "Mallows dispersion sweep. CSV: psi,profiles,mean_alpha,max_beta,mean_gamma,mean_phi");
  std::vector<double> psis{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::int64_t sweep_n = 1000;
  std::size_t sweep_m = 10;
  std::int64_t profiles = 50;
  int centers = 1;
  std::string second = "reverse";
  sweep->add_option("--psi", psis, "Dispersion values")->delimiter(',');
  sweep->add_option("--n", sweep_n, "Voters");
  sweep->add_option("--m", sweep_m, "Candidates");
  sweep->add_option("--trials", profiles, "Profiles per dispersion value")->check(CLI::PositiveNumber);
  sweep->add_option("--centers", centers, "1 or 2");
  sweep->add_option("--second-center", second, "reverse | random")->check(CLI::IsMember({"reverse", "random"}));
  sweep->add_option("--seed", seed, "Seed");
  sweep->add_option("--out", out, "Output file (default stdout)");

  auto* sample = app.add_subcommand("sample", "Write one generated profile as a native profile document");
  GeneratorOptions sample_gen;
  sample_gen.add_to(sample);
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--out", out, "Output file (default stdout)");

  auto* ingest_cmd = app.add_subcommand("ingest", "Convert a PrefLib file into a native profile document");
  std::string preflib_file;
  ingest_cmd->add_option("file", preflib_file, "PrefLib file")->required();
  ingest.add_to(ingest_cmd);
  ingest_cmd->add_option("--seed", ingest.seed, "Seed for tie-breaking and subsampling");
  ingest_cmd->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (!fixtures_dir.empty()) cmd_fixtures(fixtures_dir);
    if (winners->parsed()) return cmd_winners(load_profile(profile_src, ingest), parse_rules(rules, cs::RuleId::all_default()));
    if (metrics->parsed()) return cmd_metrics(load_profile(profile_src, ingest), pairs);
    if (axioms->parsed()) {
      return cmd_axioms(ax, search_gen, seed, ingest, axioms->count("--n") > 0, axioms->count("--m") > 0);
    }
    if (experiment->parsed()) return cmd_experiment(gen, rules, trials, seed, dataset, ingest, out);
    if (sweep->parsed()) {
      const auto rows = cs::mallows_sweep(psis, sweep_n, sweep_m, profiles, centers, seed,
                                          second == "random" ? cs::SecondCenter::random : cs::SecondCenter::reverse);
      std::ostringstream s;
      cs::csv::write_sweep(s, rows);
      write_file(out, s.str());
      return exit_ok;
    }
    if (sample->parsed()) {
      const auto config = sample_gen.config(seed);
      write_file(out, cs::write_profile(cs::generate(config), cs::to_key_values(config)));
      return exit_ok;
    }
    if (ingest_cmd->parsed()) {
      const auto raw = cs::parse_preflib(read_file(preflib_file));
      const auto m = cs::materialize(raw, ingest.policy(raw.names), ingest.seed);
      std::cerr << "dropped " << m.dropped_incomplete << " incomplete and " << m.dropped_zero_weight << " zero-weight rankings\n";
      write_file(out, cs::write_profile(m.profile, "converted from " + preflib_file));
      return exit_ok;
    }
    if (fixtures_dir.empty()) {
      std::cout << app.help();
      return exit_usage;
    }
    return exit_ok;
  } catch (const cs::config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const cs::parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const cs::data_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  }
}
