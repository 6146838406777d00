// Command-line harness: scenario runs, RIP audits, a smoke demo and
// single-replication replay.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include "adaiht/errors.hpp"
#include "adaiht/experiments.hpp"
#include "adaiht/rip.hpp"
#include "adaiht/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace adaiht;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  const char* env = std::getenv("ADAIHT_OUT");
  return env && *env ? env : "adaiht_out";
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<ScenarioConfig> load_with_overrides(const std::string& path, const std::vector<std::string>& sets,
                                                const std::optional<std::uint64_t>& seed) {
  auto scenarios = load_scenarios(path);
  for (auto& c : scenarios) {
    for (const auto& text : sets) {
      const auto [key, value] = split_override(text);
      apply_setting(c, key, value);
    }
    if (seed) c.master_seed = *seed;
    c.validate();
  }
  return scenarios;
}

void print_summary(std::ostream& out, const SummaryReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %-20s %8s %6s %11s %11s %11s %9s %9s\n", "scenario", "estimator",
                "a/a*", "count", "q10", "median", "q90", "ham/s", "exact");
  out << buf;
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%-16s %-20s %8.3g %6ld %11.4g %11.4g %11.4g %9.3g %9.3g\n", r.scenario.c_str(),
                  r.estimator.c_str(), r.a_over_astar, r.count, r.q10, r.q50, r.q90, r.mean_hamming_over_s,
                  r.exact_recovery_freq);
    out << buf;
  }
}

int run_scenarios(const std::vector<ScenarioConfig>& scenarios, const std::string& out_dir, unsigned threads,
                  const std::vector<std::string>& overrides, const std::string& source) {
  fs::create_directories(out_dir);
  std::vector<ReplicationRecord> records;
  for (const auto& c : scenarios) {
    auto part = run_scenario(c, threads);
    records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  const auto report = aggregate(records);
  emit_csv(records, (fs::path(out_dir) / "records.csv").string());
  emit_csv(report, (fs::path(out_dir) / "summary.csv").string());
  emit_plot_data(report, (fs::path(out_dir) / "plot_data.csv").string());
  {
    std::ofstream meta(fs::path(out_dir) / "metadata.txt");
    meta << "# source: " << source << '\n';
    for (const auto& o : overrides) meta << "# override: " << o << '\n';
    for (const auto& c : scenarios) write_scenario(meta, c);
  }
  print_summary(std::cout, report);
  std::cout << "wrote " << records.size() << " records to " << (fs::path(out_dir) / "records.csv").string() << '\n';
  return 0;
}

ScenarioConfig demo_scenario() {
  ScenarioConfig c;
  c.id = "demo";
  c.n = 400;
  c.p = 600;
  c.s = 5;
  c.sigma = 1.0;
  c.a_over_astar = {0.8, 2.0};
  c.kappa = 0.5;
  c.magnitude_kind = MagnitudeKind::uniform;
  c.replications = 20;
  c.master_seed = 2024;
  c.estimators = {"nonadaptive", "early_stopping", "iteration_selection", "sharp_estimation",
                  "sharp_recovery", "iht_top_s", "ista_lasso", "oracle_ls"};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive iterative hard thresholding: estimators, RIP audits and Monte Carlo experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = default_out_dir();
  std::optional<std::uint64_t> seed;
  unsigned threads = default_threads();
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "Run every scenario in a config file; write records, summary and plot data");
  run->add_option("--config", config_path, "Scenario file (key = value, [section] per scenario)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default: $ADAIHT_OUT or ./adaiht_out)");
  run->add_option("--seed", seed, "Override master_seed of every scenario");
  run->add_option("--threads", threads, "Worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber);
  run->add_option("--set", sets, "Override a scenario key, key=value (repeatable)");

  auto* demo = app.add_subcommand("demo", "Run a small built-in scenario end to end");
  demo->add_option("--out", out_dir, "Output directory (default: $ADAIHT_OUT or ./adaiht_out)");
  demo->add_option("--seed", seed, "Master seed");
  demo->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  demo->add_option("--set", sets, "Override a scenario key, key=value (repeatable)");

  std::string design_path;
  std::string design_kind = "gaussian";
  long audit_n = 100, audit_p = 12, s_max = 3, trials = 0;
  std::uint64_t design_seed = 1;
  bool no_normalize = false;
  double budget = kDefaultEnumerationBudget;
  std::string save_design;
  auto* rip = app.add_subcommand("rip-audit", "Restricted eigenvalue audit of a design file or generated design");
  rip->add_option("--design", design_path, "Design CSV (header 'n,p'); otherwise a design is generated");
  rip->add_option("--kind", design_kind, "Generated design kind: gaussian, rademacher, identity_scaled, near_orthogonal");
  rip->add_option("--n", audit_n, "Rows of the generated design")->check(CLI::PositiveNumber);
  rip->add_option("--p", audit_p, "Columns of the generated design")->check(CLI::PositiveNumber);
  rip->add_option("--seed", design_seed, "Seed of the generated design and of sampled supports");
  rip->add_flag("--no-normalize", no_normalize, "Keep raw column norms of the generated design");
  rip->add_option("--s-max", s_max, "Audit s = 1..s-max")->check(CLI::PositiveNumber);
  rip->add_option("--trials", trials, "Use the sampled audit with this many supports (0: exact)");
  rip->add_option("--budget", budget, "Largest number of supports the exact audit may enumerate");
  rip->add_option("--save-design", save_design, "Also write the audited design as CSV to this path");

  std::string scenario_id;
  long replication = 0;
  std::size_t a_index = 0;
  std::vector<std::string> replay_estimators;
  std::optional<std::uint64_t> replay_seed;
  auto* replay = app.add_subcommand("replay", "Re-run one replication and print the full iterate traces");
  replay->add_option("--config", config_path, "Scenario file used by the original run")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--scenario", scenario_id, "Scenario id (default: the first one)");
  replay->add_option("--replication", replication, "Replication index")->required();
  replay->add_option("--a-index", a_index, "Index into the a_over_astar grid");
  replay->add_option("--estimator", replay_estimators, "Restrict to these estimators");
  replay->add_option("--replication-seed", replay_seed, "Seed column of the records row (default: derived)");
  replay->add_option("--seed", seed, "Override master_seed");
  replay->add_option("--set", sets, "Override a scenario key, key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) {
      const auto scenarios = load_with_overrides(config_path, sets, seed);
      return run_scenarios(scenarios, out_dir, threads, sets, config_path);
    }
    if (demo->parsed()) {
      auto c = demo_scenario();
      for (const auto& text : sets) {
        const auto [key, value] = split_override(text);
        apply_setting(c, key, value);
      }
      if (seed) c.master_seed = *seed;
      c.validate();
      return run_scenarios({c}, out_dir, threads, sets, "built-in demo");
    }
    if (rip->parsed()) {
      const DesignMatrix design =
          design_path.empty()
              ? generate_design(parse_design_kind(design_kind), audit_n, audit_p, !no_normalize, design_seed, {},
                                design_kind == "near_orthogonal" ? 0.01 : 0.0)
              : read_design_csv(design_path);
      if (!save_design.empty()) write_design_csv(design, save_design);
      std::vector<RipReport> reports;
      for (long s = 1; s <= std::min<long>(s_max, design.p()); ++s) {
        reports.push_back(trials > 0 ? restricted_extremes_sampled(design, s, trials, design_seed)
                                     : restricted_extremes_exact(design, s, budget));
      }
      write_rip_csv_header(std::cout);
      for (const auto& r : reports) write_rip_csv_row(std::cout, r);
      std::cout << "\n# design n=" << design.n() << " p=" << design.p()
                << " ||X||_{2,inf}^2=" << design.max_col_norm_sq() << '\n';
      for (const auto& r : reports) {
        std::cout << "# ";
        write_rip_summary(std::cout, r);
      }
      return 0;
    }
    if (replay->parsed()) {
      const auto scenarios = load_with_overrides(config_path, sets, seed);
      const ScenarioConfig* chosen = &scenarios.front();
      if (!scenario_id.empty()) {
        chosen = nullptr;
        for (const auto& c : scenarios)
          if (c.id == scenario_id) chosen = &c;
        if (!chosen) throw UsageError("no scenario '" + scenario_id + "' in " + config_path);
      }
      ScenarioConfig c = *chosen;
      if (!replay_estimators.empty()) c.estimators = replay_estimators;
      c.validate();
      if (a_index >= c.a_over_astar.size()) throw UsageError("--a-index out of range");
      const auto rseed = replay_seed ? *replay_seed : scenario_replication_seed(c, replication);
      const auto outcome = run_replication(c, a_index, replication, rseed, true);
      for (const auto& rec : outcome.records) {
        std::cout << "## estimator " << rec.estimator << "  scenario " << rec.scenario << "  replication "
                  << rec.replication << "  seed " << rec.seed << '\n';
        const auto it = outcome.traces.find(rec.estimator);
        if (it != outcome.traces.end()) {
          const auto& t = it->second;
          std::cout << "# stop_index " << t.stop_index << "  stop_reason " << to_string(t.stop_reason)
                    << (t.precondition_unverified ? "  precondition_unverified" : "") << '\n';
          write_trace_csv(std::cout, t, rec.replication);
        } else {
          std::cout << "# no iterate trace (single-result baseline)\n";
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", rec.l2_error_sq);
        std::cout << "final_l2_error_sq," << buf << "\n\n";
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
