#pragma once

#include "adaiht/iht.hpp"
#include "adaiht/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace adaiht {

struct ReplicationRecord {
  std::string scenario;
  long replication = 0;
  std::string estimator;
  long n = 0, p = 0, s = 0;
  double sigma = 0.0;
  double a_over_astar = 0.0;
  std::uint64_t seed = 0;
  double l2_error_sq = 0.0;
  /// l2_error_sq ||X||^2_{2,inf} / sigma^2 (sigma^2 dropped when sigma = 0).
  double normalized_error = 0.0;
  long hamming = 0;
  bool exact_recovery = false;
  long nnz = 0;
  long iterations = 0;
  bool event_O = false;
  double wall_time_ms = 0.0;

  bool operator==(const ReplicationRecord&) const = default;
};

/// Seed of replication `rep` for a scenario id.
std::uint64_t scenario_replication_seed(const ScenarioConfig& config, long rep);

/// Everything a single replication produced. Traces are kept only on request.
struct ReplicationOutcome {
  std::vector<ReplicationRecord> records;
  std::map<std::string, IterateTrace> traces;  ///< keyed by estimator name
};

/// Runs one replication at grid point `a_index` with an explicit seed.
ReplicationOutcome run_replication(const ScenarioConfig& config, std::size_t a_index, long replication,
                                   std::uint64_t seed, bool keep_traces = false);

/// All replications over the a-grid; `threads` workers. Output order is
/// (a index, replication, estimator order in the config) whatever the
/// thread count.
std::vector<ReplicationRecord> run_scenario(const ScenarioConfig& config, unsigned threads = 1);

struct SummaryRow {
  std::string scenario;
  std::string estimator;
  double a_over_astar = 0.0;
  long s = 0;
  long count = 0;
  double q10 = 0.0, q50 = 0.0, q90 = 0.0;  ///< of normalized_error
  double mean_hamming_over_s = 0.0;
  double exact_recovery_freq = 0.0;
  double mean_iterations = 0.0;
  double event_O_freq = 0.0;
};

struct SummaryReport {
  std::vector<SummaryRow> rows;
};

/// Linear-interpolation quantile (type 7) of unsorted data; q in [0, 1].
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

/// Groups by (scenario, a_over_astar, estimator) in first-appearance order.
SummaryReport aggregate(const std::vector<ReplicationRecord>& records);

inline constexpr const char* kRecordHeader =
    "scenario,replication,estimator,n,p,s,sigma,a_over_astar,seed,l2_error_sq,normalized_error,hamming,"
    "exact_recovery,nnz,iterations,event_O,wall_time_ms";

void write_records_csv(std::ostream& out, const std::vector<ReplicationRecord>& records);
std::vector<ReplicationRecord> read_records_csv(std::istream& in);

void write_summary_csv(std::ostream& out, const SummaryReport& report);

/// Per scenario block "# scenario <id>" then rows
/// estimator,a_over_astar,y,lo,hi with y = median normalized_error / s and
/// the band from q10 and q90.
void write_plot_data(std::ostream& out, const SummaryReport& report);

/// Writes to a file path; throws std::runtime_error when unwritable.
void emit_csv(const std::vector<ReplicationRecord>& records, const std::string& path);
void emit_csv(const SummaryReport& report, const std::string& path);
void emit_plot_data(const SummaryReport& report, const std::string& path);

}  // namespace adaiht
