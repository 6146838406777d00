#include "adaiht/experiments.hpp"

#include "adaiht/adaptive.hpp"
#include "adaiht/baselines.hpp"
#include "adaiht/errors.hpp"
#include "adaiht/random.hpp"
#include "adaiht/sharp.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

namespace adaiht {

std::uint64_t scenario_replication_seed(const ScenarioConfig& config, long rep) {
  return replication_seed(config.master_seed, stable_hash(config.id.data(), config.id.size()),
                          static_cast<std::uint64_t>(rep));
}

namespace {

constexpr std::uint64_t kDesignStream = 1;
constexpr std::uint64_t kSignalStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

DesignPtr make_design(const ScenarioConfig& c, std::uint64_t design_seed) {
  return std::make_shared<const DesignMatrix>(generate_design(c.design_kind, c.n, c.p, c.normalize, design_seed,
                                                              c.design_path, c.design_perturbation));
}

std::uint64_t fixed_design_seed(const ScenarioConfig& c) {
  return hash_combine(hash_combine(c.master_seed, stable_hash(c.id.data(), c.id.size())), kDesignStream);
}

/// Shared per-replication state: the selection path is computed once and
/// reused by every estimator that warm-starts from it.
class EstimatorSuite {
 public:
  EstimatorSuite(const ScenarioConfig& c, const RegressionInstance& inst) : c_(c), inst_(inst) {}

  struct Output {
    Vector beta_hat;
    long iterations = 0;
    std::optional<IterateTrace> trace;
  };

  Output run(const std::string& name) {
    const auto& X = inst_.X();
    const auto& y = inst_.y;
    const SparseVector* truth = &inst_.beta_true;
    if (name == "nonadaptive") {
      auto r = run_nonadaptive(X, y, c_.s, c_.sigma, c_.kappa, c_.max_iter, truth);
      return {r.trace.final_estimate(), r.trace.stop_index, std::move(r.trace)};
    }
    if (name == "early_stopping") {
      auto r = run_early_stopping(X, y, c_.kappa, c_.max_iter, truth);
      return {r.trace.final_estimate(), r.m_bar, std::move(r.trace)};
    }
    if (name == "iteration_selection") {
      const auto& sel = selection();
      return {sel.selected(), sel.early.m_bar + sel.T_hat, sel.trace};
    }
    if (name == "sharp_estimation" || name == "sharp_recovery") {
      const auto& sel = selection();
      const Vector warm = sel.selected();
      const bool recovery = name == "sharp_recovery";
      const double sigma =
          c_.sharp_adaptive_sigma ? std::sqrt(residual(X, y, warm).squaredNorm() / static_cast<double>(X.n()))
                                  : c_.sigma;
      const double lambda = recovery ? recovery_threshold(c_.epsilon, sigma, X.max_col_norm(), X.p())
                                     : sharp_threshold(c_.epsilon, sigma, X.max_col_norm(), X.p(), c_.s);
      const long steps = c_.sharp_steps > 0 ? c_.sharp_steps
                         : recovery         ? recovery_steps(c_.s)
                                            : estimation_steps(X.p(), c_.s);
      auto trace = run_fixed_threshold(X, y, warm, lambda, steps, truth);
      return {trace.final_estimate(), sel.early.m_bar + sel.T_hat + steps, std::move(trace)};
    }
    if (name == "iht_top_s") {
      auto r = iht_top_s(X, y, c_.s, c_.iht_iters);
      return {std::move(r.beta_hat), r.iterations_used, std::nullopt};
    }
    if (name == "ista_lasso") {
      const double lambda = c_.lasso_lambda >= 0 ? c_.lasso_lambda : default_lasso_lambda(c_.sigma, X.n(), X.p());
      auto r = ista_lasso(X, y, lambda, c_.ista_iters, c_.ista_tol, StepRule::spectral);
      return {std::move(r.beta_hat), r.iterations_used, std::nullopt};
    }
    if (name == "oracle_ls") {
      auto r = oracle_ls(X, y, inst_.beta_true.support());
      return {std::move(r.beta_hat), 0, std::nullopt};
    }
    throw ParseError("unknown estimator '" + name + "'");
  }

 private:
  const SelectionResult& selection() {
    if (!selection_) {
      selection_ = run_iteration_selection(inst_.X(), inst_.y, c_.kappa, c_.penalty_const, c_.max_iter,
                                           &inst_.beta_true);
    }
    return *selection_;
  }

  const ScenarioConfig& c_;
  const RegressionInstance& inst_;
  std::optional<SelectionResult> selection_;
};

/// Runs every a-grid point of one replication on shared draws.
std::vector<ReplicationOutcome> run_grid(const ScenarioConfig& c, long rep, std::uint64_t seed,
                                         const std::vector<std::size_t>& a_indices, bool keep_traces,
                                         DesignPtr shared_design) {
  DesignPtr design = shared_design ? std::move(shared_design)
                                   : make_design(c, c.fixed_design ? fixed_design_seed(c)
                                                                   : hash_combine(seed, kDesignStream));
  const double noise_scale = c.sigma > 0 ? c.sigma : 1.0;
  const double astar = universal_separation(noise_scale, design->max_col_norm(), c.p, c.s);
  std::vector<ReplicationOutcome> out;
  for (auto ai : a_indices) {
    const double ratio = c.a_over_astar.at(ai);
    ReplicationOutcome outcome;
    std::vector<SparseVector::Entry> none;
    SparseVector beta = ratio > 0
                            ? sample_signal(c.p, c.s, ratio * astar, c.magnitude_kind, hash_combine(seed, kSignalStream))
                            : SparseVector(c.p, none);
    const auto inst = synthesize_instance(design, std::move(beta), c.sigma, c.noise_kind,
                                          hash_combine(seed, kNoiseStream));
    const bool event_O = event_O_holds(effective_noise(inst).xi_eff, c.s, c.sigma, design->max_col_norm()).holds;
    const Vector truth = inst.beta_true.to_dense();
    const auto eta = support_decoder(inst.beta_true);
    const double scale = design->max_col_norm_sq() / (c.sigma > 0 ? c.sigma * c.sigma : 1.0);

    EstimatorSuite suite(c, inst);
    for (const auto& name : c.estimators) {
      const auto t0 = std::chrono::steady_clock::now();
      auto result = suite.run(name);
      const auto t1 = std::chrono::steady_clock::now();
      ReplicationRecord r;
      r.scenario = c.id;
      r.replication = rep;
      r.estimator = name;
      r.n = c.n;
      r.p = c.p;
      r.s = c.s;
      r.sigma = c.sigma;
      r.a_over_astar = ratio;
      r.seed = seed;
      r.l2_error_sq = (result.beta_hat - truth).squaredNorm();
      r.normalized_error = r.l2_error_sq * scale;
      r.hamming = static_cast<long>(hamming_error(support_decoder(result.beta_hat), eta));
      r.exact_recovery = r.hamming == 0;
      r.nnz = static_cast<long>((result.beta_hat.array() != 0.0).count());
      r.iterations = result.iterations;
      r.event_O = event_O;
      r.wall_time_ms = c.record_timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
      outcome.records.push_back(std::move(r));
      if (keep_traces && result.trace) outcome.traces.emplace(name, std::move(*result.trace));
    }
    out.push_back(std::move(outcome));
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ReplicationOutcome run_replication(const ScenarioConfig& config, std::size_t a_index, long replication,
                                   std::uint64_t seed, bool keep_traces) {
  config.validate();
  if (a_index >= config.a_over_astar.size()) throw DomainError("run_replication: a index out of range");
  return std::move(run_grid(config, replication, seed, {a_index}, keep_traces, nullptr).front());
}

std::vector<ReplicationRecord> run_scenario(const ScenarioConfig& config, unsigned threads) {
  config.validate();
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::size_t grid = config.a_over_astar.size();
  std::vector<std::size_t> all_a(grid);
  for (std::size_t i = 0; i < grid; ++i) all_a[i] = i;
  DesignPtr shared = config.fixed_design ? make_design(config, fixed_design_seed(config)) : nullptr;

  std::vector<std::vector<ReplicationOutcome>> results(reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= reps || failed.load()) return;
      try {
        const long r = static_cast<long>(rep);
        results[rep] = run_grid(config, r, scenario_replication_seed(config, r), all_a, false, shared);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ReplicationRecord> records;
  for (std::size_t ai = 0; ai < grid; ++ai)
    for (std::size_t rep = 0; rep < reps; ++rep)
      for (auto& r : results[rep][ai].records) records.push_back(std::move(r));
  return records;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of empty data");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

SummaryReport aggregate(const std::vector<ReplicationRecord>& records) {
  struct Group {
    SummaryRow row;
    std::vector<double> errors;
    double hamming = 0, exact = 0, iters = 0, event = 0;
  };
  std::vector<Group> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.row.scenario == r.scenario && g.row.estimator == r.estimator && g.row.a_over_astar == r.a_over_astar;
    });
    if (it == groups.end()) {
      Group g;
      g.row.scenario = r.scenario;
      g.row.estimator = r.estimator;
      g.row.a_over_astar = r.a_over_astar;
      g.row.s = r.s;
      groups.push_back(std::move(g));
      it = std::prev(groups.end());
    }
    it->errors.push_back(r.normalized_error);
    it->hamming += static_cast<double>(r.hamming) / static_cast<double>(std::max(1L, r.s));
    it->exact += r.exact_recovery;
    it->iters += static_cast<double>(r.iterations);
    it->event += r.event_O;
  }
  SummaryReport report;
  for (auto& g : groups) {
    const double k = static_cast<double>(g.errors.size());
    g.row.count = static_cast<long>(g.errors.size());
    g.row.q10 = quantile(g.errors, 0.1);
    g.row.q50 = quantile(g.errors, 0.5);
    g.row.q90 = quantile(g.errors, 0.9);
    g.row.mean_hamming_over_s = g.hamming / k;
    g.row.exact_recovery_freq = g.exact / k;
    g.row.mean_iterations = g.iters / k;
    g.row.event_O_freq = g.event / k;
    report.rows.push_back(g.row);
  }
  return report;
}

void write_records_csv(std::ostream& out, const std::vector<ReplicationRecord>& records) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << r.scenario << ',' << r.replication << ',' << r.estimator << ',' << r.n << ',' << r.p << ',' << r.s
        << ',' << fmt(r.sigma) << ',' << fmt(r.a_over_astar) << ',' << r.seed << ',' << fmt(r.l2_error_sq) << ','
        << fmt(r.normalized_error) << ',' << r.hamming << ',' << (r.exact_recovery ? 1 : 0) << ',' << r.nnz << ','
        << r.iterations << ',' << (r.event_O ? 1 : 0) << ',' << fmt(r.wall_time_ms) << '\n';
  }
}

std::vector<ReplicationRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) throw ParseError("records csv: unexpected header");
  std::vector<ReplicationRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 17) throw ParseError("records csv: expected 17 fields in '" + line + "'");
    try {
      ReplicationRecord r;
      r.scenario = f[0];
      r.replication = std::stol(f[1]);
      r.estimator = f[2];
      r.n = std::stol(f[3]);
      r.p = std::stol(f[4]);
      r.s = std::stol(f[5]);
      r.sigma = std::stod(f[6]);
      r.a_over_astar = std::stod(f[7]);
      r.seed = std::stoull(f[8]);
      r.l2_error_sq = std::stod(f[9]);
      r.normalized_error = std::stod(f[10]);
      r.hamming = std::stol(f[11]);
      r.exact_recovery = f[12] == "1";
      r.nnz = std::stol(f[13]);
      r.iterations = std::stol(f[14]);
      r.event_O = f[15] == "1";
      r.wall_time_ms = std::stod(f[16]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError("records csv: bad field in '" + line + "'");
    }
  }
  return out;
}

void write_summary_csv(std::ostream& out, const SummaryReport& report) {
  out << "scenario,estimator,a_over_astar,s,count,q10,q50,q90,mean_hamming_over_s,exact_recovery_freq,"
         "mean_iterations,event_O_freq\n";
  for (const auto& r : report.rows) {
    out << r.scenario << ',' << r.estimator << ',' << fmt(r.a_over_astar) << ',' << r.s << ',' << r.count << ','
        << fmt(r.q10) << ',' << fmt(r.q50) << ',' << fmt(r.q90) << ',' << fmt(r.mean_hamming_over_s) << ','
        << fmt(r.exact_recovery_freq) << ',' << fmt(r.mean_iterations) << ',' << fmt(r.event_O_freq) << '\n';
  }
}

void write_plot_data(std::ostream& out, const SummaryReport& report) {
  std::vector<std::string> scenarios;
  for (const auto& r : report.rows)
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) scenarios.push_back(r.scenario);
  for (const auto& id : scenarios) {
    out << "# scenario " << id << "\nestimator,a_over_astar,y,lo,hi\n";
    for (const auto& r : report.rows) {
      if (r.scenario != id) continue;
      const double s = static_cast<double>(std::max(1L, r.s));
      out << r.estimator << ',' << fmt(r.a_over_astar) << ',' << fmt(r.q50 / s) << ',' << fmt(r.q10 / s) << ','
          << fmt(r.q90 / s) << '\n';
    }
    out << '\n';
  }
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

void emit_csv(const std::vector<ReplicationRecord>& records, const std::string& path) {
  auto out = open_out(path);
  write_records_csv(out, records);
}

void emit_csv(const SummaryReport& report, const std::string& path) {
  auto out = open_out(path);
  write_summary_csv(out, report);
}

void emit_plot_data(const SummaryReport& report, const std::string& path) {
  auto out = open_out(path);
  write_plot_data(out, report);
}

}  // namespace adaiht
