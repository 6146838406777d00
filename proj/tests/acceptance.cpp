// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance [--only N] [--cli PATH]
//
// --cli points at the adaiht_cli binary so criterion 11 also exercises the
// command line; without it the in-process checks run alone.

#include "adaiht/adaptive.hpp"
#include "adaiht/baselines.hpp"
#include "adaiht/experiments.hpp"
#include "adaiht/iht.hpp"
#include "adaiht/random.hpp"
#include "adaiht/rip.hpp"
#include "adaiht/sharp.hpp"
#include "adaiht/thresholding.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace adaiht;

namespace {

/// Collects sub-checks of one criterion.
class Verdict {
 public:
  void check(const std::string& what, bool ok, const std::string& detail = {}) {
    pass_ = pass_ && ok;
    lines_.push_back((ok ? "    met      " : "    not met  ") + what + (detail.empty() ? "" : "  [" + detail + "]"));
  }
  bool pass() const { return pass_; }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  bool pass_ = true;
  std::vector<std::string> lines_;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string freq(long hits, long total) { return std::to_string(hits) + "/" + std::to_string(total); }

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double log_ep(double p, double s) { return 1.0 + std::log(p / s); }

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

DesignPtr share(DesignMatrix d) { return std::make_shared<const DesignMatrix>(std::move(d)); }

std::uint64_t seed_for(std::uint64_t criterion, std::uint64_t rep) {
  return hash_combine(hash_combine(0xacce97ULL, criterion), rep);
}

/// First near-orthogonal design (n, p) whose exact audit certifies
/// delta_hat_{s_check} <= bound.
struct Certified {
  DesignPtr design;
  std::uint64_t seed = 0;
  double delta_hat = 0.0;
  double worst_phi = 0.0;
};

Certified certify(Index n, Index p, double perturbation, long s_check, double bound, std::uint64_t start) {
  for (std::uint64_t seed = start; seed < start + 50; ++seed) {
    auto X = share(generate_design(DesignKind::near_orthogonal, n, p, true, seed, {}, perturbation));
    const auto c = contraction_check(*X, s_check, bound);
    if (c.audit.delta_s <= bound && c.holds) return {X, seed, c.audit.delta_s, c.worst_lambda_max};
  }
  return {};
}

// ---------------------------------------------------------------------------

void criterion_1(Verdict& v) {
  const Vector u = (Vector(3) << 3, 1, -2.5).finished();
  v.check("T_2([3,1,-2.5]) = [3,0,-2.5]", hard_threshold(u, 2.0) == (Vector(3) << 3, 0, -2.5).finished());
  v.check("T_2([2,-2,1.999]) keeps ties",
          hard_threshold((Vector(3) << 2, -2, 1.999).finished(), 2.0) == (Vector(3) << 2, -2, 0).finished());
  bool zero_keeps = true;
  CounterRng rng(seed_for(1, 0));
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Vector w(17);
    for (auto& x : w) x = g(rng);
    zero_keeps = zero_keeps && hard_threshold(w, 0.0) == w;
  }
  v.check("T_0(u) = u", zero_keeps);
  v.check("top_2([3,1,-2.5])", top_s_threshold(u, 2) == (Vector(3) << 3, 0, -2.5).finished());
  v.check("top_1([2,-2]) keeps the smallest index",
          top_s_threshold((Vector(2) << 2, -2).finished(), 1) == (Vector(2) << 2, 0).finished());
  v.check("top_3([0,0,0,5]) never resurrects zeros",
          top_s_threshold((Vector(4) << 0, 0, 0, 5).finished(), 3) == (Vector(4) << 0, 0, 0, 5).finished());
  const Vector soft = soft_threshold((Vector(3) << 3, -0.5, -3).finished(), 1.0);
  v.check("soft threshold examples", soft == (Vector(3) << 2, 0, -2).finished());

  const ThresholdSchedule a{8, 1, 0.25, FloorMode::fixed_floor};
  v.check("schedule (8,1,1/4) = 8,4,2,1,1",
          a.value(0) == 8 && a.value(1) == 4 && a.value(2) == 2 && a.value(3) == 1 && a.value(4) == 1);
  const ThresholdSchedule b{1, 5, 0.5, FloorMode::fixed_floor};
  v.check("schedule floor dominates", b.value(0) == 5);
  const ThresholdSchedule c{3, 0, 0.5, FloorMode::adaptive_floor};
  v.check("adaptive floor binds", c.value(0, 4.0) == 4);

  // Frozen 30-digit values computed independently.
  struct Ref {
    const char* name;
    double got, want;
  };
  const Vector zeros = Vector::Zero(100);
  Vector ones = Vector::Zero(10);
  ones.head(4).setOnes();
  Vector five = Vector::Zero(10);
  five(3) = -5;
  const std::vector<Ref> refs{
      {"lambda0_hat(M=0, s=4, p=100, ||X||=10)", initial_threshold_oracle(zeros, 4, 1.0, 10.0, 100),
       1.29905747753795724790},
      {"lambda0_hat(M=1_4, sigma=0)", initial_threshold_oracle(ones, 4, 0.0, 10.0, 10), 3.16227766016837933200},
      {"lambda_inf_hat(p=s, ||X||=20)", universal_threshold(7, 1.0, 20.0, 7), 0.31622776601683793320},
      {"lambda_inf_hat(sigma=2, n=400, p=1000, s=10)", universal_threshold(10, 2.0, 20.0, 1000),
       1.49735369048038765209},
      {"lambda_bar0(M=0, p=100, ||X||=10)", adaptive_initial_threshold(zeros, 1.0, 10.0, 100),
       2.99470738096077530419},
      {"lambda_bar0(|M|_(1)=5)", adaptive_initial_threshold(five, 0.0, 10.0, 10), 22.3606797749978969641},
      {"lambda_inf^eps(0.25, p=1000, s=10, ||X||=20)", sharp_threshold(0.25, 1.0, 20.0, 1000, 10),
       0.251113847870574488861},
      {"mu_inf^eps(1, p=100, ||X||=10)", recovery_threshold(1.0, 1.0, 10.0, 100), 0.606970851754058540},
      {"a*(p=1000, s=10, ||X||=20)", universal_separation(1.0, 20.0, 1000, 10), 0.167409231913716326089},
      {"exact recovery level(0.25, p=1000, s=10)", exact_recovery_separation(0.25, 1.0, 20.0, 1000, 10),
       0.732861026892398210824},
  };
  double worst = 0;
  std::string worst_name;
  for (const auto& r : refs) {
    const double e = rel(r.got, r.want);
    if (e > worst) {
      worst = e;
      worst_name = r.name;
    }
  }
  v.check("closed-form thresholds within 1e-12 relative", worst <= 1e-12,
          "worst " + num(worst) + (worst_name.empty() ? "" : " at " + worst_name));
  v.check("sigma = 0 zeroes the noise thresholds",
          universal_threshold(5, 0.0, 10.0, 50) == 0 && recovery_threshold(0.25, 0.0, 10.0, 50) == 0);
}

// Surrogate decay and off-support sparsity along every iterate.
bool iterates_ok(const IterateTrace& trace, long s) {
  for (const auto& it : trace.iterates)
    if (*it.off_support_count > s || *it.l2_error_sq > 9.0 * s * it.lambda_m * it.lambda_m) return false;
  return true;
}

void criterion_2(Verdict& v) {
  const long s = 2;
  const auto cert = certify(600, 30, 0.02, 3 * s, 1.0 / 36, 1);
  v.check("certified near-orthogonal (600, 30) design found", cert.design != nullptr,
          "seed " + std::to_string(cert.seed) + ", delta_hat_6 " + num(cert.delta_hat) + ", worst |eig Phi| " +
              num(cert.worst_phi));
  if (cert.design) {
    const auto& X = cert.design;
    const double lam_inf = universal_threshold(s, 1.0, X->max_col_norm(), X->p());
    const double factors[] = {0.5, 1.0, 3.0, 10.0};
    long on_O = 0, good = 0;
    for (long rep = 0; rep < 500; ++rep) {
      const auto beta = sample_signal(X->p(), s, factors[rep % 4] * lam_inf, MagnitudeKind::uniform,
                                      seed_for(2, 2 * rep));
      const auto inst = synthesize_instance(X, beta, 1.0, NoiseKind::gaussian, seed_for(2, 2 * rep + 1));
      if (!event_O_holds(effective_noise(inst).xi_eff, s, 1.0, X->max_col_norm()).holds) continue;
      ++on_O;
      const auto res = run_nonadaptive(*X, inst.y, s, 1.0, 0.5, kDefaultMaxIter, &inst.beta_true);
      good += iterates_ok(res.trace, s);
    }
    v.check("every iterate of every O-replication (500 reps)", on_O > 0 && good == on_O, freq(good, on_O));
  }

  const Index n = 400, p = 1000;
  const long s2 = 5;
  long on_O = 0, good = 0;
  for (long rep = 0; on_O < 200 && rep < 400; ++rep) {
    auto X = share(generate_design(DesignKind::gaussian, n, p, true, seed_for(21, 3 * rep)));
    const double a = 3 * universal_threshold(s2, 1.0, X->max_col_norm(), p);
    const auto inst = synthesize_instance(X, sample_signal(p, s2, a, MagnitudeKind::flat_a, seed_for(21, 3 * rep + 1)),
                                          1.0, NoiseKind::gaussian, seed_for(21, 3 * rep + 2));
    if (!event_O_holds(effective_noise(inst).xi_eff, s2, 1.0, X->max_col_norm()).holds) continue;
    ++on_O;
    const auto res = run_nonadaptive(*X, inst.y, s2, 1.0, 0.25, kDefaultMaxIter, &inst.beta_true);
    good += iterates_ok(res.trace, s2);
  }
  v.check("uncertified (400, 1000, 5): pass frequency >= 0.95 over 200 O-reps",
          on_O == 200 && good >= 0.95 * on_O, freq(good, on_O));
}

void criterion_3(Verdict& v) {
  const Index n = 400, p = 1000;
  const long s = 5;
  const double kappa = 0.25;
  const long reps = 200;
  long err_ok = 0, nnz_ok = 0, on_O = 0, m_ok = 0;
  double worst = 0;
  for (long rep = 0; rep < reps; ++rep) {
    auto X = share(generate_design(DesignKind::gaussian, n, p, true, seed_for(3, 3 * rep)));
    const double norm_sq = X->max_col_norm_sq();
    const double a = 3 * universal_threshold(s, 1.0, X->max_col_norm(), p);
    const auto beta = sample_signal(p, s, a, MagnitudeKind::flat_a, seed_for(3, 3 * rep + 1));
    const auto inst = synthesize_instance(X, beta, 1.0, NoiseKind::gaussian, seed_for(3, 3 * rep + 2));
    const auto res = run_nonadaptive(*X, inst.y, s, 1.0, kappa, kDefaultMaxIter, &inst.beta_true);
    const Vector b = beta.to_dense();
    const double err = (res.trace.final_estimate() - b).squaredNorm() * norm_sq / (s * log_ep(p, s));
    worst = std::max(worst, err);
    err_ok += err <= 360;
    nnz_ok += res.trace.stopped().nnz() <= 2 * s;
    if (event_O_holds(effective_noise(inst).xi_eff, s, 1.0, X->max_col_norm()).holds) {
      ++on_O;
      const double r = b.squaredNorm() * norm_sq / (s * log_ep(p, s));
      const double lo = 2 * std::log(std::max(r / 40, 0.25)) / std::log(1 / kappa);
      const double hi = 2 * std::log(std::max(5 * r, 25.0)) / std::log(1 / kappa);
      const double m1 = static_cast<double>(res.m_hat - 1);
      m_ok += lo <= m1 && m1 <= hi;
    }
  }
  v.check("normalized error <= 360 with frequency >= 0.99", err_ok >= 0.99 * reps,
          freq(err_ok, reps) + ", max " + num(worst));
  v.check("|beta_hat|_0 <= 2s with frequency >= 0.99", nnz_ok >= 0.99 * reps, freq(nnz_ok, reps));
  v.check("m_hat inside its two-sided bound on every O-replication", m_ok == on_O, freq(m_ok, on_O));
}

struct AdaptiveRuns {
  long reps = 0;
  long err_ok = 0, nnz_ok = 0, bound_ok = 0, dominance_ok = 0, sigma_ok = 0;
  double worst_err = 0, mean_sigma = 0;
};

/// (2000, 200, 5) runs of iteration selection (which contains early stopping).
AdaptiveRuns adaptive_runs(double a_unit, bool selection_stage, std::uint64_t tag) {
  const Index n = 2000, p = 200;
  const long s = 5;
  const double kappa = 0.5;
  AdaptiveRuns out;
  out.reps = 200;
  for (long rep = 0; rep < out.reps; ++rep) {
    auto X = share(generate_design(DesignKind::gaussian, n, p, true, seed_for(tag, 3 * rep)));
    const double norm_sq = X->max_col_norm_sq();
    const auto beta = sample_signal(p, s, a_unit / X->max_col_norm(), MagnitudeKind::flat_a, seed_for(tag, 3 * rep + 1));
    const auto inst = synthesize_instance(X, beta, 1.0, NoiseKind::gaussian, seed_for(tag, 3 * rep + 2));
    const Vector b = beta.to_dense();
    const auto sel = run_iteration_selection(*X, inst.y, kappa, kDefaultPenaltyConst, kDefaultMaxIter, &inst.beta_true);
    out.sigma_ok += std::abs(sel.early.sigma_hat_final - 1.0) <= 0.15;
    out.mean_sigma += sel.early.sigma_hat_final / out.reps;
    if (!selection_stage) {
      const Vector est = sel.early.trace.final_estimate();
      const double err = (est - b).squaredNorm() * norm_sq / (s * log_ep(p, 1));
      out.worst_err = std::max(out.worst_err, err);
      out.err_ok += err <= 4000;
      out.nnz_ok += (est.array() != 0.0).count() <= 2 * s;
      const double r = 10 * b.squaredNorm() * norm_sq / log_ep(p, 1);
      out.bound_ok += sel.early.m_bar <= 2 * std::log(std::max(r, 100.0)) / std::log(1 / kappa) + 1;
    } else {
      const Vector est = sel.selected();
      const double err = (est - b).squaredNorm() * norm_sq / (s * log_ep(p, s));
      out.worst_err = std::max(out.worst_err, err);
      out.err_ok += err <= 100.0 * 100.0;
      out.nnz_ok += (est.array() != 0.0).count() <= 3 * s;
      const double r = 10 * b.squaredNorm() * norm_sq;
      out.bound_ok += sel.T_hat <= 2 * std::log(std::max(r, 100.0)) / std::log(1 / kappa) + 1;
      // dominance over the recorded candidates, and the recorded value
      // matches an independent evaluation at the selected iterate
      const auto& cand = sel.trace.selection;
      const auto chosen = std::find_if(cand.begin(), cand.end(), [&](const SelectionRecord& c) { return c.m == sel.m_tilde; });
      bool dom = chosen != cand.end();
      for (const auto& c : cand) dom = dom && chosen->criterion_value <= c.criterion_value;
      if (dom) {
        const double direct = selection_criterion(inst.y, *X, est, sel.sigma_hat_ref, kDefaultPenaltyConst);
        dom = rel(direct, chosen->criterion_value) <= 1e-12;
      }
      out.dominance_ok += dom;
    }
  }
  return out;
}

void criterion_4(Verdict& v) {
  const double a_unit = 3 * std::sqrt(2 * log_ep(200, 1));
  const auto r = adaptive_runs(a_unit, false, 4);
  v.check("normalized error <= 4000 with frequency >= 0.99", r.err_ok >= 0.99 * r.reps,
          freq(r.err_ok, r.reps) + ", max " + num(r.worst_err));
  v.check("|beta_bar|_0 <= 2s with frequency >= 0.99", r.nnz_ok >= 0.99 * r.reps, freq(r.nnz_ok, r.reps));
  v.check("m_bar within its bound on every run", r.bound_ok == r.reps, freq(r.bound_ok, r.reps));
}

void criterion_5(Verdict& v) {
  const double a_unit = 3 * std::sqrt(2 * log_ep(200, 5));
  const auto r = adaptive_runs(a_unit, true, 5);
  v.check("normalized error <= 100^2 with frequency >= 0.99", r.err_ok >= 0.99 * r.reps,
          freq(r.err_ok, r.reps) + ", max " + num(r.worst_err));
  v.check("|beta_tilde|_0 <= 3s with frequency >= 0.99", r.nnz_ok >= 0.99 * r.reps, freq(r.nnz_ok, r.reps));
  v.check("T_hat within its bound on every run", r.bound_ok == r.reps, freq(r.bound_ok, r.reps));
  v.check("selection dominance exact on every run", r.dominance_ok == r.reps, freq(r.dominance_ok, r.reps));
}

std::map<std::pair<std::string, double>, std::vector<double>> per_coordinate(
    const std::vector<ReplicationRecord>& records) {
  std::map<std::pair<std::string, double>, std::vector<double>> out;
  for (const auto& r : records) out[{r.estimator, r.a_over_astar}].push_back(r.normalized_error / r.s);
  return out;
}

void criterion_6(Verdict& v) {
  ScenarioConfig c;
  c.id = "phase-transition";
  c.n = 2000;
  c.p = 500;
  c.s = 10;
  c.sigma = 1.0;
  c.epsilon = 0.25;
  c.magnitude_kind = MagnitudeKind::uniform;
  c.replications = 200;
  c.master_seed = 6;
  c.a_over_astar = {0.8};
  c.estimators = {"sharp_estimation"};
  auto weak = per_coordinate(run_scenario(c));
  c.a_over_astar = {2.0};
  c.estimators = {"sharp_estimation", "ista_lasso"};
  auto strong = per_coordinate(run_scenario(c));

  const double target = 2 * log_ep(c.p, c.s);
  const double w = median_of(weak[{"sharp_estimation", 0.8}]);
  v.check("a = 0.8a*: median per coordinate in [0.7, 1.3] x 2log(ep/s)", w >= 0.7 * target && w <= 1.3 * target,
          num(w) + " = " + num(w / target) + " x " + num(target));
  const double st = median_of(strong[{"sharp_estimation", 2.0}]);
  v.check("a = 2a*: median per coordinate <= 2.0", st <= 2.0, num(st));
  const double lasso = median_of(strong[{"ista_lasso", 2.0}]);
  v.check("a = 2a*: sharp <= 0.5 x ISTA-Lasso", st <= 0.5 * lasso, num(st) + " vs " + num(lasso));
}

void criterion_7(Verdict& v, double decay_freq, const std::string& decay_detail) {
  ScenarioConfig c;
  c.id = "support-recovery";
  c.n = 4000;
  c.p = 500;
  c.s = 5;
  c.sigma = 1.0;
  c.epsilon = 0.25;
  c.magnitude_kind = MagnitudeKind::uniform;
  c.replications = 200;
  c.master_seed = 7;
  const double norm = std::sqrt(static_cast<double>(c.n));
  const double ratio = 1.1 * exact_recovery_separation(c.epsilon, 1.0, norm, c.p, c.s) /
                       universal_separation(1.0, norm, c.p, c.s);
  c.a_over_astar = {ratio};
  c.estimators = {"sharp_recovery"};
  long exact = 0, total = 0;
  for (const auto& r : run_scenario(c)) {
    exact += r.exact_recovery;
    ++total;
  }
  v.check("exact recovery >= 0.90 at 1.1 x recovery level, m = ceil(log s)", exact >= 0.9 * total,
          freq(exact, total) + ", a/a* = " + num(ratio));

  c.a_over_astar = {1.5};
  c.estimators = {"sharp_estimation"};
  long almost = 0;
  total = 0;
  for (const auto& r : run_scenario(c)) {
    almost += r.hamming <= 0.1 * r.s;
    ++total;
  }
  v.check("hamming/s <= 0.1 with frequency >= 0.9 at a = 1.5a*, m = ceil(log log(ep/s))", almost >= 0.9 * total,
          freq(almost, total));
  v.check("geometric oracle-distance decay, frequency >= 0.95", decay_freq >= 0.95, decay_detail);
}

struct OracleRuns {
  long reps = 0, monotone_converged = 0, geometric = 0;
  long not_fixed_point = 0;  ///< failures where beta* is not a fixed point at mu
  double worst_final = 0;
  std::string designs;
};

/// Fixed-threshold runs at mu on certified delta_hat <= 0.01 designs, from
/// the iteration-selection warm start, tracked against the oracle LS fit.
OracleRuns oracle_runs() {
  const long s = 2;
  OracleRuns out;
  std::uint64_t next_seed = 1;
  for (int d = 0; d < 5; ++d) {
    const auto cert = certify(600, 30, 0.01, 3 * s, 0.01, next_seed);
    if (!cert.design) {
      out.designs += " (certification failed)";
      return out;
    }
    next_seed = cert.seed + 1;
    out.designs += (d ? ", " : "") + num(cert.delta_hat, 3);
    const auto& X = cert.design;
    const double mu = recovery_threshold(0.25, 1.0, X->max_col_norm(), X->p());
    const double a = 1.1 * exact_recovery_separation(0.25, 1.0, X->max_col_norm(), X->p(), s);
    const double ratio_cap = std::sqrt(10 * cert.delta_hat) + 0.1;
    for (long rep = 0; rep < 100; ++rep) {
      const auto beta = sample_signal(X->p(), s, a, MagnitudeKind::uniform, seed_for(8, 1000 * d + 2 * rep));
      const auto inst = synthesize_instance(X, beta, 1.0, NoiseKind::gaussian, seed_for(8, 1000 * d + 2 * rep + 1));
      const auto sel = run_iteration_selection(*X, inst.y, 0.5);
      const Vector star = oracle_least_squares(*X, inst.y, inst.beta_true.support());
      // Distances below ~1e-12 |beta*| are rounding noise, not iterates.
      const double floor = 1e-12 * star.norm();
      bool mono = true, geo = true, reached = true;
      // The selection warm start is often already within 1e-10 of beta*, so
      // the cold start 0 is run as well to exercise the contraction.
      for (const Vector& start : {sel.selected(), Vector(Vector::Zero(X->p()))}) {
        const auto trace = run_fixed_threshold(*X, inst.y, start, mu, 25, &inst.beta_true);
        std::vector<double> dist;
        for (const auto& it : trace.iterates) dist.push_back((it.beta_hat.to_dense() - star).norm());
        const double d0 = dist.front();
        for (std::size_t m = 0; m + 1 < dist.size(); ++m) {
          if (dist[m] <= floor) break;
          mono = mono && (dist[m + 1] <= dist[m] || dist[m + 1] <= floor);
          geo = geo && dist[m + 1] <= ratio_cap * dist[m];
        }
        const double best = *std::min_element(dist.begin(), dist.end());
        reached = reached && best <= std::max(1e-6 * d0, floor);
        out.worst_final = std::max(out.worst_final, d0 > floor ? best / d0 : 0.0);
      }
      out.monotone_converged += mono && reached;
      if (!(mono && reached)) {
        const Vector g = gradient_map(*X, inst.y, star);
        bool fixed = true;
        for (Index j = 0; j < X->p(); ++j) fixed = fixed && ((std::abs(g(j)) >= mu) == (star(j) != 0.0));
        out.not_fixed_point += !fixed;
      }
      out.geometric += geo;
      ++out.reps;
    }
  }
  return out;
}

void criterion_8(Verdict& v, const OracleRuns& r) {
  v.check("certified designs (exact delta_hat_6 <= 0.01)", r.reps == 500, r.designs);
  v.check("monotone decrease to < 1e-6 x initial distance within 25 steps, every replication (selection and zero starts)",
          r.reps > 0 && r.monotone_converged == r.reps,
          freq(r.monotone_converged, r.reps) + ", worst best/initial " + num(r.worst_final) + "; " +
              std::to_string(r.not_fixed_point) + " misses have T_mu(gradient map at beta*) != beta*");
}

void criterion_9(Verdict& v) {
  long agree = 0, lemma_ok = 0, lemma_cases = 0, sandwich_ok = 0, phi_ok = 0;
  const long seeds = 50;
  for (long k = 0; k < seeds; ++k) {
    const Index p = 6 + k % 7;
    const long s = 1 + k % 4;
    const Index n = 60 + 20 * (k % 8);
    const auto X = generate_design(DesignKind::gaussian, n, p, true, seed_for(9, k));
    const auto audit = restricted_extremes_exact(X, s);
    const auto brute = oracle::brute_force_extremes(X.values(), static_cast<int>(s));
    agree += rel(audit.L_s, brute.L) <= 1e-10 && rel(audit.m_s, brute.m) <= 1e-10 &&
             static_cast<long>(audit.supports_examined) == brute.supports;
    const double norm_sq = X.max_col_norm_sq();
    sandwich_ok += audit.m_s <= norm_sq * (1 + 1e-12) && norm_sq <= audit.L_s * (1 + 1e-12);
    const double delta = 2 * audit.delta_s;
    if (delta <= 1.0) {
      ++lemma_cases;
      const auto cc = contraction_check(X, s, delta);
      const double radius = oracle::brute_force_phi_radius(X.values(), static_cast<int>(s));
      lemma_ok += cc.lemma_implication_ok && cc.holds;
      phi_ok += radius <= delta * (1 + 1e-12);
    }
  }
  v.check("exact audit equals brute force (50 gaussian designs, p <= 12, s <= 4)", agree == seeds, freq(agree, seeds));
  v.check("RIP(s, delta/2) implies worst lambda_max(Phi_SS) <= delta", lemma_ok == lemma_cases && phi_ok == lemma_cases,
          freq(lemma_ok, lemma_cases) + " audited, " + freq(phi_ok, lemma_cases) + " by explicit Phi");
  v.check("m_s <= ||X||^2_{2,inf} <= L_s", sandwich_ok == seeds, freq(sandwich_ok, seeds));
}

void criterion_10(Verdict& v) {
  const Index n = 400, p = 500;
  const long s = 5;
  long hits = 0;
  const long reps = 1000;
  for (long rep = 0; rep < reps; ++rep) {
    auto X = share(generate_design(DesignKind::gaussian, n, p, true, seed_for(10, 3 * rep)));
    const double a = 3 * universal_threshold(s, 1.0, X->max_col_norm(), p);
    const auto inst = synthesize_instance(X, sample_signal(p, s, a, MagnitudeKind::flat_a, seed_for(10, 3 * rep + 1)),
                                          1.0, NoiseKind::gaussian, seed_for(10, 3 * rep + 2));
    hits += event_O_holds(effective_noise(inst).xi_eff, s, 1.0, X->max_col_norm()).holds;
  }
  v.check("event O frequency >= 0.99 at (400, 500, 5)", hits >= 0.99 * reps, freq(hits, reps));

  // (2000, 200, 5): n = 2000 >= 50 s log(ep) = 1574; a = 3 lambda_inf_hat
  const double a_unit = 3 * std::sqrt(40 * log_ep(200, 5));
  const auto r = adaptive_runs(a_unit, false, 101);
  v.check("|sigma_hat - sigma| <= 0.15 sigma with frequency >= 0.95 (n >= 50 s log(ep))", r.sigma_ok >= 0.95 * r.reps,
          freq(r.sigma_ok, r.reps) + ", mean sigma_hat " + num(r.mean_sigma));
}

ScenarioConfig reproducibility_config() {
  ScenarioConfig c;
  c.id = "repro";
  c.n = 150;
  c.p = 90;
  c.s = 3;
  c.sigma = 1.0;
  c.a_over_astar = {0.5, 2.0};
  c.replications = 6;
  c.master_seed = 11;
  c.estimators = {"nonadaptive", "early_stopping", "iteration_selection", "sharp_estimation", "sharp_recovery",
                  "iht_top_s", "ista_lasso", "oracle_ls"};
  c.ista_iters = 500;
  return c;
}

std::string csv_of(const std::vector<ReplicationRecord>& records) {
  std::ostringstream out;
  write_records_csv(out, records);
  return out.str();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void reproducibility_via_cli(Verdict& v, const std::string& cli) {
  const fs::path work = fs::temp_directory_path() / ("adaiht_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  const auto c = reproducibility_config();
  {
    std::ofstream cfg(work / "repro.toml");
    write_scenario(cfg, c);
  }
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > \"" + (work / "log.txt").string() + "\" 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string cfg = "--config \"" + (work / "repro.toml").string() + "\"";
  const int a = run("run " + cfg + " --threads 1 --out \"" + (work / "t1").string() + "\"");
  const int b = run("run " + cfg + " --threads 3 --out \"" + (work / "t3").string() + "\"");
  const int b2 = run("run " + cfg + " --threads 2 --out \"" + (work / "t2").string() + "\"");
  const std::string one = slurp(work / "t1" / "records.csv");
  v.check("cli run: records.csv identical for --threads 1, 2, 3",
          a == 0 && b == 0 && b2 == 0 && !one.empty() && one == slurp(work / "t3" / "records.csv") &&
              one == slurp(work / "t2" / "records.csv"));

  std::istringstream in(one);
  std::vector<ReplicationRecord> records;
  try {
    records = read_records_csv(in);
  } catch (const std::exception&) {
  }
  long replayed = 0, matched = 0;
  for (std::size_t k = 0; k < records.size(); k += 7) {
    const auto& r = records[k];
    const std::size_t ai = r.a_over_astar == c.a_over_astar[0] ? 0 : 1;
    const fs::path out = work / "replay.txt";
    const std::string cmd = "\"" + cli + "\" replay " + cfg + " --replication " + std::to_string(r.replication) +
                            " --a-index " + std::to_string(ai) + " --estimator " + r.estimator + " > \"" +
                            out.string() + "\" 2>&1";
    ++replayed;
    if (std::system(cmd.c_str()) != 0) continue;
    char want[64];
    std::snprintf(want, sizeof want, "final_l2_error_sq,%.17g", r.l2_error_sq);
    matched += slurp(out).find(want) != std::string::npos;
  }
  v.check("cli replay reproduces l2_error_sq exactly", replayed > 0 && matched == replayed, freq(matched, replayed));
  fs::remove_all(work);
}

void criterion_11(Verdict& v, const std::string& cli) {
  const auto c = reproducibility_config();
  const auto one = run_scenario(c, 1);
  const auto three = run_scenario(c, 3);
  const auto again = run_scenario(c, 1);
  v.check("records CSV byte-identical across repeats and thread counts",
          csv_of(one) == csv_of(three) && csv_of(one) == csv_of(again), std::to_string(one.size()) + " rows");
  long exact = 0;
  for (std::size_t ai = 0; ai < c.a_over_astar.size(); ++ai)
    for (long rep = 0; rep < c.replications; ++rep) {
      const auto out = run_replication(c, ai, rep, scenario_replication_seed(c, rep));
      for (std::size_t e = 0; e < out.records.size(); ++e) {
        const auto& row = one[(ai * c.replications + rep) * c.estimators.size() + e];
        exact += out.records[e].l2_error_sq == row.l2_error_sq && out.records[e].estimator == row.estimator;
      }
    }
  v.check("replay of every row reproduces l2_error_sq bit for bit", exact == static_cast<long>(one.size()),
          freq(exact, static_cast<long>(one.size())));
  if (!cli.empty()) reproducibility_via_cli(v, cli);
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::string cli;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--only" && k + 1 < argc) {
      only = std::atoi(argv[++k]);
    } else if (arg == "--cli" && k + 1 < argc) {
      cli = argv[++k];
    } else {
      std::cerr << "usage: acceptance [--only N] [--cli PATH]\n";
      return 2;
    }
  }

  // Criteria 7 (decay) and 8 share the certified oracle runs.
  std::optional<OracleRuns> oracle;
  auto oracle_once = [&]() -> const OracleRuns& {
    if (!oracle) oracle = oracle_runs();
    return *oracle;
  };

  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"operator and threshold formula exactness", criterion_1},
      {"surrogate decay and off-support sparsity along the iterates", criterion_2},
      {"non-adaptive IHT error constant, sparsity and stopping time", criterion_3},
      {"adaptive early stopping", criterion_4},
      {"iteration selection", criterion_5},
      {"scaled-minimax phase transition of the sharp stage", criterion_6},
      {"support recovery",
       [&](Verdict& v) {
         const auto& r = oracle_once();
         criterion_7(v, r.reps ? static_cast<double>(r.geometric) / r.reps : 0.0,
                     freq(r.geometric, r.reps) + " on certified designs, ratio cap sqrt(10 delta_hat) + 0.1");
       }},
      {"convergence to the oracle least-squares fit", [&](Verdict& v) { criterion_8(v, oracle_once()); }},
      {"RIP audit correctness", criterion_9},
      {"concentration: event O and sigma_hat accuracy", criterion_10},
      {"reproducibility", [&](Verdict& v) { criterion_11(v, cli); }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (only && only != id) continue;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(v);
    } catch (const std::exception& e) {
      v.check(std::string("unexpected exception: ") + e.what(), false);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.pass();
    std::printf("%s  criterion %2d  %s  (%.1fs)\n", v.pass() ? "PASS" : "FAIL", id, criteria[k].first.c_str(), secs);
    for (const auto& line : v.lines()) std::printf("%s\n", line.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
