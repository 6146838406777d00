#pragma once

#include "adaiht/model.hpp"
#include "adaiht/thresholding.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adaiht {

inline constexpr long kDefaultMaxIter = 10'000;

struct IterateRecord {
  long m = 0;
  double lambda_m = 0.0;
  SparseVector beta_hat;
  std::optional<double> sigma_hat;
  std::optional<double> l2_error_sq;      ///< only when the true beta is known
  std::optional<long> off_support_count;  ///< only when the true beta is known
  double residual_norm_sq = 0.0;
  long nnz() const { return static_cast<long>(beta_hat.nnz()); }
};

/// One penalized-selection candidate.
struct SelectionRecord {
  long m = 0;
  double criterion_value = 0.0;
  long nnz = 0;
  double residual_norm_sq = 0.0;
};

enum class StopReason { floor_hit, max_iter, selection, fixed_steps };
const char* to_string(StopReason reason);

struct IterateTrace {
  std::vector<IterateRecord> iterates;  ///< iterates[0] is the starting point
  long stop_index = 0;
  StopReason stop_reason = StopReason::floor_hit;
  bool precondition_unverified = false;
  std::vector<SelectionRecord> selection;

  const IterateRecord& stopped() const { return iterates.at(static_cast<std::size_t>(stop_index)); }
  Vector final_estimate() const { return stopped().beta_hat.to_dense(); }
};

/// H = beta_prev + X^T (y - X beta_prev) / ||X||^2_{2,inf}, via two matvecs.
Vector gradient_map(const DesignMatrix& design, const Vector& y, const Vector& beta_prev);

/// Same map when the residual y - X beta_prev is already at hand.
Vector gradient_map_from_residual(const DesignMatrix& design, const Vector& beta_prev,
                                  const Vector& resid);

/// T_lambda(gradient_map(...)).
Vector iht_step(const DesignMatrix& design, const Vector& y, const Vector& beta_prev, double lambda);

/// y - X beta, exploiting sparsity of beta.
Vector residual(const DesignMatrix& design, const Vector& y, const Vector& beta);

/// floor(2 log(lambda0^2 ||X||^2 / (40 sigma^2 log(ep/s))) / log(1/kappa)) + 1,
/// clamped to >= 1.
long stopping_time_oracle(double lambda0_hat, double sigma, double max_col_norm, long p, long s,
                          double kappa);

/// Builds trace records. Holds an optional reference signal for error metrics.
class TraceRecorder {
 public:
  TraceRecorder(const DesignMatrix& design, const Vector& y, const SparseVector* truth);

  IterateRecord record(long m, double lambda, const Vector& beta, const Vector& resid,
                       std::optional<double> sigma_hat = std::nullopt) const;

  const SparseVector* truth() const { return truth_; }

 private:
  const DesignMatrix& design_;
  const Vector& y_;
  const SparseVector* truth_;
  Vector truth_dense_;
  std::vector<char> on_support_;
};

/// Runs `steps` IHT iterations from zero along a fixed-floor schedule.
/// When the true signal and its sparsity are known, flags the trace if
/// ||beta|| > sqrt(s) lambda0.
IterateTrace run_schedule(const DesignMatrix& design, const Vector& y,
                          const ThresholdSchedule& schedule, long steps,
                          const SparseVector* truth = nullptr, long s = 0);

struct NonadaptiveResult {
  IterateTrace trace;
  double lambda0_hat = 0.0;
  double lambda_inf_hat = 0.0;
  long m_hat = 0;
};

/// Known-(s, sigma) pipeline: lambda0_hat, lambda_inf_hat, geometric schedule,
/// exactly m_hat steps (or max_iter, flagged).
NonadaptiveResult run_nonadaptive(const DesignMatrix& design, const Vector& y, long s, double sigma,
                                  double kappa, long max_iter = kDefaultMaxIter,
                                  const SparseVector* truth = nullptr);

/// Writes trace rows: replication,m,lambda_m,l2_error_sq,off_support_count,nnz,
/// sigma_hat,residual_norm_sq. Missing optionals are empty cells. Selection
/// records follow as a second block headed m,criterion_value,nnz.
void write_trace_csv(std::ostream& out, const IterateTrace& trace, long replication,
                     bool header = true);

}  // namespace adaiht
