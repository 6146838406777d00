#include "adaiht/adaptive.hpp"

#include "adaiht/errors.hpp"

#include <cmath>

namespace adaiht {

double sigma_hat(const Vector& y, const DesignMatrix& design, const Vector& beta_hat) {
  return std::sqrt(residual(design, y, beta_hat).squaredNorm() / static_cast<double>(design.n()));
}

namespace {

void require_kappa(double kappa) {
  if (!(kappa > 0 && kappa < 1)) throw DomainError("kappa must lie in (0,1)");
}

}  // namespace

EarlyStoppingResult run_early_stopping(const DesignMatrix& design, const Vector& y, double kappa,
                                       long max_iter, const SparseVector* truth) {
  require_kappa(kappa);
  detail::require_same(y.size(), design.n(), "run_early_stopping: y length vs n");
  const double n = static_cast<double>(design.n());
  const long p = design.p();
  const double norm = design.max_col_norm();
  TraceRecorder rec(design, y, truth);

  EarlyStoppingResult out;
  Vector beta = Vector::Zero(p);
  Vector r = y;
  double sig = std::sqrt(r.squaredNorm() / n);
  out.lambda_bar0 = adaptive_initial_threshold(compute_M(design, y), sig, norm, p);
  const ThresholdSchedule schedule{out.lambda_bar0, 0.0, kappa, FloorMode::adaptive_floor};
  auto& trace = out.trace;
  trace.iterates.push_back(rec.record(0, out.lambda_bar0, beta, r, sig));

  for (long m = 0;; ++m) {
    const double floor_m = adaptive_noise_floor(sig, norm, p);
    const bool fired = schedule.geometric(m) <= floor_m;
    if (m + 1 > max_iter) {
      trace.stop_reason = StopReason::max_iter;
      out.m_bar = m;
      break;
    }
    const double lambda = schedule.value(m + 1, floor_m);
    beta = hard_threshold(gradient_map_from_residual(design, beta, r), lambda);
    r = residual(design, y, beta);
    sig = std::sqrt(r.squaredNorm() / n);
    trace.iterates.push_back(rec.record(m + 1, lambda, beta, r, sig));
    if (fired) {
      trace.stop_reason = StopReason::floor_hit;
      out.m_bar = m + 1;
      break;
    }
  }
  trace.stop_index = out.m_bar;
  out.sigma_hat_final = *trace.stopped().sigma_hat;
  if (truth) {
    const double s = static_cast<double>(std::max<Index>(truth->nnz(), 1));
    out.sample_size_warning = !(n > 14000.0 * s * detail::log_ep_over(p, 1));
  }
  return out;
}

double selection_criterion(const Vector& y, const DesignMatrix& design, const Vector& beta_hat,
                           double sigma_hat_ref, double penalty_const) {
  if (!(penalty_const > 0)) throw DomainError("selection_criterion: penalty_const must be > 0");
  const double n = static_cast<double>(design.n());
  const double k = static_cast<double>((beta_hat.array() != 0.0).count());
  const double fit = residual(design, y, beta_hat).squaredNorm() / n;
  const double pen = k > 0 ? penalty_const * sigma_hat_ref * sigma_hat_ref * k *
                                 detail::log_ep_over(static_cast<double>(design.p()), k) / n
                           : 0.0;
  return fit + pen;
}

SelectionResult run_iteration_selection(const DesignMatrix& design, const Vector& y, double kappa,
                                        double penalty_const, long max_iter, const SparseVector* truth) {
  require_kappa(kappa);
  if (!(penalty_const > 0)) throw DomainError("penalty_const must be > 0");
  SelectionResult out;
  out.early = run_early_stopping(design, y, kappa, max_iter, truth);
  out.sigma_hat_ref = out.early.sigma_hat_final;

  const double n = static_cast<double>(design.n());
  const double lambda_bar0 = out.early.lambda_bar0;
  const ThresholdSchedule schedule{lambda_bar0, 0.0, kappa, FloorMode::fixed_floor};
  const double search_floor = 4.0 * out.sigma_hat_ref / design.max_col_norm();
  long T = 0;
  while (schedule.geometric(T) > search_floor && T < max_iter) ++T;
  out.T_hat = T;

  TraceRecorder rec(design, y, truth);
  auto& trace = out.trace;
  Vector beta = Vector::Zero(design.p());
  Vector r = y;
  trace.iterates.push_back(rec.record(0, lambda_bar0, beta, r, out.sigma_hat_ref));

  auto criterion_of = [&](long m, const Vector& b, const Vector& res) {
    const double k = static_cast<double>((b.array() != 0.0).count());
    const double pen = k > 0 ? penalty_const * out.sigma_hat_ref * out.sigma_hat_ref * k *
                                   detail::log_ep_over(static_cast<double>(design.p()), k) / n
                             : 0.0;
    return SelectionRecord{m, res.squaredNorm() / n + pen, static_cast<long>(k), res.squaredNorm()};
  };

  if (T == 0) {
    trace.selection.push_back(criterion_of(0, beta, r));
  }
  for (long m = 1; m <= T; ++m) {
    const double lambda = schedule.geometric(m);
    beta = hard_threshold(gradient_map_from_residual(design, beta, r), lambda);
    r = residual(design, y, beta);
    trace.iterates.push_back(rec.record(m, lambda, beta, r, out.sigma_hat_ref));
    trace.selection.push_back(criterion_of(m, beta, r));
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < trace.selection.size(); ++k) {
    if (trace.selection[k].criterion_value < trace.selection[best].criterion_value) best = k;
  }
  out.m_tilde = trace.selection[best].m;
  trace.stop_index = out.m_tilde;
  trace.stop_reason = T >= max_iter && schedule.geometric(T) > search_floor ? StopReason::max_iter
                                                                            : StopReason::selection;
  return out;
}

}  // namespace adaiht
