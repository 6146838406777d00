#include "adaiht/iht.hpp"

#include "adaiht/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace adaiht {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::floor_hit: return "floor_hit";
    case StopReason::max_iter: return "max_iter";
    case StopReason::selection: return "selection";
    case StopReason::fixed_steps: return "fixed_steps";
  }
  return "?";
}

Vector residual(const DesignMatrix& design, const Vector& y, const Vector& beta) {
  detail::require_same(y.size(), design.n(), "residual: y length vs n");
  detail::require_same(beta.size(), design.p(), "residual: beta length vs p");
  Vector r = y;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) r.noalias() -= beta(j) * design.values().col(j);
  }
  return r;
}

Vector gradient_map_from_residual(const DesignMatrix& design, const Vector& beta_prev,
                                  const Vector& resid) {
  Vector H = design.values().transpose() * resid;
  H /= design.max_col_norm_sq();
  H += beta_prev;
  return H;
}

Vector gradient_map(const DesignMatrix& design, const Vector& y, const Vector& beta_prev) {
  return gradient_map_from_residual(design, beta_prev, residual(design, y, beta_prev));
}

Vector iht_step(const DesignMatrix& design, const Vector& y, const Vector& beta_prev, double lambda) {
  if (lambda < 0) throw DomainError("iht_step: lambda must be >= 0");
  return hard_threshold(gradient_map(design, y, beta_prev), lambda);
}

long stopping_time_oracle(double lambda0_hat, double sigma, double max_col_norm, long p, long s,
                          double kappa) {
  if (!(sigma > 0)) throw DomainError("stopping_time_oracle: sigma must be > 0");
  detail::require_sparsity(s, p, "stopping_time_oracle");
  if (!(kappa > 0 && kappa < 1)) throw DomainError("stopping_time_oracle: kappa must lie in (0,1)");
  const double arg = lambda0_hat * lambda0_hat * max_col_norm * max_col_norm /
                     (40.0 * sigma * sigma * detail::log_ep_over(p, s));
  const double steps = std::floor(2.0 * std::log(arg) / std::log(1.0 / kappa));
  return std::max(1L, static_cast<long>(steps) + 1);
}

TraceRecorder::TraceRecorder(const DesignMatrix& design, const Vector& y, const SparseVector* truth)
    : design_(design), y_(y), truth_(truth) {
  if (truth_) {
    detail::require_same(truth_->dim(), design.p(), "trace truth dim vs p");
    truth_dense_ = truth_->to_dense();
    on_support_.assign(static_cast<std::size_t>(design.p()), 0);
    for (auto j : truth_->support()) on_support_[static_cast<std::size_t>(j)] = 1;
  }
}

IterateRecord TraceRecorder::record(long m, double lambda, const Vector& beta, const Vector& resid,
                                    std::optional<double> sigma_hat) const {
  IterateRecord rec;
  rec.m = m;
  rec.lambda_m = lambda;
  rec.beta_hat = SparseVector::from_dense(beta);
  rec.sigma_hat = sigma_hat;
  rec.residual_norm_sq = resid.squaredNorm();
  if (truth_) {
    rec.l2_error_sq = (beta - truth_dense_).squaredNorm();
    long off = 0;
    for (const auto& [j, v] : rec.beta_hat.entries()) off += on_support_[static_cast<std::size_t>(j)] ? 0 : 1;
    rec.off_support_count = off;
  }
  return rec;
}

IterateTrace run_schedule(const DesignMatrix& design, const Vector& y,
                          const ThresholdSchedule& schedule, long steps, const SparseVector* truth,
                          long s) {
  detail::require_same(y.size(), design.n(), "run_schedule: y length vs n");
  if (!(schedule.kappa > 0 && schedule.kappa < 1)) throw DomainError("kappa must lie in (0,1)");
  TraceRecorder rec(design, y, truth);
  IterateTrace trace;
  if (truth && s > 0 && truth->to_dense().norm() > std::sqrt(static_cast<double>(s)) * schedule.lambda0) {
    trace.precondition_unverified = true;
  }
  Vector beta = Vector::Zero(design.p());
  Vector r = y;
  trace.iterates.push_back(rec.record(0, schedule.value(0), beta, r));
  for (long m = 1; m <= steps; ++m) {
    const double lambda = schedule.value(m);
    beta = hard_threshold(gradient_map_from_residual(design, beta, r), lambda);
    r = residual(design, y, beta);
    trace.iterates.push_back(rec.record(m, lambda, beta, r));
  }
  trace.stop_index = static_cast<long>(trace.iterates.size()) - 1;
  return trace;
}

NonadaptiveResult run_nonadaptive(const DesignMatrix& design, const Vector& y, long s, double sigma,
                                  double kappa, long max_iter, const SparseVector* truth) {
  detail::require_sparsity(s, design.p(), "run_nonadaptive");
  NonadaptiveResult out;
  const Vector M = compute_M(design, y);
  out.lambda0_hat = initial_threshold_oracle(M, s, sigma, design.max_col_norm(), design.p());
  out.lambda_inf_hat = universal_threshold(s, sigma, design.max_col_norm(), design.p());
  out.m_hat = stopping_time_oracle(out.lambda0_hat, sigma, design.max_col_norm(), design.p(), s, kappa);
  const ThresholdSchedule schedule{out.lambda0_hat, out.lambda_inf_hat, kappa, FloorMode::fixed_floor};
  const long steps = std::min(out.m_hat, max_iter);
  out.trace = run_schedule(design, y, schedule, steps, truth, s);
  out.trace.stop_reason = steps < out.m_hat ? StopReason::max_iter : StopReason::floor_hit;
  return out;
}

namespace {

void put_optional(std::ostream& out, const std::optional<double>& v) {
  out << ',';
  if (v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    out << buf;
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const IterateTrace& trace, long replication, bool header) {
  if (header) out << "replication,m,lambda_m,l2_error_sq,off_support_count,nnz,sigma_hat,residual_norm_sq\n";
  for (const auto& r : trace.iterates) {
    out << replication << ',' << r.m << ',' << fmt(r.lambda_m);
    put_optional(out, r.l2_error_sq);
    out << ',';
    if (r.off_support_count) out << *r.off_support_count;
    out << ',' << r.nnz();
    put_optional(out, r.sigma_hat);
    out << ',' << fmt(r.residual_norm_sq) << '\n';
  }
  if (!trace.selection.empty()) {
    out << "\nm,criterion_value,nnz\n";
    for (const auto& s : trace.selection) out << s.m << ',' << fmt(s.criterion_value) << ',' << s.nnz << '\n';
  }
}

}  // namespace adaiht
