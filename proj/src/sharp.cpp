#include "adaiht/sharp.hpp"

#include "adaiht/errors.hpp"

#include <cmath>

namespace adaiht {

double sharp_threshold(double epsilon, double sigma, double max_col_norm, long p, long s) {
  if (!(epsilon > 0 && epsilon < 1)) throw DomainError("sharp_threshold: epsilon must lie in (0,1)");
  detail::require_sparsity(s, p, "sharp_threshold");
  return (1.0 + std::sqrt(epsilon)) * sigma * std::sqrt(2.0 * detail::log_ep_over(p, s)) / max_col_norm;
}

double recovery_threshold(double epsilon, double sigma, double max_col_norm, long p) {
  if (!(epsilon > 0)) throw DomainError("recovery_threshold: epsilon must be > 0");
  if (p < 2) throw DomainError("recovery_threshold: p must be >= 2");
  return (1.0 + std::sqrt(epsilon)) * sigma * std::sqrt(2.0 * std::log(static_cast<double>(p))) /
         max_col_norm;
}

double universal_separation(double sigma, double max_col_norm, long p, long s) {
  detail::require_sparsity(s, p, "universal_separation");
  return sigma * std::sqrt(2.0 * detail::log_ep_over(p, s)) / max_col_norm;
}

double exact_recovery_separation(double epsilon, double sigma, double max_col_norm, long p, long s) {
  detail::require_sparsity(s, p, "exact_recovery_separation");
  const double root = std::sqrt(2.0 * std::log(static_cast<double>(p))) +
                      std::sqrt(2.0 * std::log(static_cast<double>(s)));
  return (1.0 + 3.0 * std::sqrt(epsilon)) * sigma * root / max_col_norm;
}

long estimation_steps(long p, long s) {
  detail::require_sparsity(s, p, "estimation_steps");
  return std::max(1L, static_cast<long>(std::ceil(std::log(detail::log_ep_over(p, s)))));
}

long recovery_steps(long s) {
  if (s < 1) throw DomainError("recovery_steps: s must be >= 1");
  return std::max(1L, static_cast<long>(std::ceil(std::log(static_cast<double>(s)))));
}

IterateTrace run_fixed_threshold(const DesignMatrix& design, const Vector& y, const Vector& beta_init,
                                 double lambda, long m_steps, const SparseVector* truth) {
  detail::require_same(beta_init.size(), design.p(), "run_fixed_threshold: warm start length vs p");
  if (lambda < 0) throw DomainError("run_fixed_threshold: lambda must be >= 0");
  if (m_steps < 0) throw DomainError("run_fixed_threshold: m_steps must be >= 0");
  TraceRecorder rec(design, y, truth);
  IterateTrace trace;
  Vector beta = beta_init;
  Vector r = residual(design, y, beta);
  trace.iterates.push_back(rec.record(0, lambda, beta, r));
  for (long m = 1; m <= m_steps; ++m) {
    beta = hard_threshold(gradient_map_from_residual(design, beta, r), lambda);
    r = residual(design, y, beta);
    trace.iterates.push_back(rec.record(m, lambda, beta, r));
  }
  trace.stop_index = m_steps;
  trace.stop_reason = StopReason::fixed_steps;
  return trace;
}

Vector oracle_least_squares(const DesignMatrix& design, const Vector& y, const std::vector<Index>& support) {
  detail::require_same(y.size(), design.n(), "oracle_least_squares: y length vs n");
  const auto s = static_cast<Index>(support.size());
  if (s > design.n()) throw SingularBlock("oracle_least_squares: support larger than n");
  Vector out = Vector::Zero(design.p());
  if (s == 0) return out;
  Matrix XS(design.n(), s);
  for (Index k = 0; k < s; ++k) {
    const Index j = support[static_cast<std::size_t>(k)];
    if (j < 0 || j >= design.p()) throw DomainError("oracle_least_squares: support index out of range");
    XS.col(k) = design.values().col(j);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(XS);
  if (qr.rank() < s) throw SingularBlock("oracle_least_squares: restricted Gram block is singular");
  const Vector coef = qr.solve(y);
  for (Index k = 0; k < s; ++k) out(support[static_cast<std::size_t>(k)]) = coef(k);
  return out;
}

Index SupportPattern::popcount() const {
  Index c = 0;
  for (auto v : indicator) c += v;
  return c;
}

SupportPattern support_decoder(const Vector& beta_hat) {
  SupportPattern eta;
  eta.indicator.resize(static_cast<std::size_t>(beta_hat.size()));
  for (Index j = 0; j < beta_hat.size(); ++j) eta.indicator[static_cast<std::size_t>(j)] = beta_hat(j) != 0.0;
  return eta;
}

SupportPattern support_decoder(const SparseVector& beta) {
  SupportPattern eta;
  eta.indicator.assign(static_cast<std::size_t>(beta.dim()), 0);
  for (auto j : beta.support()) eta.indicator[static_cast<std::size_t>(j)] = 1;
  return eta;
}

Index hamming_error(const SupportPattern& eta_hat, const SupportPattern& eta) {
  detail::require_same(eta_hat.dim(), eta.dim(), "hamming_error: pattern lengths");
  Index d = 0;
  for (std::size_t i = 0; i < eta.indicator.size(); ++i) d += eta_hat.indicator[i] != eta.indicator[i];
  return d;
}

SharpResult run_sharp(const DesignMatrix& design, const Vector& y, long s, double sigma,
                      const SharpOptions& options, const SparseVector* truth) {
  SharpResult out;
  out.warm_start = run_iteration_selection(design, y, options.kappa, options.penalty_const,
                                           options.max_iter, truth);
  const Vector warm = out.warm_start.selected();
  out.sigma_used = options.adaptive_sigma
                       ? std::sqrt(residual(design, y, warm).squaredNorm() / static_cast<double>(design.n()))
                       : sigma;
  long steps = options.m_steps;
  if (options.mode == SharpMode::estimation) {
    out.lambda = sharp_threshold(options.epsilon, out.sigma_used, design.max_col_norm(), design.p(), s);
    if (steps <= 0) steps = estimation_steps(design.p(), s);
  } else {
    out.lambda = recovery_threshold(options.epsilon, out.sigma_used, design.max_col_norm(), design.p());
    if (steps <= 0) steps = recovery_steps(s);
  }
  out.trace = run_fixed_threshold(design, y, warm, out.lambda, steps, truth);
  return out;
}

}  // namespace adaiht
