#include "adaiht/baselines.hpp"

#include "adaiht/errors.hpp"
#include "adaiht/iht.hpp"
#include "adaiht/sharp.hpp"
#include "adaiht/thresholding.hpp"

#include <cmath>

namespace adaiht {

BaselineResult iht_top_s(const DesignMatrix& design, const Vector& y, long s, long iters) {
  detail::require_sparsity(s, design.p(), "iht_top_s");
  if (iters < 0) throw DomainError("iht_top_s: iters must be >= 0");
  BaselineResult out{"iht_top_s", Vector::Zero(design.p()), 0, false, {}};
  Vector r = y;
  for (long k = 0; k < iters; ++k) {
    Vector next = top_s_threshold(gradient_map_from_residual(design, out.beta_hat, r), s);
    const bool same = next == out.beta_hat;
    out.beta_hat = std::move(next);
    out.iterations_used = k + 1;
    if (same) {
      out.converged = true;
      break;
    }
    r = residual(design, y, out.beta_hat);
  }
  return out;
}

double spectral_norm_sq(const DesignMatrix& design, long iters, double tol) {
  const Matrix& X = design.values();
  Vector v = Vector::Ones(X.cols()) / std::sqrt(static_cast<double>(X.cols()));
  double est = 0.0;
  for (long k = 0; k < iters; ++k) {
    Vector w = X.transpose() * (X * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - est) <= tol * next) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

double default_lasso_lambda(double sigma, Index n, Index p) {
  return 2.0 * sigma * std::sqrt(2.0 * static_cast<double>(n) * std::log(static_cast<double>(p)));
}

double lasso_objective(const DesignMatrix& design, const Vector& y, const Vector& beta, double lambda_l1) {
  return 0.5 * residual(design, y, beta).squaredNorm() + lambda_l1 * beta.lpNorm<1>();
}

BaselineResult ista_lasso(const DesignMatrix& design, const Vector& y, double lambda_l1, long iters,
                          double tol, StepRule rule) {
  if (lambda_l1 < 0) throw DomainError("ista_lasso: lambda_l1 must be >= 0");
  detail::require_same(y.size(), design.n(), "ista_lasso: y length vs n");
  // Slight inflation keeps the step strictly below 1/L despite power-iteration error.
  const double lipschitz = rule == StepRule::spectral ? spectral_norm_sq(design) * (1.0 + 1e-6)
                                                      : design.max_col_norm_sq();
  const double step = 1.0 / lipschitz;
  BaselineResult out{"ista_lasso", Vector::Zero(design.p()), 0, false, {}};
  Vector r = y;
  for (long k = 0; k < iters; ++k) {
    Vector u = out.beta_hat + step * (design.values().transpose() * r);
    Vector next = soft_threshold(u, lambda_l1 * step);
    const double change = (next - out.beta_hat).cwiseAbs().maxCoeff();
    out.beta_hat = std::move(next);
    r = residual(design, y, out.beta_hat);
    out.objective_path.push_back(0.5 * r.squaredNorm() + lambda_l1 * out.beta_hat.lpNorm<1>());
    out.iterations_used = k + 1;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

BaselineResult oracle_ls(const DesignMatrix& design, const Vector& y, const std::vector<Index>& support) {
  return {"oracle_ls", oracle_least_squares(design, y, support), 1, true, {}};
}

}  // namespace adaiht
