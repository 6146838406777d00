#pragma once

#include "adaiht/model.hpp"

#include <string>
#include <vector>

namespace adaiht {

struct BaselineResult {
  std::string name;  ///< iht_top_s, ista_lasso or oracle_ls
  Vector beta_hat;
  long iterations_used = 0;
  bool converged = false;
  /// Lasso objective after each iteration (ista_lasso only).
  std::vector<double> objective_path;
};

/// Classical IHT: beta <- top_s(gradient_map(beta)) for `iters` steps from 0.
BaselineResult iht_top_s(const DesignMatrix& design, const Vector& y, long s, long iters);

enum class StepRule {
  column_norm,  ///< 1 / ||X||^2_{2,inf}, same step as the IHT gradient map
  spectral,     ///< 1 / ||X||_2^2 from power iteration; always a descent step
};

/// Largest eigenvalue of X^T X by power iteration (deterministic start).
double spectral_norm_sq(const DesignMatrix& design, long iters = 200, double tol = 1e-10);

/// Universal Lasso level 2 sigma sqrt(2 n log p) on the 0.5||y - X b||^2 scale.
double default_lasso_lambda(double sigma, Index n, Index p);

/// 0.5 ||y - X b||^2 + lambda_l1 ||b||_1.
double lasso_objective(const DesignMatrix& design, const Vector& y, const Vector& beta, double lambda_l1);

/// Proximal gradient (ISTA) on the Lasso objective from 0. Stops once the
/// largest coordinate change drops below `tol` or after `iters` steps.
BaselineResult ista_lasso(const DesignMatrix& design, const Vector& y, double lambda_l1, long iters,
                          double tol, StepRule rule = StepRule::spectral);

/// Least squares on the true support.
BaselineResult oracle_ls(const DesignMatrix& design, const Vector& y, const std::vector<Index>& support);

}  // namespace adaiht
