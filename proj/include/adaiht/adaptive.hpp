#pragma once

#include "adaiht/iht.hpp"

namespace adaiht {

inline constexpr double kDefaultPenaltyConst = 10.0;

/// sqrt(||y - X beta_hat||^2 / n).
double sigma_hat(const Vector& y, const DesignMatrix& design, const Vector& beta_hat);

struct EarlyStoppingResult {
  IterateTrace trace;
  double lambda_bar0 = 0.0;
  long m_bar = 0;
  double sigma_hat_final = 0.0;  ///< sigma_hat of the stopped iterate
  /// sample-size condition of the theory (n > 14000 s log(ep)); informational
  bool sample_size_warning = false;
};

/// Fully adaptive early stopping.
///
/// Starts from lambda_bar0 with sigma_hat0 = ||y|| / sqrt(n). Iterate m >= 1
/// is thresholded at max(kappa^{m/2} lambda_bar0, floor(sigma_hat_{m-1})),
/// where floor(v) = v sqrt(160 log(ep)) / ||X||_{2,inf}. The first m whose
/// geometric term is <= floor(sigma_hat_m) fires the rule; one more step is
/// taken and m_bar = m + 1.
EarlyStoppingResult run_early_stopping(const DesignMatrix& design, const Vector& y, double kappa,
                                       long max_iter = kDefaultMaxIter,
                                       const SparseVector* truth = nullptr);

/// (1/n) ||y - X beta_hat||^2 + c sigma_ref^2 k log(ep/k) / n with k = |beta_hat|_0;
/// the penalty is 0 at k = 0.
double selection_criterion(const Vector& y, const DesignMatrix& design, const Vector& beta_hat,
                           double sigma_hat_ref, double penalty_const = kDefaultPenaltyConst);

struct SelectionResult {
  IterateTrace trace;  ///< the pure geometric chain, selection records attached
  EarlyStoppingResult early;
  double sigma_hat_ref = 0.0;
  long T_hat = 0;
  long m_tilde = 0;

  Vector selected() const { return trace.final_estimate(); }
};

/// Penalized iteration selection. Runs early stopping for sigma_hat_{m_bar},
/// then warm-starts the chain lambda_m = kappa^{m/2} lambda_bar0 for
/// m = 1..T_hat and returns the criterion argmin (ties to the smallest m).
/// T_hat = 0 leaves only the zero iterate as candidate.
SelectionResult run_iteration_selection(const DesignMatrix& design, const Vector& y, double kappa,
                                        double penalty_const = kDefaultPenaltyConst,
                                        long max_iter = kDefaultMaxIter,
                                        const SparseVector* truth = nullptr);

}  // namespace adaiht
