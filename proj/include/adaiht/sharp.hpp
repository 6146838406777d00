#pragma once

#include "adaiht/adaptive.hpp"

#include <vector>

namespace adaiht {

/// (1 + sqrt(eps)) sigma sqrt(2 log(ep/s)) / ||X||_{2,inf}.
double sharp_threshold(double epsilon, double sigma, double max_col_norm, long p, long s);

/// (1 + sqrt(eps)) sigma sqrt(2 log p) / ||X||_{2,inf}; requires p >= 2.
double recovery_threshold(double epsilon, double sigma, double max_col_norm, long p);

/// a* = sigma sqrt(2 log(ep/s)) / ||X||_{2,inf}.
double universal_separation(double sigma, double max_col_norm, long p, long s);

/// (1 + 3 sqrt(eps)) sigma (sqrt(2 log p) + sqrt(2 log s)) / ||X||_{2,inf}.
double exact_recovery_separation(double epsilon, double sigma, double max_col_norm, long p, long s);

/// ceil(log log(ep/s)), at least 1.
long estimation_steps(long p, long s);
/// ceil(log s), at least 1.
long recovery_steps(long s);

/// m_steps constant-threshold IHT iterations from a warm start.
IterateTrace run_fixed_threshold(const DesignMatrix& design, const Vector& y, const Vector& beta_init,
                                 double lambda, long m_steps, const SparseVector* truth = nullptr);

/// Least squares restricted to `support`, zero elsewhere. Throws SingularBlock
/// when X_S is rank deficient.
Vector oracle_least_squares(const DesignMatrix& design, const Vector& y, const std::vector<Index>& support);

/// eta_i = 1(beta_i != 0).
struct SupportPattern {
  std::vector<unsigned char> indicator;

  Index dim() const { return static_cast<Index>(indicator.size()); }
  Index popcount() const;
};

SupportPattern support_decoder(const Vector& beta_hat);
SupportPattern support_decoder(const SparseVector& beta);
Index hamming_error(const SupportPattern& eta_hat, const SupportPattern& eta);

enum class SharpMode { estimation, recovery };

struct SharpOptions {
  SharpMode mode = SharpMode::estimation;
  double epsilon = 0.25;
  double kappa = 0.5;
  double penalty_const = kDefaultPenaltyConst;
  /// Number of fixed-threshold steps; <= 0 picks the mode's default.
  long m_steps = 0;
  /// Replace sigma with ||y - X beta_warm|| / sqrt(n).
  bool adaptive_sigma = false;
  long max_iter = kDefaultMaxIter;
};

struct SharpResult {
  SelectionResult warm_start;
  double sigma_used = 0.0;
  double lambda = 0.0;
  IterateTrace trace;
};

/// Iteration selection for the warm start, then the fixed-threshold stage at
/// the sharp estimation or recovery threshold. `s` enters only the threshold
/// and the default step count.
SharpResult run_sharp(const DesignMatrix& design, const Vector& y, long s, double sigma,
                      const SharpOptions& options, const SparseVector* truth = nullptr);

}  // namespace adaiht
