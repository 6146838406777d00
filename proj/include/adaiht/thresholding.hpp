#pragma once

#include "adaiht/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace adaiht {

template <typename Derived>
using PlainVector = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;

/// T_lambda(u)_j = u_j 1{|u_j| >= lambda}. Ties at the boundary are kept.
template <typename Derived>
PlainVector<Derived> hard_threshold(const Eigen::MatrixBase<Derived>& u,
                                    typename Derived::Scalar lambda) {
  using Scalar = typename Derived::Scalar;
  return (u.array().abs() >= lambda).select(u, Scalar(0)).matrix();
}

template <typename Derived>
PlainVector<Derived> soft_threshold(const Eigen::MatrixBase<Derived>& u,
                                    typename Derived::Scalar lambda) {
  using Scalar = typename Derived::Scalar;
  return u.unaryExpr([lambda](Scalar v) {
    const Scalar mag = std::abs(v) - lambda;
    return mag > Scalar(0) ? std::copysign(mag, v) : Scalar(0);
  });
}

/// Indices of the k largest |u_j|, ordered by decreasing magnitude with ties
/// broken by smallest index.
template <typename Derived>
std::vector<Eigen::Index> top_k_indices(const Eigen::MatrixBase<Derived>& u, Eigen::Index k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(u.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  k = std::clamp<Eigen::Index>(k, 0, u.size());
  auto before = [&u](Eigen::Index a, Eigen::Index b) {
    const auto ua = std::abs(u(a));
    const auto ub = std::abs(u(b));
    return ua > ub || (ua == ub && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), before);
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

/// Classical IHT projection: keeps the s entries of largest magnitude.
/// Zero entries never survive, so at most min(s, nnz(u)) entries are kept.
template <typename Derived>
PlainVector<Derived> top_s_threshold(const Eigen::MatrixBase<Derived>& u, Eigen::Index s) {
  if (s < 1 || s > u.size()) throw DomainError("top_s_threshold: s must lie in [1, p]");
  PlainVector<Derived> out = PlainVector<Derived>::Zero(u.size());
  for (auto j : top_k_indices(u, s)) out(j) = u(j);
  return out;
}

/// Sum of the s largest squared |u_j|.
template <typename Derived>
typename Derived::Scalar top_s_sum_sq(const Eigen::MatrixBase<Derived>& u, Eigen::Index s) {
  typename Derived::Scalar acc(0);
  for (auto j : top_k_indices(u, s)) acc += u(j) * u(j);
  return acc;
}

enum class FloorMode { fixed_floor, adaptive_floor };

/// lambda_m = kappa^{m/2} lambda0 v floor(m).
struct ThresholdSchedule {
  double lambda0 = 0.0;
  double lambda_inf = 0.0;
  double kappa = 0.5;
  FloorMode mode = FloorMode::fixed_floor;

  double geometric(long m) const { return std::pow(kappa, 0.5 * static_cast<double>(m)) * lambda0; }

  /// In adaptive mode the floor for step m must be supplied by the caller.
  double value(long m, std::optional<double> adaptive_floor = std::nullopt) const {
    if (m < 0) throw DomainError("schedule_value: m must be >= 0");
    double floor = lambda_inf;
    if (mode == FloorMode::adaptive_floor) {
      if (!adaptive_floor) throw DomainError("schedule_value: adaptive mode needs a floor value");
      floor = *adaptive_floor;
    }
    return std::max(geometric(m), floor);
  }
};

namespace detail {

inline void require_sparsity(long s, long p, const char* who) {
  if (s < 1 || s > p) throw DomainError(std::string(who) + ": need 1 <= s <= p");
}

/// log(e p / s) = 1 + log(p / s).
inline double log_ep_over(double p, double s) { return 1.0 + std::log(p / s); }

}  // namespace detail

/// sigma sqrt(40 log(ep/s)) / ||X||_{2,inf}.
inline double universal_threshold(long s, double sigma, double max_col_norm, long p) {
  detail::require_sparsity(s, p, "universal_threshold");
  if (sigma < 0) throw DomainError("universal_threshold: sigma must be >= 0");
  return sigma * std::sqrt(40.0 * detail::log_ep_over(p, s)) / max_col_norm;
}

/// Oracle initial threshold: sqrt(10 sum_{i<=s} M_(i)^2 / s) v lambda_inf.
template <typename Derived>
double initial_threshold_oracle(const Eigen::MatrixBase<Derived>& M, long s, double sigma,
                                double max_col_norm, long p) {
  detail::require_sparsity(s, p, "initial_threshold_oracle");
  const double head = std::sqrt(10.0 * static_cast<double>(top_s_sum_sq(M, s)) / s);
  return std::max(head, universal_threshold(s, sigma, max_col_norm, p));
}

/// sigma_hat sqrt(160 log(ep)) / ||X||_{2,inf}; the noise floor of the
/// adaptive schedule.
inline double adaptive_noise_floor(double sigma_hat, double max_col_norm, long p) {
  return sigma_hat * std::sqrt(160.0 * detail::log_ep_over(p, 1)) / max_col_norm;
}

/// sqrt(20) |M|_(1) v adaptive_noise_floor(sigma_hat0). Needs neither s nor sigma.
template <typename Derived>
double adaptive_initial_threshold(const Eigen::MatrixBase<Derived>& M, double sigma_hat0,
                                  double max_col_norm, long p) {
  if (p < 1) throw DomainError("adaptive_initial_threshold: p must be >= 1");
  const double head = M.size() > 0 ? std::sqrt(20.0) * M.cwiseAbs().maxCoeff() : 0.0;
  return std::max(head, adaptive_noise_floor(sigma_hat0, max_col_norm, p));
}

}  // namespace adaiht
