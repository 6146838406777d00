#pragma once

#include "adaiht/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace adaiht {

inline constexpr double kDefaultEnumerationBudget = 2e6;

enum class AuditMethod { exact, sampled };
const char* to_string(AuditMethod method);

/// Extreme eigenvalues of s-column Gram blocks X_S^T X_S.
struct RipReport {
  long s = 0;
  double L_s = 0.0;
  double m_s = 0.0;
  double delta_s = 0.0;  ///< 1 - m_s / L_s
  AuditMethod method = AuditMethod::exact;
  std::uint64_t supports_examined = 0;
  std::vector<Index> worst_support;  ///< support attaining m_s
  std::vector<Index> top_support;    ///< support attaining L_s

  double gamma_s() const { return L_s / m_s; }
};

/// C(p, s) as a double (saturates rather than overflowing).
double binomial(long p, long s);

/// Enumerates all size-s supports in lexicographic order. Throws
/// BudgetExceeded when C(p, s) > budget.
RipReport restricted_extremes_exact(const DesignMatrix& design, long s,
                                    double budget = kDefaultEnumerationBudget);

/// Uniformly sampled supports; delta_s is a lower bound on the exact value.
RipReport restricted_extremes_sampled(const DesignMatrix& design, long s, long trials, std::uint64_t seed);

struct ContractionReport {
  bool holds = false;             ///< worst_lambda_max <= delta_claim
  double worst_lambda_max = 0.0;  ///< max over |S| = s_check of the spectral radius of Phi_SS
  RipReport audit;                ///< exact audit at s_check
  /// audited delta_s <= delta_claim / 2 implies worst_lambda_max <= delta_claim
  bool lemma_implication_ok = true;
};

/// Spectral radius of Phi_SS = (X^T X)_SS / ||X||^2_{2,inf} - I over all
/// |S| = s_check (smaller supports are covered by eigenvalue interlacing).
ContractionReport contraction_check(const DesignMatrix& design, long s_check, double delta_claim,
                                    double budget = kDefaultEnumerationBudget);

/// "s,L_s,m_s,delta_s,gamma_s,method,supports_examined,worst_support".
void write_rip_csv_header(std::ostream& out);
void write_rip_csv_row(std::ostream& out, const RipReport& report);
void write_rip_summary(std::ostream& out, const RipReport& report);

}  // namespace adaiht
