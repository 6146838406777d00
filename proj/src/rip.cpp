#include "adaiht/rip.hpp"

#include "adaiht/errors.hpp"
#include "adaiht/random.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

namespace adaiht {

const char* to_string(AuditMethod method) { return method == AuditMethod::exact ? "exact" : "sampled"; }

double binomial(long p, long s) {
  if (s < 0 || s > p) return 0.0;
  s = std::min(s, p - s);
  double c = 1.0;
  for (long k = 1; k <= s; ++k) c = c * static_cast<double>(p - s + k) / static_cast<double>(k);
  return std::round(c);
}

namespace {

void require_audit_size(const DesignMatrix& design, long s) {
  if (s < 1 || s > design.p()) throw DomainError("rip audit: need 1 <= s <= p");
}

/// Running extremes over examined supports.
class ExtremeTracker {
 public:
  ExtremeTracker(const Matrix& gram, long s) : gram_(gram), block_(s, s), solver_(s) {}

  void examine(const std::vector<Index>& support) {
    const auto s = static_cast<Index>(support.size());
    for (Index a = 0; a < s; ++a)
      for (Index b = 0; b <= a; ++b) block_(a, b) = gram_(support[a], support[b]);
    solver_.compute(block_, Eigen::EigenvaluesOnly);
    const auto& ev = solver_.eigenvalues();
    if (count_ == 0 || ev(s - 1) > report.L_s) {
      report.L_s = ev(s - 1);
      report.top_support = support;
    }
    if (count_ == 0 || ev(0) < report.m_s) {
      report.m_s = ev(0);
      report.worst_support = support;
    }
    ++count_;
  }

  RipReport finish(long s, AuditMethod method) {
    report.s = s;
    report.method = method;
    report.supports_examined = count_;
    report.delta_s = report.L_s > 0 ? 1.0 - report.m_s / report.L_s : 0.0;
    return report;
  }

  RipReport report;

 private:
  const Matrix& gram_;
  Matrix block_;
  Eigen::SelfAdjointEigenSolver<Matrix> solver_;
  std::uint64_t count_ = 0;
};

/// Advances `c` to the next combination of {0..p-1} in lexicographic order.
bool next_combination(std::vector<Index>& c, Index p) {
  const auto k = static_cast<Index>(c.size());
  Index i = k - 1;
  while (i >= 0 && c[i] == p - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (Index j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

template <typename Visit>
void for_each_support(Index p, long s, Visit&& visit) {
  std::vector<Index> c(static_cast<std::size_t>(s));
  std::iota(c.begin(), c.end(), Index{0});
  do {
    visit(c);
  } while (next_combination(c, p));
}

void check_budget(const DesignMatrix& design, long s, double budget) {
  const double count = binomial(design.p(), s);
  if (count > budget) {
    throw BudgetExceeded("exact audit needs C(" + std::to_string(design.p()) + "," + std::to_string(s) +
                         ") supports, above the budget; use the sampled audit");
  }
}

}  // namespace

RipReport restricted_extremes_exact(const DesignMatrix& design, long s, double budget) {
  require_audit_size(design, s);
  check_budget(design, s, budget);
  const Matrix gram = design.values().transpose() * design.values();
  ExtremeTracker tracker(gram, s);
  for_each_support(design.p(), s, [&](const std::vector<Index>& S) { tracker.examine(S); });
  return tracker.finish(s, AuditMethod::exact);
}

RipReport restricted_extremes_sampled(const DesignMatrix& design, long s, long trials, std::uint64_t seed) {
  require_audit_size(design, s);
  if (trials < 1) throw DomainError("sampled audit: trials must be >= 1");
  CounterRng rng(seed);
  const Matrix gram = design.values().transpose() * design.values();
  ExtremeTracker tracker(gram, s);
  std::vector<Index> perm(static_cast<std::size_t>(design.p()));
  std::vector<Index> S(static_cast<std::size_t>(s));
  for (long t = 0; t < trials; ++t) {
    std::iota(perm.begin(), perm.end(), Index{0});
    for (long k = 0; k < s; ++k) {
      std::uniform_int_distribution<Index> pick(k, design.p() - 1);
      std::swap(perm[k], perm[pick(rng)]);
    }
    std::copy(perm.begin(), perm.begin() + s, S.begin());
    std::sort(S.begin(), S.end());
    tracker.examine(S);
  }
  return tracker.finish(s, AuditMethod::sampled);
}

ContractionReport contraction_check(const DesignMatrix& design, long s_check, double delta_claim,
                                    double budget) {
  ContractionReport out;
  out.audit = restricted_extremes_exact(design, s_check, budget);
  // Phi_SS eigenvalues are those of the Gram block shifted and scaled, so the
  // extremes over all supports come straight from the audit.
  const double norm_sq = design.max_col_norm_sq();
  out.worst_lambda_max = std::max(std::abs(out.audit.L_s / norm_sq - 1.0),
                                  std::abs(out.audit.m_s / norm_sq - 1.0));
  out.holds = out.worst_lambda_max <= delta_claim;
  if (out.audit.delta_s <= delta_claim / 2 && delta_claim <= 1.0) {
    out.lemma_implication_ok = out.holds;
  }
  return out;
}

void write_rip_csv_header(std::ostream& out) {
  out << "s,L_s,m_s,delta_s,gamma_s,method,supports_examined,worst_support\n";
}

void write_rip_csv_row(std::ostream& out, const RipReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%s,%llu,", r.s, r.L_s, r.m_s, r.delta_s,
                r.gamma_s(), to_string(r.method), static_cast<unsigned long long>(r.supports_examined));
  out << buf;
  for (std::size_t k = 0; k < r.worst_support.size(); ++k) out << (k ? " " : "") << r.worst_support[k];
  out << '\n';
}

void write_rip_summary(std::ostream& out, const RipReport& r) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "s=%ld  L_s=%.6g  m_s=%.6g  delta_s=%.6g  gamma_s=%.6g  (%s, %llu supports)\n",
                r.s, r.L_s, r.m_s, r.delta_s, r.gamma_s(), to_string(r.method),
                static_cast<unsigned long long>(r.supports_examined));
  out << buf;
}

}  // namespace adaiht
