#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace adaiht {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sparse signal with an explicit support and a magnitude floor `a`.
///
/// Entries are kept sorted by index. Stored zeros are rejected, and when
/// `magnitude_floor() > 0` every stored value satisfies |v| >= a, so a
/// SparseVector with floor a and nnz <= s is a member of Omega_{s,a}.
class SparseVector {
 public:
  using Entry = std::pair<Index, double>;

  SparseVector() = default;
  SparseVector(Index dim, std::vector<Entry> entries, double magnitude_floor = 0.0);

  /// Collects the nonzero coordinates of `dense`; floor is left at 0.
  static SparseVector from_dense(const Vector& dense);

  Index dim() const { return dim_; }
  Index nnz() const { return static_cast<Index>(entries_.size()); }
  double magnitude_floor() const { return magnitude_floor_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::vector<Index> support() const;
  Vector to_dense() const;
  double min_abs() const;

  /// True iff nnz <= s and every entry has |v| >= a.
  bool in_omega(Index s, double a) const;

 private:
  Index dim_ = 0;
  std::vector<Entry> entries_;
  double magnitude_floor_ = 0.0;
};

/// Dense n x p design with cached column norms and ||X||_{2,inf}.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  explicit DesignMatrix(Matrix values, bool normalized = false);

  Index n() const { return values_.rows(); }
  Index p() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  const Vector& col_norms() const { return col_norms_; }
  double max_col_norm() const { return max_col_norm_; }
  double max_col_norm_sq() const { return max_col_norm_ * max_col_norm_; }
  bool normalized() const { return normalized_; }

 private:
  Matrix values_;
  Vector col_norms_;
  double max_col_norm_ = 0.0;
  bool normalized_ = false;
};

using DesignPtr = std::shared_ptr<const DesignMatrix>;

enum class DesignKind { gaussian, rademacher, identity_scaled, from_file, near_orthogonal };
enum class MagnitudeKind { flat_a, uniform, spiked };
enum class NoiseKind { gaussian, rademacher };

DesignKind parse_design_kind(const std::string& name);
MagnitudeKind parse_magnitude_kind(const std::string& name);
NoiseKind parse_noise_kind(const std::string& name);
const char* to_string(DesignKind kind);
const char* to_string(MagnitudeKind kind);
const char* to_string(NoiseKind kind);

/// Draws an n x p design. Columns are rescaled to norm sqrt(n) when
/// `normalize` is set. `identity_scaled` requires n == p and returns sqrt(n) I.
/// `near_orthogonal` orthonormalizes a Gaussian draw, scales it by sqrt(n) and
/// adds `perturbation` times fresh Gaussian entries (so it needs n >= p).
/// `from_file` reads `path` (see read_design_csv).
DesignMatrix generate_design(DesignKind kind, Index n, Index p, bool normalize, std::uint64_t seed,
                             const std::string& path = {}, double perturbation = 0.0);

/// CSV with a header line "n,p" followed by n rows of p comma separated values.
DesignMatrix read_design_csv(std::istream& in);
DesignMatrix read_design_csv(const std::string& path);
void write_design_csv(const DesignMatrix& design, std::ostream& out);
void write_design_csv(const DesignMatrix& design, const std::string& path);

/// Exactly s nonzeros on a uniform random support with random signs.
SparseVector sample_signal(Index p, Index s, double a, MagnitudeKind kind, std::uint64_t seed);

/// y = X beta + sigma xi.
struct RegressionInstance {
  DesignPtr design;
  SparseVector beta_true;
  double sigma = 0.0;
  Vector noise;
  Vector y;

  const DesignMatrix& X() const { return *design; }
};

/// Recomputes X beta + sigma xi along the same arithmetic path as synthesis.
Vector assemble_response(const DesignMatrix& design, const SparseVector& beta, double sigma,
                         const Vector& noise);

RegressionInstance synthesize_instance(DesignPtr design, SparseVector beta, double sigma,
                                       NoiseKind noise_kind, std::uint64_t seed);

/// M = X^T y / ||X||^2_{2,inf}.
Vector compute_M(const DesignMatrix& design, const Vector& y);
Vector compute_M(const RegressionInstance& instance);

struct EffectiveNoise {
  Vector xi_eff;  ///< sigma X^T xi / ||X||^2_{2,inf}
};

EffectiveNoise effective_noise(const RegressionInstance& instance);

struct EventOResult {
  bool holds = false;
  double statistic = 0.0;  ///< sum of the s largest squared |Xi|
  double bound = 0.0;      ///< 10 sigma^2 s log(ep/s) / ||X||^2_{2,inf}
};

/// Top-s order-statistic event on the effective noise. Throws DomainError
/// unless 1 <= s <= p.
EventOResult event_O_holds(const Vector& xi_eff, Index s, double sigma, double max_col_norm);

}  // namespace adaiht
