#include "adaiht/model.hpp"

#include "adaiht/errors.hpp"
#include "adaiht/random.hpp"
#include "adaiht/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace adaiht {

SparseVector::SparseVector(Index dim, std::vector<Entry> entries, double magnitude_floor)
    : dim_(dim), entries_(std::move(entries)), magnitude_floor_(magnitude_floor) {
  if (dim_ < 1) throw DomainError("SparseVector: dim must be positive");
  if (magnitude_floor_ < 0) throw DomainError("SparseVector: magnitude floor must be >= 0");
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto [i, v] = entries_[k];
    if (i < 0 || i >= dim_) throw DomainError("SparseVector: index out of range");
    if (k > 0 && entries_[k - 1].first == i) throw DomainError("SparseVector: duplicate index");
    if (v == 0.0) throw DomainError("SparseVector: stored zero");
    if (magnitude_floor_ > 0 && std::abs(v) < magnitude_floor_) {
      throw DomainError("SparseVector: entry below magnitude floor");
    }
  }
}

SparseVector SparseVector::from_dense(const Vector& dense) {
  std::vector<Entry> entries;
  for (Index j = 0; j < dense.size(); ++j) {
    if (dense(j) != 0.0) entries.emplace_back(j, dense(j));
  }
  return SparseVector(dense.size(), std::move(entries));
}

std::vector<Index> SparseVector::support() const {
  std::vector<Index> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

Vector SparseVector::to_dense() const {
  Vector out = Vector::Zero(dim_);
  for (const auto& [i, v] : entries_) out(i) = v;
  return out;
}

double SparseVector::min_abs() const {
  double m = 0.0;
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const double a = std::abs(entries_[k].second);
    m = k == 0 ? a : std::min(m, a);
  }
  return m;
}

bool SparseVector::in_omega(Index s, double a) const {
  if (nnz() > s) return false;
  return std::all_of(entries_.begin(), entries_.end(),
                     [a](const Entry& e) { return std::abs(e.second) >= a; });
}

DesignMatrix::DesignMatrix(Matrix values, bool normalized)
    : values_(std::move(values)), normalized_(normalized) {
  if (values_.rows() < 1 || values_.cols() < 1) throw DomainError("DesignMatrix: empty matrix");
  col_norms_ = values_.colwise().norm().transpose();
  max_col_norm_ = col_norms_.maxCoeff();
}

namespace {

template <typename Enum>
struct NamedValue {
  const char* name;
  Enum value;
};

constexpr NamedValue<DesignKind> kDesignNames[] = {
    {"gaussian", DesignKind::gaussian},
    {"rademacher", DesignKind::rademacher},
    {"identity_scaled", DesignKind::identity_scaled},
    {"from_file", DesignKind::from_file},
    {"near_orthogonal", DesignKind::near_orthogonal},
};
constexpr NamedValue<MagnitudeKind> kMagnitudeNames[] = {
    {"flat_a", MagnitudeKind::flat_a},
    {"uniform", MagnitudeKind::uniform},
    {"spiked", MagnitudeKind::spiked},
};
constexpr NamedValue<NoiseKind> kNoiseNames[] = {
    {"gaussian", NoiseKind::gaussian},
    {"rademacher", NoiseKind::rademacher},
};

template <typename Enum, std::size_t N>
Enum lookup(const NamedValue<Enum> (&table)[N], const std::string& name, const char* what) {
  for (const auto& e : table) {
    if (name == e.name) return e.value;
  }
  throw ParseError(std::string("unknown ") + what + " '" + name + "'");
}

template <typename Enum, std::size_t N>
const char* name_of(const NamedValue<Enum> (&table)[N], Enum value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

Matrix draw_entries(Index n, Index p, bool rademacher, CounterRng rng) {
  Matrix X(n, p);
  if (rademacher) {
    for (Index j = 0; j < p; ++j)
      for (Index i = 0; i < n; ++i) X(i, j) = (rng() >> 63) ? 1.0 : -1.0;
  } else {
    std::normal_distribution<double> normal;
    for (Index j = 0; j < p; ++j)
      for (Index i = 0; i < n; ++i) X(i, j) = normal(rng);
  }
  return X;
}

void normalize_columns(Matrix& X) {
  const double target = std::sqrt(static_cast<double>(X.rows()));
  for (Index j = 0; j < X.cols(); ++j) {
    const double norm = X.col(j).norm();
    if (norm > 0) X.col(j) *= target / norm;
  }
}

}  // namespace

DesignKind parse_design_kind(const std::string& name) { return lookup(kDesignNames, name, "design kind"); }
MagnitudeKind parse_magnitude_kind(const std::string& name) {
  return lookup(kMagnitudeNames, name, "magnitude kind");
}
NoiseKind parse_noise_kind(const std::string& name) { return lookup(kNoiseNames, name, "noise kind"); }
const char* to_string(DesignKind kind) { return name_of(kDesignNames, kind); }
const char* to_string(MagnitudeKind kind) { return name_of(kMagnitudeNames, kind); }
const char* to_string(NoiseKind kind) { return name_of(kNoiseNames, kind); }

DesignMatrix generate_design(DesignKind kind, Index n, Index p, bool normalize, std::uint64_t seed,
                             const std::string& path, double perturbation) {
  if (kind == DesignKind::from_file) {
    DesignMatrix loaded = read_design_csv(path);
    if (!normalize) return loaded;
    Matrix X = loaded.values();
    normalize_columns(X);
    return DesignMatrix(std::move(X), true);
  }
  if (n < 1 || p < 1) throw DomainError("generate_design: n and p must be >= 1");
  CounterRng rng(seed);
  Matrix X;
  switch (kind) {
    case DesignKind::gaussian:
      X = draw_entries(n, p, false, rng);
      break;
    case DesignKind::rademacher:
      X = draw_entries(n, p, true, rng);
      break;
    case DesignKind::identity_scaled:
      if (n != p) throw DimensionError("identity_scaled design requires n == p");
      return DesignMatrix(std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, p), true);
    case DesignKind::near_orthogonal: {
      if (n < p) throw DimensionError("near_orthogonal design requires n >= p");
      Eigen::HouseholderQR<Matrix> qr(draw_entries(n, p, false, rng.fork(1)));
      X = qr.householderQ() * Matrix::Identity(n, p);
      X *= std::sqrt(static_cast<double>(n));
      if (perturbation != 0.0) X += perturbation * draw_entries(n, p, false, rng.fork(2));
      break;
    }
    case DesignKind::from_file:
      break;
  }
  if (normalize) normalize_columns(X);
  return DesignMatrix(std::move(X), normalize);
}

DesignMatrix read_design_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("design csv: missing header");
  long n = 0, p = 0;
  char comma = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> comma >> p) || comma != ',' || n < 1 || p < 1) {
      throw ParseError("design csv: header must be 'n,p' with positive integers");
    }
  }
  Matrix X(n, p);
  for (long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("design csv: expected " + std::to_string(n) + " rows");
    std::istringstream rs(line);
    std::string cell;
    long j = 0;
    while (std::getline(rs, cell, ',')) {
      if (j >= p) throw ParseError("design csv: too many columns in row " + std::to_string(i));
      std::size_t used = 0;
      try {
        X(i, j) = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ParseError("design csv: bad number '" + cell + "' in row " + std::to_string(i));
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw ParseError("design csv: bad number '" + cell + "'");
      ++j;
    }
    if (j != p) throw ParseError("design csv: row " + std::to_string(i) + " has wrong column count");
  }
  const double target = std::sqrt(static_cast<double>(n));
  const Vector norms = X.colwise().norm().transpose();
  const bool normalized = ((norms.array() - target).abs() <= 1e-9 * target).all();
  return DesignMatrix(std::move(X), normalized);
}

DesignMatrix read_design_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open design file '" + path + "'");
  return read_design_csv(in);
}

void write_design_csv(const DesignMatrix& design, std::ostream& out) {
  out << design.n() << ',' << design.p() << '\n';
  char buf[32];
  for (Index i = 0; i < design.n(); ++i) {
    for (Index j = 0; j < design.p(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", design.values()(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_design_csv(const DesignMatrix& design, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write design file '" + path + "'");
  write_design_csv(design, out);
}

SparseVector sample_signal(Index p, Index s, double a, MagnitudeKind kind, std::uint64_t seed) {
  if (p < 1) throw DomainError("sample_signal: p must be >= 1");
  if (s < 0 || s > p) throw DomainError("sample_signal: need 0 <= s <= p");
  if (a < 0) throw DomainError("sample_signal: a must be >= 0");
  if (s > 0 && a == 0.0) throw DomainError("sample_signal: a must be > 0 for a nonzero signal");
  CounterRng rng(seed);
  // Partial Fisher-Yates for a uniform support.
  std::vector<Index> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index k = 0; k < s; ++k) {
    std::uniform_int_distribution<Index> pick(k, p - 1);
    std::swap(perm[k], perm[pick(rng)]);
  }
  std::uniform_real_distribution<double> unif(a, 2 * a);
  std::vector<SparseVector::Entry> entries;
  entries.reserve(static_cast<std::size_t>(s));
  for (Index k = 0; k < s; ++k) {
    double mag = a;
    if (kind == MagnitudeKind::uniform) mag = unif(rng);
    if (kind == MagnitudeKind::spiked && k == 0) mag = 10 * a;
    const double sign = (rng() >> 63) ? 1.0 : -1.0;
    entries.emplace_back(perm[k], sign * mag);
  }
  return SparseVector(p, std::move(entries), a);
}

Vector assemble_response(const DesignMatrix& design, const SparseVector& beta, double sigma,
                         const Vector& noise) {
  Vector y = sigma * noise;
  for (const auto& [j, v] : beta.entries()) y.noalias() += v * design.values().col(j);
  return y;
}

RegressionInstance synthesize_instance(DesignPtr design, SparseVector beta, double sigma,
                                       NoiseKind noise_kind, std::uint64_t seed) {
  if (!design) throw DomainError("synthesize_instance: null design");
  detail::require_same(beta.dim(), design->p(), "synthesize_instance: beta dim vs p");
  if (sigma < 0) throw DomainError("synthesize_instance: sigma must be >= 0");
  CounterRng rng(seed);
  Vector xi(design->n());
  if (noise_kind == NoiseKind::gaussian) {
    std::normal_distribution<double> normal;
    for (Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
  } else {
    for (Index i = 0; i < xi.size(); ++i) xi(i) = (rng() >> 63) ? 1.0 : -1.0;
  }
  Vector y = assemble_response(*design, beta, sigma, xi);
  return RegressionInstance{std::move(design), std::move(beta), sigma, std::move(xi), std::move(y)};
}

Vector compute_M(const DesignMatrix& design, const Vector& y) {
  detail::require_same(y.size(), design.n(), "compute_M: y length vs n");
  return design.values().transpose() * y / design.max_col_norm_sq();
}

Vector compute_M(const RegressionInstance& instance) { return compute_M(instance.X(), instance.y); }

EffectiveNoise effective_noise(const RegressionInstance& instance) {
  const auto& X = instance.X();
  return {instance.sigma * (X.values().transpose() * instance.noise) / X.max_col_norm_sq()};
}

EventOResult event_O_holds(const Vector& xi_eff, Index s, double sigma, double max_col_norm) {
  detail::require_sparsity(s, xi_eff.size(), "event_O_holds");
  EventOResult r;
  r.statistic = top_s_sum_sq(xi_eff, s);
  r.bound = 10.0 * sigma * sigma * static_cast<double>(s) *
            detail::log_ep_over(static_cast<double>(xi_eff.size()), static_cast<double>(s)) /
            (max_col_norm * max_col_norm);
  r.holds = r.statistic <= r.bound;
  return r;
}

}  // namespace adaiht
