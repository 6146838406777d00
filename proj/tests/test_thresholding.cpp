#include "adaiht/random.hpp"
#include "adaiht/thresholding.hpp"

#include <doctest.h>

#include <random>

using namespace adaiht;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

VectorXd random_vector(CounterRng& rng, Eigen::Index p) {
  std::normal_distribution<double> normal;
  VectorXd u(p);
  for (Eigen::Index j = 0; j < p; ++j) u(j) = normal(rng);
  return u;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("hard threshold keeps boundary ties") {
  CHECK(hard_threshold(vec({3, 1, -2.5}), 2.0) == vec({3, 0, -2.5}));
  CHECK(hard_threshold(vec({2, -2, 1.999}), 2.0) == vec({2, -2, 0}));
  const VectorXd u = vec({0.1, -7, 0, 3});
  CHECK(hard_threshold(u, 0.0) == u);
}

TEST_CASE("hard threshold works for float vectors too") {
  Eigen::VectorXf u(3);
  u << 1.5f, -0.5f, 2.0f;
  Eigen::VectorXf expected(3);
  expected << 1.5f, 0.0f, 2.0f;
  CHECK(hard_threshold(u, 1.0f) == expected);
}

TEST_CASE("hard threshold properties on random inputs") {
  CounterRng rng(11);
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const VectorXd u = random_vector(rng, 30);
    const double l = lam(rng);
    const VectorXd t = hard_threshold(u, l);
    CHECK(hard_threshold(t, l) == t);
    for (Eigen::Index j = 0; j < u.size(); ++j) CHECK((t(j) != 0.0) == (std::abs(u(j)) >= l));
  }
}

TEST_CASE("top-s threshold") {
  CHECK(top_s_threshold(vec({3, 1, -2.5}), 2) == vec({3, 0, -2.5}));
  CHECK(top_s_threshold(vec({2, -2}), 1) == vec({2, 0}));
  CHECK(top_s_threshold(vec({0, 0, 0, 5}), 3) == vec({0, 0, 0, 5}));
  CHECK_THROWS_AS(top_s_threshold(vec({1, 2}), 0), DomainError);
  CHECK_THROWS_AS(top_s_threshold(vec({1, 2}), 3), DomainError);
}

TEST_CASE("top-s keeps a maximum-energy subset (brute force, p <= 12)") {
  CounterRng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index p = 6 + trial % 7;
    const long s = 1 + trial % 4;
    const VectorXd u = random_vector(rng, p);
    const VectorXd t = top_s_threshold(u, s);
    CHECK((t.array() != 0.0).count() <= s);
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
      if (__builtin_popcount(mask) != s) continue;
      double e = 0.0;
      for (Eigen::Index j = 0; j < p; ++j)
        if (mask & (1u << j)) e += u(j) * u(j);
      best = std::max(best, e);
    }
    CHECK(t.squaredNorm() == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(vec({3, -0.5, -3}), 1.0) == vec({2, 0, -2}));
}

TEST_CASE("schedule values") {
  const ThresholdSchedule fixed{8.0, 1.0, 0.25, FloorMode::fixed_floor};
  CHECK(fixed.value(0) == 8.0);
  CHECK(fixed.value(1) == 4.0);
  CHECK(fixed.value(2) == 2.0);
  CHECK(fixed.value(3) == 1.0);
  CHECK(fixed.value(4) == 1.0);
  const ThresholdSchedule floor_first{1.0, 5.0, 0.5, FloorMode::fixed_floor};
  CHECK(floor_first.value(0) == 5.0);

  // kappa^{m/2} lambda0 = 3 at m = 0
  const ThresholdSchedule adaptive{3.0, 0.0, 0.5, FloorMode::adaptive_floor};
  CHECK(adaptive.value(0, 4.0) == 4.0);
  CHECK_THROWS_AS(adaptive.value(1), DomainError);
}

TEST_CASE("schedule is nonincreasing and settles on the floor") {
  for (double kappa : {0.1, 0.25, 0.5, 0.9}) {
    const ThresholdSchedule sch{37.0, 0.7, kappa, FloorMode::fixed_floor};
    const double settle = 2 * std::log(sch.lambda0 / sch.lambda_inf) / std::log(1 / kappa);
    for (long m = 1; m < 200; ++m) {
      CHECK(sch.value(m) <= sch.value(m - 1));
      if (m >= settle) CHECK(sch.value(m) == sch.lambda_inf);
    }
  }
}

TEST_CASE("closed-form thresholds match independently computed values") {
  // Reference values evaluated in 30-digit arithmetic.
  const VectorXd zeros = VectorXd::Zero(100);
  CHECK(rel(initial_threshold_oracle(zeros, 4, 1.0, 10.0, 100), 1.29905747753795724790) < 1e-12);
  VectorXd ones = VectorXd::Zero(10);
  ones.head(4).setOnes();
  CHECK(rel(initial_threshold_oracle(ones, 4, 0.0, 10.0, 10), std::sqrt(10.0)) < 1e-12);

  CHECK(universal_threshold(3, 0.0, 20.0, 100) == 0.0);
  CHECK(rel(universal_threshold(7, 1.0, 20.0, 7), 0.31622776601683793320) < 1e-12);
  CHECK(rel(universal_threshold(10, 2.0, 20.0, 1000), 1.49735369048038765209) < 1e-12);

  CHECK(rel(adaptive_initial_threshold(zeros, 1.0, 10.0, 100), 2.99470738096077530419) < 1e-12);
  VectorXd five = VectorXd::Zero(10);
  five(3) = -5.0;
  five(7) = 1.0;
  CHECK(rel(adaptive_initial_threshold(five, 0.0, 10.0, 10), 22.3606797749978969641) < 1e-12);

  CHECK_THROWS_AS(initial_threshold_oracle(zeros, 0, 1.0, 10.0, 100), DomainError);
  CHECK_THROWS_AS(universal_threshold(0, 1.0, 10.0, 100), DomainError);
}

TEST_CASE("adaptive initial threshold dominates the oracle one when sigma_hat >= sigma") {
  CounterRng rng(77);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index p = 50;
    const long s = 1 + trial % 15;
    const VectorXd M = random_vector(rng, p) * unif(rng);
    const double sigma = unif(rng);
    const double sigma_hat = sigma + unif(rng);
    const double norm = 5.0 + unif(rng);
    CHECK(adaptive_initial_threshold(M, sigma_hat, norm, p) >= initial_threshold_oracle(M, s, sigma, norm, p));
  }
}
