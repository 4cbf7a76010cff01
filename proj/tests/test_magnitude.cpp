#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "epcap/error.hpp"
#include "epcap/magnitude.hpp"
#include "oracles.hpp"

namespace epcap {
namespace {

const std::vector<double> kP{1.0, 2.0};
const std::vector<double> kX{4.0, 1.0};

TEST(Bisection, ReturnsLowerEndOfNarrowBracket) {
  const double truth = 0.7318;
  const FeasibilityOracle oracle = [&](double m) { return m <= truth; };
  const auto r = max_magnitude_search(oracle, 2.0, 1e-6);
  EXPECT_LE(r.magnitude, truth);
  EXPECT_GT(r.magnitude + 1e-6, truth);
  EXPECT_LT(r.upper_bound - r.magnitude, 1e-6);
  EXPECT_TRUE(oracle(r.magnitude));
  EXPECT_FALSE(oracle(r.upper_bound));
}

TEST(Bisection, FeasibleUpperIsReturned) {
  const FeasibilityOracle always = [](double) { return true; };
  EXPECT_EQ(max_magnitude(always, 3.0, 1e-6), 3.0);
}

TEST(Bisection, StepCountIsBounded) {
  int calls = 0;
  const FeasibilityOracle oracle = [&](double m) {
    ++calls;
    return m < 1.0;
  };
  (void)max_magnitude(oracle, 2.0, 1e-300);
  EXPECT_LE(calls, kMaxBisectionSteps + 2);
}

TEST(Bisection, BrokenOracleIsReported) {
  const FeasibilityOracle never = [](double) { return false; };
  EXPECT_THROW(max_magnitude(never, 1.0, 1e-3), ContradictionError);
  EXPECT_THROW(max_magnitude(never, 1.0, 0.0), DomainError);
}

TEST(MaxMagnitude, AnalyticSingleDevicePulse) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pd(0.1, 5.0), xd(0.1, 10.0), dd(0.1, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> p{pd(rng)}, x{xd(rng)};
    const double d = dd(rng);
    const double expect = std::min(p[0], p[0] * x[0] / d);
    EXPECT_NEAR(max_magnitude_ep(pulse(d, 1.0), p, x), expect, 1e-6 * p[0]);
  }
  const std::vector<double> p{2.0}, x{3.0};
  EXPECT_NEAR(max_magnitude_ep(pulse(4.0, 1.0), p, x), 1.5, 2e-6);
}

TEST(MaxMagnitude, FleetAPulse) {
  EXPECT_NEAR(max_magnitude_ep(pulse(4.0, 1.0), kP, kX), 1.5, 3e-6);
}

TEST(MaxMagnitude, PowerLimitedTrapezoid) {
  const std::vector<double> p{2.0}, x{3.0};
  EXPECT_DOUBLE_EQ(max_magnitude_ep(trapezoid(3.0, 1.0), p, x), 2.0);
}

TEST(MaxMagnitude, ResultIsFeasibleAndTolAboveIsNot) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dd(0.2, 6.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = oracle::random_fleet(rng, 8);
    const auto shape = trial % 2 ? pulse(dd(rng), 1.0) : trapezoid(dd(rng), 1.0);
    auto cap = capacity_curve(f.p_max, f.x);
    const double upper = magnitude_upper_bound(cap.support_end(), shape);
    if (upper <= 0.0) continue;
    const double tol = 1e-6 * upper;
    const auto oracle = make_ep_oracle(ep_transform(shape), cap);
    const double m = max_magnitude(oracle, upper, tol);
    EXPECT_TRUE(oracle(m));
    if (m < upper) EXPECT_FALSE(oracle(m + tol));
  }
}

TEST(MaxMagnitude, NonIncreasingInDuration) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = oracle::random_fleet(rng, 8);
    double prev_pulse = 1e300, prev_trap = 1e300;
    for (double d = 0.25; d <= 8.0; d += 0.25) {
      const double mp = max_magnitude_ep(pulse(d, 1.0), f.p_max, f.x, 1e-9);
      const double mt = max_magnitude_ep(trapezoid(d, 1.0), f.p_max, f.x, 1e-9);
      const double slack = 2e-9 * 40.0;
      EXPECT_LE(mp, prev_pulse + slack);
      EXPECT_LE(mt, prev_trap + slack);
      prev_pulse = mp;
      prev_trap = mt;
    }
  }
}

TEST(MaxMagnitude, EpAndSimulationAgree) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> dd(0.5, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = oracle::random_fleet(rng, 8);
    // Whole-minute durations keep the discretized profile exact for pulses.
    const double d = std::round(dd(rng) * 60.0) / 60.0;
    const auto shape = trial % 2 ? pulse(d, 1.0) : trapezoid(d, 1.0);
    const double ep = max_magnitude_ep(shape, f.p_max, f.x);
    const double sim = max_magnitude_simulated(shape, f.p_max, f.x);
    const double upper = magnitude_upper_bound(std::accumulate(f.p_max.begin(), f.p_max.end(), 0.0), shape);
    EXPECT_NEAR(sim, ep, std::max(1e-6 * upper, 1e-3 * ep)) << "trial " << trial;
  }
}

TEST(MaxMagnitude, ZeroShapeOrEmptyStateGivesZero) {
  EXPECT_EQ(max_magnitude_ep(pulse(1.0, 0.0), kP, kX), 0.0);
  EXPECT_EQ(max_magnitude_ep(pulse(1.0, 1.0), kP, std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_EQ(max_magnitude_simulated(pulse(1.0, 1.0), kP, std::vector<double>{0.0, 0.0}), 0.0);
}

}  // namespace
}  // namespace epcap
