#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "epcap/casegen.hpp"
#include "epcap/error.hpp"

namespace epcap {
namespace {

TEST(LogNormal, MomentMatchingParameters) {
  const LogNormalSpec s{3.3, 1.0};
  // Reference values from an independent evaluation of the same formulas.
  EXPECT_NEAR(s.sigma(), 0.29639968582611786, 1e-14);
  EXPECT_NEAR(s.mu(), 1.149996081593524, 1e-14);
  EXPECT_NEAR(s.sigma(), 0.29642, 5e-5);
  EXPECT_NEAR(s.mu(), 1.14996, 5e-5);
}

TEST(LogNormal, EmpiricalMoments) {
  Rng rng(2);
  for (const LogNormalSpec s : {LogNormalSpec{3.3, 1.0}, LogNormalSpec{40.0, 10.0}}) {
    const int n = 1000000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = s.draw(rng);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    EXPECT_NEAR(mean, s.mean, 0.005 * s.mean);
    EXPECT_NEAR(sd, s.std, 0.02 * s.std);
  }
}

TEST(LogNormal, DegenerateAndInvalid) {
  Rng rng(3);
  EXPECT_EQ((LogNormalSpec{2.0, 0.0}.draw(rng)), 2.0);
  EXPECT_THROW((LogNormalSpec{0.0, 1.0}.validate()), DomainError);
  EXPECT_THROW((LogNormalSpec{1.0, -1.0}.validate()), DomainError);
}

TEST(Generate, FixedGroup) {
  const auto f = generate({{1, ValueSpec::constant(2.0), ValueSpec::constant(6.0), "x"}}, 1);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].p_max, 2.0);
  EXPECT_EQ(f[0].energy, 6.0);
  EXPECT_THROW(generate({{1, ValueSpec::constant(0.0), ValueSpec::constant(1.0), "x"}}, 1),
               DomainError);
  EXPECT_THROW(generate({{1, ValueSpec::lognormal_of(-1.0, 1.0), ValueSpec::constant(1.0), "x"}}, 1),
               DomainError);
}

TEST(Generate, PowerMeanOverManyDraws) {
  const auto f = generate({{100000, ValueSpec::lognormal_of(3.3, 1.0), ValueSpec::constant(1.0), "d"}}, 5);
  const double mean = total_power(f) / static_cast<double>(f.size());
  EXPECT_GE(mean, 3.28);
  EXPECT_LE(mean, 3.32);
}

TEST(CaseStudy, Composition) {
  const auto f = generate_case_study(1);
  ASSERT_EQ(f.size(), 500u);
  std::size_t rapid = 0;
  for (const auto& d : f.devices()) rapid += d.p_max == 50.0;
  EXPECT_EQ(rapid, 50u);
  for (std::size_t i = 450; i < 500; ++i) EXPECT_EQ(f[i].p_max, 50.0);
}

TEST(CaseStudy, DeterministicAndSeedSensitive) {
  const auto a = generate_case_study(42);
  const auto b = generate(case_study_groups(), 42);
  const auto c = generate_case_study(43);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].p_max, b[i].p_max);
    EXPECT_EQ(a[i].energy, b[i].energy);
    EXPECT_EQ(a[i].id, b[i].id);
    differs |= a[i].energy != c[i].energy;
  }
  EXPECT_TRUE(differs);
}

TEST(CaseStudy, ExpectedTotals) {
  double power = 0.0, energy = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto f = generate_case_study(seed);
    power += total_power(f);
    energy += total_energy(f);
  }
  EXPECT_NEAR(power / 100.0, 3985.0, 0.03 * 3985.0);
  EXPECT_NEAR(energy / 100.0, 20000.0, 0.03 * 20000.0);
}

}  // namespace
}  // namespace epcap
