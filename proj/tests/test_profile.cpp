#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "epcap/error.hpp"
#include "epcap/profile.hpp"
#include "oracles.hpp"

namespace epcap {
namespace {

TEST(Profile, PulseShape) {
  const auto p = pulse(4.0, 3.0);
  EXPECT_DOUBLE_EQ(energy(p), 12.0);
  EXPECT_DOUBLE_EQ(peak(p), 3.0);
  EXPECT_EQ(p.value_at(0.0), 3.0);
  EXPECT_EQ(p.value_at(3.999), 3.0);
  EXPECT_EQ(p.value_at(4.0), 0.0);
  EXPECT_EQ(p.value_at(5.0), 0.0);
  EXPECT_EQ(energy(pulse(1.0, 0.0)), 0.0);
  EXPECT_EQ(peak(pulse(1.0, 0.0)), 0.0);
  EXPECT_THROW(pulse(0.0, 1.0), DomainError);
  EXPECT_THROW(pulse(-1.0, 1.0), DomainError);
}

TEST(Profile, TrapezoidShape) {
  const auto p = trapezoid(3.0, 2.0);
  ASSERT_EQ(p.breakpoints().size(), 4u);
  EXPECT_DOUBLE_EQ(p.breakpoints()[1].t, 1.0);
  EXPECT_DOUBLE_EQ(p.breakpoints()[2].t, 2.0);
  EXPECT_DOUBLE_EQ(energy(p), 4.0);
  EXPECT_DOUBLE_EQ(peak(p), 2.0);
  EXPECT_DOUBLE_EQ(p.value_at(0.5), 1.0);
  EXPECT_EQ(energy(trapezoid(3.0, 0.0)), 0.0);
  EXPECT_THROW(trapezoid(0.0, 1.0), DomainError);
}

TEST(Profile, Scale) {
  const auto a = scale(pulse(4.0, 1.0), 3.0);
  const auto b = pulse(4.0, 3.0);
  ASSERT_EQ(a.breakpoints().size(), b.breakpoints().size());
  for (std::size_t i = 0; i < a.breakpoints().size(); ++i) {
    EXPECT_EQ(a.breakpoints()[i].t, b.breakpoints()[i].t);
    EXPECT_EQ(a.breakpoints()[i].p, b.breakpoints()[i].p);
  }
  EXPECT_EQ(energy(scale(trapezoid(2.0, 1.0), 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(peak(scale(trapezoid(2.0, 1.0), 1.66)), 1.66);
  EXPECT_THROW(scale(pulse(1.0, 1.0), -0.1), DomainError);
}

TEST(Profile, ScaleComposesAndScalesEnergy) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> md(0.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto prof = oracle::random_profile(rng, 1 + trial % 12);
    const double a = md(rng), b = md(rng);
    const auto twice = scale(scale(prof, a), b);
    const auto once = scale(prof, a * b);
    for (std::size_t i = 0; i < prof.breakpoints().size(); ++i) {
      EXPECT_NEAR(twice.breakpoints()[i].p, once.breakpoints()[i].p,
                  4e-16 * once.breakpoints()[i].p);
    }
    EXPECT_NEAR(energy(scale(prof, a)), a * energy(prof), 1e-12 * (1.0 + a * energy(prof)));
  }
}

TEST(Profile, RejectsInvalidBreakpoints) {
  EXPECT_THROW(RequestProfile({{0.0, 1.0}, {-1.0, 1.0}}), DomainError);
  EXPECT_THROW(RequestProfile({{1.0, 1.0}, {0.5, 1.0}}), DomainError);
  EXPECT_THROW(RequestProfile({{0.0, -1.0}}), DomainError);
  EXPECT_NO_THROW(RequestProfile(std::vector<Breakpoint>{}));
}

TEST(Profile, DiscretizeAverages) {
  const auto flat = discretize(pulse(1.0, 2.0), 0.5);
  ASSERT_EQ(flat.size(), 2u);
  EXPECT_DOUBLE_EQ(flat[0].power, 2.0);
  EXPECT_DOUBLE_EQ(flat[1].power, 2.0);

  const auto trap = discretize(trapezoid(3.0, 2.0), 1.0);
  ASSERT_EQ(trap.size(), 3u);
  EXPECT_DOUBLE_EQ(trap[0].power, 1.0);
  EXPECT_DOUBLE_EQ(trap[1].power, 2.0);
  EXPECT_DOUBLE_EQ(trap[2].power, 1.0);

  EXPECT_THROW(discretize(pulse(1.0, 1.0), 0.0), DomainError);
  EXPECT_TRUE(discretize(RequestProfile{}, 1.0).empty());
}

TEST(Profile, DiscretizeMinuteGridHasExactCount) {
  EXPECT_EQ(discretize(trapezoid(2.0, 1.0), 1.0 / 60.0).size(), 120u);
  const auto last = discretize(pulse(1.05, 1.0), 0.5);
  ASSERT_EQ(last.size(), 3u);
  EXPECT_NEAR(last[2].duration, 0.05, 1e-15);
}

TEST(Profile, DiscretizePreservesEnergy) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> per(0.01, 1.5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto prof = oracle::random_profile(rng, 1 + trial % 15);
    const auto steps = discretize(prof, per(rng));
    double sum = 0.0;
    for (const auto& s : steps) sum += s.power * s.duration;
    EXPECT_NEAR(sum, energy(prof), 1e-12 * std::max(1.0, energy(prof)));
  }
}

TEST(ProfileJson, RoundTripAndErrors) {
  std::istringstream in(R"({"units":{"time":"h","power":"kW"},"breakpoints":[[0,0],[1,2],[2,2],[3,0]]})");
  const auto p = read_profile_json(in);
  EXPECT_DOUBLE_EQ(energy(p), 4.0);
  std::ostringstream out;
  write_profile_json(out, p);
  std::istringstream back(out.str());
  EXPECT_DOUBLE_EQ(energy(read_profile_json(back)), 4.0);

  auto where = [](const std::string& text) {
    std::istringstream s(text);
    try {
      read_profile_json(s);
    } catch (const ParseError& e) {
      return e.where();
    }
    return std::string("no error");
  };
  EXPECT_EQ(where(R"({"breakpoints":[[0,1],[1,"x"]]})"), "breakpoints[1]");
  EXPECT_EQ(where(R"({"units":{"time":"min"},"breakpoints":[]})"), "units.time");
  EXPECT_EQ(where(R"({"points":[]})"), "breakpoints");
  EXPECT_EQ(where(R"({"breakpoints":[[0,1],[1,-2]]})"), "breakpoints");
  EXPECT_EQ(where("{not json"), where("{not json"));
  EXPECT_NE(where("{not json"), "no error");
}

}  // namespace
}  // namespace epcap
