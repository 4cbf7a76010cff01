#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "epcap/epcurve.hpp"
#include "epcap/error.hpp"
#include "epcap/fleet.hpp"

namespace epcap {
namespace {

Fleet fleet_a() { return Fleet({{"a", 1.0, 4.0}, {"b", 2.0, 2.0}}); }

TEST(Fleet, TimeToGoIsEnergyOverPower) {
  EXPECT_EQ(time_to_go(Fleet({{"d", 2.0, 6.0}})), StateVector{3.0});
  EXPECT_EQ(time_to_go(Fleet({{"d", 1.0, 0.0}})), StateVector{0.0});
  EXPECT_EQ(time_to_go(fleet_a()), (StateVector{4.0, 1.0}));
}

TEST(Fleet, TimeToGoRejectsEmptyFleet) {
  EXPECT_THROW(time_to_go(Fleet{}), EmptyInputError);
}

TEST(Fleet, ConstructionRejectsBadDevices) {
  EXPECT_THROW(Fleet({{"z", 0.0, 1.0}}), DomainError);
  EXPECT_THROW(Fleet({{"z", -1.0, 1.0}}), DomainError);
  EXPECT_THROW(Fleet({{"z", 1.0, -0.5}}), DomainError);
  EXPECT_THROW(Fleet({{"z", 1.0, 1.0}, {"z", 2.0, 1.0}}), DomainError);
}

TEST(Fleet, Totals) {
  EXPECT_DOUBLE_EQ(total_power(fleet_a()), 3.0);
  EXPECT_DOUBLE_EQ(total_energy(fleet_a()), 6.0);
  EXPECT_EQ(total_power(Fleet{}), 0.0);
  EXPECT_EQ(total_energy(Fleet{}), 0.0);
}

TEST(Fleet, ApplyAvailability) {
  const StateVector x{4.0, 1.0};
  EXPECT_EQ(apply_availability(x, AvailabilityVector{1, 1}), (StateVector{4.0, 1.0}));
  EXPECT_EQ(apply_availability(x, AvailabilityVector{0, 1}), (StateVector{0.0, 1.0}));
  EXPECT_EQ(apply_availability(x, AvailabilityVector{0, 0}), (StateVector{0.0, 0.0}));
  EXPECT_THROW(apply_availability(x, AvailabilityVector{1}), DimensionError);
}

TEST(Fleet, MaskingIsIdempotentAndPermutationCovariant) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xd(0.0, 10.0);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 9;
    StateVector x(n);
    AvailabilityVector a(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = xd(rng);
      a[i] = coin(rng);
    }
    const auto once = apply_availability(x, a);
    EXPECT_EQ(apply_availability(once, a), once);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    StateVector xp(n);
    AvailabilityVector ap(n);
    for (std::size_t i = 0; i < n; ++i) {
      xp[i] = x[perm[i]];
      ap[i] = a[perm[i]];
    }
    const auto permuted = apply_availability(xp, ap);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(permuted[i], once[perm[i]]);
  }
}

TEST(Fleet, TimeToGoRecoversEnergy) {
  std::mt19937_64 rng(11);
  std::lognormal_distribution<double> ln(1.0, 1.0);
  std::vector<Device> devs;
  for (int i = 0; i < 500; ++i) devs.push_back({std::to_string(i), ln(rng), ln(rng)});
  const Fleet f(devs);
  const auto x = time_to_go(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(x[i] * f[i].p_max, f[i].energy, 1e-12 * f[i].energy);
  }
}

TEST(Fleet, MaskedCapacityNeverExceedsFullCapacity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pd(0.1, 5.0), xd(0.0, 10.0);
  std::bernoulli_distribution coin(0.6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 12;
    std::vector<double> p(n);
    StateVector x(n);
    AvailabilityVector a(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = pd(rng);
      x[i] = xd(rng);
      a[i] = coin(rng);
    }
    const auto full = capacity_curve(p, x);
    const auto masked = capacity_curve(p, apply_availability(x, a));
    auto pts = full.breakpoints();
    const auto more = masked.breakpoints();
    pts.insert(pts.end(), more.begin(), more.end());
    for (double pt : pts) EXPECT_LE(masked(pt), full(pt) + 1e-9);
  }
}

TEST(FleetCsv, ReadsAndWrites) {
  std::istringstream in("id,p_max_kw,energy_kwh\na,1,4\nb,2,2\n");
  const auto f = read_fleet_csv(in);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[1].id, "b");
  EXPECT_EQ(f[1].p_max, 2.0);

  std::ostringstream out;
  write_fleet_csv(out, f);
  std::istringstream back(out.str());
  const auto g = read_fleet_csv(back);
  EXPECT_EQ(g[0].energy, 4.0);
  EXPECT_EQ(g[1].id, "b");
}

TEST(FleetCsv, ErrorsNameLineAndField) {
  auto where = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_fleet_csv(in);
    } catch (const ParseError& e) {
      return e.where();
    }
    return std::string("no error");
  };
  EXPECT_EQ(where("id,power,energy\n"), "line 1");
  EXPECT_EQ(where("id,p_max_kw,energy_kwh\na,1,4\nb,x,2\n"), "line 3, field p_max_kw");
  EXPECT_EQ(where("id,p_max_kw,energy_kwh\na,1,4\nb,0,2\n"), "line 3, field p_max_kw");
  EXPECT_EQ(where("id,p_max_kw,energy_kwh\na,1,-4\n"), "line 2, field energy_kwh");
  EXPECT_EQ(where("id,p_max_kw,energy_kwh\na,1\n"), "line 2");
  EXPECT_EQ(where(""), "line 1");
}

}  // namespace
}  // namespace epcap
