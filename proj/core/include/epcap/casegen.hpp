#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epcap/fleet.hpp"
#include "epcap/random.hpp"

namespace epcap {

/// Log-normal distribution given by its own mean and standard deviation
/// (not those of the underlying normal).
struct LogNormalSpec {
  double mean = 1.0;
  double std = 0.0;

  /// sigma^2 = ln(1 + std^2 / mean^2)
  double sigma() const;
  /// mu = ln(mean) - sigma^2 / 2
  double mu() const;
  void validate() const;
  double draw(Rng& rng) const;
};

/// Either a fixed value or a log-normal draw.
struct ValueSpec {
  std::optional<double> fixed;
  LogNormalSpec lognormal;

  static ValueSpec constant(double v) { return {v, {}}; }
  static ValueSpec lognormal_of(double mean, double std) { return {std::nullopt, {mean, std}}; }
  double draw(Rng& rng) const;
};

struct DeviceGroup {
  std::size_t count = 0;
  ValueSpec p_max;   // kW
  ValueSpec energy;  // kWh
  std::string id_prefix = "d";
};

/// Concatenates the groups in order. Each device draws p_max then energy
/// from one generator seeded with `seed`. Throws DomainError on invalid specs.
Fleet generate(const std::vector<DeviceGroup>& groups, std::uint64_t seed);

/// 450 devices with p_max ~ LN(3.3 kW, 1 kW) and 50 rapid chargers at
/// 50 kW; energies ~ LN(40 kWh, 10 kWh) for all 500.
std::vector<DeviceGroup> case_study_groups();
Fleet generate_case_study(std::uint64_t seed);

}  // namespace epcap
