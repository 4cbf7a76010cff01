#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace epcap {

// Internal units: power in kW, energy in kWh, time in hours.

struct Device {
  std::string id;
  double p_max = 0.0;   // kW, > 0
  double energy = 0.0;  // kWh, >= 0
};

/// Validated, immutable device population.
class Fleet {
 public:
  Fleet() = default;
  /// Throws DomainError on p_max <= 0, negative energy or duplicate ids.
  explicit Fleet(std::vector<Device> devices);

  std::span<const Device> devices() const noexcept { return devices_; }
  std::size_t size() const noexcept { return devices_.size(); }
  bool empty() const noexcept { return devices_.empty(); }
  const Device& operator[](std::size_t i) const { return devices_[i]; }

  /// Per-device maximum discharge power, in device order.
  std::vector<double> p_max() const;

 private:
  std::vector<Device> devices_;
};

/// Time-to-go per device (hours); x_i = energy_i / p_max_i.
using StateVector = std::vector<double>;

/// Per-device availability draw, entries 0 or 1.
using AvailabilityVector = std::vector<std::uint8_t>;

/// Throws EmptyInputError for an empty fleet.
StateVector time_to_go(const Fleet& fleet);

/// Hadamard product a∘x. Throws DimensionError on length mismatch.
StateVector apply_availability(std::span<const double> x, std::span<const std::uint8_t> a);

double total_power(const Fleet& fleet);
double total_energy(const Fleet& fleet);

/// Fleet CSV: header `id,p_max_kw,energy_kwh`, one device per row.
/// Throws ParseError naming the offending line and field.
Fleet read_fleet_csv(std::istream& in);
Fleet read_fleet_csv_file(const std::string& path);
void write_fleet_csv(std::ostream& out, const Fleet& fleet);
void write_fleet_csv_file(const std::string& path, const Fleet& fleet);

}  // namespace epcap
