#include "epcap/fleet.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "epcap/error.hpp"

namespace epcap {

Fleet::Fleet(std::vector<Device> devices) : devices_(std::move(devices)) {
  std::unordered_set<std::string> seen;
  for (const auto& d : devices_) {
    if (!(d.p_max > 0.0) || !std::isfinite(d.p_max)) {
      throw DomainError("device '" + d.id + "': p_max must be positive and finite");
    }
    if (!(d.energy >= 0.0) || !std::isfinite(d.energy)) {
      throw DomainError("device '" + d.id + "': energy must be non-negative and finite");
    }
    if (!seen.insert(d.id).second) {
      throw DomainError("duplicate device id '" + d.id + "'");
    }
  }
}

std::vector<double> Fleet::p_max() const {
  std::vector<double> out;
  out.reserve(devices_.size());
  for (const auto& d : devices_) out.push_back(d.p_max);
  return out;
}

StateVector time_to_go(const Fleet& fleet) {
  if (fleet.empty()) throw EmptyInputError("time_to_go: empty fleet");
  StateVector x;
  x.reserve(fleet.size());
  for (const auto& d : fleet.devices()) x.push_back(d.energy / d.p_max);
  return x;
}

StateVector apply_availability(std::span<const double> x, std::span<const std::uint8_t> a) {
  if (x.size() != a.size()) {
    throw DimensionError("apply_availability: state has " + std::to_string(x.size()) +
                         " entries, availability has " + std::to_string(a.size()));
  }
  StateVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a[i] ? x[i] : 0.0;
  return out;
}

double total_power(const Fleet& fleet) {
  double sum = 0.0;
  for (const auto& d : fleet.devices()) sum += d.p_max;
  return sum;
}

double total_energy(const Fleet& fleet) {
  double sum = 0.0;
  for (const auto& d : fleet.devices()) sum += d.energy;
  return sum;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_number(const std::string& cell, const std::string& where) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(where, "expected a number, got '" + cell + "'");
  }
  return value;
}

}  // namespace

Fleet read_fleet_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<Device> devices;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    const std::string at = "line " + std::to_string(lineno);
    if (!have_header) {
      if (cells != std::vector<std::string>{"id", "p_max_kw", "energy_kwh"}) {
        throw ParseError(at, "expected header 'id,p_max_kw,energy_kwh'");
      }
      have_header = true;
      continue;
    }
    if (cells.size() != 3) {
      throw ParseError(at, "expected 3 fields, got " + std::to_string(cells.size()));
    }
    if (cells[0].empty()) throw ParseError(at + ", field id", "empty device id");
    Device d{cells[0], parse_number(cells[1], at + ", field p_max_kw"),
             parse_number(cells[2], at + ", field energy_kwh")};
    if (!(d.p_max > 0.0)) throw ParseError(at + ", field p_max_kw", "must be positive");
    if (d.energy < 0.0) throw ParseError(at + ", field energy_kwh", "must be non-negative");
    devices.push_back(std::move(d));
  }
  if (!have_header) throw ParseError("line 1", "missing header 'id,p_max_kw,energy_kwh'");
  try {
    return Fleet(std::move(devices));
  } catch (const DomainError& e) {
    throw ParseError("field id", e.what());
  }
}

Fleet read_fleet_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open fleet file");
  try {
    return read_fleet_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ", " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

void write_fleet_csv(std::ostream& out, const Fleet& fleet) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << "id,p_max_kw,energy_kwh\n";
  for (const auto& d : fleet.devices()) buf << d.id << ',' << d.p_max << ',' << d.energy << '\n';
  out << buf.str();
}

void write_fleet_csv_file(const std::string& path, const Fleet& fleet) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_fleet_csv(out, fleet);
}

}  // namespace epcap
