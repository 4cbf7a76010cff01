#include "epcap/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "epcap/error.hpp"

namespace epcap {

RequestProfile::RequestProfile(std::vector<Breakpoint> breakpoints) : bps_(std::move(breakpoints)) {
  for (std::size_t i = 0; i < bps_.size(); ++i) {
    const auto& b = bps_[i];
    if (!std::isfinite(b.t) || !std::isfinite(b.p)) {
      throw DomainError("profile breakpoint " + std::to_string(i) + " is not finite");
    }
    if (b.t < 0.0) throw DomainError("profile breakpoint " + std::to_string(i) + " has t < 0");
    if (b.p < 0.0) {
      throw DomainError("profile breakpoint " + std::to_string(i) + " has negative power");
    }
    if (i > 0 && b.t < bps_[i - 1].t) {
      throw DomainError("profile time stamps must be non-decreasing (breakpoint " +
                        std::to_string(i) + ")");
    }
  }
}

double RequestProfile::value_at(double t) const {
  if (bps_.empty() || t < bps_.front().t || t > bps_.back().t) return 0.0;
  // Last breakpoint with time <= t gives right-continuity at jumps.
  auto it = std::upper_bound(bps_.begin(), bps_.end(), t,
                             [](double v, const Breakpoint& b) { return v < b.t; });
  const auto& left = *(it - 1);
  if (it == bps_.end()) return left.p;
  const auto& right = *it;
  const double w = (t - left.t) / (right.t - left.t);
  return left.p + w * (right.p - left.p);
}

double RequestProfile::integral(double a, double b) const {
  if (b <= a) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 1; i < bps_.size(); ++i) {
    const auto& l = bps_[i - 1];
    const auto& r = bps_[i];
    const double lo = std::max(a, l.t);
    const double hi = std::min(b, r.t);
    if (hi <= lo) continue;
    const double slope = (r.p - l.p) / (r.t - l.t);
    const double p_lo = l.p + slope * (lo - l.t);
    const double p_hi = l.p + slope * (hi - l.t);
    sum += 0.5 * (p_lo + p_hi) * (hi - lo);
  }
  return sum;
}

RequestProfile pulse(double duration, double magnitude) {
  if (!(duration > 0.0)) throw DomainError("pulse: duration must be positive");
  if (!(magnitude >= 0.0)) throw DomainError("pulse: magnitude must be non-negative");
  return RequestProfile({{0.0, 0.0}, {0.0, magnitude}, {duration, magnitude}, {duration, 0.0}});
}

RequestProfile trapezoid(double total_duration, double magnitude) {
  if (!(total_duration > 0.0)) throw DomainError("trapezoid: duration must be positive");
  if (!(magnitude >= 0.0)) throw DomainError("trapezoid: magnitude must be non-negative");
  const double third = total_duration / 3.0;
  return RequestProfile(
      {{0.0, 0.0}, {third, magnitude}, {2.0 * third, magnitude}, {total_duration, 0.0}});
}

RequestProfile scale(const RequestProfile& profile, double m) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("scale: factor must be non-negative");
  auto bps = profile.breakpoints();
  for (auto& b : bps) b.p *= m;
  return RequestProfile(std::move(bps));
}

double peak(const RequestProfile& profile) {
  double best = 0.0;
  for (const auto& b : profile.breakpoints()) best = std::max(best, b.p);
  return best;
}

double energy(const RequestProfile& profile) {
  if (profile.empty()) return 0.0;
  return profile.integral(profile.breakpoints().front().t, profile.end_time());
}

std::vector<ConstantStep> discretize(const RequestProfile& profile, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw DomainError("discretize: period must be positive");
  }
  const double end = profile.end_time();
  std::vector<ConstantStep> steps;
  if (end <= 0.0) return steps;
  // Snap counts like 2 h / (1/60 h) to the nearest integer when within rounding.
  double ratio = end / period;
  double count = std::round(ratio);
  if (std::abs(ratio - count) > 1e-9 * std::max(1.0, ratio)) count = std::ceil(ratio);
  const auto n = static_cast<std::size_t>(count);
  steps.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) * period;
    const double b = (k + 1 == n) ? end : std::min(end, static_cast<double>(k + 1) * period);
    if (b <= a) break;
    steps.push_back({a, b - a, profile.integral(a, b) / (b - a)});
  }
  return steps;
}

RequestProfile from_steps(const std::vector<ConstantStep>& steps) {
  std::vector<Breakpoint> bps;
  bps.reserve(2 * steps.size());
  double t = 0.0;
  for (const auto& s : steps) {
    if (!(s.duration > 0.0)) throw DomainError("from_steps: step duration must be positive");
    bps.push_back({t, s.power});
    t += s.duration;
    bps.push_back({t, s.power});
  }
  return RequestProfile(std::move(bps));
}

namespace {

RequestProfile profile_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("$", "profile must be a JSON object");
  if (doc.contains("units")) {
    const auto& units = doc["units"];
    if (!units.is_object()) throw ParseError("units", "must be an object");
    if (units.value("time", "h") != "h") throw ParseError("units.time", "only \"h\" is supported");
    if (units.value("power", "kW") != "kW") {
      throw ParseError("units.power", "only \"kW\" is supported");
    }
  }
  if (!doc.contains("breakpoints") || !doc["breakpoints"].is_array()) {
    throw ParseError("breakpoints", "missing or not an array");
  }
  std::vector<Breakpoint> bps;
  const auto& arr = doc["breakpoints"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "breakpoints[" + std::to_string(i) + "]";
    const auto& row = arr[i];
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      throw ParseError(where, "expected [t, P] with numeric entries");
    }
    bps.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  try {
    return RequestProfile(std::move(bps));
  } catch (const DomainError& e) {
    throw ParseError("breakpoints", e.what());
  }
}

}  // namespace

RequestProfile read_profile_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  return profile_from_json(doc);
}

RequestProfile read_profile_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open profile file");
  try {
    return read_profile_json(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ", " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

void write_profile_json(std::ostream& out, const RequestProfile& profile) {
  nlohmann::json doc;
  doc["units"] = {{"time", "h"}, {"power", "kW"}};
  auto arr = nlohmann::json::array();
  for (const auto& b : profile.breakpoints()) arr.push_back({b.t, b.p});
  doc["breakpoints"] = std::move(arr);
  out << doc.dump(2) << '\n';
}

}  // namespace epcap
