#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epcap {

struct Breakpoint {
  double t = 0.0;  // hours
  double p = 0.0;  // kW
};

/// Non-negative piecewise-linear request P^r(t).
///
/// Linear between consecutive breakpoints and zero outside [t_first, t_last].
/// Repeated time stamps encode a jump; the later breakpoint's value holds from
/// that instant on (right-continuous).
class RequestProfile {
 public:
  RequestProfile() = default;
  /// Throws DomainError for negative or non-finite entries, t < 0, or
  /// decreasing time stamps.
  explicit RequestProfile(std::vector<Breakpoint> breakpoints);

  const std::vector<Breakpoint>& breakpoints() const noexcept { return bps_; }
  bool empty() const noexcept { return bps_.empty(); }
  double end_time() const noexcept { return bps_.empty() ? 0.0 : bps_.back().t; }

  double value_at(double t) const;
  /// Exact integral of the profile over [a, b].
  double integral(double a, double b) const;

 private:
  std::vector<Breakpoint> bps_;
};

/// Constant `magnitude` on [0, duration). Throws DomainError if duration <= 0.
RequestProfile pulse(double duration, double magnitude);

/// Equal thirds: ramp up, plateau at `magnitude`, ramp down.
RequestProfile trapezoid(double total_duration, double magnitude);

/// Multiplies every breakpoint power by m >= 0.
RequestProfile scale(const RequestProfile& profile, double m);

double peak(const RequestProfile& profile);
double energy(const RequestProfile& profile);

struct ConstantStep {
  double start = 0.0;     // hours
  double duration = 0.0;  // hours
  double power = 0.0;     // kW, interval average
};

/// Splits [0, t_last] into consecutive intervals of width `period` (the last
/// may be shorter) holding the interval-average power, so energy is kept.
std::vector<ConstantStep> discretize(const RequestProfile& profile, double period);

/// Piecewise-constant profile built from consecutive steps starting at t = 0.
RequestProfile from_steps(const std::vector<ConstantStep>& steps);

/// `{"units":{"time":"h","power":"kW"},"breakpoints":[[t,P],...]}`
RequestProfile read_profile_json(std::istream& in);
RequestProfile read_profile_json_file(const std::string& path);
void write_profile_json(std::ostream& out, const RequestProfile& profile);

}  // namespace epcap
