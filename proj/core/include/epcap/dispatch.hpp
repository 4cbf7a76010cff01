#pragma once

#include <optional>
#include <span>
#include <vector>

#include "epcap/fleet.hpp"
#include "epcap/profile.hpp"

namespace epcap {

/// Default simulation period: one minute.
inline constexpr double kDefaultPeriod = 1.0 / 60.0;

struct DispatchStep {
  std::vector<double> u;        // kW per device, 0 <= u_i <= p_max_i
  std::optional<double> theta;  // common post-step time-to-go level, h
};

struct PolicyResult {
  DispatchStep step;
  StateVector next;
};

/// One step of the level-equalization policy: find theta >= 0 with
///   sum_i p_max_i * clamp(x_i - theta, 0, dt) = request_power * dt
/// and discharge every device down towards theta, at most dt hours' worth.
/// Returns nullopt when the request exceeds sum_i p_max_i * min(dt, x_i).
/// theta is left empty when the step uses every device's full allowance.
std::optional<PolicyResult> policy_step(std::span<const double> p_max, std::span<const double> x,
                                        double request_power, double dt);

/// Runs policy_step over `steps` in order, stopping at the first step that
/// cannot be met.
bool simulate_feasible(std::span<const double> p_max, std::span<const double> x0,
                       std::span<const ConstantStep> steps);

/// Reusable simulation state: devices with x > 0, sorted by x descending.
/// The policy preserves this order, so the sort is paid once per state.
class PolicySimulator {
 public:
  PolicySimulator(std::span<const double> p_max, std::span<const double> x0);

  /// Feasibility of `steps` with every power multiplied by `scale`.
  bool feasible(std::span<const ConstantStep> steps, double scale = 1.0) const;

  /// Sum of p_max over devices with positive time-to-go, kW.
  double active_power() const noexcept { return active_power_; }

 private:
  std::vector<double> p_;
  std::vector<double> x0_;
  double active_power_ = 0.0;
  mutable std::vector<double> x_;
};

}  // namespace epcap
