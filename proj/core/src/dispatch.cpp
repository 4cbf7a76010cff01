#include "epcap/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "epcap/error.hpp"

namespace epcap {

namespace {

constexpr double kFeasRelTol = 1e-12;

struct LevelSolution {
  bool feasible = false;
  double theta = 0.0;
  bool saturated = false;
};

// Solves sum_i p_i * clamp(x_i - theta, 0, dt) = energy for theta >= 0, with
// x sorted descending. f(theta) is piecewise linear and decreasing with kinks
// at x_i (device starts contributing) and x_i - dt (device capped at dt).
// Both kink lists are already sorted, so a merge walk from the top is O(n).
LevelSolution solve_level(std::span<const double> p, std::span<const double> x, double energy,
                          double dt) {
  const std::size_t n = x.size();
  double max_energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_energy += p[i] * std::min(dt, x[i]);
  if (energy > max_energy * (1.0 + kFeasRelTol) + kFeasRelTol * dt) return {};
  if (energy >= max_energy) return {true, 0.0, true};
  if (energy <= 0.0 || n == 0) return {true, n ? x[0] : 0.0, false};

  std::size_t ia = 0;  // next entering kink x[ia]
  std::size_t ib = 0;  // next leaving kink x[ib] - dt
  double theta = x[0];
  double f = 0.0;
  double active = 0.0;
  while (true) {
    const double next_a = ia < n ? x[ia] : -1.0;
    const double next_b = ib < n ? x[ib] - dt : -1.0;
    double next = std::max({next_a, next_b, 0.0});
    if (active > 0.0 && next < theta) {
      const double gain = active * (theta - next);
      if (f + gain >= energy) {
        const double t = theta - (energy - f) / active;
        return {true, std::max(t, 0.0), false};
      }
      f += gain;
    }
    theta = next;
    if (next <= 0.0 && next_a <= 0.0 && next_b <= 0.0) break;
    // Process every kink sitting exactly at `next`; entering before leaving.
    if (ia < n && x[ia] == next) {
      active += p[ia];
      ++ia;
    } else if (ib < n && x[ib] - dt == next) {
      active -= p[ib];
      ++ib;
    }
  }
  // Rounding left us just short of `energy` at theta = 0.
  return {true, 0.0, true};
}

void apply_level(std::span<const double> p, std::span<double> x, double theta, double dt,
                 double* u) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double drop = std::clamp(x[i] - theta, 0.0, dt);
    if (u) u[i] = p[i] * drop / dt;
    x[i] = std::max(0.0, x[i] - drop);
  }
}

}  // namespace

std::optional<PolicyResult> policy_step(std::span<const double> p_max, std::span<const double> x,
                                        double request_power, double dt) {
  if (p_max.size() != x.size()) {
    throw DimensionError("policy_step: p_max has " + std::to_string(p_max.size()) +
                         " entries, state has " + std::to_string(x.size()));
  }
  if (!(request_power >= 0.0)) throw DomainError("policy_step: request power must be >= 0");
  if (!(dt > 0.0)) throw DomainError("policy_step: dt must be positive");

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  std::vector<double> ps(x.size()), xs(x.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    ps[k] = p_max[order[k]];
    xs[k] = x[order[k]];
  }
  const auto sol = solve_level(ps, xs, request_power * dt, dt);
  if (!sol.feasible) return std::nullopt;

  std::vector<double> us(x.size());
  apply_level(ps, xs, sol.theta, dt, us.data());
  PolicyResult out;
  out.step.u.resize(x.size());
  out.next.resize(x.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.step.u[order[k]] = us[k];
    out.next[order[k]] = xs[k];
  }
  if (!sol.saturated) out.step.theta = sol.theta;
  return out;
}

PolicySimulator::PolicySimulator(std::span<const double> p_max, std::span<const double> x0) {
  if (p_max.size() != x0.size()) {
    throw DimensionError("PolicySimulator: p_max has " + std::to_string(p_max.size()) +
                         " entries, state has " + std::to_string(x0.size()));
  }
  std::vector<std::size_t> order;
  order.reserve(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (x0[i] > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x0[a] > x0[b]; });
  p_.reserve(order.size());
  x0_.reserve(order.size());
  for (std::size_t i : order) {
    p_.push_back(p_max[i]);
    x0_.push_back(x0[i]);
    active_power_ += p_max[i];
  }
}

bool PolicySimulator::feasible(std::span<const ConstantStep> steps, double scale) const {
  x_ = x0_;
  for (const auto& s : steps) {
    const double power = s.power * scale;
    if (power <= 0.0) continue;
    const auto sol = solve_level(p_, x_, power * s.duration, s.duration);
    if (!sol.feasible) return false;
    apply_level(p_, x_, sol.theta, s.duration, nullptr);
  }
  return true;
}

bool simulate_feasible(std::span<const double> p_max, std::span<const double> x0,
                       std::span<const ConstantStep> steps) {
  return PolicySimulator(p_max, x0).feasible(steps);
}

}  // namespace epcap
