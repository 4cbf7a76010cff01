#pragma once

#include <functional>
#include <span>
#include <vector>

#include "epcap/dispatch.hpp"
#include "epcap/epcurve.hpp"
#include "epcap/profile.hpp"

namespace epcap {

/// Predicate magnitude -> feasible. Must be monotone: feasible(m) implies
/// feasible(m') for all m' <= m.
using FeasibilityOracle = std::function<bool(double)>;

/// Relative bisection tolerance used when none is given.
inline constexpr double kDefaultRelTol = 1e-6;
inline constexpr int kMaxBisectionSteps = 60;

struct MagnitudeResult {
  double magnitude = 0.0;  // lower end of the final bracket
  double upper_bound = 0.0;  // upper end of the final bracket
  int oracle_calls = 0;
};

/// Bisection on [0, upper]; stops once the bracket is narrower than `tol`
/// (at most kMaxBisectionSteps halvings) and returns the lower end. If
/// oracle(upper) holds, returns upper. Throws ContradictionError if the
/// search collapses to 0 and oracle(0) is false, DomainError if tol <= 0.
MagnitudeResult max_magnitude_search(const FeasibilityOracle& oracle, double upper, double tol);

inline double max_magnitude(const FeasibilityOracle& oracle, double upper, double tol) {
  return max_magnitude_search(oracle, upper, tol).magnitude;
}

/// Dominance of the scaled shape transform against a fixed capacity curve.
/// `shape_curve` is the E-p transform of the unit-magnitude shape.
FeasibilityOracle make_ep_oracle(EpCurve shape_curve, EpCurve capacity);

/// Time-stepped policy simulation of the shape discretized at `period`.
FeasibilityOracle make_simulation_oracle(const RequestProfile& shape,
                                         std::span<const double> p_max,
                                         std::span<const double> x, double period);

/// Bisection bracket top: total power of devices that can discharge, divided
/// by the shape's peak. Zero for a zero shape.
double magnitude_upper_bound(double active_power, const RequestProfile& shape);

/// Deterministic E-p path: capacity of (p_max, x), bisection with tolerance
/// rel_tol * upper.
double max_magnitude_ep(const RequestProfile& shape, std::span<const double> p_max,
                        std::span<const double> x, double rel_tol = kDefaultRelTol);

/// Same search with the policy simulation as oracle.
double max_magnitude_simulated(const RequestProfile& shape, std::span<const double> p_max,
                               std::span<const double> x, double period = kDefaultPeriod,
                               double rel_tol = kDefaultRelTol);

}  // namespace epcap
