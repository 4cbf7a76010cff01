#include "epcap/magnitude.hpp"

#include <cmath>
#include <memory>

#include "epcap/error.hpp"

namespace epcap {

MagnitudeResult max_magnitude_search(const FeasibilityOracle& oracle, double upper, double tol) {
  if (!(tol > 0.0)) throw DomainError("max_magnitude: tolerance must be positive");
  if (!(upper >= 0.0) || !std::isfinite(upper)) {
    throw DomainError("max_magnitude: upper bound must be finite and non-negative");
  }
  MagnitudeResult r;
  double lo = 0.0;
  double hi = upper;
  if (upper > 0.0) {
    ++r.oracle_calls;
    if (oracle(upper)) return {upper, upper, r.oracle_calls};
  }
  for (int i = 0; i < kMaxBisectionSteps && hi - lo >= tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    ++r.oracle_calls;
    if (oracle(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo == 0.0) {
    ++r.oracle_calls;
    if (!oracle(0.0)) throw ContradictionError("max_magnitude: oracle rejects the zero request");
  }
  r.magnitude = lo;
  r.upper_bound = hi;
  return r;
}

FeasibilityOracle make_ep_oracle(EpCurve shape_curve, EpCurve capacity) {
  auto shape = std::make_shared<const EpCurve>(std::move(shape_curve));
  auto cap = std::make_shared<const EpCurve>(std::move(capacity));
  return [shape, cap](double m) {
    if (m <= 0.0) return true;
    return dominated_by(scale_transform_identity(*shape, m), *cap);
  };
}

FeasibilityOracle make_simulation_oracle(const RequestProfile& shape,
                                         std::span<const double> p_max,
                                         std::span<const double> x, double period) {
  auto steps = std::make_shared<const std::vector<ConstantStep>>(discretize(shape, period));
  auto sim = std::make_shared<const PolicySimulator>(p_max, x);
  return [steps, sim](double m) { return m <= 0.0 || sim->feasible(*steps, m); };
}

double magnitude_upper_bound(double active_power, const RequestProfile& shape) {
  const double pk = peak(shape);
  return pk > 0.0 ? active_power / pk : 0.0;
}

double max_magnitude_ep(const RequestProfile& shape, std::span<const double> p_max,
                        std::span<const double> x, double rel_tol) {
  auto cap = capacity_curve(p_max, x);
  const double upper = magnitude_upper_bound(cap.support_end(), shape);
  if (upper <= 0.0) return 0.0;
  auto oracle = make_ep_oracle(ep_transform(shape), std::move(cap));
  return max_magnitude(oracle, upper, rel_tol * upper);
}

double max_magnitude_simulated(const RequestProfile& shape, std::span<const double> p_max,
                               std::span<const double> x, double period, double rel_tol) {
  PolicySimulator probe(p_max, x);
  const double upper = magnitude_upper_bound(probe.active_power(), shape);
  if (upper <= 0.0) return 0.0;
  auto oracle = make_simulation_oracle(shape, p_max, x, period);
  return max_magnitude(oracle, upper, rel_tol * upper);
}

}  // namespace epcap
