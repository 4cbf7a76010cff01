#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "epcap/fleet.hpp"
#include "epcap/profile.hpp"

namespace epcap {

/// One polynomial piece of an E-p curve on [p_start, p_end]:
///   E(p) = value + slope * u + curvature * u^2,  u = p - p_start.
struct EpSegment {
  double p_start = 0.0;   // kW
  double p_end = 0.0;     // kW
  double value = 0.0;     // kWh at p_start
  double slope = 0.0;     // kWh/kW at p_start
  double curvature = 0.0; // kWh/kW^2
};

/// Convex, non-increasing energy-above-threshold curve, exactly represented
/// by polynomial pieces of degree <= 2 on 0 = p_0 < p_1 < ... < p_K, and
/// identically zero for p >= p_K.
///
/// Used both for request transforms and for fleet capacity. The constructor
/// checks continuity, monotonicity, convexity and the zero tail; it throws
/// DomainError when any of them is violated beyond rounding.
class EpCurve {
 public:
  /// The zero curve.
  EpCurve() = default;
  explicit EpCurve(std::vector<EpSegment> segments);

  const std::vector<EpSegment>& segments() const noexcept { return segs_; }
  /// p_0..p_K. The zero curve has the single breakpoint 0.
  std::vector<double> breakpoints() const;
  /// p_K: smallest power at and beyond which the curve is zero.
  double support_end() const noexcept { return segs_.empty() ? 0.0 : segs_.back().p_end; }
  bool is_linear() const noexcept;

  /// Throws DomainError for p < 0.
  double operator()(double p) const;

 private:
  std::vector<EpSegment> segs_;
};

/// Exact E(p) = ∫ max{P(t) - p, 0} dt, integrated segment by segment.
EpCurve ep_transform(const RequestProfile& profile);

/// Capacity curve of a fleet with maximum powers `p_max` in state `x`.
/// Piecewise linear: with devices sorted by time-to-go descending and
/// c_k the cumulative power, the slope on [c_{k-1}, c_k] is -x_(k).
/// Devices with x_i = 0 contribute nothing. Throws DimensionError.
EpCurve capacity_curve(std::span<const double> p_max, std::span<const double> x);

/// Same as capacity_curve, reusing an order of device indices already sorted
/// by x descending. Used when many masked states share one ordering.
EpCurve capacity_curve_presorted(std::span<const double> p_max, std::span<const double> x,
                                 std::span<const std::size_t> order_by_x_desc);

double evaluate(const EpCurve& curve, double p);

/// Absolute slack used by dominance checks, kWh.
inline constexpr double kDominanceSlack = 1e-9;

/// True iff request(p) <= capacity(p) + kDominanceSlack for every p >= 0.
bool dominated_by(const EpCurve& request, const EpCurve& capacity);

/// E-p curve of the profile scaled by m, from E_{mP}(p) = m E_P(p / m).
/// Throws DomainError unless m > 0.
EpCurve scale_transform_identity(const EpCurve& curve, double m);

/// CSV `p_kw,e_kwh`: every breakpoint, plus 9 interior samples on each
/// quadratic piece.
void write_curve_csv(std::ostream& out, const EpCurve& curve);

}  // namespace epcap
