#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "epcap/epcurve.hpp"
#include "epcap/fleet.hpp"
#include "epcap/magnitude.hpp"
#include "epcap/profile.hpp"
#include "epcap/random.hpp"

namespace epcap {

/// Independent Bernoulli availability, probability q_i per device.
struct AvailabilityModel {
  std::vector<double> q;

  static AvailabilityModel uniform(std::size_t n, double q);
  /// Throws DomainError unless every q_i lies in [0, 1].
  void validate() const;
};

AvailabilityVector sample_availability(const AvailabilityModel& model, Rng& rng);

/// N availability draws; draw s comes from stream_seed(seed, s).
struct SampleEnsemble {
  std::uint64_t seed = 0;
  std::vector<AvailabilityVector> draws;

  std::size_t size() const noexcept { return draws.size(); }
};

SampleEnsemble draw_ensemble(const AvailabilityModel& model, std::size_t n_samples,
                             std::uint64_t seed, unsigned workers = 0);

struct CcOptions {
  double rel_tol = kDefaultRelTol;   // bisection tolerance per sample, relative
  std::size_t bootstrap_resamples = 1000;
  double ci_level = 0.95;
  unsigned workers = 0;              // 0: one per hardware thread
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct CcSolution {
  double magnitude = 0.0;               // kW
  double c = 0.0;
  std::size_t n_samples = 0;
  std::vector<double> sample_magnitudes;  // ascending, kW
  std::size_t order_index = 0;
  Interval ci95;
  /// c * N < 1: the order statistic degenerates to the sample minimum.
  bool few_samples = false;
};

/// Number of samples that must be feasible: ceil((1 - c) N).
std::size_t required_feasible(std::size_t n_samples, double c);

/// 0-based ascending index N - ceil((1 - c) N). Throws DomainError unless
/// 0 < c < 1 and N >= 1.
std::size_t order_index(std::size_t n_samples, double c);

/// Maximum E-p feasible magnitude of `shape` for every masked state.
/// Returned in sample order.
std::vector<double> per_sample_magnitudes(const Fleet& fleet, const SampleEnsemble& ensemble,
                                          const RequestProfile& shape, const CcOptions& opts = {});

/// Picks the order statistic for risk level c from magnitudes (any order)
/// and attaches a percentile bootstrap interval seeded by `bootstrap_seed`.
CcSolution select_magnitude(std::vector<double> magnitudes, double c,
                            std::uint64_t bootstrap_seed, const CcOptions& opts = {});

/// Percentile bootstrap of the order statistic for c: B resamples with
/// replacement, returns the (1-level)/2 and (1+level)/2 percentiles.
/// Throws DomainError if B < 100.
Interval bootstrap_ci(const std::vector<double>& sample_magnitudes, double c, std::size_t resamples,
                      double level, std::uint64_t seed);

/// Monte Carlo chance-constrained magnitude at risk level c.
CcSolution cc_solve(const Fleet& fleet, const AvailabilityModel& model,
                    const RequestProfile& shape, double c, std::size_t n_samples,
                    std::uint64_t seed, const CcOptions& opts = {});

/// Several risk levels on one shared ensemble; the per-sample magnitudes
/// are computed once.
std::vector<CcSolution> cc_solve(const Fleet& fleet, const SampleEnsemble& ensemble,
                                 const RequestProfile& shape, const std::vector<double>& levels,
                                 const CcOptions& opts = {});

/// Single deterministic capacity approximation: at each grid power, the
/// value that exactly ceil((1 - c) N) sample curves reach or exceed.
/// Linear between grid points, zero beyond the last one.
class QuantileCurve {
 public:
  QuantileCurve() = default;
  /// Throws DomainError unless the grid strictly increases from 0 and
  /// values are non-negative and non-increasing.
  QuantileCurve(std::vector<double> grid, std::vector<double> values);

  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double support_end() const noexcept { return grid_.empty() ? 0.0 : grid_.back(); }
  double operator()(double p) const;

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

struct GridPolicy {
  std::size_t max_points = 2000;
};

/// Quantile curve over a shared ensemble.
QuantileCurve quantile_curve(const Fleet& fleet, const SampleEnsemble& ensemble, double c,
                             const GridPolicy& grid = {}, unsigned workers = 0);

QuantileCurve quantile_curve(const Fleet& fleet, const AvailabilityModel& model, double c,
                             std::size_t n_samples, std::uint64_t seed,
                             const GridPolicy& grid = {}, unsigned workers = 0);

/// Checks request(p) <= curve(p) + slack on the curve grid, the request
/// breakpoints and 10 interior points per grid interval.
bool dominated_by(const EpCurve& request, const QuantileCurve& curve);

/// Largest magnitude of `shape` dominated by the quantile curve.
double max_magnitude_vs_quantile(const QuantileCurve& curve, const RequestProfile& shape,
                                 double rel_tol = kDefaultRelTol);

/// `{"magnitude_kw":…,"c":…,"n_samples":…,"ci95_kw":[lo,hi],"order_index":…}`
std::string cc_solution_json(const CcSolution& s);

/// CSV `p_kw,e_kwh` through the grid points.
void write_quantile_csv(std::ostream& out, const QuantileCurve& curve);

}  // namespace epcap
