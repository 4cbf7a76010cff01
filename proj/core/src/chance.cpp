#include "epcap/chance.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "epcap/error.hpp"
#include "epcap/parallel.hpp"

namespace epcap {

AvailabilityModel AvailabilityModel::uniform(std::size_t n, double q) {
  AvailabilityModel m{std::vector<double>(n, q)};
  m.validate();
  return m;
}

void AvailabilityModel::validate() const {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] >= 0.0 && q[i] <= 1.0)) {
      throw DomainError("availability probability " + std::to_string(i) + " outside [0, 1]");
    }
  }
}

AvailabilityVector sample_availability(const AvailabilityModel& model, Rng& rng) {
  AvailabilityVector a(model.q.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = uniform01(rng) < model.q[i] ? 1 : 0;
  return a;
}

SampleEnsemble draw_ensemble(const AvailabilityModel& model, std::size_t n_samples,
                             std::uint64_t seed, unsigned workers) {
  model.validate();
  SampleEnsemble e{seed, std::vector<AvailabilityVector>(n_samples)};
  parallel_for(n_samples, workers, [&](std::size_t s) {
    Rng rng(stream_seed(seed, s));
    e.draws[s] = sample_availability(model, rng);
  });
  return e;
}

std::size_t required_feasible(std::size_t n_samples, double c) {
  if (!(c > 0.0 && c < 1.0)) throw DomainError("risk level c must lie in (0, 1)");
  if (n_samples == 0) throw DomainError("at least one sample is required");
  // Guard against (1 - c) * N landing a rounding error above an integer.
  const double need = (1.0 - c) * static_cast<double>(n_samples);
  auto r = static_cast<std::size_t>(std::ceil(need - 1e-9 * std::max(1.0, need)));
  return std::clamp<std::size_t>(r, 1, n_samples);
}

std::size_t order_index(std::size_t n_samples, double c) {
  return n_samples - required_feasible(n_samples, c);
}

namespace {

std::vector<std::size_t> order_by_time_to_go(const StateVector& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  return order;
}

void check_ensemble(const Fleet& fleet, const SampleEnsemble& ensemble) {
  if (fleet.empty()) throw EmptyInputError("empty fleet");
  if (ensemble.size() == 0) throw DomainError("at least one sample is required");
  for (const auto& a : ensemble.draws) {
    if (a.size() != fleet.size()) {
      throw DimensionError("availability draw has " + std::to_string(a.size()) +
                           " entries, fleet has " + std::to_string(fleet.size()));
    }
  }
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double w = pos - static_cast<double>(i);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + w * (sorted[i + 1] - sorted[i]);
}

constexpr std::uint64_t kBootstrapStream = 0xB00757A9ULL;

}  // namespace

std::vector<double> per_sample_magnitudes(const Fleet& fleet, const SampleEnsemble& ensemble,
                                          const RequestProfile& shape, const CcOptions& opts) {
  check_ensemble(fleet, ensemble);
  const auto p = fleet.p_max();
  const auto x = time_to_go(fleet);
  const auto order = order_by_time_to_go(x);
  const auto shape_curve = ep_transform(shape);
  const double shape_peak = peak(shape);

  std::vector<double> out(ensemble.size(), 0.0);
  if (shape_peak <= 0.0) return out;
  parallel_for(ensemble.size(), opts.workers, [&](std::size_t s) {
    const auto xs = apply_availability(x, ensemble.draws[s]);
    auto cap = capacity_curve_presorted(p, xs, order);
    const double upper = cap.support_end() / shape_peak;
    if (upper <= 0.0) return;
    const auto oracle = make_ep_oracle(shape_curve, std::move(cap));
    out[s] = max_magnitude(oracle, upper, opts.rel_tol * upper);
  });
  return out;
}

Interval bootstrap_ci(const std::vector<double>& sample_magnitudes, double c,
                      std::size_t resamples, double level, std::uint64_t seed) {
  if (resamples < 100) throw DomainError("bootstrap: at least 100 resamples are required");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("bootstrap: level must lie in (0, 1)");
  const std::size_t n = sample_magnitudes.size();
  const std::size_t k = order_index(n, c);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> resample(n);
  std::vector<double> stats(resamples);
  for (auto& stat : stats) {
    for (auto& v : resample) v = sample_magnitudes[pick(rng)];
    std::nth_element(resample.begin(), resample.begin() + static_cast<std::ptrdiff_t>(k),
                     resample.end());
    stat = resample[k];
  }
  std::sort(stats.begin(), stats.end());
  return {percentile(stats, 0.5 * (1.0 - level)), percentile(stats, 0.5 * (1.0 + level))};
}

CcSolution select_magnitude(std::vector<double> magnitudes, double c,
                            std::uint64_t bootstrap_seed, const CcOptions& opts) {
  CcSolution s;
  s.c = c;
  s.n_samples = magnitudes.size();
  s.order_index = order_index(magnitudes.size(), c);
  s.few_samples = c * static_cast<double>(magnitudes.size()) < 1.0;
  std::sort(magnitudes.begin(), magnitudes.end());
  s.magnitude = magnitudes[s.order_index];
  s.ci95 = bootstrap_ci(magnitudes, c, opts.bootstrap_resamples, opts.ci_level, bootstrap_seed);
  // Percentile intervals can miss a point estimate on skewed ensembles.
  s.ci95.lo = std::min(s.ci95.lo, s.magnitude);
  s.ci95.hi = std::max(s.ci95.hi, s.magnitude);
  s.sample_magnitudes = std::move(magnitudes);
  return s;
}

std::vector<CcSolution> cc_solve(const Fleet& fleet, const SampleEnsemble& ensemble,
                                 const RequestProfile& shape, const std::vector<double>& levels,
                                 const CcOptions& opts) {
  for (double c : levels) (void)required_feasible(std::max<std::size_t>(ensemble.size(), 1), c);
  const auto mags = per_sample_magnitudes(fleet, ensemble, shape, opts);
  std::vector<CcSolution> out;
  out.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out.push_back(
        select_magnitude(mags, levels[i], stream_seed(ensemble.seed ^ kBootstrapStream, i), opts));
  }
  return out;
}

CcSolution cc_solve(const Fleet& fleet, const AvailabilityModel& model,
                    const RequestProfile& shape, double c, std::size_t n_samples,
                    std::uint64_t seed, const CcOptions& opts) {
  (void)required_feasible(std::max<std::size_t>(n_samples, 1), c);
  if (n_samples == 0) throw DomainError("cc_solve: at least one sample is required");
  if (model.q.size() != fleet.size()) {
    throw DimensionError("availability model has " + std::to_string(model.q.size()) +
                         " entries, fleet has " + std::to_string(fleet.size()));
  }
  const auto ensemble = draw_ensemble(model, n_samples, seed, opts.workers);
  return cc_solve(fleet, ensemble, shape, {c}, opts).front();
}

QuantileCurve::QuantileCurve(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() != values_.size()) throw DimensionError("QuantileCurve: grid/value mismatch");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!std::isfinite(grid_[i]) || !std::isfinite(values_[i])) {
      throw DomainError("QuantileCurve: non-finite entry");
    }
    if (values_[i] < 0.0) throw DomainError("QuantileCurve: negative value");
    if (i == 0 && grid_[i] != 0.0) throw DomainError("QuantileCurve: grid must start at 0");
    if (i > 0 && !(grid_[i] > grid_[i - 1])) {
      throw DomainError("QuantileCurve: grid must strictly increase");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw DomainError("QuantileCurve: values must be non-increasing");
    }
  }
}

double QuantileCurve::operator()(double p) const {
  if (!(p >= 0.0)) throw DomainError("QuantileCurve: power must be non-negative");
  if (grid_.empty() || p >= grid_.back()) return 0.0;
  auto it = std::upper_bound(grid_.begin(), grid_.end(), p);
  const auto j = static_cast<std::size_t>(it - grid_.begin());
  const double w = (p - grid_[j - 1]) / (grid_[j] - grid_[j - 1]);
  return values_[j - 1] + w * (values_[j] - values_[j - 1]);
}

namespace {

// Values of `curve` at ascending points `pts`, written to out[0..].
void eval_ascending(const EpCurve& curve, std::span<const double> pts, double* out) {
  const auto& segs = curve.segments();
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double p = pts[i];
    while (k < segs.size() && segs[k].p_end <= p) ++k;
    if (k == segs.size()) {
      out[i] = 0.0;
      continue;
    }
    const double u = p - segs[k].p_start;
    out[i] = std::max(0.0, segs[k].value + u * (segs[k].slope + u * segs[k].curvature));
  }
}

}  // namespace

QuantileCurve quantile_curve(const Fleet& fleet, const SampleEnsemble& ensemble, double c,
                             const GridPolicy& grid_policy, unsigned workers) {
  check_ensemble(fleet, ensemble);
  const std::size_t n = ensemble.size();
  const std::size_t rank = order_index(n, c);
  if (grid_policy.max_points < 2) throw DomainError("quantile_curve: grid needs >= 2 points");

  const auto p = fleet.p_max();
  const auto x = time_to_go(fleet);
  const auto order = order_by_time_to_go(x);
  auto build = [&](std::size_t s) {
    return capacity_curve_presorted(p, apply_availability(x, ensemble.draws[s]), order);
  };

  // Grid: union of all sample breakpoints, thinned uniformly by index.
  std::vector<std::vector<double>> per_sample(n);
  parallel_for(n, workers, [&](std::size_t s) { per_sample[s] = build(s).breakpoints(); });
  std::vector<double> all;
  for (auto& v : per_sample) {
    all.insert(all.end(), v.begin(), v.end());
    std::vector<double>().swap(v);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> grid;
  if (all.size() <= grid_policy.max_points) {
    grid = std::move(all);
  } else {
    const std::size_t g = grid_policy.max_points;
    grid.reserve(g);
    for (std::size_t i = 0; i < g; ++i) {
      const auto idx = static_cast<std::size_t>(std::llround(
          static_cast<double>(i) * static_cast<double>(all.size() - 1) / static_cast<double>(g - 1)));
      if (grid.empty() || all[idx] > grid.back()) grid.push_back(all[idx]);
    }
  }
  if (grid.size() == 1) grid.push_back(1.0);  // every sample empty: zero curve on [0, 1]

  // Point values, one block of grid points at a time to bound memory.
  std::vector<double> values(grid.size(), 0.0);
  const std::size_t block = std::max<std::size_t>(1, std::min(grid.size(), (1u << 22) / n));
  std::vector<double> matrix;
  for (std::size_t g0 = 0; g0 < grid.size(); g0 += block) {
    const std::size_t width = std::min(block, grid.size() - g0);
    const std::span<const double> pts(grid.data() + g0, width);
    matrix.assign(width * n, 0.0);
    std::vector<std::vector<double>> rows(n);
    parallel_for(n, workers, [&](std::size_t s) {
      rows[s].resize(width);
      eval_ascending(build(s), pts, rows[s].data());
    });
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t j = 0; j < width; ++j) matrix[j * n + s] = rows[s][j];
    }
    parallel_for(width, workers, [&](std::size_t j) {
      auto col = matrix.begin() + static_cast<std::ptrdiff_t>(j * n);
      std::nth_element(col, col + static_cast<std::ptrdiff_t>(rank), col + static_cast<std::ptrdiff_t>(n));
      values[g0 + j] = col[static_cast<std::ptrdiff_t>(rank)];
    });
  }
  // Pointwise order statistics of non-increasing curves are non-increasing;
  // enforce it against rounding in the per-sample evaluation.
  for (std::size_t j = 1; j < values.size(); ++j) values[j] = std::min(values[j], values[j - 1]);
  return QuantileCurve(std::move(grid), std::move(values));
}

QuantileCurve quantile_curve(const Fleet& fleet, const AvailabilityModel& model, double c,
                             std::size_t n_samples, std::uint64_t seed,
                             const GridPolicy& grid, unsigned workers) {
  if (model.q.size() != fleet.size()) {
    throw DimensionError("availability model has " + std::to_string(model.q.size()) +
                         " entries, fleet has " + std::to_string(fleet.size()));
  }
  return quantile_curve(fleet, draw_ensemble(model, n_samples, seed, workers), c, grid, workers);
}

bool dominated_by(const EpCurve& request, const QuantileCurve& curve) {
  // The quantile curve need not be convex, so the breakpoint argument used
  // for exact capacity curves does not carry over; sample densely instead.
  const auto& grid = curve.grid();
  std::vector<double> pts;
  pts.reserve(grid.size() * 11 + request.segments().size() + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pts.push_back(grid[i]);
    if (i + 1 < grid.size()) {
      for (int j = 1; j <= 10; ++j) pts.push_back(grid[i] + (grid[i + 1] - grid[i]) * j / 11.0);
    }
  }
  const auto rb = request.breakpoints();
  pts.insert(pts.end(), rb.begin(), rb.end());
  std::sort(pts.begin(), pts.end());

  std::vector<double> req(pts.size());
  eval_ascending(request, pts, req.data());
  std::size_t j = 1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double pt = pts[i];
    if (req[i] <= kDominanceSlack) continue;
    double q = 0.0;
    if (!grid.empty() && pt < grid.back()) {
      while (grid[j] <= pt) ++j;
      const double w = (pt - grid[j - 1]) / (grid[j] - grid[j - 1]);
      q = curve.values()[j - 1] + w * (curve.values()[j] - curve.values()[j - 1]);
    }
    if (req[i] > q + kDominanceSlack) return false;
  }
  return true;
}

double max_magnitude_vs_quantile(const QuantileCurve& curve, const RequestProfile& shape,
                                 double rel_tol) {
  const double upper = magnitude_upper_bound(curve.support_end(), shape);
  if (upper <= 0.0) return 0.0;
  const auto shape_curve = ep_transform(shape);
  FeasibilityOracle oracle = [&](double m) {
    return m <= 0.0 || dominated_by(scale_transform_identity(shape_curve, m), curve);
  };
  return max_magnitude(oracle, upper, rel_tol * upper);
}

std::string cc_solution_json(const CcSolution& s) {
  nlohmann::ordered_json doc;
  doc["magnitude_kw"] = s.magnitude;
  doc["c"] = s.c;
  doc["n_samples"] = s.n_samples;
  doc["ci95_kw"] = {s.ci95.lo, s.ci95.hi};
  doc["order_index"] = s.order_index;
  return doc.dump();
}

void write_quantile_csv(std::ostream& out, const QuantileCurve& curve) {
  std::ostringstream buf;
  buf << std::setprecision(12) << "p_kw,e_kwh\n";
  for (std::size_t i = 0; i < curve.grid().size(); ++i) {
    buf << curve.grid()[i] << ',' << curve.values()[i] << '\n';
  }
  out << buf.str();
}

}  // namespace epcap
