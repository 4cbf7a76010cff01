#include "epcap/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "epcap/error.hpp"
#include "epcap/magnitude.hpp"

namespace epcap {

namespace {

using Clock = std::chrono::steady_clock;

MethodTiming summarize(const std::vector<double>& ms) {
  MethodTiming t;
  t.samples = ms.size();
  if (ms.empty()) return t;
  t.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
  double ss = 0.0;
  for (double v : ms) ss += (v - t.mean_ms) * (v - t.mean_ms);
  t.std_ms = ms.size() > 1 ? std::sqrt(ss / static_cast<double>(ms.size() - 1)) : 0.0;
  return t;
}

std::string compiler_string() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown compiler";
#endif
}

}  // namespace

BenchReport run_bench(const Fleet& fleet, const AvailabilityModel& model,
                      const RequestProfile& shape, std::size_t n_samples, std::uint64_t seed,
                      const BenchOptions& opts) {
  if (n_samples == 0) throw DomainError("run_bench: at least one state is required");
  if (fleet.empty()) throw EmptyInputError("run_bench: empty fleet");
  if (model.q.size() != fleet.size()) throw DimensionError("run_bench: model/fleet size mismatch");

  const auto ensemble = draw_ensemble(model, n_samples, seed, 1);
  const auto p = fleet.p_max();
  const auto x = time_to_go(fleet);
  std::vector<StateVector> states;
  states.reserve(n_samples);
  for (const auto& a : ensemble.draws) states.push_back(apply_availability(x, a));

  // Shape transform and discretization are per-service, not per-state work.
  const auto shape_curve = ep_transform(shape);
  const auto steps = discretize(shape, opts.period);
  const double shape_peak = peak(shape);

  auto ep_run = [&](const StateVector& xs) {
    auto cap = capacity_curve(p, xs);
    const double upper = cap.support_end() / shape_peak;
    if (!(upper > 0.0)) return 0.0;
    const auto oracle = make_ep_oracle(shape_curve, std::move(cap));
    return max_magnitude(oracle, upper, opts.rel_tol * upper);
  };
  auto policy_run = [&](const StateVector& xs) {
    const PolicySimulator sim(p, xs);
    const double upper = sim.active_power() / shape_peak;
    if (!(upper > 0.0)) return 0.0;
    FeasibilityOracle oracle = [&](double m) { return m <= 0.0 || sim.feasible(steps, m); };
    return max_magnitude(oracle, upper, opts.rel_tol * upper);
  };

  volatile double sink = 0.0;
  for (std::size_t i = 0; i < opts.warmup; ++i) {
    const auto& xs = states[i % states.size()];
    sink = sink + ep_run(xs) + policy_run(xs);
  }

  std::vector<double> ep_ms(n_samples), policy_ms(n_samples), ep_m(n_samples), policy_m(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    auto t0 = Clock::now();
    ep_m[s] = ep_run(states[s]);
    auto t1 = Clock::now();
    policy_m[s] = policy_run(states[s]);
    auto t2 = Clock::now();
    ep_ms[s] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    policy_ms[s] = std::chrono::duration<double, std::milli>(t2 - t1).count();
  }

  BenchReport r;
  r.ep = summarize(ep_ms);
  r.policy = summarize(policy_ms);
  r.speedup = r.ep.mean_ms > 0.0 ? r.policy.mean_ms / r.ep.mean_ms : 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double denom = std::max(ep_m[s], 1e-12);
    r.max_rel_disagreement = std::max(r.max_rel_disagreement, std::abs(policy_m[s] - ep_m[s]) / denom);
  }
  std::ostringstream env;
  env << compiler_string() << "; devices=" << fleet.size() << "; period_h=" << opts.period
      << "; rel_tol=" << opts.rel_tol << "; warmup=" << opts.warmup << "; single-threaded";
  r.environment = env.str();
  return r;
}

std::string bench_report_json(const BenchReport& r) {
  nlohmann::ordered_json doc;
  auto method = [](const MethodTiming& t) {
    nlohmann::ordered_json j;
    j["mean_ms"] = t.mean_ms;
    j["std_ms"] = t.std_ms;
    j["samples"] = t.samples;
    return j;
  };
  doc["policy_simulation"] = method(r.policy);
  doc["ep_transform"] = method(r.ep);
  doc["speedup"] = r.speedup;
  doc["max_rel_disagreement"] = r.max_rel_disagreement;
  doc["environment"] = r.environment;
  return doc.dump(2);
}

std::string bench_report_table(const BenchReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "Method                        mean (ms)    std (ms)   states\n";
  out << "Discrete-time policy       " << std::setw(12) << r.policy.mean_ms << std::setw(12)
      << r.policy.std_ms << std::setw(9) << r.policy.samples << '\n';
  out << "E-p transform              " << std::setw(12) << r.ep.mean_ms << std::setw(12)
      << r.ep.std_ms << std::setw(9) << r.ep.samples << '\n';
  out << std::setprecision(2) << "Speedup: " << r.speedup << "x\n";
  out << std::scientific << std::setprecision(2)
      << "Max relative magnitude disagreement: " << r.max_rel_disagreement << '\n';
  out << "Environment: " << r.environment << '\n';
  return out.str();
}

}  // namespace epcap
