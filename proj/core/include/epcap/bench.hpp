#pragma once

#include <cstdint>
#include <string>

#include "epcap/chance.hpp"
#include "epcap/dispatch.hpp"
#include "epcap/fleet.hpp"
#include "epcap/profile.hpp"

namespace epcap {

struct MethodTiming {
  double mean_ms = 0.0;
  double std_ms = 0.0;
  std::size_t samples = 0;
};

struct BenchReport {
  MethodTiming policy;  // time-stepped simulation oracle
  MethodTiming ep;      // E-p oracle, capacity construction included
  double speedup = 0.0;  // policy.mean_ms / ep.mean_ms
  /// Largest |m_policy - m_ep| / max(m_ep, tiny) over the benchmarked states.
  double max_rel_disagreement = 0.0;
  std::string environment;
};

struct BenchOptions {
  double period = kDefaultPeriod;  // h
  double rel_tol = kDefaultRelTol;
  std::size_t warmup = 10;
};

/// Draws N availability states once, then times the full bisection with
/// each oracle on the same states, single-threaded.
BenchReport run_bench(const Fleet& fleet, const AvailabilityModel& model,
                      const RequestProfile& shape, std::size_t n_samples, std::uint64_t seed,
                      const BenchOptions& opts = {});

std::string bench_report_json(const BenchReport& r);
std::string bench_report_table(const BenchReport& r);

}  // namespace epcap
