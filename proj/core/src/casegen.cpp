#include "epcap/casegen.hpp"

#include <cmath>
#include <cstdio>

#include "epcap/error.hpp"

namespace epcap {

double LogNormalSpec::sigma() const { return std::sqrt(std::log1p((std * std) / (mean * mean))); }

double LogNormalSpec::mu() const {
  const double s = sigma();
  return std::log(mean) - 0.5 * s * s;
}

void LogNormalSpec::validate() const {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw DomainError("log-normal mean must be > 0");
  if (!(std >= 0.0) || !std::isfinite(std)) throw DomainError("log-normal std must be >= 0");
}

double LogNormalSpec::draw(Rng& rng) const {
  std::normal_distribution<double> z(0.0, 1.0);
  const double n = z(rng);
  if (std == 0.0) return mean;
  return std::exp(mu() + sigma() * n);
}

double ValueSpec::draw(Rng& rng) const {
  if (fixed) return *fixed;
  return lognormal.draw(rng);
}

Fleet generate(const std::vector<DeviceGroup>& groups, std::uint64_t seed) {
  for (const auto& g : groups) {
    if (g.p_max.fixed) {
      if (!(*g.p_max.fixed > 0.0)) throw DomainError("fixed p_max must be positive");
    } else {
      g.p_max.lognormal.validate();
    }
    if (g.energy.fixed) {
      if (!(*g.energy.fixed >= 0.0)) throw DomainError("fixed energy must be non-negative");
    } else {
      g.energy.lognormal.validate();
    }
  }
  Rng rng(seed);
  std::vector<Device> devices;
  std::size_t serial = 0;
  char buf[32];
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < g.count; ++i) {
      std::snprintf(buf, sizeof buf, "%04zu", ++serial);
      const double p = g.p_max.draw(rng);
      const double e = g.energy.draw(rng);
      devices.push_back({g.id_prefix + buf, p, e});
    }
  }
  return Fleet(std::move(devices));
}

std::vector<DeviceGroup> case_study_groups() {
  return {
      {450, ValueSpec::lognormal_of(3.3, 1.0), ValueSpec::lognormal_of(40.0, 10.0), "ev"},
      {50, ValueSpec::constant(50.0), ValueSpec::lognormal_of(40.0, 10.0), "rapid"},
  };
}

Fleet generate_case_study(std::uint64_t seed) { return generate(case_study_groups(), seed); }

}  // namespace epcap
