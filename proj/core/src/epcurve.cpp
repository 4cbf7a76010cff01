#include "epcap/epcurve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "epcap/error.hpp"

namespace epcap {

namespace {

constexpr double kRelTol = 1e-9;

double piece_value(const EpSegment& s, double p) {
  const double u = p - s.p_start;
  return s.value + u * (s.slope + u * s.curvature);
}

double end_value(const EpSegment& s) { return piece_value(s, s.p_end); }

double end_slope(const EpSegment& s) {
  return s.slope + 2.0 * s.curvature * (s.p_end - s.p_start);
}

}  // namespace

EpCurve::EpCurve(std::vector<EpSegment> segments) : segs_(std::move(segments)) {
  if (segs_.empty()) return;
  const double value_scale = std::max(1.0, std::abs(segs_.front().value));
  const double slope_scale =
      std::max(1.0, value_scale / std::max(segs_.back().p_end, 1e-300));
  const double vtol = kRelTol * value_scale;
  const double stol = kRelTol * slope_scale;
  if (segs_.front().p_start != 0.0) throw DomainError("EpCurve: first piece must start at p = 0");
  for (std::size_t k = 0; k < segs_.size(); ++k) {
    const auto& s = segs_[k];
    const auto at = "EpCurve piece " + std::to_string(k) + ": ";
    if (!std::isfinite(s.value) || !std::isfinite(s.slope) || !std::isfinite(s.curvature) ||
        !std::isfinite(s.p_end)) {
      throw DomainError(at + "non-finite coefficient");
    }
    if (!(s.p_end > s.p_start)) throw DomainError(at + "breakpoints must strictly increase");
    if (s.curvature < -stol) throw DomainError(at + "negative curvature (not convex)");
    if (s.slope > stol || end_slope(s) > stol) throw DomainError(at + "increasing in p");
    if (k > 0) {
      const auto& prev = segs_[k - 1];
      if (s.p_start != prev.p_end) throw DomainError(at + "gap between pieces");
      if (std::abs(end_value(prev) - s.value) > vtol) throw DomainError(at + "discontinuous");
      if (end_slope(prev) > s.slope + stol) throw DomainError(at + "kink breaks convexity");
    }
  }
  if (std::abs(end_value(segs_.back())) > vtol) {
    throw DomainError("EpCurve: value at last breakpoint must be zero");
  }
}

std::vector<double> EpCurve::breakpoints() const {
  std::vector<double> out{0.0};
  for (const auto& s : segs_) out.push_back(s.p_end);
  return out;
}

bool EpCurve::is_linear() const noexcept {
  return std::all_of(segs_.begin(), segs_.end(),
                     [](const EpSegment& s) { return s.curvature == 0.0; });
}

double EpCurve::operator()(double p) const {
  if (!(p >= 0.0)) throw DomainError("EpCurve: power must be non-negative");
  if (segs_.empty() || p >= segs_.back().p_end) return 0.0;
  auto it = std::upper_bound(segs_.begin(), segs_.end(), p,
                             [](double v, const EpSegment& s) { return v < s.p_end; });
  return std::max(0.0, piece_value(*it, p));
}

double evaluate(const EpCurve& curve, double p) { return curve(p); }

EpCurve ep_transform(const RequestProfile& profile) {
  const auto& bps = profile.breakpoints();
  std::vector<double> levels{0.0};
  for (const auto& b : bps) levels.push_back(b.p);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 2) return {};

  std::vector<EpSegment> segs(levels.size() - 1);
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    segs[k].p_start = levels[k];
    segs[k].p_end = levels[k + 1];
  }
  // On [L, R] each time segment contributes, with u = p - L:
  //   R <= lo:        dt * (mean - L) - dt * u                       (fully above p)
  //   lo <= L, R <= hi: dt/(2(hi-lo)) * (hi - L - u)^2               (crossing p)
  //   otherwise:      0
  for (std::size_t i = 1; i < bps.size(); ++i) {
    const double dt = bps[i].t - bps[i - 1].t;
    if (dt <= 0.0) continue;
    const double lo = std::min(bps[i - 1].p, bps[i].p);
    const double hi = std::max(bps[i - 1].p, bps[i].p);
    const double mean = 0.5 * (bps[i - 1].p + bps[i].p);
    const double k = hi > lo ? dt / (2.0 * (hi - lo)) : 0.0;
    for (auto& s : segs) {
      const double L = s.p_start;
      if (s.p_end <= lo) {
        s.value += dt * (mean - L);
        s.slope -= dt;
      } else if (s.p_end <= hi) {
        const double h = hi - L;
        s.value += k * h * h;
        s.slope -= 2.0 * k * h;
        s.curvature += k;
      } else {
        break;
      }
    }
  }
  return EpCurve(std::move(segs));
}

EpCurve capacity_curve_presorted(std::span<const double> p_max, std::span<const double> x,
                                 std::span<const std::size_t> order) {
  if (p_max.size() != x.size() || order.size() != x.size()) {
    throw DimensionError("capacity_curve: p_max has " + std::to_string(p_max.size()) +
                         " entries, state has " + std::to_string(x.size()));
  }
  // Group equal time-to-go values into one piece: (x level, summed power).
  std::vector<std::pair<double, double>> groups;
  groups.reserve(order.size());
  for (std::size_t idx : order) {
    const double xi = x[idx];
    if (!(xi > 0.0)) continue;
    if (!groups.empty() && groups.back().first == xi) {
      groups.back().second += p_max[idx];
    } else {
      groups.emplace_back(xi, p_max[idx]);
    }
  }
  if (groups.empty()) return {};
  std::vector<EpSegment> segs(groups.size());
  double c = 0.0;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    segs[k].p_start = c;
    c += groups[k].second;
    segs[k].p_end = c;
    segs[k].slope = -groups[k].first;
  }
  // Accumulate from the tail so the curve ends exactly at zero.
  double v = 0.0;
  for (std::size_t k = groups.size(); k-- > 0;) {
    v += groups[k].first * groups[k].second;
    segs[k].value = v;
  }
  return EpCurve(std::move(segs));
}

EpCurve capacity_curve(std::span<const double> p_max, std::span<const double> x) {
  if (p_max.size() != x.size()) {
    throw DimensionError("capacity_curve: p_max has " + std::to_string(p_max.size()) +
                         " entries, state has " + std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(p_max[i] > 0.0)) throw DomainError("capacity_curve: p_max must be positive");
    if (!(x[i] >= 0.0)) throw DomainError("capacity_curve: time-to-go must be non-negative");
  }
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  return capacity_curve_presorted(p_max, x, order);
}

namespace {

// Piece of `c` covering [a, b] (b <= support_end), advancing `cursor`.
const EpSegment* piece_for(const EpCurve& c, std::size_t& cursor, double a) {
  const auto& segs = c.segments();
  while (cursor < segs.size() && segs[cursor].p_end <= a) ++cursor;
  return cursor < segs.size() ? &segs[cursor] : nullptr;
}

}  // namespace

bool dominated_by(const EpCurve& request, const EpCurve& capacity) {
  // On every interval between merged breakpoints both curves are single
  // polynomials, so request - capacity is a quadratic there. Its maximum
  // sits at an endpoint, or at the vertex when the quadratic is concave.
  // With a piecewise-linear capacity the difference is convex and only the
  // endpoints matter.
  if (request.segments().empty()) return true;
  std::vector<double> pts = request.breakpoints();
  const auto cap_bps = capacity.breakpoints();
  pts.insert(pts.end(), cap_bps.begin(), cap_bps.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const double req_end = request.support_end();
  std::size_t rc = 0, cc = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    if (a >= req_end) break;
    const EpSegment* r = piece_for(request, rc, a);
    const EpSegment* c = piece_for(capacity, cc, a);
    auto diff = [&](double p) {
      const double rv = r ? piece_value(*r, p) : 0.0;
      const double cv = c ? piece_value(*c, p) : 0.0;
      return rv - cv;
    };
    if (diff(a) > kDominanceSlack || diff(b) > kDominanceSlack) return false;
    const double dc = (r ? r->curvature : 0.0) - (c ? c->curvature : 0.0);
    if (dc < 0.0) {
      const double ds_at_a = (r ? r->slope + 2.0 * r->curvature * (a - r->p_start) : 0.0) -
                             (c ? c->slope + 2.0 * c->curvature * (a - c->p_start) : 0.0);
      const double u = -ds_at_a / (2.0 * dc);
      if (u > 0.0 && a + u < b && diff(a + u) > kDominanceSlack) return false;
    }
  }
  return true;
}

EpCurve scale_transform_identity(const EpCurve& curve, double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw DomainError("scale_transform_identity: factor must be positive");
  }
  auto segs = curve.segments();
  for (auto& s : segs) {
    s.p_start *= m;
    s.p_end *= m;
    s.value *= m;
    s.curvature /= m;
  }
  return EpCurve(std::move(segs));
}

void write_curve_csv(std::ostream& out, const EpCurve& curve) {
  std::ostringstream buf;
  buf << std::setprecision(12);
  buf << "p_kw,e_kwh\n";
  const auto& segs = curve.segments();
  if (segs.empty()) {
    buf << "0,0\n";
    out << buf.str();
    return;
  }
  for (const auto& s : segs) {
    buf << s.p_start << ',' << piece_value(s, s.p_start) << '\n';
    if (s.curvature != 0.0) {
      for (int j = 1; j <= 9; ++j) {
        const double p = s.p_start + (s.p_end - s.p_start) * j / 10.0;
        buf << p << ',' << std::max(0.0, piece_value(s, p)) << '\n';
      }
    }
  }
  buf << segs.back().p_end << ",0\n";
  out << buf.str();
}

}  // namespace epcap
