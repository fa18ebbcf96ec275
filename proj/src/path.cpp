#include "rhj/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rhj/error.hpp"

namespace rhj {

SampledPath::SampledPath(std::vector<Breakpoint> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InvalidPath("path needs at least 2 breakpoints");
  if (points_.front().t != 0.0 || points_.front().value != 0.0)
    throw InvalidPath("path must start at (0,0)");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].t) || !std::isfinite(points_[i].value))
      throw InvalidPath("non-finite breakpoint at index " + std::to_string(i));
    if (i > 0 && !(points_[i].t > points_[i - 1].t))
      throw InvalidPath("times not strictly increasing at index " + std::to_string(i));
  }
}

SampledPath SampledPath::from_slopes(std::span<const double> slopes, double duration) {
  std::vector<Breakpoint> pts{{0.0, 0.0}};
  double v = 0.0;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    v += slopes[i] * duration;
    pts.push_back({duration * static_cast<double>(i + 1), v});
  }
  return SampledPath(std::move(pts));
}

SampledPath SampledPath::from_values(std::span<const double> values, double dt) {
  std::vector<Breakpoint> pts;
  pts.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    pts.push_back({dt * static_cast<double>(i), values[i]});
  return SampledPath(std::move(pts));
}

double SampledPath::value_at(double t) const {
  if (t <= 0.0) return points_.front().value;
  if (t >= horizon()) return points_.back().value;
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double x, const Breakpoint& b) { return x < b.t; });
  const Breakpoint& b = *it;
  const Breakpoint& a = *(it - 1);
  return a.value + (b.value - a.value) * ((t - a.t) / (b.t - a.t));
}

SampledPath SampledPath::negated() const {
  std::vector<Breakpoint> pts(points_);
  for (auto& p : pts) p.value = -p.value;
  pts.front().value = 0.0;
  return SampledPath(std::move(pts));
}

SampledPath SampledPath::truncated(double t_end) const {
  if (!(t_end > 0.0) || t_end > horizon()) throw InvalidPath("truncation time outside (0, T]");
  std::vector<Breakpoint> pts;
  for (const auto& p : points_) {
    if (p.t >= t_end) break;
    pts.push_back(p);
  }
  pts.push_back({t_end, value_at(t_end)});
  return SampledPath(std::move(pts));
}

ReducedPath::ReducedPath(SampledPath path, ReductionKind kind, std::size_t anchor,
                         ExtremumType anchor_type)
    : path_(std::move(path)), kind_(kind), anchor_(anchor), anchor_type_(anchor_type) {
  if (anchor_ >= path_.size()) throw InvalidPath("anchor index out of range");
}

const Breakpoint& ReducedPath::chain(int k) const {
  if (k > 0 || -k > static_cast<int>(anchor_)) throw std::out_of_range("chain index out of range");
  return path_[anchor_ - static_cast<std::size_t>(-k)];
}

double ReducedPath::backward_variation() const {
  return total_variation(breakpoints().first(anchor_ + 1));
}

double total_variation(std::span<const Breakpoint> points) {
  double tv = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) tv += std::abs(points[i].value - points[i - 1].value);
  return tv;
}

double total_variation(const SampledPath& p) { return total_variation(p.breakpoints()); }
double total_variation(const ReducedPath& p) { return total_variation(p.breakpoints()); }

namespace {

// Extremum selection over breakpoint indices. Earliest/latest conventions follow
// the backward (inf) and forward (sup) chains.
struct ExtremaTables {
  std::vector<std::size_t> first_max, first_min;  // over [0, i]
  std::vector<std::size_t> last_max, last_min;    // over [i, n-1]

  explicit ExtremaTables(std::span<const Breakpoint> p) {
    const std::size_t n = p.size();
    first_max.resize(n);
    first_min.resize(n);
    last_max.resize(n);
    last_min.resize(n);
    first_max[0] = first_min[0] = 0;
    for (std::size_t i = 1; i < n; ++i) {
      first_max[i] = p[i].value > p[first_max[i - 1]].value ? i : first_max[i - 1];
      first_min[i] = p[i].value < p[first_min[i - 1]].value ? i : first_min[i - 1];
    }
    last_max[n - 1] = last_min[n - 1] = n - 1;
    for (std::size_t i = n - 1; i-- > 0;) {
      last_max[i] = p[i].value > p[last_max[i + 1]].value ? i : last_max[i + 1];
      last_min[i] = p[i].value < p[last_min[i + 1]].value ? i : last_min[i + 1];
    }
  }
};

struct Chains {
  std::vector<std::size_t> backward;  // tau_0, tau_-1, ..., down to index 0
  std::vector<std::size_t> forward;   // tau_1, tau_2, ..., ending at n-1
  ExtremumType anchor_type;
};

Chains extract_chains(std::span<const Breakpoint> p) {
  const ExtremaTables tab(p);
  const std::size_t n = p.size();
  Chains c;
  std::size_t tau0;
  if (tab.last_max[0] >= tab.last_min[0]) {
    tau0 = tab.last_max[0];
    c.anchor_type = ExtremumType::max;
  } else {
    tau0 = tab.last_min[0];
    c.anchor_type = ExtremumType::min;
  }

  c.backward.push_back(tau0);
  bool at_max = c.anchor_type == ExtremumType::max;
  std::size_t cur = tau0;
  while (cur > 0) {
    const std::size_t next = at_max ? tab.first_min[cur] : tab.first_max[cur];
    if (next == cur) break;  // constant stretch, only possible at index 0
    c.backward.push_back(next);
    cur = next;
    at_max = !at_max;
  }
  if (c.backward.back() != 0) c.backward.push_back(0);

  at_max = c.anchor_type == ExtremumType::max;
  cur = tau0;
  while (cur < n - 1) {
    const std::size_t next = at_max ? tab.last_min[cur] : tab.last_max[cur];
    if (next == cur) break;
    c.forward.push_back(next);
    cur = next;
    at_max = !at_max;
  }
  if (cur != n - 1) c.forward.push_back(n - 1);
  return c;
}

}  // namespace

ReducedPath reduce(const SampledPath& xi) {
  const auto p = xi.breakpoints();
  const Chains c = extract_chains(p);
  std::vector<Breakpoint> out;
  out.reserve(c.backward.size() + c.forward.size());
  for (auto it = c.backward.rbegin(); it != c.backward.rend(); ++it) out.push_back(p[*it]);
  const std::size_t anchor = out.size() - 1;
  for (std::size_t idx : c.forward) out.push_back(p[idx]);
  return ReducedPath(SampledPath(std::move(out)), ReductionKind::reduced, anchor, c.anchor_type);
}

ReducedPath fully_reduce(const SampledPath& xi) {
  const auto p = xi.breakpoints();
  const Chains c = extract_chains(p);
  std::vector<Breakpoint> out;
  for (auto it = c.backward.rbegin(); it != c.backward.rend(); ++it) out.push_back(p[*it]);
  const std::size_t anchor = out.size() - 1;
  if (c.backward.front() != p.size() - 1) out.push_back(p.back());
  return ReducedPath(SampledPath(std::move(out)), ReductionKind::fully_reduced, anchor,
                     c.anchor_type);
}

bool is_reduced(const SampledPath& p) { return reduce(p).path() == p; }

std::optional<double> range_hit_time(const SampledPath& xi, double a) {
  if (a < 0.0) throw std::invalid_argument("range level must be non-negative");
  if (a == 0.0) return 0.0;
  const auto p = xi.breakpoints();
  double hi = 0.0, lo = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double v0 = p[i - 1].value, v1 = p[i].value;
    double target;
    if (v1 > hi && v1 - lo >= a) {
      target = lo + a;
    } else if (v1 < lo && hi - v1 >= a) {
      target = hi - a;
    } else {
      hi = std::max(hi, v1);
      lo = std::min(lo, v1);
      continue;
    }
    const double frac = (target - v0) / (v1 - v0);
    return std::clamp(p[i - 1].t + frac * (p[i].t - p[i - 1].t), p[i - 1].t, p[i].t);
  }
  return std::nullopt;
}

PathStats running_stats(const SampledPath& xi) {
  const auto p = xi.breakpoints();
  PathStats s;
  s.total_variation = total_variation(p);
  double hi = 0.0, lo = 0.0;
  for (const auto& b : p) {
    hi = std::max(hi, b.value);
    lo = std::min(lo, b.value);
    s.running_max.push_back(hi);
    s.running_min.push_back(lo);
    s.range.push_back(hi - lo);
  }
  return s;
}

}  // namespace rhj
