#include "rhj/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rhj {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

IntervalSet::IntervalSet(std::vector<Interval> parts) {
  for (const auto& p : parts) {
    if (std::isnan(p.lo) || std::isnan(p.hi) || p.lo > p.hi || p.lo == kInf || p.hi == -kInf)
      throw std::invalid_argument("malformed interval");
  }
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& p : parts) {
    if (!parts_.empty() && p.lo <= parts_.back().hi) {
      parts_.back().hi = std::max(parts_.back().hi, p.hi);
    } else {
      parts_.push_back(p);
    }
  }
}

IntervalSet IntervalSet::whole_line() { return IntervalSet({{-kInf, kInf}}); }
IntervalSet IntervalSet::ray_right(double a) { return IntervalSet({{a, kInf}}); }
IntervalSet IntervalSet::ray_left(double b) { return IntervalSet({{-kInf, b}}); }

bool IntervalSet::contains(double x) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                             [](double v, const Interval& p) { return v < p.lo; });
  return it != parts_.begin() && x <= std::prev(it)->hi;
}

double IntervalSet::distance(double x) const {
  if (parts_.empty()) return kInf;
  auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                             [](double v, const Interval& p) { return v < p.lo; });
  double d = kInf;
  if (it != parts_.end()) d = it->lo - x;
  if (it != parts_.begin()) d = std::min(d, std::max(0.0, x - std::prev(it)->hi));
  return d;
}

IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> all(a.intervals().begin(), a.intervals().end());
  all.insert(all.end(), b.intervals().begin(), b.intervals().end());
  return IntervalSet(std::move(all));
}

IntervalSet difference(const IntervalSet& a, const IntervalSet& b) {
  // Open gaps of b.
  std::vector<Interval> gaps;
  double left = -kInf;
  bool open_left = true;  // the gap (-inf, ...) has no closed end
  for (const auto& p : b.intervals()) {
    if (open_left ? p.lo > -kInf : p.lo > left) gaps.push_back({left, p.lo});
    left = p.hi;
    open_left = false;
  }
  if (left < kInf) gaps.push_back({left, kInf});

  std::vector<Interval> out;
  for (const auto& p : a.intervals()) {
    for (const auto& g : gaps) {
      const double lo = std::max(p.lo, g.lo), hi = std::min(p.hi, g.hi);
      if (lo < hi) {
        out.push_back({lo, hi});
      } else if (lo == hi && p.lo == p.hi && g.lo < lo && lo < g.hi) {
        out.push_back({lo, hi});
      }
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet symmetric_difference(const IntervalSet& a, const IntervalSet& b) {
  return unite(difference(a, b), difference(b, a));
}

bool is_subset(const IntervalSet& a, const IntervalSet& b) {
  for (const auto& p : a.intervals()) {
    auto it = std::upper_bound(b.intervals().begin(), b.intervals().end(), p.lo,
                               [](double v, const Interval& q) { return v < q.lo; });
    if (it == b.intervals().begin()) return false;
    if (p.hi > std::prev(it)->hi) return false;
  }
  return true;
}

bool approx_equal(const IntervalSet& a, const IntervalSet& b, double tol) {
  if (a.size() != b.size()) return false;
  auto close = [tol](double x, double y) {
    if (std::isinf(x) || std::isinf(y)) return x == y;
    return std::abs(x - y) <= tol;
  };
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!close(a.intervals()[i].lo, b.intervals()[i].lo) || !close(a.intervals()[i].hi, b.intervals()[i].hi))
      return false;
  return true;
}

}  // namespace rhj
