#pragma once

#include <span>
#include <vector>

namespace rhj {

/// Closed interval; lo may be -inf and hi may be +inf (rays, or the whole line).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of disjoint closed intervals, kept sorted; touching or
/// overlapping pieces are merged on construction.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);

  static IntervalSet whole_line();
  static IntervalSet ray_right(double a);  // [a, +inf)
  static IntervalSet ray_left(double b);   // (-inf, b]

  std::span<const Interval> intervals() const noexcept { return parts_; }
  std::size_t size() const noexcept { return parts_.size(); }
  bool empty() const noexcept { return parts_.empty(); }
  bool contains(double x) const;
  /// Distance from x to the set; +inf for the empty set.
  double distance(double x) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> parts_;
};

IntervalSet unite(const IntervalSet& a, const IntervalSet& b);
/// Closure of a \ b.
IntervalSet difference(const IntervalSet& a, const IntervalSet& b);
/// Closure of the symmetric difference.
IntervalSet symmetric_difference(const IntervalSet& a, const IntervalSet& b);
bool is_subset(const IntervalSet& a, const IntervalSet& b);
/// Same number of pieces and endpoints within tol (infinite endpoints must match).
bool approx_equal(const IntervalSet& a, const IntervalSet& b, double tol);

}  // namespace rhj
