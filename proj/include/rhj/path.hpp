#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rhj {

struct Breakpoint {
  double t = 0.0;
  double value = 0.0;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Continuous path given by the piecewise-linear interpolant of its breakpoints.
/// Starts at (0,0); times strictly increase; at least two points.
class SampledPath {
 public:
  explicit SampledPath(std::vector<Breakpoint> points);

  /// Path with the given slopes, each held for `duration` time units.
  static SampledPath from_slopes(std::span<const double> slopes, double duration = 1.0);
  /// Path through the values v_0=0, v_1, ... at times 0, dt, 2dt, ...
  static SampledPath from_values(std::span<const double> values, double dt);

  std::span<const Breakpoint> breakpoints() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Breakpoint& operator[](std::size_t i) const { return points_[i]; }
  double horizon() const noexcept { return points_.back().t; }
  double terminal_value() const noexcept { return points_.back().value; }

  /// Linear interpolation; t is clamped to [0, T].
  double value_at(double t) const;
  SampledPath negated() const;
  /// Same path observed on [0, t_end] (t_end in (0, T]).
  SampledPath truncated(double t_end) const;

  friend bool operator==(const SampledPath&, const SampledPath&) = default;

 private:
  std::vector<Breakpoint> points_;
};

enum class ReductionKind { reduced, fully_reduced };
enum class ExtremumType { max, min };

/// Skeleton of a path. The anchor is the index of tau_0, the latest time
/// achieving the global max or min; indices below it form the backward chain.
class ReducedPath {
 public:
  ReducedPath(SampledPath path, ReductionKind kind, std::size_t anchor, ExtremumType anchor_type);

  const SampledPath& path() const noexcept { return path_; }
  std::span<const Breakpoint> breakpoints() const noexcept { return path_.breakpoints(); }
  std::size_t size() const noexcept { return path_.size(); }
  ReductionKind kind() const noexcept { return kind_; }
  std::size_t anchor() const noexcept { return anchor_; }
  ExtremumType anchor_type() const noexcept { return anchor_type_; }

  /// tau_k for k <= 0 (k = 0 is the anchor). Requires -k <= anchor().
  const Breakpoint& chain(int k) const;
  /// Most negative valid chain index.
  int chain_bottom() const noexcept { return -static_cast<int>(anchor_); }
  /// Total variation on [0, tau_0].
  double backward_variation() const;

 private:
  SampledPath path_;
  ReductionKind kind_;
  std::size_t anchor_;
  ExtremumType anchor_type_;
};

struct PathStats {
  double total_variation = 0.0;
  std::vector<double> running_max;
  std::vector<double> running_min;
  std::vector<double> range;
};

double total_variation(std::span<const Breakpoint> points);
double total_variation(const SampledPath& p);
double total_variation(const ReducedPath& p);

ReducedPath reduce(const SampledPath& xi);
ReducedPath fully_reduce(const SampledPath& xi);
bool is_reduced(const SampledPath& p);

/// First time the running range max - min reaches a; nullopt if it never does.
std::optional<double> range_hit_time(const SampledPath& xi, double a);
PathStats running_stats(const SampledPath& xi);

}  // namespace rhj
