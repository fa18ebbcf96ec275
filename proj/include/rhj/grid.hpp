#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rhj {

/// Axis-aligned box in physical coordinates; `hi` unused entries ignored in 1D.
struct Region {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
};

/// Real-valued function on a uniform 1D or 2D grid. 2D grids are square-celled
/// and stored row-major: index = iy * nx + ix. Outside the grid the function is
/// extended by its boundary values.
class GridFunction {
 public:
  GridFunction() = default;
  static GridFunction line(double origin, double spacing, std::size_t n, std::vector<double> values = {});
  static GridFunction plane(std::array<double, 2> origin, double spacing, std::size_t nx,
                            std::size_t ny, std::vector<double> values = {});

  int dim() const noexcept { return dim_; }
  double spacing() const noexcept { return spacing_; }
  const std::array<double, 2>& origin() const noexcept { return origin_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t ix, std::size_t iy = 0) { return values_[iy * nx_ + ix]; }
  double at(std::size_t ix, std::size_t iy = 0) const { return values_[iy * nx_ + ix]; }

  double x(std::size_t ix) const noexcept { return origin_[0] + spacing_ * static_cast<double>(ix); }
  double y(std::size_t iy) const noexcept { return origin_[1] + spacing_ * static_cast<double>(iy); }
  /// Physical extent covered by the grid nodes.
  Region bounds() const;

  /// Same geometry with new values (size must match).
  GridFunction with_values(std::vector<double> values) const;
  /// Nodes lying in the region; dimensions shrink accordingly.
  GridFunction crop(const Region& r) const;

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

 private:
  int dim_ = 1;
  std::array<double, 2> origin_{0.0, 0.0};
  double spacing_ = 1.0;
  std::size_t nx_ = 0, ny_ = 1;
  std::vector<double> values_;
};

/// Index range [first, last] of nodes with coordinate in [lo, hi] along an axis.
struct IndexRange {
  std::size_t first = 0, last = 0;
  bool empty = true;
};
IndexRange nodes_in(double origin, double spacing, std::size_t n, double lo, double hi);

}  // namespace rhj
