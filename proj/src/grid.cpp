#include "rhj/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace rhj {

namespace {
void check_values(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("grid values must be finite");
}
}  // namespace

GridFunction GridFunction::line(double origin, double spacing, std::size_t n, std::vector<double> values) {
  if (!(spacing > 0.0) || n == 0) throw std::invalid_argument("bad 1D grid geometry");
  if (values.empty()) values.assign(n, 0.0);
  if (values.size() != n) throw std::invalid_argument("value count does not match grid extent");
  check_values(values);
  GridFunction g;
  g.dim_ = 1;
  g.origin_ = {origin, 0.0};
  g.spacing_ = spacing;
  g.nx_ = n;
  g.ny_ = 1;
  g.values_ = std::move(values);
  return g;
}

GridFunction GridFunction::plane(std::array<double, 2> origin, double spacing, std::size_t nx,
                                 std::size_t ny, std::vector<double> values) {
  if (!(spacing > 0.0) || nx == 0 || ny == 0) throw std::invalid_argument("bad 2D grid geometry");
  if (values.empty()) values.assign(nx * ny, 0.0);
  if (values.size() != nx * ny) throw std::invalid_argument("value count does not match grid extents");
  check_values(values);
  GridFunction g;
  g.dim_ = 2;
  g.origin_ = origin;
  g.spacing_ = spacing;
  g.nx_ = nx;
  g.ny_ = ny;
  g.values_ = std::move(values);
  return g;
}

Region GridFunction::bounds() const {
  Region r;
  r.lo = origin_;
  r.hi = {x(nx_ - 1), dim_ == 2 ? y(ny_ - 1) : origin_[1]};
  return r;
}

GridFunction GridFunction::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) throw std::invalid_argument("value count mismatch");
  GridFunction g = *this;
  g.values_ = std::move(values);
  return g;
}

IndexRange nodes_in(double origin, double spacing, std::size_t n, double lo, double hi) {
  IndexRange r;
  const double a = std::ceil((lo - origin) / spacing - 1e-9);
  const double b = std::floor((hi - origin) / spacing + 1e-9);
  const double first = std::max(a, 0.0);
  const double last = std::min(b, static_cast<double>(n) - 1.0);
  if (first > last) return r;
  r.first = static_cast<std::size_t>(first);
  r.last = static_cast<std::size_t>(last);
  r.empty = false;
  return r;
}

GridFunction GridFunction::crop(const Region& r) const {
  const IndexRange rx = nodes_in(origin_[0], spacing_, nx_, r.lo[0], r.hi[0]);
  if (rx.empty) throw std::invalid_argument("region misses the grid");
  if (dim_ == 1) {
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(rx.first),
                          values_.begin() + static_cast<std::ptrdiff_t>(rx.last + 1));
    const std::size_t n = v.size();
    return line(x(rx.first), spacing_, n, std::move(v));
  }
  const IndexRange ry = nodes_in(origin_[1], spacing_, ny_, r.lo[1], r.hi[1]);
  if (ry.empty) throw std::invalid_argument("region misses the grid");
  const std::size_t cx = rx.last - rx.first + 1, cy = ry.last - ry.first + 1;
  std::vector<double> v;
  v.reserve(cx * cy);
  for (std::size_t iy = ry.first; iy <= ry.last; ++iy)
    for (std::size_t ix = rx.first; ix <= rx.last; ++ix) v.push_back(at(ix, iy));
  return plane({x(rx.first), y(ry.first)}, spacing_, cx, cy, std::move(v));
}

}  // namespace rhj
