#include "rhj/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rhj/error.hpp"
#include "rhj/lax_oleinik.hpp"
#include "rhj/morphology.hpp"

namespace rhj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double merge_tolerance(double a, double b, double delta) {
  double m = std::max({1.0, delta, std::isfinite(a) ? std::abs(a) : 0.0, std::isfinite(b) ? std::abs(b) : 0.0});
  return 1e-12 * m;
}

}  // namespace

IntervalSet evolve_intervals(const IntervalSet& s, double delta) {
  std::vector<Interval> out;
  if (delta >= 0.0) {
    for (const auto& p : s.intervals()) {
      const Interval q{p.lo - delta, p.hi + delta};
      if (!out.empty() && q.lo <= out.back().hi + merge_tolerance(out.back().hi, q.lo, delta)) {
        out.back().hi = std::max(out.back().hi, q.hi);
      } else {
        out.push_back(q);
      }
    }
  } else {
    const double d = -delta;
    for (const auto& p : s.intervals()) {
      const Interval q{p.lo + d, p.hi - d};
      if (q.lo <= q.hi) out.push_back(q);
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet evolve_along_path(const IntervalSet& s, const SampledPath& xi) {
  const ReducedPath r = reduce(xi);
  const auto p = r.breakpoints();
  IntervalSet cur = s;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double d = p[i].value - p[i - 1].value;
    if (d != 0.0) cur = evolve_intervals(cur, d);
  }
  return cur;
}

LowerBoundSets build_lower_bound_sets(const ReducedPath& path, double slack) {
  return build_lower_bound_sets(path, path.chain_bottom(), slack);
}

LowerBoundSets build_lower_bound_sets(const ReducedPath& path, int n, double slack) {
  if (!(slack > 0.0 && slack < 1.0)) throw std::invalid_argument("slack must lie in (0,1)");
  if (n > 0 || n < path.chain_bottom())
    throw std::invalid_argument("chain index " + std::to_string(n) + " outside [" +
                                std::to_string(path.chain_bottom()) + ", 0]");
  LowerBoundSets out;
  out.chain_index = n;
  out.flipped = path.anchor_type() == ExtremumType::min;
  out.driving = out.flipped ? path.path().negated() : path.path();
  const auto pts = out.driving.breakpoints();
  const std::size_t anchor = path.anchor();
  auto c = [&](int k) { return pts[anchor - static_cast<std::size_t>(-k)].value; };

  const double cn = c(n);
  const bool shifted = pts[anchor - static_cast<std::size_t>(-n)].t > 0.0;
  // Oscillation amplitudes seen from tau_N; zero below the chain.
  auto z = [&](int k) { return k < n ? 0.0 : std::abs(c(k) - cn); };

  // y[k - n] holds the endpoint y_k for k in [n, 1], laid out at time tau_N.
  std::vector<double> y(static_cast<std::size_t>(2 - n), 0.0);
  auto Y = [&](int k) -> double& { return y[static_cast<std::size_t>(k - n)]; };
  Y(1) = 0.0;
  for (int k = 0; k > n; --k) {
    const double gap = (1.0 - slack) * 2.0 * z(k);
    if (!(gap > 2.0 * z(k - 2)))
      throw ConstraintError("gap band empty at k = " + std::to_string(k) + " for slack " + std::to_string(slack), k);
    Y(k) = Y(k + 1) - gap;
  }
  Y(n) = Y(n + 1);

  // Move the layout back to time 0 by undoing the net motion cn of [0, tau_N], then
  // translate by -cn so the ray of p1 starts at 0.
  std::vector<Interval> parts;
  for (int k = 0; 2 * k - 1 > n; --k) {
    const double lo = Y(2 * k - 1), hi = Y(2 * k) - 2.0 * cn;
    if (lo > hi)
      throw ConstraintError("component " + std::to_string(k) + " cannot be pulled back to time 0", k);
    parts.push_back({lo, hi});
  }
  parts.push_back({Y(1), kInf});
  out.p1 = IntervalSet(parts);
  const double overlap = (shifted && n % 2 == 0) ? slack * std::abs(cn) : 0.0;
  out.x_n = Y(n) - 2.0 * cn + overlap;
  out.p2 = unite(out.p1, IntervalSet::ray_left(out.x_n));

  const double tol = 1e-9 * (1.0 + total_variation(out.driving));
  const IntervalSet f1 = evolve_along_path(out.p1, out.driving);
  const IntervalSet f2 = evolve_along_path(out.p2, out.driving);
  if (!approx_equal(f1, IntervalSet::ray_right(-out.driving.terminal_value()), tol) ||
      !(f2 == IntervalSet::whole_line()))
    throw ConstraintError("constructed sets do not evolve as required for N = " + std::to_string(n), n);
  return out;
}

RhoMeasurement measure_rho(const IntervalSet& p1, const IntervalSet& p2, const SampledPath& xi, double inset) {
  RhoMeasurement m;
  m.final1 = evolve_along_path(p1, xi);
  m.final2 = evolve_along_path(p2, xi);
  const IntervalSet dt = symmetric_difference(m.final1, m.final2);
  const IntervalSet d0 = symmetric_difference(p1, p2);
  if (dt.empty()) return m;
  const auto gaps = d0.intervals();
  auto consider = [&](double x) {
    const double d = d0.distance(x);
    if (d > m.rho) {
      m.rho = d;
      m.at = x;
    }
  };
  for (const auto& comp : dt.intervals()) {
    const double a = comp.lo + inset, b = comp.hi - inset;
    if (a > b) continue;
    const bool left_open = d0.empty() || gaps.front().lo > -kInf;
    const bool right_open = d0.empty() || gaps.back().hi < kInf;
    if ((a == -kInf && left_open) || (b == kInf && right_open)) {
      m.rho = kInf;
      m.at = a == -kInf ? -kInf : kInf;
      return m;
    }
    if (std::isfinite(a)) consider(a);
    if (std::isfinite(b)) consider(b);
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
      const double mid = 0.5 * (gaps[i].hi + gaps[i + 1].lo);
      if (mid >= a && mid <= b) consider(mid);
    }
  }
  return m;
}

BinarySet2D::BinarySet2D(std::array<double, 2> origin, double spacing, std::size_t nx, std::size_t ny,
                         std::vector<std::uint8_t> cells)
    : origin_(origin), spacing_(spacing), nx_(nx), ny_(ny), cells_(std::move(cells)) {
  if (!(spacing > 0.0) || nx == 0 || ny == 0) throw std::invalid_argument("bad 2D set geometry");
  if (cells_.empty()) cells_.assign(nx * ny, 0);
  if (cells_.size() != nx * ny) throw std::invalid_argument("cell count does not match extents");
  for (auto& c : cells_) c = c ? 1 : 0;
}

BinarySet2D BinarySet2D::from_predicate(std::array<double, 2> origin, double spacing, std::size_t nx,
                                        std::size_t ny, const std::function<bool(double, double)>& inside) {
  std::vector<std::uint8_t> cells(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix)
      cells[iy * nx + ix] = inside(origin[0] + spacing * static_cast<double>(ix),
                                   origin[1] + spacing * static_cast<double>(iy)) ? 1 : 0;
  return BinarySet2D(origin, spacing, nx, ny, std::move(cells));
}

std::size_t BinarySet2D::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

Region BinarySet2D::bounds() const {
  Region r;
  r.lo = origin_;
  r.hi = {x(nx_ - 1), y(ny_ - 1)};
  return r;
}

BinarySet2D BinarySet2D::with_cells(std::vector<std::uint8_t> cells) const {
  return BinarySet2D(origin_, spacing_, nx_, ny_, std::move(cells));
}

GridFunction BinarySet2D::indicator() const {
  std::vector<double> v(cells_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cells_[i] ? 1.0 : -1.0;
  return GridFunction::plane(origin_, spacing_, nx_, ny_, std::move(v));
}

BinarySet2D evolve_set_2d_raw(const BinarySet2D& s, const SampledPath& xi, const Region& roi,
                              const SetObserver& observer) {
  const auto radii = carried_radii(xi, s.spacing());
  long long total = 0;
  for (long long k : radii) total += std::llabs(k);
  check_margin(s.bounds(), 2, roi, static_cast<double>(total) * s.spacing());
  const auto p = xi.breakpoints();
  BinarySet2D cur = s;
  if (observer) observer(0, 0.0, cur);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const long long k = radii[i];
    if (k > 0) cur = cur.with_cells(dilate_mask(cur.cells(), cur.nx(), cur.ny(), static_cast<std::size_t>(k)));
    if (k < 0) cur = cur.with_cells(erode_mask(cur.cells(), cur.nx(), cur.ny(), static_cast<std::size_t>(-k)));
    if (observer) observer(i + 1, p[i + 1].t, cur);
  }
  return cur;
}

BinarySet2D evolve_set_2d(const BinarySet2D& s, const SampledPath& xi, const Region& roi,
                          const SetObserver& observer) {
  return evolve_set_2d_raw(s, reduce(xi).path(), roi, observer);
}

RhoMeasurement2D measure_rho_2d(const BinarySet2D& p1, const BinarySet2D& p2, const SampledPath& xi,
                                const Region& roi) {
  if (p1.nx() != p2.nx() || p1.ny() != p2.ny() || p1.spacing() != p2.spacing() || p1.origin() != p2.origin())
    throw std::invalid_argument("sets must share a grid");
  const BinarySet2D f1 = evolve_set_2d(p1, xi, roi);
  const BinarySet2D f2 = evolve_set_2d(p2, xi, roi);
  std::vector<std::uint8_t> d0(p1.cells().size());
  for (std::size_t i = 0; i < d0.size(); ++i) d0[i] = p1.cells()[i] != p2.cells()[i];
  const auto dist2 = squared_distance(d0, p1.nx(), p1.ny());
  RhoMeasurement2D m;
  const IndexRange rx = nodes_in(p1.origin()[0], p1.spacing(), p1.nx(), roi.lo[0], roi.hi[0]);
  const IndexRange ry = nodes_in(p1.origin()[1], p1.spacing(), p1.ny(), roi.lo[1], roi.hi[1]);
  if (rx.empty || ry.empty) return m;
  std::int64_t best = -1;
  for (std::size_t iy = ry.first; iy <= ry.last; ++iy)
    for (std::size_t ix = rx.first; ix <= rx.last; ++ix) {
      if (f1.at(ix, iy) == f2.at(ix, iy)) continue;
      ++m.differing;
      const std::int64_t d = dist2[iy * p1.nx() + ix];
      if (d > best) {
        best = d;
        m.at = {p1.x(ix), p1.y(iy)};
      }
    }
  if (best < 0) return m;
  m.rho = best == kNoSource ? kInf : std::sqrt(static_cast<double>(best)) * p1.spacing();
  return m;
}

namespace {

std::size_t cells_for(double lo, double hi, double spacing) {
  return static_cast<std::size_t>(std::llround((hi - lo) / spacing)) + 1;
}

}  // namespace

PlaneScenario three_slopes_scenario(double d1, double d2, double d3, double spacing) {
  if (!(d1 > d2 && d2 > d3 && d3 > 0.0)) throw std::invalid_argument("need d1 > d2 > d3 > 0");
  if (!(spacing > 0.0 && spacing < d3 / 4.0)) throw std::invalid_argument("spacing too coarse for the slopes");
  const double tv = d1 + d2 + d3;
  const double len = 2.0 * d2 - 3.0 * spacing;
  PlaneScenario sc;
  sc.xi = SampledPath({{0.0, 0.0}, {1.0, d1}, {2.0, d1 - d2}, {3.0, d1 - d2 + d3}});
  sc.roi.lo = {-d1 - 0.5 * d2, -d1};
  sc.roi.hi = {len + d2, d1};
  // Grid covers roi plus the reach of the path plus a few cells; snapped to the lattice.
  const double pad = tv + 4.0 * spacing;
  const double x0 = spacing * std::floor((sc.roi.lo[0] - pad) / spacing);
  const double y0 = spacing * std::floor((sc.roi.lo[1] - pad) / spacing);
  const std::size_t nx = cells_for(x0, sc.roi.hi[0] + pad, spacing);
  const std::size_t ny = cells_for(y0, sc.roi.hi[1] + pad, spacing);
  const double h = 0.5 * spacing;
  auto seg = [&](double x, double y) {
    return x >= -h && x <= len + h && (std::abs(y - d1) <= h || std::abs(y + d1) <= h);
  };
  sc.p1 = BinarySet2D::from_predicate({x0, y0}, spacing, nx, ny, seg);
  sc.p2 = BinarySet2D::from_predicate({x0, y0}, spacing, nx, ny,
                                      [&](double x, double y) { return seg(x, y) || std::abs(x + d1) <= h; });
  return sc;
}

PlaneScenario two_hole_scenario(double spacing) {
  if (!(spacing > 0.0 && spacing <= 0.1)) throw std::invalid_argument("spacing must lie in (0, 0.1]");
  constexpr double kRadius = 4.3, kCentre = 1.8;
  PlaneScenario sc;
  sc.xi = SampledPath({{0.0, 0.0}, {1.0, 4.0}, {2.0, 2.0}, {3.0, 3.0}});
  sc.roi.lo = {-4.5, -3.0};
  sc.roi.hi = {4.5, 3.0};
  const double pad = 7.0 + 4.0 * spacing;
  const double x0 = spacing * std::floor((sc.roi.lo[0] - pad) / spacing);
  const double y0 = spacing * std::floor((sc.roi.lo[1] - pad) / spacing);
  const std::size_t nx = cells_for(x0, sc.roi.hi[0] + pad, spacing);
  const std::size_t ny = cells_for(y0, sc.roi.hi[1] + pad, spacing);
  sc.p1 = BinarySet2D::from_predicate({x0, y0}, spacing, nx, ny, [&](double x, double y) {
    const double a = std::hypot(x - kCentre, y), b = std::hypot(x + kCentre, y);
    return a > kRadius && b > kRadius;
  });
  sc.p2 = sc.p1;
  return sc;
}

}  // namespace rhj
