#include "rhj/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rhj/error.hpp"

namespace rhj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> segment_slopes(std::span<const double> x, std::span<const double> y) {
  std::vector<double> c(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) c[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  return c;
}

void check_samples(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("table needs matching non-empty x and y");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw std::invalid_argument("table values must be finite");
    if (i > 0 && !(x[i] > x[i - 1])) throw std::invalid_argument("table abscissae must increase");
  }
}

double interpolate(const ConvexTable& t, double v) {
  auto it = std::upper_bound(t.x.begin(), t.x.end(), v);
  if (it == t.x.begin()) return t.y.front();
  if (it == t.x.end()) return t.y.back();
  const auto i = static_cast<std::size_t>(it - t.x.begin());
  const double w = (v - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
  return t.y[i - 1] + w * (t.y[i] - t.y[i - 1]);
}

}  // namespace

void require_convex(std::span<const double> x, std::span<const double> y) {
  check_samples(x, y);
  if (x.size() < 3) return;
  const auto c = segment_slopes(x, y);
  double scale = 1.0;
  for (double s : c) scale = std::max(scale, std::abs(s));
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] < c[i - 1] - 1e-12 * scale)
      throw NotConvex("table is not convex near sample " + std::to_string(i));
}

std::vector<double> legendre_transform(std::span<const double> x, std::span<const double> y,
                                       std::span<const double> slopes) {
  require_convex(x, y);
  for (std::size_t j = 1; j < slopes.size(); ++j)
    if (slopes[j] < slopes[j - 1]) throw std::invalid_argument("query slopes must be sorted");
  const auto c = segment_slopes(x, y);
  std::vector<double> out(slopes.size());
  std::size_t i = 0;
  for (std::size_t j = 0; j < slopes.size(); ++j) {
    const double s = slopes[j];
    while (i < c.size() && c[i] < s) ++i;
    out[j] = s * x[i] - y[i];
  }
  return out;
}

ConvexTable legendre_transform(const ConvexTable& f) {
  require_convex(f.x, f.y);
  ConvexTable g;
  if (f.x.size() == 1) {
    // Conjugate of a point mass is affine; represent it by two samples.
    g.x = {-1.0, 1.0};
    g.y = {-f.x[0] - f.y[0], f.x[0] - f.y[0]};
    return g;
  }
  const auto c = segment_slopes(f.x, f.y);
  double scale = 1.0;
  for (double s : c) scale = std::max(scale, std::abs(s));
  for (std::size_t i = 0; i < c.size(); ++i) {
    // Collinear with the previous segment up to rounding.
    if (!g.x.empty() && !(c[i] > g.x.back() + 1e-12 * scale)) continue;
    g.x.push_back(c[i]);
    g.y.push_back(c[i] * f.x[i] - f.y[i]);
  }
  return g;
}

double Lagrangian::operator()(double v) const {
  if (v < lo_ || v > hi_) return kInf;
  switch (kind_) {
    case HamiltonianKind::abs:
      return 0.0;
    case HamiltonianKind::half_square:
      return 0.5 * v * v;
    case HamiltonianKind::tabulated:
      return interpolate(table_, v);
  }
  return kInf;
}

double Lagrangian::operator()(std::array<double, 2> v) const {
  if (kind_ == HamiltonianKind::tabulated) throw std::invalid_argument("tabulated Lagrangian is 1D only");
  return (*this)(std::hypot(v[0], v[1]));
}

double Lagrangian::domain_radius() const noexcept { return std::max(std::abs(lo_), std::abs(hi_)); }

ConvexHamiltonian ConvexHamiltonian::abs() {
  ConvexHamiltonian h;
  h.kind_ = h.lag_.kind_ = HamiltonianKind::abs;
  h.lip_ = 1.0;
  h.lag_.lo_ = -1.0;
  h.lag_.hi_ = 1.0;
  return h;
}

ConvexHamiltonian ConvexHamiltonian::half_square(double speed) {
  if (!(speed > 0.0) || !std::isfinite(speed)) throw std::invalid_argument("speed bound must be positive");
  ConvexHamiltonian h;
  h.kind_ = h.lag_.kind_ = HamiltonianKind::half_square;
  h.lip_ = h.speed_ = speed;
  h.lag_.lo_ = -speed;
  h.lag_.hi_ = speed;
  return h;
}

ConvexHamiltonian ConvexHamiltonian::tabulated(std::vector<double> p, std::vector<double> values) {
  require_convex(p, values);
  if (p.size() < 2) throw std::invalid_argument("tabulated Hamiltonian needs at least 2 samples");
  ConvexHamiltonian h;
  h.kind_ = h.lag_.kind_ = HamiltonianKind::tabulated;
  h.table_ = {std::move(p), std::move(values)};
  h.lag_.table_ = legendre_transform(h.table_);
  h.lag_.lo_ = h.lag_.table_.x.front();
  h.lag_.hi_ = h.lag_.table_.x.back();
  h.lip_ = std::max(std::abs(h.lag_.lo_), std::abs(h.lag_.hi_));
  // Symmetric when H(p) = H(-p) on a mirrored grid.
  const auto& t = h.table_;
  h.symmetric_ = true;
  for (std::size_t i = 0, j = t.x.size() - 1; i < t.x.size(); ++i, --j)
    if (t.x[i] != -t.x[j] || t.y[i] != t.y[j]) h.symmetric_ = false;
  return h;
}

double ConvexHamiltonian::operator()(double p) const {
  switch (kind_) {
    case HamiltonianKind::abs:
      return std::abs(p);
    case HamiltonianKind::half_square: {
      const double a = std::abs(p);
      return a <= speed_ ? 0.5 * a * a : speed_ * a - 0.5 * speed_ * speed_;
    }
    case HamiltonianKind::tabulated: {
      const auto& t = table_;
      if (p <= t.x.front()) return t.y.front() + lag_.lo_ * (p - t.x.front());
      if (p >= t.x.back()) return t.y.back() + lag_.hi_ * (p - t.x.back());
      return interpolate(t, p);
    }
  }
  return kInf;
}

double minimal_action(double x, double y, double t, const ConvexHamiltonian& h) {
  if (!(t > 0.0)) throw std::invalid_argument("minimal_action needs t > 0");
  return t * h.lagrangian()((y - x) / t);
}

double minimal_action(std::array<double, 2> x, std::array<double, 2> y, double t, const ConvexHamiltonian& h) {
  if (!(t > 0.0)) throw std::invalid_argument("minimal_action needs t > 0");
  return t * h.lagrangian()(std::array<double, 2>{(y[0] - x[0]) / t, (y[1] - x[1]) / t});
}

}  // namespace rhj
