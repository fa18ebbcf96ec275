#pragma once

#include <array>
#include <span>
#include <vector>

namespace rhj {

/// Samples (x_i, y_i) of a function; x strictly increasing.
struct ConvexTable {
  std::vector<double> x;
  std::vector<double> y;
};

/// Throws NotConvex unless the piecewise-linear interpolant is convex.
void require_convex(std::span<const double> x, std::span<const double> y);

/// Discrete convex conjugate f*(s) = max_i (s x_i - y_i) evaluated at ascending
/// slopes in one merge sweep, O(n + m).
std::vector<double> legendre_transform(std::span<const double> x, std::span<const double> y,
                                       std::span<const double> slopes);

/// Conjugate tabulated at the natural slopes of f (collinear runs merged).
/// Conjugating the result again reproduces f at its sample points.
ConvexTable legendre_transform(const ConvexTable& f);

enum class HamiltonianKind { abs, half_square, tabulated };

/// L(v) = sup_p (p v - H(p)); +inf outside the effective domain [lo, hi].
/// In 2D the abs and half_square kinds are radial: L(v) = L(|v|).
class Lagrangian {
 public:
  double operator()(double v) const;
  double operator()(std::array<double, 2> v) const;
  double domain_lo() const noexcept { return lo_; }
  double domain_hi() const noexcept { return hi_; }
  double domain_radius() const noexcept;
  HamiltonianKind kind() const noexcept { return kind_; }

 private:
  friend class ConvexHamiltonian;
  HamiltonianKind kind_ = HamiltonianKind::abs;
  double lo_ = -1.0, hi_ = 1.0;
  ConvexTable table_;  // tabulated kind: values at natural slopes
};

/// x-independent convex Hamiltonian with a finite Lipschitz constant.
class ConvexHamiltonian {
 public:
  /// H(p) = |p|.
  static ConvexHamiltonian abs();
  /// H(p) = p^2/2 for |p| <= speed, continued linearly; L(v) = v^2/2 on |v| <= speed.
  static ConvexHamiltonian half_square(double speed);
  /// Convex samples on an increasing p-grid, continued linearly beyond it. 1D only.
  static ConvexHamiltonian tabulated(std::vector<double> p, std::vector<double> h);

  HamiltonianKind kind() const noexcept { return kind_; }
  double lipschitz() const noexcept { return lip_; }
  bool symmetric() const noexcept { return symmetric_; }
  double operator()(double p) const;
  const Lagrangian& lagrangian() const noexcept { return lag_; }

 private:
  HamiltonianKind kind_ = HamiltonianKind::abs;
  double lip_ = 1.0;
  double speed_ = 1.0;
  bool symmetric_ = true;
  ConvexTable table_;
  Lagrangian lag_;
};

/// Action t L((y - x)/t) of the cheapest straight path from x to y in time t > 0.
double minimal_action(double x, double y, double t, const ConvexHamiltonian& h);
double minimal_action(std::array<double, 2> x, std::array<double, 2> y, double t, const ConvexHamiltonian& h);

}  // namespace rhj
