#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rhj/grid.hpp"
#include "rhj/interval_set.hpp"
#include "rhj/path.hpp"

namespace rhj {

/// Level-set motion for H = |p|: inflate by delta >= 0, otherwise shrink by |delta|
/// and drop pieces that vanish. Pieces whose gap closes up to a relative 1e-12 merge.
IntervalSet evolve_intervals(const IntervalSet& s, double delta);
/// Evolution along the increments of reduce(xi).
IntervalSet evolve_along_path(const IntervalSet& s, const SampledPath& xi);

struct LowerBoundSets {
  IntervalSet p1;
  IntervalSet p2;
  double x_n = 0.0;         // right end of the extra ray carried by p2
  int chain_index = 0;      // N
  bool flipped = false;     // the driving path is -xi
  SampledPath driving{{{0.0, 0.0}, {1.0, 0.0}}};  // reduced path the sets are built for
};

/// Pair of initial sets whose evolutions along the reduced path differ as far
/// from their initial disagreement as the path allows. `chain_index` N in
/// [chain_bottom, 0]; gaps are (1 - slack) of their upper bounds. Throws
/// ConstraintError when the gap band is empty or the construction fails to
/// evolve as intended.
LowerBoundSets build_lower_bound_sets(const ReducedPath& path, int chain_index, double slack);
LowerBoundSets build_lower_bound_sets(const ReducedPath& path, double slack);

struct RhoMeasurement {
  double rho = 0.0;
  double at = 0.0;  // point where the evolutions differ
  IntervalSet final1, final2;
};

/// sup over x where the evolutions differ at T of the distance from x to the set
/// where the initial data differ. `inset` shrinks the differing region at T before
/// taking the sup (0 gives the exact supremum).
RhoMeasurement measure_rho(const IntervalSet& p1, const IntervalSet& p2, const SampledPath& xi, double inset = 0.0);

/// Binary image on a square-celled grid, row-major like GridFunction.
class BinarySet2D {
 public:
  BinarySet2D() = default;
  BinarySet2D(std::array<double, 2> origin, double spacing, std::size_t nx, std::size_t ny,
              std::vector<std::uint8_t> cells = {});
  static BinarySet2D from_predicate(std::array<double, 2> origin, double spacing, std::size_t nx,
                                    std::size_t ny, const std::function<bool(double, double)>& inside);

  const std::array<double, 2>& origin() const noexcept { return origin_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::span<const std::uint8_t> cells() const noexcept { return cells_; }
  bool at(std::size_t ix, std::size_t iy) const { return cells_[iy * nx_ + ix] != 0; }
  double x(std::size_t ix) const noexcept { return origin_[0] + spacing_ * static_cast<double>(ix); }
  double y(std::size_t iy) const noexcept { return origin_[1] + spacing_ * static_cast<double>(iy); }
  std::size_t count() const;
  Region bounds() const;
  BinarySet2D with_cells(std::vector<std::uint8_t> cells) const;
  /// Signed indicator (+1 inside, -1 outside) as a grid function.
  GridFunction indicator() const;

  friend bool operator==(const BinarySet2D&, const BinarySet2D&) = default;

 private:
  std::array<double, 2> origin_{0.0, 0.0};
  double spacing_ = 1.0;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<std::uint8_t> cells_;
};

using SetObserver = std::function<void(std::size_t, double, const BinarySet2D&)>;

/// Disc dilations/erosions along the increments of reduce(xi), radii carried in
/// whole cells. Checks that roi plus the reach of the path stays on the grid.
BinarySet2D evolve_set_2d(const BinarySet2D& s, const SampledPath& xi, const Region& roi,
                          const SetObserver& observer = {});
/// Same, but steps along the given breakpoints without reducing first.
BinarySet2D evolve_set_2d_raw(const BinarySet2D& s, const SampledPath& xi, const Region& roi,
                              const SetObserver& observer = {});

struct RhoMeasurement2D {
  double rho = 0.0;
  std::array<double, 2> at{0.0, 0.0};
  std::size_t differing = 0;  // cells of the roi where the evolutions differ
};

/// Largest distance from a roi cell where the evolutions differ to the nearest
/// cell where the initial sets differ.
RhoMeasurement2D measure_rho_2d(const BinarySet2D& p1, const BinarySet2D& p2, const SampledPath& xi,
                                const Region& roi);

/// Two initial sets on a shared grid with a driving path and region of interest.
struct PlaneScenario {
  BinarySet2D p1, p2;
  SampledPath xi{{{0.0, 0.0}, {1.0, 0.0}}};
  Region roi;
};

/// Slopes (d1, -d2, d3) on unit times, d1 > d2 > d3 > 0. p1 holds the segments
/// [0, L] x {-d1, d1} with L three cells short of 2 d2; p2 adds the line x = -d1.
/// Their evolutions differ near (L - d2 + d3, 0).
PlaneScenario three_slopes_scenario(double d1, double d2, double d3, double spacing);

/// Complement of two overlapping discs of radius 4.3 centred at (+-1.8, 0), driven
/// by slopes (4, -2, 1). Only p1 is meaningful (p2 == p1).
PlaneScenario two_hole_scenario(double spacing);

}  // namespace rhj
