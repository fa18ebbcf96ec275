#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rhj/grid.hpp"
#include "rhj/hamiltonian.hpp"
#include "rhj/path.hpp"

namespace rhj {

/// S_H(t)u(x) = sup_y [u(y) - t L((y - x)/t)], t > 0. For H = |p| this is a
/// dilation with radius round(t / dx) cells.
GridFunction forward_step(const GridFunction& u, double t, const ConvexHamiltonian& h);
/// S_H(-t)u(x) = inf_y [u(y) + t L((x - y)/t)], t > 0.
GridFunction backward_step(const GridFunction& u, double t, const ConvexHamiltonian& h);

/// Integer dilation radii for H = |p| along a path: the path value at every
/// breakpoint is rounded to the grid and consecutive differences are applied, so
/// rounding remainders carry over and never accumulate.
std::vector<long long> carried_radii(const SampledPath& xi, double spacing);

/// Distance the solution at the region of interest can depend on.
double dependence_reach(const SampledPath& xi, const ConvexHamiltonian& h, double spacing);

/// Throws MarginError unless roi grown by `reach` stays inside the grid.
void check_margin(const GridFunction& grid, const Region& roi, double reach);
void check_margin(const Region& grid_bounds, int dim, const Region& roi, double reach);

/// Called with (breakpoint index, time, state) for the initial state and after every step.
using StepObserver = std::function<void(std::size_t, double, const GridFunction&)>;

/// S_H^xi(0,T)u0 restricted to the region of interest.
GridFunction solve_along_path(const GridFunction& u0, const SampledPath& xi, const ConvexHamiltonian& h,
                              const Region& roi, const StepObserver& observer = {});

}  // namespace rhj
