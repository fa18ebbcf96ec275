#include "rhj/lax_oleinik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rhj/error.hpp"
#include "rhj/morphology.hpp"

namespace rhj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t cells(double t, double dx) { return static_cast<std::size_t>(std::llround(t / dx)); }

GridFunction abs_step(const GridFunction& u, std::size_t r, bool forward) {
  std::vector<double> out(u.size());
  if (u.dim() == 1) {
    if (forward) {
      window_max(u.values(), out, r);
    } else {
      window_min(u.values(), out, r);
    }
  } else {
    out = forward ? disc_max(u.values(), u.nx(), u.ny(), r) : disc_min(u.values(), u.nx(), u.ny(), r);
  }
  return u.with_values(std::move(out));
}

// Direct sup/inf over the finite window where the action is finite.
// sign = +1: sup_y u(y) - cost; sign = -1: inf_y u(y) + cost.
GridFunction window_step(const GridFunction& u, double t, const ConvexHamiltonian& h, bool forward) {
  const Lagrangian& lag = h.lagrangian();
  const double dx = u.spacing();
  std::vector<double> out(u.size());
  if (u.dim() == 1) {
    // y = x + j dx; forward velocity (y - x)/t, backward (x - y)/t.
    const double vlo = forward ? lag.domain_lo() : -lag.domain_hi();
    const double vhi = forward ? lag.domain_hi() : -lag.domain_lo();
    const auto jlo = static_cast<long long>(std::ceil(vlo * t / dx - 1e-12));
    const auto jhi = static_cast<long long>(std::floor(vhi * t / dx + 1e-12));
    std::vector<double> cost;
    for (long long j = jlo; j <= jhi; ++j) {
      const double v = static_cast<double>(j) * dx / t;
      cost.push_back(t * lag(forward ? v : -v));
    }
    const auto n = static_cast<long long>(u.nx());
    for (long long i = 0; i < n; ++i) {
      double best = forward ? -kInf : kInf;
      for (long long j = jlo; j <= jhi; ++j) {
        const double c = cost[static_cast<std::size_t>(j - jlo)];
        if (!std::isfinite(c)) continue;
        const double uy = u[static_cast<std::size_t>(std::clamp(i + j, 0LL, n - 1))];
        best = forward ? std::max(best, uy - c) : std::min(best, uy + c);
      }
      out[static_cast<std::size_t>(i)] = best;
    }
    return u.with_values(std::move(out));
  }
  if (h.kind() == HamiltonianKind::tabulated) throw std::invalid_argument("tabulated Hamiltonians are 1D only");
  const auto k = static_cast<long long>(std::floor(lag.domain_radius() * t / dx + 1e-12));
  struct Offset {
    long long a, b;
    double cost;
  };
  std::vector<Offset> offs;
  for (long long b = -k; b <= k; ++b)
    for (long long a = -k; a <= k; ++a) {
      const double c = t * lag(std::array<double, 2>{a * dx / t, b * dx / t});
      if (std::isfinite(c)) offs.push_back({a, b, c});
    }
  const auto nx = static_cast<long long>(u.nx()), ny = static_cast<long long>(u.ny());
  for (long long iy = 0; iy < ny; ++iy)
    for (long long ix = 0; ix < nx; ++ix) {
      double best = forward ? -kInf : kInf;
      for (const auto& o : offs) {
        const double uy = u.at(static_cast<std::size_t>(std::clamp(ix + o.a, 0LL, nx - 1)),
                               static_cast<std::size_t>(std::clamp(iy + o.b, 0LL, ny - 1)));
        best = forward ? std::max(best, uy - o.cost) : std::min(best, uy + o.cost);
      }
      out[static_cast<std::size_t>(iy * nx + ix)] = best;
    }
  return u.with_values(std::move(out));
}

GridFunction step(const GridFunction& u, double t, const ConvexHamiltonian& h, bool forward) {
  if (!(t > 0.0)) throw std::invalid_argument("step length must be positive");
  if (u.dim() == 2 && h.kind() == HamiltonianKind::tabulated)
    throw std::invalid_argument("tabulated Hamiltonians are 1D only");
  if (h.kind() == HamiltonianKind::abs) return abs_step(u, cells(t, u.spacing()), forward);
  return window_step(u, t, h, forward);
}

}  // namespace

GridFunction forward_step(const GridFunction& u, double t, const ConvexHamiltonian& h) {
  return step(u, t, h, true);
}

GridFunction backward_step(const GridFunction& u, double t, const ConvexHamiltonian& h) {
  return step(u, t, h, false);
}

std::vector<long long> carried_radii(const SampledPath& xi, double spacing) {
  const auto p = xi.breakpoints();
  std::vector<long long> r;
  r.reserve(p.size() - 1);
  long long prev = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const long long cur = std::llround(p[i].value / spacing);
    r.push_back(cur - prev);
    prev = cur;
  }
  return r;
}

double dependence_reach(const SampledPath& xi, const ConvexHamiltonian& h, double spacing) {
  double reach = h.lipschitz() * total_variation(xi);
  if (h.kind() == HamiltonianKind::abs) {
    long long cellsum = 0;
    for (long long k : carried_radii(xi, spacing)) cellsum += std::llabs(k);
    reach = std::max(reach, static_cast<double>(cellsum) * spacing);
  }
  return reach;
}

void check_margin(const GridFunction& grid, const Region& roi, double reach) {
  check_margin(grid.bounds(), grid.dim(), roi, reach);
}

void check_margin(const Region& b, int dim, const Region& roi, double reach) {
  const double tol = 1e-9 * (1.0 + reach);
  for (int a = 0; a < dim; ++a) {
    if (roi.lo[a] > roi.hi[a]) throw std::invalid_argument("region of interest is empty");
    if (roi.lo[a] - reach < b.lo[a] - tol || roi.hi[a] + reach > b.hi[a] + tol) {
      std::ostringstream os;
      os << "insufficient margin on axis " << a << ": region [" << roi.lo[a] << ", " << roi.hi[a]
         << "] grown by " << reach << " leaves grid [" << b.lo[a] << ", " << b.hi[a] << "]";
      throw MarginError(os.str());
    }
  }
}

GridFunction solve_along_path(const GridFunction& u0, const SampledPath& xi, const ConvexHamiltonian& h,
                              const Region& roi, const StepObserver& observer) {
  check_margin(u0, roi, dependence_reach(xi, h, u0.spacing()));
  const auto p = xi.breakpoints();
  GridFunction u = u0;
  if (observer) observer(0, 0.0, u);
  if (h.kind() == HamiltonianKind::abs) {
    const auto radii = carried_radii(xi, u0.spacing());
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const long long k = radii[i];
      if (k != 0) u = abs_step(u, static_cast<std::size_t>(std::llabs(k)), k > 0);
      if (observer) observer(i + 1, p[i + 1].t, u);
    }
  } else {
    for (std::size_t i = 1; i < p.size(); ++i) {
      const double d = p[i].value - p[i - 1].value;
      if (d > 0.0) u = forward_step(u, d, h);
      if (d < 0.0) u = backward_step(u, -d, h);
      if (observer) observer(i, p[i].t, u);
    }
  }
  return u.crop(roi);
}

}  // namespace rhj
