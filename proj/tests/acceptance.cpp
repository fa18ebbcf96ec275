// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "rhj/brownian.hpp"
#include "rhj/error.hpp"
#include "rhj/lax_oleinik.hpp"
#include "rhj/levelset.hpp"
#include "rhj/morphology.hpp"
#include "rhj/stats.hpp"

using namespace rhj;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

GridFunction random_lipschitz(std::mt19937_64& rng, double origin, double dx, std::size_t n) {
  std::uniform_real_distribution<double> slope(-1.0, 1.0);
  std::uniform_int_distribution<int> run(1, 200);
  std::vector<double> v(n);
  double s = slope(rng);
  int left = run(rng);
  v[0] = slope(rng);
  for (std::size_t i = 1; i < n; ++i) {
    if (--left == 0) {
      s = slope(rng);
      left = run(rng);
    }
    v[i] = v[i - 1] + s * dx;
  }
  return GridFunction::line(origin, dx, n, std::move(v));
}

double sup_gap(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Criteria 1 and 2 share their runs.
struct ReductionRuns {
  double gap_reduced = 0.0, gap_full = 0.0, seconds = 0.0;
};

const ReductionRuns& reduction_runs() {
  static const ReductionRuns runs = [] {
    ReductionRuns r;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> tv(0.05, 4.0);
    const auto h = ConvexHamiltonian::abs();
    const std::size_t n = 4096;
    const double dx = 16.0 / static_cast<double>(n - 1);
    const Region roi{{-3.5, 0.0}, {3.5, 0.0}};
    for (int trial = 0; trial < 100; ++trial) {
      const auto u0 = random_lipschitz(rng, -8.0, dx, n);
      const auto xi = oracle::with_total_variation(oracle::random_path(rng, 1 + rng() % 49), tv(rng));
      const auto a = solve_along_path(u0, xi, h, roi);
      r.gap_reduced = std::max(r.gap_reduced, sup_gap(a, solve_along_path(u0, reduce(xi).path(), h, roi)));
      r.gap_full = std::max(r.gap_full, sup_gap(a, solve_along_path(u0, fully_reduce(xi).path(), h, roi)));
    }
    r.seconds = seconds_since(t0);
    return r;
  }();
  return runs;
}

Outcome criterion1() {
  const auto& r = reduction_runs();
  const double bound = 4.0 * 16.0 / 4095.0;
  return {r.gap_reduced <= bound && r.seconds < 60.0,
          fmt("max gap xi vs reduce(xi) %.3g <= %.3g over 100 paths; %.1f s (limit 60 s)", r.gap_reduced, bound, r.seconds)};
}

Outcome criterion2() {
  const auto& r = reduction_runs();
  const double bound = 4.0 * 16.0 / 4095.0;
  return {r.gap_full <= bound, fmt("max gap xi vs fully_reduce(xi) %.3g <= %.3g over 100 paths", r.gap_full, bound)};
}

Outcome criterion3() {
  std::mt19937_64 rng(1003);
  const auto h = ConvexHamiltonian::abs();
  std::uniform_real_distribution<double> ut(0.005, 1.5);
  std::size_t sandwich_bad = 0, order_bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto u = random_lipschitz(rng, -4.0, 0.01, 801);
    const double t = ut(rng);
    const auto opening = forward_step(backward_step(u, t, h), t, h);
    const auto closing = backward_step(forward_step(u, t, h), t, h);
    for (std::size_t i = 0; i < u.size(); ++i) sandwich_bad += !(opening[i] <= u[i] && u[i] <= closing[i]);
  }
  const double dx = 16.0 / 2048.0;
  const Region roi{{-2.0, 0.0}, {2.0, 0.0}};
  std::uniform_real_distribution<double> lift(0.0, 0.5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto u0 = random_lipschitz(rng, -8.0, dx, 2049);
    const auto xi = oracle::with_total_variation(oracle::random_path(rng, 2 + rng() % 30), 2.5);
    auto pts = xi.breakpoints();
    std::vector<Breakpoint> up(pts.begin(), pts.end());
    // raise up to three interior breakpoints; zeta >= xi with the same endpoints
    for (int k = 0; k < 3 && up.size() > 2; ++k) up[1 + rng() % (up.size() - 2)].value += lift(rng);
    const SampledPath zeta(std::move(up));
    const auto a = solve_along_path(u0, xi, h, roi), b = solve_along_path(u0, zeta, h, roi);
    for (std::size_t i = 0; i < a.size(); ++i) order_bad += a[i] > b[i] + 2.0 * dx;
  }
  return {sandwich_bad == 0 && order_bad == 0,
          fmt("opening <= u <= closing: %zu violations in 500 trials; xi <= zeta ordering: %zu violations in 500 trials",
              sandwich_bad, order_bad)};
}

Outcome criterion4() {
  std::mt19937_64 rng(1004);
  const double slack = 0.01;
  double worst_low = 0.0, worst_high = 0.0, min_ratio = 1e300;
  std::size_t bad = 0, regenerated = 0;
  for (int i = 0; i < 100; ++i) {
    while (true) {
      const auto xi = cli::random_reduced_path(rng, 2 + static_cast<int>(rng() % 15));
      const ReducedPath r = reduce(xi);
      const double tv_r = total_variation(r), tv_t = total_variation(fully_reduce(xi));
      LowerBoundSets lb;
      try {
        lb = build_lower_bound_sets(r, r.chain_bottom(), slack);
      } catch (const ConstraintError&) {
        ++regenerated;
        continue;
      }
      const double rho = measure_rho(lb.p1, lb.p2, lb.driving).rho;
      const double tol = 1e-12 * (1.0 + tv_r);
      const bool ok = rho >= (1.0 - 2.0 * slack) * tv_t - tol && rho <= tv_r + tol && rho <= tv_t + tol;
      bad += !ok;
      worst_low = std::max(worst_low, (1.0 - 2.0 * slack) * tv_t - rho);
      worst_high = std::max(worst_high, rho - tv_t);
      min_ratio = std::min(min_ratio, rho / tv_t);
      break;
    }
  }
  return {bad == 0, fmt("%zu of 100 paths violate 0.98*TV(full) <= rho <= TV(full) <= TV(R); min rho/TV(full) %.6f, "
                        "max excess over TV(full) %.2g; %zu constructions redrawn",
                        bad, min_ratio, worst_high, regenerated)};
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  const double dx = 0.01;
  const auto sc = two_hole_scenario(dx);
  const auto a = evolve_set_2d_raw(sc.p1, sc.xi, sc.roi);
  const auto red = evolve_set_2d_raw(sc.p1, reduce(sc.xi).path(), sc.roi);
  const auto full = evolve_set_2d_raw(sc.p1, fully_reduce(sc.xi).path(), sc.roi);
  auto core_count = [&](const BinarySet2D& b) {
    std::vector<std::uint8_t> diff(a.cells().size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a.cells()[i] != b.cells()[i];
    const auto core = erode_mask(diff, a.nx(), a.ny(), 2);
    const IndexRange rx = nodes_in(a.origin()[0], a.spacing(), a.nx(), sc.roi.lo[0], sc.roi.hi[0]);
    const IndexRange ry = nodes_in(a.origin()[1], a.spacing(), a.ny(), sc.roi.lo[1], sc.roi.hi[1]);
    std::size_t n = 0;
    for (std::size_t iy = ry.first; iy <= ry.last; ++iy)
      for (std::size_t ix = rx.first; ix <= rx.last; ++ix) n += core[iy * a.nx() + ix];
    return n;
  };
  const std::size_t core_full = core_count(full), core_red = core_count(red);
  const auto ts = three_slopes_scenario(1.0, 0.6, 0.3, 0.005);
  const double rho = measure_rho_2d(ts.p1, ts.p2, ts.xi, ts.roi).rho;
  const double secs = seconds_since(t0);
  return {core_full > 0 && core_red == 0 && rho >= 1.805 && secs < 120.0,
          fmt("two holes (dx %.2g): %zu core pixels differ vs fully_reduce, %zu vs reduce; three slopes rho %.4f >= 1.805; "
              "%.1f s (limit 120 s)",
              dx, core_full, core_red, rho, secs)};
}

Outcome criterion6() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto p = sample_brownian(10000, 1.0, stream_seed(1006, i)).path;
    worst = std::max(worst, check_length_identity(p).relative_error());
  }
  return {worst <= 1e-9, fmt("max relative error %.3g <= 1e-9 over 10^4 paths of 10^4 steps", worst)};
}

const std::vector<double>& l1_samples() {
  static const std::vector<double> v = [] {
    std::vector<double> s(1'000'000);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = sample_L1(stream_seed(1007, i));
    return s;
  }();
  return v;
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  const auto m = moments(l1_samples());
  const double secs = seconds_since(t0);
  const double mean_bound = 3.0 * std::sqrt(0.5 / 1e6);
  const bool ok = std::abs(m.mean - 2.0) <= mean_bound && std::abs(m.variance - 0.5) <= 3.0 * m.variance_se && secs < 30.0;
  return {ok, fmt("mean %.5f (|err| %.2g <= %.2g), variance %.5f (|err| %.2g <= %.2g); %.1f s (limit 30 s)", m.mean,
                  std::abs(m.mean - 2.0), mean_bound, m.variance, std::abs(m.variance - 0.5), 3.0 * m.variance_se, secs)};
}

Outcome criterion8() {
  const double dt = 1.0 / 1e5, floor = 10.0 * std::sqrt(dt);
  int pass = 0;
  double pmin = 1.0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const std::uint64_t rs = stream_seed(1008, rep);
    const auto batch = stopped_lengths(10000, stream_seed(rs, 0), dt, 1.0, floor, 64.0);
    Rng ref_rng(stream_seed(rs, 1));
    std::vector<double> ref(10000);
    for (auto& x : ref) x = sample_L1_floored(ref_rng, floor);
    const double p = ks_two_sample(batch.lengths, ref).p_value;
    pass += p > 0.01;
    pmin = std::min(pmin, p);
  }
  return {pass >= 19, fmt("%d of 20 repetitions with KS p > 0.01 (need >= 19); smallest p %.3g", pass, pmin)};
}

Outcome criterion9() {
  const std::vector<double> xs{3.0, 4.0, 5.0};
  const auto t = tail_estimates(l1_samples(), xs);
  bool ok = true;
  std::string trend;
  double prev = 1e300;
  for (const auto& e : t) {
    const double s = e.p_hat > 0.0 ? std::log(e.p_hat) / (e.x * std::log(e.x)) : -1e300;
    ok = ok && s > -1.6 && s < -0.5 && s < prev;
    prev = s;
    trend += fmt(" %.4f", s);
  }
  const std::vector<double> ys{2.0, 3.0, 4.0};
  const auto r = tail_curve(TailKind::tv_reduced_T1, ys, 50000, 1009, 10000);
  auto var_log = [](const TailEstimate& e) { return (1.0 - e.p_hat) / (static_cast<double>(e.n) * e.p_hat); };
  const bool usable = r[0].p_hat > 0 && r[1].p_hat > 0 && r[2].p_hat > 0;
  const double d2 = usable ? std::log(r[2].p_hat) - 2.0 * std::log(r[1].p_hat) + std::log(r[0].p_hat) : 1e300;
  const double ci = usable ? 1.96 * std::sqrt(var_log(r[0]) + 4.0 * var_log(r[1]) + var_log(r[2])) : 0.0;
  ok = ok && usable && d2 <= 2.0 * ci;
  return {ok, fmt("L1 ln p/(x ln x) at 3,4,5:%s (in (-1.6,-0.5), decreasing); TV(R) tail second difference at 3: %.4f <= "
                  "%.4f",
                  trend.c_str(), d2, 2.0 * ci)};
}

Outcome criterion10() {
  const std::size_t radius = 50;
  const std::vector<std::size_t> sizes{100'000, 1'000'000, 10'000'000};
  std::vector<double> per_cell;
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  {
    // warm the core up before timing anything
    std::vector<double> in(1'000'000, 0.5), out(in.size());
    const auto t0 = Clock::now();
    while (seconds_since(t0) < 0.5) window_max(in, out, radius);
  }
  for (std::size_t n : sizes) {
    std::vector<double> in(n), out(n);
    for (auto& x : in) x = u(rng);
    const int reps = static_cast<int>(std::max<std::size_t>(3, 50'000'000 / n));
    double best = 1e300;
    for (int k = 0; k < reps; ++k) {
      const auto t0 = Clock::now();
      window_max(in, out, radius);
      best = std::min(best, seconds_since(t0));
    }
    per_cell.push_back(best / static_cast<double>(n));
  }
  std::vector<double> sorted = per_cell;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[1];
  double dev = 0.0;
  for (double c : per_cell) dev = std::max(dev, std::abs(c / median - 1.0));
  const double throughput = 1e-6 / per_cell[1];
  return {throughput >= 100.0 && dev <= 0.2,
          fmt("radius %zu: %.0f M cells/s at n=1e6 (need >= 100); ns/cell %.2f %.2f %.2f, max deviation from median %.0f%% "
              "(limit 20%%)",
              radius, throughput, 1e9 * per_cell[0], 1e9 * per_cell[1], 1e9 * per_cell[2], 100.0 * dev)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"reduction invariance", criterion1},     {"d=1 full reduction", criterion2},
      {"sandwich and monotonicity", criterion3}, {"optimality sandwich", criterion4},
      {"2D counterexamples", criterion5},       {"length identity", criterion6},
      {"L(1) moments", criterion7},             {"distributional bridge", criterion8},
      {"tail trends", criterion9},              {"kernel performance", criterion10}};
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
