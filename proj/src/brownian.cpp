#include "rhj/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace rhj {

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(engine_);
}

double Rng::uniform() {
  boost::random::uniform_01<double> dist;
  return dist(engine_);
}

std::vector<double> brownian_values(std::size_t n, double horizon, Rng& rng) {
  if (n == 0 || !(horizon > 0.0)) throw std::invalid_argument("need n >= 1 and a positive horizon");
  const double sd = std::sqrt(horizon / static_cast<double>(n));
  std::vector<double> v(n + 1);
  v[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) v[i] = v[i - 1] + sd * rng.normal();
  return v;
}

BrownianSample sample_brownian(std::size_t n, double horizon, std::uint64_t seed) {
  Rng rng(seed);
  const auto v = brownian_values(n, horizon, rng);
  return {SampledPath::from_values(v, horizon / static_cast<double>(n)), seed, n};
}

JumpSkeleton::JumpSkeleton(std::vector<Jump> jumps, double terminal_range)
    : jumps_(std::move(jumps)), terminal_range_(terminal_range) {
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    if (!(jumps_[i].level > 0.0) || (i > 0 && !(jumps_[i].level > jumps_[i - 1].level)))
      throw std::invalid_argument("jump levels must be positive and increasing");
    if (jumps_[i].level > terminal_range_) throw std::invalid_argument("jump above terminal range");
  }
}

double JumpSkeleton::length(double r) const {
  double l = r;
  for (const auto& j : jumps_) {
    if (!(j.level < r)) break;
    l += j.level;
  }
  return l;
}

std::vector<double> JumpSkeleton::levels_below(double r) const {
  std::vector<double> out;
  for (auto it = jumps_.rbegin(); it != jumps_.rend(); ++it)
    if (it->level < r) out.push_back(it->level);
  return out;
}

JumpSkeleton jump_skeleton(const SampledPath& p) {
  double hi = 0.0, lo = 0.0;
  int side = 0;  // +1 last record was a maximum, -1 a minimum
  std::vector<Jump> jumps;
  for (const auto& b : p.breakpoints().subspan(1)) {
    if (b.value > hi) {
      if (side < 0) jumps.push_back({hi - lo, hi - lo, lo});
      hi = b.value;
      side = 1;
    } else if (b.value < lo) {
      if (side > 0) jumps.push_back({hi - lo, lo - hi, hi});
      lo = b.value;
      side = -1;
    }
  }
  return JumpSkeleton(std::move(jumps), hi - lo);
}

double LengthIdentity::relative_error() const {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

LengthIdentity check_length_identity(const SampledPath& p) {
  const JumpSkeleton s = jump_skeleton(p);
  return {reduce(p).backward_variation(), s.length(s.terminal_range())};
}

double sample_L1(const UniformSource& uniform, double eps) {
  if (!(eps > 0.0 && eps <= 1e-6)) throw std::invalid_argument("truncation must lie in (0, 1e-6]");
  double sum = 1.0, prod = 1.0;
  while (true) {
    prod *= uniform();
    if (prod < eps) break;
    sum += prod;
  }
  return sum;
}

double sample_L1(std::uint64_t seed, double eps) {
  Rng rng(seed);
  return sample_L1([&rng] { return rng.uniform(); }, eps);
}

double sample_L1_floored(Rng& rng, double floor) {
  if (!(floor > 0.0 && floor < 1.0)) throw std::invalid_argument("floor must lie in (0,1)");
  double sum = 1.0, prod = 1.0;
  while (true) {
    prod *= rng.uniform();
    if (prod < floor) break;
    sum += prod;
  }
  return sum;
}

std::optional<double> stopped_length(Rng& rng, double dt, double level, double floor, double t_max) {
  const double sd = std::sqrt(dt), near = 8.0 * sd;
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt));
  double v = 0.0, hi = 0.0, lo = 0.0, sum = 0.0;
  int side = 0;
  // Records use the exact extremes of the Brownian bridge over each step; plain
  // grid maxima undershoot by O(sqrt(dt)), which biases the jump levels near the floor.
  auto bridge_gap = [&](double a, double b) { return std::sqrt((b - a) * (b - a) - 2.0 * dt * std::log1p(-rng.uniform())); };
  for (std::size_t i = 0; i < steps; ++i) {
    const double a = v;
    v += sd * rng.normal();
    if (std::max(a, v) > hi - near) {
      const double m = 0.5 * (a + v + bridge_gap(a, v));
      if (m > hi) {
        if (side < 0 && hi - lo >= floor) sum += hi - lo;
        if (m - lo >= level) return level + sum;
        hi = m;
        side = 1;
      }
    }
    if (std::min(a, v) < lo + near) {
      const double m = 0.5 * (a + v - bridge_gap(a, v));
      if (m < lo) {
        if (side > 0 && hi - lo >= floor) sum += hi - lo;
        if (hi - m >= level) return level + sum;
        lo = m;
        side = -1;
      }
    }
  }
  return std::nullopt;
}

StoppedBatch stopped_lengths(std::size_t n, std::uint64_t seed, double dt, double level, double floor,
                             double t_max) {
  StoppedBatch b;
  b.lengths.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(stream_seed(seed, i));
    while (true) {
      if (auto l = stopped_length(rng, dt, level, floor, t_max)) {
        b.lengths.push_back(*l);
        break;
      }
      ++b.resampled;
    }
  }
  return b;
}

JumpRatioResult jump_ratio_test(std::span<const JumpSkeleton> samples, double r, double floor) {
  if (!(r > 0.0) || floor < 0.0 || floor >= r) throw std::invalid_argument("need 0 <= floor < r");
  JumpRatioResult res;
  std::vector<double> v;
  for (const auto& s : samples) {
    if (s.terminal_range() < r) {
      ++res.skipped;
      continue;
    }
    double prev = r;
    std::size_t got = 0;
    for (double lev : s.levels_below(r)) {
      if (lev < floor) break;
      const double cut = floor / prev;
      v.push_back((lev / prev - cut) / (1.0 - cut));
      prev = lev;
      ++got;
    }
    if (got == 0) {
      ++res.skipped;
    } else {
      ++res.used;
    }
  }
  res.ratios = v.size();
  if (v.empty()) throw std::invalid_argument("no jump ratios above the floor");
  res.ks = ks_uniform(std::move(v));
  return res;
}

std::vector<TailEstimate> tail_estimates(std::span<const double> values, std::span<const double> xs) {
  std::vector<TailEstimate> out;
  const auto n = static_cast<double>(values.size());
  for (double x : xs) {
    const auto hits = std::count_if(values.begin(), values.end(), [x](double v) { return v >= x; });
    TailEstimate t;
    t.x = x;
    t.n = values.size();
    t.p_hat = values.empty() ? 0.0 : static_cast<double>(hits) / n;
    t.ci95 = values.empty() ? 0.0 : 1.96 * std::sqrt(t.p_hat * (1.0 - t.p_hat) / n);
    out.push_back(t);
  }
  return out;
}

std::vector<double> tail_samples(TailKind kind, std::size_t n_samples, std::uint64_t seed, std::size_t n_steps,
                                 double horizon) {
  std::vector<double> out(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::uint64_t s = stream_seed(seed, i);
    if (kind == TailKind::L1) {
      out[i] = sample_L1(s);
    } else {
      Rng rng(s);
      const auto v = brownian_values(n_steps, horizon, rng);
      out[i] = total_variation(reduce(SampledPath::from_values(v, horizon / static_cast<double>(n_steps))));
    }
  }
  return out;
}

std::vector<TailEstimate> tail_curve(TailKind kind, std::span<const double> xs, std::size_t n_samples,
                                     std::uint64_t seed, std::size_t n_steps) {
  const auto v = tail_samples(kind, n_samples, seed, n_steps);
  return tail_estimates(v, xs);
}

}  // namespace rhj
