#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rhj/path.hpp"
#include "rhj/stats.hpp"

namespace rhj {

/// Seed of the index-th independent stream derived from a master seed (splitmix64).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

/// 64-bit Mersenne twister with Boost's portable ziggurat normal and uniform draws,
/// so streams are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double normal();
  double uniform();  // [0, 1)
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct BrownianSample {
  SampledPath path;
  std::uint64_t seed = 0;
  std::size_t n = 0;  // number of increments
};

/// Gaussian random walk with n >= 1 increments of variance T/n, linearly interpolated.
BrownianSample sample_brownian(std::size_t n, double horizon, std::uint64_t seed);
/// Values of the walk only (n + 1 entries, first is 0).
std::vector<double> brownian_values(std::size_t n, double horizon, Rng& rng);

struct Jump {
  double level = 0.0;     // range r at which the running extremum switches side
  double delta = 0.0;     // S(r+) - S(r)
  double s_before = 0.0;  // S(r)
};

/// The range-indexed process S(r) = B(theta(r)) described by its jumps.
class JumpSkeleton {
 public:
  JumpSkeleton() = default;
  JumpSkeleton(std::vector<Jump> jumps, double terminal_range);

  std::span<const Jump> jumps() const noexcept { return jumps_; }
  double terminal_range() const noexcept { return terminal_range_; }
  /// L(r) = r + sum of jump levels s < r.
  double length(double r) const;
  /// Jump levels strictly below r in decreasing order.
  std::vector<double> levels_below(double r) const;

 private:
  std::vector<Jump> jumps_;
  double terminal_range_ = 0.0;
};

JumpSkeleton jump_skeleton(const SampledPath& p);

struct LengthIdentity {
  double lhs = 0.0;  // total variation of reduce(p) on [0, tau_0]
  double rhs = 0.0;  // L(R(T))
  double relative_error() const;
};

LengthIdentity check_length_identity(const SampledPath& p);

/// Source of Uniform[0,1) draws.
using UniformSource = std::function<double()>;

/// 1 + U0 + U0 U1 + ..., stopping once the running product drops below eps.
double sample_L1(std::uint64_t seed, double eps = 1e-12);
double sample_L1(const UniformSource& uniform, double eps = 1e-12);
/// Variant that only counts partial products >= floor (floor may exceed 1e-6).
double sample_L1_floored(Rng& rng, double floor);

/// Brownian motion on a dt grid, with within-step extremes drawn from the bridge, run until its range reaches `level`; returns
/// level + sum of jump levels >= floor, i.e. the skeleton length observed above the
/// floor. nullopt when the range is not reached before t_max.
std::optional<double> stopped_length(Rng& rng, double dt, double level, double floor, double t_max);

struct StoppedBatch {
  std::vector<double> lengths;
  std::size_t resampled = 0;
};

/// n paths, path i driven by stream_seed(seed, i); paths that time out are redrawn
/// from the same stream and counted.
StoppedBatch stopped_lengths(std::size_t n, std::uint64_t seed, double dt, double level, double floor,
                             double t_max = 64.0);

struct JumpRatioResult {
  KsResult ks;
  std::size_t ratios = 0;
  std::size_t used = 0;     // skeletons contributing at least one ratio
  std::size_t skipped = 0;  // skeletons not reaching range r or without jumps above the floor
};

/// Successive ratios sigma_{k+1}/sigma_k of jump levels below r (sigma_0 = r), tested
/// against Uniform[0,1]. Ratios are only observed when sigma_{k+1} >= floor; each is
/// rescaled to (ratio - floor/sigma_k)/(1 - floor/sigma_k), uniform under the null.
JumpRatioResult jump_ratio_test(std::span<const JumpSkeleton> samples, double r, double floor = 0.0);

struct TailEstimate {
  double x = 0.0;
  double p_hat = 0.0;
  double ci95 = 0.0;
  std::size_t n = 0;
};

enum class TailKind { tv_reduced_T1, L1 };

std::vector<TailEstimate> tail_estimates(std::span<const double> values, std::span<const double> xs);
/// tv_reduced_T1: total variation of the reduced walk on [0,1] with n_steps increments.
/// L1: sample_L1 draws. Sample i uses stream_seed(seed, i).
std::vector<TailEstimate> tail_curve(TailKind kind, std::span<const double> xs, std::size_t n_samples,
                                     std::uint64_t seed, std::size_t n_steps = 10000);
std::vector<double> tail_samples(TailKind kind, std::size_t n_samples, std::uint64_t seed,
                                 std::size_t n_steps = 10000, double horizon = 1.0);

}  // namespace rhj
