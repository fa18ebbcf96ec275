#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rhj/brownian.hpp"

using namespace rhj;

TEST_CASE("brownian sampling") {
  const auto a = sample_brownian(1000, 2.0, 42);
  const auto b = sample_brownian(1000, 2.0, 42);
  CHECK(a.path == b.path);
  CHECK(a.n == 1000);
  CHECK(a.seed == 42);
  CHECK(a.path.size() == 1001);
  CHECK(a.path.horizon() == doctest::Approx(2.0));
  CHECK(sample_brownian(1000, 2.0, 43).path != a.path);

  const auto one = sample_brownian(1, 1.0, 7);
  CHECK(one.path.size() == 2);
  CHECK(one.path[1].t == 1.0);
  CHECK_THROWS(sample_brownian(0, 1.0, 7));
  CHECK_THROWS(sample_brownian(10, 0.0, 7));

  SUBCASE("increment variance") {
    const std::size_t n = 1'000'000;
    const double horizon = 3.0;
    const auto s = sample_brownian(n, horizon, 99);
    const auto p = s.path.breakpoints();
    std::vector<double> inc(n);
    for (std::size_t i = 0; i < n; ++i) inc[i] = p[i + 1].value - p[i].value;
    const auto m = moments(inc);
    const double var = horizon / static_cast<double>(n);
    CHECK(std::abs(m.mean) <= 3.0 * std::sqrt(var / static_cast<double>(n)));
    // sum of squares / var is chi-square with n degrees of freedom
    CHECK(std::abs(m.variance - var) <= 3.0 * var * std::sqrt(2.0 / static_cast<double>(n)));
  }
}

TEST_CASE("stream seeds") {
  CHECK(stream_seed(1, 0) == stream_seed(1, 0));
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("jump skeleton") {
  const auto zig = SampledPath({{0, 0}, {1, 1}, {2, -1}});
  const auto s = jump_skeleton(zig);
  REQUIRE(s.jumps().size() == 1);
  CHECK(s.jumps()[0].level == 1.0);
  CHECK(s.jumps()[0].delta == -1.0);
  CHECK(s.terminal_range() == 2.0);
  CHECK(s.length(2.0) == 3.0);
  CHECK(s.length(1.0) == 1.0);  // jumps strictly below r only
  CHECK(s.length(0.0) == 0.0);

  const auto line = jump_skeleton(SampledPath({{0, 0}, {1, 1}}));
  CHECK(line.jumps().empty());
  CHECK(line.length(0.7) == 0.7);

  CHECK_THROWS(JumpSkeleton({{0.5, 0.5, 0}, {0.4, -0.4, 0}}, 1.0));
  CHECK_THROWS(JumpSkeleton({{1.5, 1.5, 0}}, 1.0));
  const JumpSkeleton k({{0.1, 0.1, 0}, {0.3, -0.3, 0}, {0.7, 0.7, 0}}, 1.0);
  CHECK(k.levels_below(0.7) == std::vector<double>{0.3, 0.1});

  SUBCASE("sign law and monotone length on random paths") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
      const auto p = trial % 2 ? oracle::random_path(rng, 1 + rng() % 40) : sample_brownian(500, 1.0, rng()).path;
      const auto sk = jump_skeleton(p);
      double prev = 0.0;
      for (const auto& j : sk.jumps()) {
        const double sign = j.s_before > 0 ? 1.0 : (j.s_before < 0 ? -1.0 : 0.0);
        CHECK(j.delta == -sign * j.level);
        // S(r) sits on the side of the last record, at distance r from the other one
        CHECK(j.level == doctest::Approx(std::abs(j.s_before) + std::abs(j.s_before + j.delta)));
        CHECK(sk.length(j.level) >= prev);
        prev = sk.length(j.level);
      }
      // jump levels are ranges reached at the backward-chain extrema
      const auto r = reduce(p);
      // the chain ends at t = 0, which starts the first run rather than ending one
      CHECK(sk.jumps().size() + 1 == r.anchor());
      CHECK(sk.terminal_range() == doctest::Approx(running_stats(p).range.back()));
    }
  }
}

TEST_CASE("length identity") {
  auto id = check_length_identity(SampledPath({{0, 0}, {1, 1}, {2, -1}}));
  CHECK(id.lhs == 3.0);
  CHECK(id.rhs == 3.0);
  id = check_length_identity(SampledPath({{0, 0}, {1, 1}}));
  CHECK(id.lhs == 1.0);
  CHECK(id.rhs == 1.0);
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = trial % 2 ? oracle::random_path(rng, 1 + rng() % 60) : sample_brownian(2000, 1.0, rng()).path;
    CHECK(check_length_identity(p).relative_error() <= 1e-9);
  }
}

TEST_CASE("product-of-uniforms length") {
  int calls = 0;
  CHECK(sample_L1([&] { ++calls; return 1e-13; }) == 1.0);
  CHECK(calls == 1);
  CHECK(sample_L1([] { return 1e-4; }) == doctest::Approx(1.0 + 1e-4 + 1e-8));
  CHECK(sample_L1(3) == sample_L1(3));
  CHECK_THROWS(sample_L1(3, 0.0));
  CHECK_THROWS(sample_L1(3, 1e-3));

  std::vector<double> v(100'000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = sample_L1(stream_seed(8, i));
  const auto m = moments(v);
  CHECK(std::abs(m.mean - 2.0) <= 4.0 * m.mean_se);
  CHECK(std::abs(m.variance - 0.5) <= 4.0 * m.variance_se);
  for (double x : v) CHECK(x >= 1.0);

  // P(L >= 2) = P(D >= 1) = 1 - exp(-gamma)
  const double tail = oracle::dickman_tail(1.0);
  CHECK(tail == doctest::Approx(1.0 - std::exp(-0.5772156649015329)).epsilon(1e-6));
  const auto est = tail_estimates(v, std::vector<double>{2.0, 3.0});
  CHECK(std::abs(est[0].p_hat - tail) <= 2.5 * est[0].ci95);
  CHECK(std::abs(est[1].p_hat - oracle::dickman_tail(2.0)) <= 2.5 * est[1].ci95);
}

TEST_CASE("floored length matches the stopped walk at coarse scale") {
  const double dt = 1e-3, floor = 10.0 * std::sqrt(dt);
  const auto batch = stopped_lengths(3000, 5, dt, 1.0, floor);
  CHECK(batch.lengths.size() == 3000);
  Rng rng(6);
  std::vector<double> ref(3000);
  for (auto& x : ref) x = sample_L1_floored(rng, floor);
  const auto ks = ks_two_sample(batch.lengths, ref);
  CHECK(ks.p_value > 0.001);
  for (double x : batch.lengths) CHECK(x >= 1.0);
  // deterministic
  CHECK(stopped_lengths(50, 5, dt, 1.0, floor).lengths ==
        std::vector<double>(batch.lengths.begin(), batch.lengths.begin() + 50));
  // a tiny time cap forces redraws
  Rng r2(1);
  CHECK(!stopped_length(r2, dt, 1.0, floor, 0.01).has_value());
}

TEST_CASE("jump ratio test") {
  SUBCASE("exact uniform ratios give calibrated p-values") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int low = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
      std::vector<JumpSkeleton> sk;
      for (int i = 0; i < 100; ++i) {
        std::vector<double> levels;
        double s = 1.0;
        for (int k = 0; k < 6; ++k) levels.push_back(s *= u(rng));
        std::sort(levels.begin(), levels.end());
        std::vector<Jump> js;
        for (double l : levels) js.push_back({l, l, 0.0});
        sk.emplace_back(js, 1.5);
      }
      const auto res = jump_ratio_test(sk, 1.0, t % 2 ? 0.01 : 0.0);
      if (t % 2 == 0) CHECK(res.skipped == 0);
      low += res.ks.p_value < 0.05;
    }
    CHECK(low >= 5);
    CHECK(low <= 28);
  }
  SUBCASE("degenerate skeletons are skipped") {
    std::vector<JumpSkeleton> sk{JumpSkeleton({}, 2.0), JumpSkeleton({{0.2, 0.2, 0}}, 0.5),
                                 JumpSkeleton({{0.5, 0.5, 0}}, 2.0)};
    const auto res = jump_ratio_test(sk, 1.0);
    CHECK(res.skipped == 2);
    CHECK(res.used == 1);
    CHECK(res.ratios == 1);
    CHECK_THROWS(jump_ratio_test(std::vector<JumpSkeleton>{JumpSkeleton({}, 2.0)}, 1.0));
    CHECK_THROWS(jump_ratio_test(sk, 1.0, 1.0));
  }
  SUBCASE("Brownian skeletons below a fixed range") {
    std::vector<JumpSkeleton> sk;
    const std::size_t n = 20000;
    for (std::uint64_t i = 0; i < 600; ++i) {
      const auto p = sample_brownian(n, 1.0, stream_seed(34, i)).path;
      const auto hit = range_hit_time(p, 0.5);
      if (!hit || *hit <= 0.0) continue;
      sk.push_back(jump_skeleton(p.truncated(*hit)));
    }
    const auto res = jump_ratio_test(sk, 0.5, 10.0 * std::sqrt(1.0 / static_cast<double>(n)));
    CHECK(res.ratios > 500);
    CHECK(res.ks.p_value > 0.001);
  }
}

TEST_CASE("tail curves") {
  const std::vector<double> xs{1.0, 1.5, 2.0, 2.5, 3.0};
  const auto t = tail_curve(TailKind::tv_reduced_T1, xs, 2000, 9, 1000);
  REQUIRE(t.size() == xs.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i].n == 2000);
    CHECK(t[i].ci95 == doctest::Approx(1.96 * std::sqrt(t[i].p_hat * (1 - t[i].p_hat) / 2000.0)));
    if (i > 0) CHECK(t[i].p_hat <= t[i - 1].p_hat);
  }
  CHECK(tail_curve(TailKind::tv_reduced_T1, xs, 2000, 9, 1000)[2].p_hat == t[2].p_hat);

  // scaling: the reduced variation grows like sqrt(T)
  const auto a = moments(tail_samples(TailKind::tv_reduced_T1, 3000, 10, 1000, 1.0));
  const auto b = moments(tail_samples(TailKind::tv_reduced_T1, 3000, 11, 1000, 4.0));
  const double ratio = b.mean / a.mean;
  const double se = ratio * std::hypot(a.mean_se / a.mean, b.mean_se / b.mean);
  CHECK(std::abs(ratio - 2.0) <= 3.0 * se);

  const auto e = tail_estimates(std::vector<double>{}, xs);
  CHECK(e[0].p_hat == 0.0);
}
