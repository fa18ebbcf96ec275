#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rhj/error.hpp"
#include "rhj/io.hpp"
#include "rhj/path.hpp"

using namespace rhj;

namespace {
SampledPath pts(std::vector<Breakpoint> b) { return SampledPath(std::move(b)); }
const std::vector<double> kSlopes{4.0, -2.0, 1.0};
}  // namespace

TEST_CASE("path invariants are enforced") {
  CHECK_THROWS_AS(pts({{0, 0}}), InvalidPath);
  CHECK_THROWS_AS(pts({{0, 1}, {1, 2}}), InvalidPath);
  CHECK_THROWS_AS(pts({{0, 0}, {1, 1}, {1, 2}}), InvalidPath);
  CHECK_THROWS_AS(pts({{0.5, 0}, {1, 1}}), InvalidPath);
  CHECK_NOTHROW(pts({{0, 0}, {1, 1}}));
}

TEST_CASE("total variation") {
  CHECK(total_variation(pts({{0, 0}, {1, 1}})) == 1.0);
  CHECK(total_variation(SampledPath::from_slopes(kSlopes)) == 7.0);
  CHECK(total_variation(pts({{0, 0}, {1, 1}, {2, 0}, {3, 1}})) == 3.0);
}

TEST_CASE("reduce on hand examples") {
  const auto line = pts({{0, 0}, {1, 1}});
  CHECK(reduce(line).path() == line);

  const auto r = reduce(SampledPath::from_slopes(kSlopes));
  CHECK(r.path() == pts({{0, 0}, {1, 4}, {2, 2}, {3, 3}}));
  CHECK(total_variation(r) == 7.0);
  CHECK(r.anchor() == 1);
  CHECK(r.anchor_type() == ExtremumType::max);

  const auto zig = pts({{0, 0}, {1, 1}, {2, -1}});
  const auto rz = reduce(zig);
  CHECK(rz.path() == zig);
  CHECK(rz.breakpoints()[rz.anchor()].t == 2.0);
  CHECK(rz.anchor_type() == ExtremumType::min);

  const auto flat = pts({{0, 0}, {1, 0}, {2, 0}});
  CHECK(reduce(flat).path() == pts({{0, 0}, {2, 0}}));
}

TEST_CASE("fully_reduce on hand examples") {
  const auto f = fully_reduce(SampledPath::from_slopes(kSlopes));
  CHECK(f.path() == pts({{0, 0}, {1, 4}, {3, 3}}));
  CHECK(total_variation(f) == 5.0);
  CHECK((f.breakpoints()[2].value - f.breakpoints()[1].value) / 2.0 == -0.5);
  CHECK(f.kind() == ReductionKind::fully_reduced);

  const auto line = pts({{0, 0}, {1, 1}});
  CHECK(fully_reduce(line).path() == line);
  const auto zig = pts({{0, 0}, {1, 1}, {2, -1}});
  CHECK(fully_reduce(zig).path() == zig);
  CHECK(fully_reduce(zig).path() == reduce(zig).path());
}

TEST_CASE("is_reduced") {
  const auto xi = SampledPath::from_slopes(kSlopes);
  CHECK(is_reduced(reduce(xi).path()));
  CHECK(is_reduced(xi));
  const auto padded = pts({{0, 0}, {0.5, 2}, {1, 4}, {1.5, 3}, {2, 2}, {3, 3}});
  CHECK_FALSE(is_reduced(padded));
  CHECK(reduce(padded).path() == xi);
  CHECK(is_reduced(pts({{0, 0}, {1, 0}})));
}

TEST_CASE("range_hit_time") {
  CHECK(range_hit_time(pts({{0, 0}, {1, 1}}), 0.5).value() == doctest::Approx(0.5));
  const auto zig = pts({{0, 0}, {1, 1}, {2, -1}});
  // The range stays 1 until the descent passes 0 at t = 1.5, then grows as 2(t - 1).
  CHECK(range_hit_time(zig, 1.5).value() == doctest::Approx(1.75));
  CHECK(range_hit_time(zig, 1.5).value() == doctest::Approx(oracle::range_hit_scan(zig, 1.5, 200000)).epsilon(1e-4));
  CHECK_FALSE(range_hit_time(zig, 2.5).has_value());
  CHECK(range_hit_time(zig, 0.0).value() == 0.0);
}

TEST_CASE("running_stats") {
  const auto s = running_stats(pts({{0, 0}, {1, 1}}));
  CHECK(s.running_max == std::vector<double>{0, 1});
  CHECK(s.running_min == std::vector<double>{0, 0});
  CHECK(s.range == std::vector<double>{0, 1});
  CHECK(running_stats(pts({{0, 0}, {1, 1}, {2, -1}})).range == std::vector<double>{0, 1, 2});
  const auto c = running_stats(pts({{0, 0}, {1, 0}}));
  CHECK(c.total_variation == 0.0);
  CHECK(c.range == std::vector<double>{0, 0});
}

TEST_CASE("reduction properties on random paths") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t segs = 1 + static_cast<std::size_t>(rng() % 60);
    SampledPath xi = oracle::random_path(rng, segs);
    if (trial % 5 == 0) {  // quantized values create ties
      std::vector<Breakpoint> b(xi.breakpoints().begin(), xi.breakpoints().end());
      for (auto& p : b) p.value = std::round(p.value * 2.0) / 2.0;
      xi = SampledPath(b);
    }
    const auto r = reduce(xi);
    const auto f = fully_reduce(xi);
    CAPTURE(trial);

    CHECK(reduce(r.path()).path() == r.path());
    CHECK(fully_reduce(f.path()).path() == f.path());
    CHECK(total_variation(f) <= total_variation(r) + 1e-12);
    CHECK(total_variation(r) <= total_variation(xi) + 1e-12);

    for (const auto& b : r.breakpoints()) CHECK(xi.value_at(b.t) == b.value);
    CHECK(r.breakpoints().back() == xi.breakpoints().back());
    CHECK(f.breakpoints().back() == xi.breakpoints().back());
    CHECK(f.size() - f.anchor() <= 2);

    // Interior increments alternate in sign.
    const auto b = r.breakpoints();
    for (std::size_t i = 2; i < b.size(); ++i) {
      const double d0 = b[i - 1].value - b[i - 2].value, d1 = b[i].value - b[i - 1].value;
      CHECK(d0 * d1 < 0.0);
    }
    // Backward chain oscillations nest.
    for (int k = 0; k > r.chain_bottom() + 1; --k) {
      const double outer = std::abs(r.chain(k).value - r.chain(k - 1).value);
      const double inner = std::abs(r.chain(k - 1).value - r.chain(k - 2).value);
      CHECK(inner <= outer);
    }
    // tau_0 holds the global extremum.
    double hi = 0, lo = 0;
    for (const auto& p : xi.breakpoints()) hi = std::max(hi, p.value), lo = std::min(lo, p.value);
    const double anchor = r.chain(0).value;
    CHECK((anchor == hi || anchor == lo));
  }
}

TEST_CASE("range_hit_time is monotone and matches a fine scan") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto xi = oracle::random_path(rng, 8);
    const double rT = running_stats(xi).range.back();
    double prev = 0.0;
    for (int k = 1; k < 20; ++k) {
      const double a = rT * k / 20.0;
      const auto t = range_hit_time(xi, a);
      REQUIRE(t.has_value());
      CHECK(*t >= prev);
      prev = *t;
      CHECK(*t == doctest::Approx(oracle::range_hit_scan(xi, a, 400000)).epsilon(1e-3));
    }
    CHECK(range_hit_time(xi, rT).has_value());
    CHECK_FALSE(range_hit_time(xi, rT * 1.001).has_value());
  }
}

TEST_CASE("path CSV round trip and errors") {
  const auto xi = SampledPath::from_slopes(kSlopes);
  std::stringstream ss;
  write_path_csv(ss, xi.breakpoints());
  CHECK(ss.str() == "t,value\n0,0\n1,4\n2,2\n3,3\n");
  CHECK(read_path_csv(ss) == xi);

  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_path_csv(in);
    } catch (const FormatError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("t,v\n0,0\n1,1\n") == 1);
  CHECK(line_of("t,value\n0,1\n1,1\n") == 2);
  CHECK(line_of("t,value\n0,0\n1,1\n1,2\n") == 4);
  CHECK(line_of("t,value\n0,0\n1,abc\n") == 3);
  CHECK(line_of("t,value\n0,0\n1,1,2\n") == 3);
  CHECK(line_of("t,value\n0,0\n") == 3);
  CHECK(line_of("t,value\n0,0\n1,1\n") == 0);
}
