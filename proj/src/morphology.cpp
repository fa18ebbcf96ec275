#include "rhj/morphology.hpp"

#include <algorithm>
#include <cstdint>
#if defined(__SSE2__)
#include <emmintrin.h>
#endif
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace rhj {

namespace {

struct Max {
  static constexpr double pad = -std::numeric_limits<double>::infinity();
  static double pick(double a, double b) { return a < b ? b : a; }
};
struct Min {
  static constexpr double pad = std::numeric_limits<double>::infinity();
  static double pick(double a, double b) { return b < a ? b : a; }
};

// Van Herk / Gil-Werman on blocks of w = 2r + 1 cells: a window of length w meets
// at most two blocks, so out = op(suffix extremum of the first, prefix extremum of
// the second). Suffix extrema are stored; prefix extrema are formed on the fly.
constexpr std::size_t kPrefetchAhead = 2048;

inline void put(double* dst, double v0, double v1, bool stream) {
#if defined(__SSE2__)
  if (stream) {
    _mm_stream_pd(dst, _mm_set_pd(v1, v0));
    return;
  }
#endif
  dst[0] = v0;
  dst[1] = v1;
}

// With `stream`, out must be 16-byte aligned and is written with non-temporal stores.
template <class Op>
void window_tile(const double* p, std::size_t cnt, std::size_t r, double* h, double* out, bool stream) {
  const std::size_t w = 2 * r + 1;
  const std::size_t m = cnt + 2 * r;
  // Suffix extrema only for the blocks covering [0, cnt).
  const std::size_t hend = std::min(m, ((cnt - 1) / w + 1) * w);
  for (std::size_t b0 = 0; b0 < hend; b0 += w) {
    const std::size_t b1 = std::min(hend, b0 + w);
    if (stream)
      for (std::size_t x = b0; x < b1; x += 8) __builtin_prefetch(p + x + kPrefetchAhead);
    double acc = Op::pad;
    for (std::size_t q = b1; q-- > b0;) h[q] = acc = Op::pick(acc, p[q]);
  }
  double g = Op::pad;
  std::size_t pos = 0;  // q mod w
  for (std::size_t q = 0; q + 1 < w; ++q, ++pos) g = Op::pick(g, p[q]);
  auto next = [&](std::size_t j) {
    if (pos == w) {
      pos = 0;
      g = Op::pad;
    }
    g = Op::pick(g, p[j + w - 1]);
    ++pos;
    return Op::pick(h[j], g);
  };
  std::size_t j = 0;
  for (; j + 2 <= cnt; j += 2) {
    const double a = next(j);
    put(out + j, a, next(j + 1), stream);
  }
  if (j < cnt) out[j] = next(j);
}

// Output larger than this bypasses the cache on store.
constexpr std::size_t kStreamBytes = std::size_t{8} << 20;

template <class Op>
void window_extremum(std::span<const double> in, std::span<double> out, std::size_t r) {
  const std::size_t n = in.size();
  if (out.size() != n) throw std::invalid_argument("window output size mismatch");
  if (n == 0) return;
  if (r == 0) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  const std::size_t tile = std::max<std::size_t>(16384, 8 * r);
  std::vector<double> h(tile + 2 * r), padded;
  const bool stream =
      n * sizeof(double) > kStreamBytes && reinterpret_cast<std::uintptr_t>(out.data()) % 16 == 0;
  for (std::size_t s = 0; s < n; s += tile) {
    const std::size_t e = std::min(n, s + tile);
    const std::size_t cnt = e - s;
    if (s >= r && e + r <= n) {
      window_tile<Op>(in.data() + (s - r), cnt, r, h.data(), out.data() + s, stream);
      continue;
    }
    // Tiles touching the ends read from a padded copy.
    padded.assign(cnt + 2 * r, Op::pad);
    const std::size_t lo = s >= r ? s - r : 0, hi = std::min(n, e + r);
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(lo), in.begin() + static_cast<std::ptrdiff_t>(hi),
              padded.begin() + static_cast<std::ptrdiff_t>(lo + r - s));
    window_tile<Op>(padded.data(), cnt, r, h.data(), out.data() + s, false);
  }
#if defined(__SSE2__)
  if (stream) _mm_sfence();
#endif
}

template <class Op>
std::vector<double> disc_extremum(std::span<const double> in, std::size_t nx, std::size_t ny, std::size_t r) {
  if (in.size() != nx * ny) throw std::invalid_argument("disc input size mismatch");
  std::vector<double> out(in.begin(), in.end());
  if (r == 0) return out;
  std::vector<double> rows(in.size());
  const auto r2 = static_cast<long long>(r) * static_cast<long long>(r);
  const auto nyi = static_cast<long long>(ny);
  std::size_t prev_w = SIZE_MAX;
  for (std::size_t di = 0; di <= r; ++di) {
    const auto d = static_cast<long long>(di);
    auto w = static_cast<std::size_t>(std::sqrt(static_cast<double>(r2 - d * d)));
    while (static_cast<long long>(w * w) > r2 - d * d) --w;
    while (static_cast<long long>((w + 1) * (w + 1)) <= r2 - d * d) ++w;
    if (w != prev_w) {
      for (std::size_t iy = 0; iy < ny; ++iy)
        window_extremum<Op>(in.subspan(iy * nx, nx), std::span<double>(rows).subspan(iy * nx, nx), w);
      prev_w = w;
    }
    for (std::size_t iy = 0; iy < ny; ++iy) {
      double* o = out.data() + iy * nx;
      for (long long sgn : {-1LL, 1LL}) {
        if (di == 0 && sgn > 0) break;
        const long long src = std::clamp(static_cast<long long>(iy) + sgn * d, 0LL, nyi - 1);
        const double* rr = rows.data() + static_cast<std::size_t>(src) * nx;
        for (std::size_t ix = 0; ix < nx; ++ix) o[ix] = Op::pick(o[ix], rr[ix]);
      }
    }
  }
  return out;
}

// Lower envelope of parabolas (Felzenszwalb-Huttenlocher), integer squared distances.
void distance_1d(const std::int64_t* f, std::int64_t* d, std::size_t n, std::size_t stride,
                 std::vector<std::size_t>& v, std::vector<double>& z) {
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  std::size_t k = 0;
  bool any = false;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q * stride] == kNoSource) continue;
    if (!any) {
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      any = true;
      continue;
    }
    const auto fq = static_cast<double>(f[q * stride]);
    const auto qd = static_cast<double>(q);
    auto cross = [&](std::size_t vk) {
      const auto vd = static_cast<double>(vk);
      return ((fq + qd * qd) - (static_cast<double>(f[vk * stride]) + vd * vd)) / (2.0 * (qd - vd));
    };
    double s = cross(v[k]);
    while (s <= z[k]) {  // z[0] = -inf stops the scan
      --k;
      s = cross(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  if (!any) {
    for (std::size_t q = 0; q < n; ++q) d[q * stride] = kNoSource;
    return;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const auto dq = static_cast<std::int64_t>(q) - static_cast<std::int64_t>(v[k]);
    d[q * stride] = dq * dq + f[v[k] * stride];
  }
}

}  // namespace

void window_max(std::span<const double> in, std::span<double> out, std::size_t radius) {
  window_extremum<Max>(in, out, radius);
}

void window_min(std::span<const double> in, std::span<double> out, std::size_t radius) {
  window_extremum<Min>(in, out, radius);
}

void window_max_deque(std::span<const double> in, std::span<double> out, std::size_t radius) {
  const std::size_t n = in.size();
  if (out.size() != n) throw std::invalid_argument("window output size mismatch");
  std::deque<std::size_t> dq;
  std::size_t next = 0;  // next input index to enter the window
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t hi = std::min(n - 1, i + radius);
    for (; next <= hi; ++next) {
      while (!dq.empty() && in[dq.back()] <= in[next]) dq.pop_back();
      dq.push_back(next);
    }
    while (dq.front() + radius < i) dq.pop_front();
    out[i] = in[dq.front()];
  }
}

std::vector<double> disc_max(std::span<const double> in, std::size_t nx, std::size_t ny, std::size_t radius) {
  return disc_extremum<Max>(in, nx, ny, radius);
}

std::vector<double> disc_min(std::span<const double> in, std::size_t nx, std::size_t ny, std::size_t radius) {
  return disc_extremum<Min>(in, nx, ny, radius);
}

std::vector<std::int64_t> squared_distance(std::span<const std::uint8_t> mask, std::size_t nx, std::size_t ny) {
  if (mask.size() != nx * ny) throw std::invalid_argument("mask size mismatch");
  std::vector<std::int64_t> f(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) f[i] = mask[i] ? 0 : kNoSource;
  std::vector<std::int64_t> tmp(mask.size());
  std::vector<std::size_t> v;
  std::vector<double> z;
  for (std::size_t ix = 0; ix < nx; ++ix) distance_1d(f.data() + ix, tmp.data() + ix, ny, nx, v, z);
  for (std::size_t iy = 0; iy < ny; ++iy)
    distance_1d(tmp.data() + iy * nx, f.data() + iy * nx, nx, 1, v, z);
  return f;
}

std::vector<std::uint8_t> dilate_mask(std::span<const std::uint8_t> mask, std::size_t nx, std::size_t ny,
                                      std::size_t radius) {
  const auto d = squared_distance(mask, nx, ny);
  const auto r2 = static_cast<std::int64_t>(radius) * static_cast<std::int64_t>(radius);
  std::vector<std::uint8_t> out(mask.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] <= r2 ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> erode_mask(std::span<const std::uint8_t> mask, std::size_t nx, std::size_t ny,
                                     std::size_t radius) {
  std::vector<std::uint8_t> comp(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) comp[i] = mask[i] ? 0 : 1;
  const auto grown = dilate_mask(comp, nx, ny, radius);
  for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = grown[i] ? 0 : 1;
  return comp;
}

}  // namespace rhj
