#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rhj {

/// out[i] = max of in over [i-r, i+r] clamped to the array (van Herk / Gil-Werman,
/// processed in cache-sized tiles). `out` must have the size of `in` and must not alias it.
void window_max(std::span<const double> in, std::span<double> out, std::size_t radius);
void window_min(std::span<const double> in, std::span<double> out, std::size_t radius);

/// Reference monotone-deque implementation, kept for cross-checking.
void window_max_deque(std::span<const double> in, std::span<double> out, std::size_t radius);

/// Max/min over the discrete disc {di^2 + dj^2 <= r^2} on a row-major nx x ny array,
/// with boundary values extended outward.
std::vector<double> disc_max(std::span<const double> in, std::size_t nx, std::size_t ny, std::size_t radius);
std::vector<double> disc_min(std::span<const double> in, std::size_t nx, std::size_t ny, std::size_t radius);

inline constexpr std::int64_t kNoSource = INT64_MAX;

/// Exact squared Euclidean distance (in cells) from every cell to the nearest
/// cell with mask != 0; kNoSource when the mask is empty.
std::vector<std::int64_t> squared_distance(std::span<const std::uint8_t> mask, std::size_t nx, std::size_t ny);

/// Binary dilation / erosion by the discrete disc of radius r (cells). Cells
/// outside the grid take part in neither operation.
std::vector<std::uint8_t> dilate_mask(std::span<const std::uint8_t> mask, std::size_t nx, std::size_t ny, std::size_t radius);
std::vector<std::uint8_t> erode_mask(std::span<const std::uint8_t> mask, std::size_t nx, std::size_t ny, std::size_t radius);

}  // namespace rhj
