#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "rhj/grid.hpp"
#include "rhj/interval_set.hpp"
#include "rhj/levelset.hpp"
#include "rhj/path.hpp"

namespace rhj {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// CSV with header `t,value`; throws FormatError with the offending line.
SampledPath read_path_csv(std::istream& in);
SampledPath read_path_csv(const std::filesystem::path& file);
void write_path_csv(std::ostream& out, std::span<const Breakpoint> points);

/// 1D: `x,u` rows. 2D: one CSV line per grid row (iy ascending) and a JSON
/// sidecar with origin, spacing and extents.
void write_grid_csv(const std::filesystem::path& file, const GridFunction& g);
GridFunction read_grid_csv(const std::filesystem::path& file);
nlohmann::json grid_sidecar(const GridFunction& g);

/// Binary PGM (P5); 255 inside, 0 outside; first image row is the largest y.
void write_pgm(std::ostream& out, const BinarySet2D& s);
void write_pgm(const std::filesystem::path& file, const BinarySet2D& s);
/// Cells where g >= 0.
BinarySet2D positive_set(const GridFunction& g);

/// JSON list of [a, b] pairs; infinite ends written as "-inf" / "inf".
nlohmann::json to_json(const IntervalSet& s);
IntervalSet interval_set_from_json(const nlohmann::json& j);

}  // namespace rhj
