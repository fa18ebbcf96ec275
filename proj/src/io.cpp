#include "rhj/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rhj/error.hpp"

namespace rhj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SampledPath read_path_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<Breakpoint> pts;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "t,value") throw FormatError("expected header 't,value'", lineno);
      header = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != 2) throw FormatError("expected 2 fields, got " + std::to_string(f.size()), lineno);
    Breakpoint b;
    if (!parse_double(f[0], b.t)) throw FormatError("bad time '" + std::string(f[0]) + "'", lineno);
    if (!parse_double(f[1], b.value)) throw FormatError("bad value '" + std::string(f[1]) + "'", lineno);
    if (pts.empty() && (b.t != 0.0 || b.value != 0.0)) throw FormatError("first row must be 0,0", lineno);
    if (!pts.empty() && !(b.t > pts.back().t)) throw FormatError("time not strictly increasing", lineno);
    pts.push_back(b);
  }
  if (!header) throw FormatError("missing header", lineno + 1);
  if (pts.size() < 2) throw FormatError("need at least 2 breakpoints", lineno + 1);
  return SampledPath(std::move(pts));
}

SampledPath read_path_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_path_csv(in);
}

void write_path_csv(std::ostream& out, std::span<const Breakpoint> points) {
  out << "t,value\n";
  for (const auto& b : points) out << format_double(b.t) << ',' << format_double(b.value) << '\n';
}

nlohmann::json grid_sidecar(const GridFunction& g) {
  nlohmann::json j;
  j["dim"] = g.dim();
  j["spacing"] = g.spacing();
  if (g.dim() == 1) {
    j["origin"] = {g.origin()[0]};
    j["extents"] = {g.nx()};
  } else {
    j["origin"] = {g.origin()[0], g.origin()[1]};
    j["extents"] = {g.nx(), g.ny()};
  }
  return j;
}

void write_grid_csv(const std::filesystem::path& file, const GridFunction& g) {
  auto out = open_out(file);
  if (g.dim() == 1) {
    out << "x,u\n";
    for (std::size_t i = 0; i < g.nx(); ++i) out << format_double(g.x(i)) << ',' << format_double(g[i]) << '\n';
    return;
  }
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      if (ix) out << ',';
      out << format_double(g.at(ix, iy));
    }
    out << '\n';
  }
  auto side = open_out(std::filesystem::path(file).replace_extension(".json"));
  side << grid_sidecar(g).dump(2) << '\n';
}

GridFunction read_grid_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::string line;
  std::size_t lineno = 0;
  const auto sidecar = std::filesystem::path(file).replace_extension(".json");
  if (!std::filesystem::exists(sidecar)) {
    std::vector<double> xs, us;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (lineno == 1) {
        if (line != "x,u") throw FormatError("expected header 'x,u'", lineno);
        continue;
      }
      const auto f = split(line);
      double x, u;
      if (f.size() != 2 || !parse_double(f[0], x) || !parse_double(f[1], u)) throw FormatError("bad row", lineno);
      xs.push_back(x);
      us.push_back(u);
    }
    if (xs.size() < 2) throw FormatError("need at least 2 grid rows", lineno + 1);
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (std::abs(xs[i] - (xs.front() + h * static_cast<double>(i))) > 1e-9 * (1.0 + std::abs(xs[i])))
        throw FormatError("grid not uniform", i + 2);
    return GridFunction::line(xs.front(), h, xs.size(), std::move(us));
  }
  auto sin = open_in(sidecar);
  const auto meta = nlohmann::json::parse(sin);
  const auto nx = meta.at("extents").at(0).get<std::size_t>();
  const auto ny = meta.at("extents").at(1).get<std::size_t>();
  std::vector<double> v;
  v.reserve(nx * ny);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto f = split(line);
    if (f.size() != nx) throw FormatError("expected " + std::to_string(nx) + " values", lineno);
    for (auto s : f) {
      double x;
      if (!parse_double(s, x)) throw FormatError("bad value '" + std::string(s) + "'", lineno);
      v.push_back(x);
    }
  }
  if (v.size() != nx * ny) throw FormatError("expected " + std::to_string(ny) + " rows", lineno + 1);
  return GridFunction::plane({meta.at("origin").at(0).get<double>(), meta.at("origin").at(1).get<double>()},
                             meta.at("spacing").get<double>(), nx, ny, std::move(v));
}

void write_pgm(std::ostream& out, const BinarySet2D& s) {
  out << "P5\n" << s.nx() << ' ' << s.ny() << "\n255\n";
  std::vector<char> row(s.nx());
  for (std::size_t k = 0; k < s.ny(); ++k) {
    const std::size_t iy = s.ny() - 1 - k;
    for (std::size_t ix = 0; ix < s.nx(); ++ix) row[ix] = s.at(ix, iy) ? static_cast<char>(255) : 0;
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_pgm(const std::filesystem::path& file, const BinarySet2D& s) {
  auto out = open_out(file);
  write_pgm(out, s);
}

BinarySet2D positive_set(const GridFunction& g) {
  if (g.dim() != 2) throw std::invalid_argument("positive_set needs a 2D grid");
  std::vector<std::uint8_t> c(g.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = g[i] >= 0.0 ? 1 : 0;
  return BinarySet2D(g.origin(), g.spacing(), g.nx(), g.ny(), std::move(c));
}

nlohmann::json to_json(const IntervalSet& s) {
  auto end = [](double v) -> nlohmann::json {
    if (v == -kInf) return "-inf";
    if (v == kInf) return "inf";
    return v;
  };
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : s.intervals()) j.push_back({end(p.lo), end(p.hi)});
  return j;
}

IntervalSet interval_set_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("interval set must be a JSON array");
  auto end = [](const nlohmann::json& v) {
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "-inf") return -kInf;
      if (s == "inf") return kInf;
      throw std::invalid_argument("unknown interval endpoint '" + s + "'");
    }
    if (!v.is_number()) throw std::invalid_argument("interval endpoint must be a number");
    return v.get<double>();
  };
  std::vector<Interval> parts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw std::invalid_argument("interval must be a pair [a, b]");
    parts.push_back({end(p[0]), end(p[1])});
  }
  return IntervalSet(std::move(parts));
}

}  // namespace rhj
