#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rhj/brownian.hpp"
#include "rhj/error.hpp"
#include "rhj/hamiltonian.hpp"
#include "rhj/io.hpp"
#include "rhj/lax_oleinik.hpp"
#include "rhj/levelset.hpp"
#include "rhj/morphology.hpp"
#include "rhj/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rhj::cli {

namespace {

// ---------------------------------------------------------------- config helpers

struct Globals {
  std::string config;
  std::string out;
  bool check = false;
  std::optional<std::uint64_t> seed;
};

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      throw ConfigError("unknown field '" + k + "' in " + where);
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing field '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

struct Config {
  json doc;
  fs::path base;  // directory relative file names resolve against
};

Config load_config(const Globals& g, const std::string& command) {
  if (g.config.empty()) throw ConfigError(command + " needs --config <json>");
  std::ifstream in(g.config);
  if (!in) throw ConfigError("cannot open config " + g.config);
  Config c;
  try {
    c.doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + g.config + " is not valid JSON: " + e.what());
  }
  if (!c.doc.is_object()) throw ConfigError("config must be a JSON object");
  if (!c.doc.contains("version")) throw ConfigError("config lacks the 'version' tag");
  if (!c.doc.at("version").is_number_integer() || c.doc.at("version").get<int>() != kConfigVersion)
    throw ConfigError("unsupported config version " + c.doc.at("version").dump() + " (expected " +
                      std::to_string(kConfigVersion) + ")");
  c.base = fs::path(g.config).parent_path();
  return c;
}

fs::path resolve(const Config& c, const std::string& file) {
  const fs::path p(file);
  return p.is_absolute() ? p : c.base / p;
}

SampledPath parse_path(const Config& c, const json& j, const std::string& where) {
  allow_keys(j, {"breakpoints", "csv", "slopes", "duration"}, where);
  const int forms = int(j.contains("breakpoints")) + int(j.contains("csv")) + int(j.contains("slopes"));
  if (forms != 1) throw ConfigError(where + " needs exactly one of breakpoints, csv, slopes");
  try {
    if (j.contains("csv")) return read_path_csv(resolve(c, get<std::string>(j, "csv", where)));
    if (j.contains("slopes")) {
      if (j.contains("duration") && !j.at("duration").is_number()) throw ConfigError(where + ".duration must be a number");
      const auto s = get<std::vector<double>>(j, "slopes", where);
      return SampledPath::from_slopes(s, get_or<double>(j, "duration", 1.0, where));
    }
    std::vector<Breakpoint> pts;
    for (const auto& b : get<std::vector<std::vector<double>>>(j, "breakpoints", where)) {
      if (b.size() != 2) throw ConfigError(where + ".breakpoints entries must be [t, value]");
      pts.push_back({b[0], b[1]});
    }
    return SampledPath(std::move(pts));
  } catch (const InvalidPath& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<double> get_vec(const json& j, const char* key, std::size_t n, const std::string& where) {
  auto v = get<std::vector<double>>(j, key, where);
  if (v.size() != n) throw ConfigError(where + "." + key + " needs " + std::to_string(n) + " entries");
  return v;
}

// ---------------------------------------------------------------- output helpers

void ensure_dir(const fs::path& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw ConfigError("cannot create output directory " + d.string());
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json num(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

struct CheckList {
  json items = json::array();
  bool ok = true;
  void add(const std::string& name, bool pass, double value, double bound) {
    items.push_back({{"name", name}, {"pass", pass}, {"value", num(value)}, {"bound", num(bound)}});
    ok = ok && pass;
  }
};

int finish(const Globals& g, json summary, const CheckList& checks, std::ostream& out) {
  if (g.check) {
    summary["check"] = {{"pass", checks.ok}, {"items", checks.items}};
  }
  if (!g.out.empty()) write_text(fs::path(g.out) / "summary.json", dump(summary));
  out << dump(summary);
  if (g.check && !checks.ok) return kCheckFailed;
  return kOk;
}

// ---------------------------------------------------------------- reduce

int cmd_reduce(const Globals& g, const std::string& file, bool full, std::ostream& out) {
  SampledPath xi = [&] {
    try {
      return read_path_csv(fs::path(file));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }();
  const ReducedPath r = reduce(xi);
  const ReducedPath rt = fully_reduce(xi);
  const double tv = total_variation(xi), tvr = total_variation(r), tvt = total_variation(rt);
  out << format_double(tv) << ',' << format_double(tvr) << ',' << format_double(tvt) << '\n';
  if (!g.out.empty()) {
    ensure_dir(g.out);
    std::ostringstream s;
    write_path_csv(s, (full ? rt : r).breakpoints());
    write_text(fs::path(g.out) / (full ? "fully_reduced.csv" : "reduced.csv"), s.str());
  }
  if (g.check) {
    const double tol = 1e-12 * (1.0 + tv);
    const bool ok = tvr <= tv + tol && tvt <= tvr + tol && is_reduced(r.path()) && reduce(r.path()).path() == r.path();
    if (!ok) return kCheckFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------- solve

ConvexHamiltonian parse_hamiltonian(const json& j) {
  const std::string w = "hamiltonian";
  const auto kind = get<std::string>(j, "kind", w);
  try {
    if (kind == "abs") {
      allow_keys(j, {"kind"}, w);
      return ConvexHamiltonian::abs();
    }
    if (kind == "half_square") {
      allow_keys(j, {"kind", "speed"}, w);
      return ConvexHamiltonian::half_square(get<double>(j, "speed", w));
    }
    if (kind == "tabulated") {
      allow_keys(j, {"kind", "p", "h"}, w);
      return ConvexHamiltonian::tabulated(get<std::vector<double>>(j, "p", w), get<std::vector<double>>(j, "h", w));
    }
  } catch (const NotConvex& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("hamiltonian: ") + e.what());
  }
  throw ConfigError("unknown hamiltonian kind '" + kind + "'");
}

GridFunction parse_grid(const json& j, int dim) {
  const std::string w = "grid";
  allow_keys(j, {"origin", "spacing", "extents"}, w);
  const auto o = get_vec(j, "origin", static_cast<std::size_t>(dim), w);
  const double dx = get<double>(j, "spacing", w);
  const auto e = get<std::vector<std::size_t>>(j, "extents", w);
  if (e.size() != static_cast<std::size_t>(dim)) throw ConfigError("grid.extents needs " + std::to_string(dim) + " entries");
  try {
    if (dim == 1) return GridFunction::line(o[0], dx, e[0]);
    return GridFunction::plane({o[0], o[1]}, dx, e[0], e[1]);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("grid: ") + ex.what());
  }
}

GridFunction random_lipschitz(const GridFunction& grid, std::uint64_t seed, double lip) {
  Rng rng(seed);
  std::vector<double> v(grid.size());
  double s = lip * (2.0 * rng.uniform() - 1.0);
  std::size_t left = 1 + static_cast<std::size_t>(200 * rng.uniform());
  v[0] = 2.0 * rng.uniform() - 1.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (--left == 0) {
      s = lip * (2.0 * rng.uniform() - 1.0);
      left = 1 + static_cast<std::size_t>(200 * rng.uniform());
    }
    v[i] = v[i - 1] + s * grid.spacing();
  }
  return grid.with_values(std::move(v));
}

GridFunction parse_initial(const Config& c, const json& j, const std::optional<GridFunction>& grid, int dim,
                           const Globals& g) {
  const std::string w = "initial";
  const auto kind = get<std::string>(j, "kind", w);
  if (kind == "csv") {
    allow_keys(j, {"kind", "file"}, w);
    if (grid) throw ConfigError("initial.kind 'csv' takes its grid from the file; drop the 'grid' field");
    GridFunction u;
    try {
      u = read_grid_csv(resolve(c, get<std::string>(j, "file", w)));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("initial: ") + e.what());
    }
    if (u.dim() != dim) throw ConfigError("initial grid dimension does not match 'dim'");
    return u;
  }
  if (!grid) throw ConfigError("missing field 'grid'");
  std::vector<double> v(grid->size());
  auto coords = [&](std::size_t i, double& x, double& y) {
    if (dim == 1) {
      x = grid->x(i);
      y = 0.0;
    } else {
      x = grid->x(i % grid->nx());
      y = grid->y(i / grid->nx());
    }
  };
  if (kind == "neg_abs") {
    allow_keys(j, {"kind"}, w);
    for (std::size_t i = 0; i < v.size(); ++i) {
      double x, y;
      coords(i, x, y);
      v[i] = -std::hypot(x, y);
    }
    return grid->with_values(std::move(v));
  }
  if (kind == "random_lipschitz") {
    allow_keys(j, {"kind", "seed", "lipschitz"}, w);
    if (dim != 1) throw ConfigError("random_lipschitz initial data is 1D only");
    const auto seed = g.seed ? *g.seed : get<std::uint64_t>(j, "seed", w);
    return random_lipschitz(*grid, seed, get_or<double>(j, "lipschitz", 1.0, w));
  }
  if (kind == "shapes") {
    allow_keys(j, {"kind", "discs", "complement"}, w);
    struct Disc {
      double cx, cy, r;
    };
    std::vector<Disc> discs;
    for (const auto& d : get<json>(j, "discs", w)) {
      allow_keys(d, {"center", "radius"}, "initial.discs[]");
      const auto ctr = get_vec(d, "center", static_cast<std::size_t>(dim), "initial.discs[]");
      discs.push_back({ctr[0], dim == 2 ? ctr[1] : 0.0, get<double>(d, "radius", "initial.discs[]")});
    }
    const bool comp = get_or<bool>(j, "complement", false, w);
    for (std::size_t i = 0; i < v.size(); ++i) {
      double x, y;
      coords(i, x, y);
      bool in = std::any_of(discs.begin(), discs.end(), [&](const Disc& d) { return std::hypot(x - d.cx, y - d.cy) <= d.r; });
      if (comp) in = !in;
      v[i] = in ? 1.0 : -1.0;
    }
    return grid->with_values(std::move(v));
  }
  throw ConfigError("unknown initial kind '" + kind + "'");
}

Region parse_roi(const json& j, int dim) {
  allow_keys(j, {"lo", "hi"}, "roi");
  const auto lo = get_vec(j, "lo", static_cast<std::size_t>(dim), "roi");
  const auto hi = get_vec(j, "hi", static_cast<std::size_t>(dim), "roi");
  Region r;
  r.lo = {lo[0], dim == 2 ? lo[1] : 0.0};
  r.hi = {hi[0], dim == 2 ? hi[1] : 0.0};
  if (r.lo[0] > r.hi[0] || r.lo[1] > r.hi[1]) throw ConfigError("roi.lo must not exceed roi.hi");
  return r;
}

std::string step_name(std::size_t idx, const char* ext) {
  std::ostringstream s;
  s << "step_" << std::setw(4) << std::setfill('0') << idx << ext;
  return s.str();
}

struct Discrepancy {
  double sup_gap = 0.0;
  std::size_t differing = 0;  // cells whose sign class u >= 0 differs
  std::size_t core = 0;       // of those, cells surviving a two-cell erosion
};

Discrepancy compare_runs(const GridFunction& a, const GridFunction& b) {
  Discrepancy d;
  std::vector<std::uint8_t> mask(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d.sup_gap = std::max(d.sup_gap, std::abs(a[i] - b[i]));
    mask[i] = (a[i] >= 0.0) != (b[i] >= 0.0);
    d.differing += mask[i];
  }
  const std::size_t nx = a.nx(), ny = a.dim() == 2 ? a.ny() : 1;
  const auto core = erode_mask(mask, nx, ny, 2);
  for (auto m : core) d.core += m;
  return d;
}

int cmd_solve(const Globals& g, std::ostream& out) {
  const Config c = load_config(g, "solve");
  const json& j = c.doc;
  allow_keys(j, {"version", "dim", "grid", "hamiltonian", "initial", "path", "roi", "compare", "snapshots", "expect"},
             "solve config");
  const int dim = get<int>(j, "dim", "solve config");
  if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
  const ConvexHamiltonian h = parse_hamiltonian(get<json>(j, "hamiltonian", "solve config"));
  std::optional<GridFunction> grid;
  if (j.contains("grid")) grid = parse_grid(j.at("grid"), dim);
  const GridFunction u0 = parse_initial(c, get<json>(j, "initial", "solve config"), grid, dim, g);
  const SampledPath xi = parse_path(c, get<json>(j, "path", "solve config"), "path");
  const Region roi = parse_roi(get<json>(j, "roi", "solve config"), dim);
  const auto compare = get_or<std::vector<std::string>>(j, "compare", {}, "solve config");
  for (const auto& name : compare)
    if (name != "reduced" && name != "fully_reduced") throw ConfigError("unknown compare entry '" + name + "'");
  const bool snapshots = get_or<bool>(j, "snapshots", false, "solve config");
  json expect = j.contains("expect") ? j.at("expect") : json::object();
  allow_keys(expect, {"max_gap", "min_gap", "max_core_cells", "min_core_cells"}, "expect");

  std::vector<std::pair<std::string, SampledPath>> runs{{"xi", xi}};
  for (const auto& name : compare)
    runs.emplace_back(name, name == "reduced" ? reduce(xi).path() : fully_reduce(xi).path());

  json summary;
  summary["dim"] = dim;
  summary["spacing"] = u0.spacing();
  summary["total_variation"] = {{"xi", total_variation(xi)},
                                {"reduced", total_variation(reduce(xi))},
                                {"fully_reduced", total_variation(fully_reduce(xi))}};
  std::map<std::string, GridFunction> finals;
  for (const auto& [name, path] : runs) {
    fs::path dir;
    if (!g.out.empty()) {
      dir = fs::path(g.out) / name;
      ensure_dir(dir);
    }
    std::size_t steps = 0;
    StepObserver obs;
    if (!dir.empty() && snapshots) {
      obs = [&, dir](std::size_t idx, double, const GridFunction& state) {
        const GridFunction s = state.crop(roi);
        if (dim == 1) {
          write_grid_csv(dir / step_name(idx, ".csv"), s);
        } else {
          write_pgm(dir / step_name(idx, ".pgm"), positive_set(s));
        }
      };
    }
    GridFunction fin = solve_along_path(u0, path, h, roi, [&](std::size_t idx, double t, const GridFunction& s) {
      steps = idx;
      if (obs) obs(idx, t, s);
    });
    if (!dir.empty()) {
      write_grid_csv(dir / "final.csv", fin);
      if (dim == 2) write_pgm(dir / "final.pgm", positive_set(fin));
      std::ostringstream p;
      write_path_csv(p, path.breakpoints());
      write_text(dir / "path.csv", p.str());
    }
    summary["runs"][name] = {{"breakpoints", path.size()}, {"steps", steps}};
    finals.emplace(name, std::move(fin));
  }

  CheckList checks;
  for (const auto& name : compare) {
    const Discrepancy d = compare_runs(finals.at("xi"), finals.at(name));
    summary["discrepancy"][name] = {{"sup_gap", d.sup_gap}, {"differing_cells", d.differing}, {"core_cells", d.core}};
    auto bound = [&](const char* key) -> std::optional<double> {
      if (expect.contains(key) && expect.at(key).contains(name)) return get<double>(expect.at(key), name.c_str(), key);
      return std::nullopt;
    };
    const bool has_expect = !expect.empty();
    if (auto b = bound("max_gap")) checks.add(name + ".max_gap", d.sup_gap <= *b, d.sup_gap, *b);
    if (auto b = bound("min_gap")) checks.add(name + ".min_gap", d.sup_gap >= *b, d.sup_gap, *b);
    if (auto b = bound("max_core_cells")) checks.add(name + ".max_core_cells", static_cast<double>(d.core) <= *b, static_cast<double>(d.core), *b);
    if (auto b = bound("min_core_cells")) checks.add(name + ".min_core_cells", static_cast<double>(d.core) >= *b, static_cast<double>(d.core), *b);
    if (!has_expect && (name == "reduced" || dim == 1)) {
      const double b = 4.0 * u0.spacing();
      checks.add(name + ".max_gap", d.sup_gap <= b, d.sup_gap, b);
    }
  }
  return finish(g, summary, checks, out);
}

// ---------------------------------------------------------------- rho

json interval_report(const SampledPath& xi, std::optional<int> chain_index, double slack, CheckList& checks,
                     const std::string& label) {
  const ReducedPath r = reduce(xi);
  const double tv_r = total_variation(r), tv_t = total_variation(fully_reduce(xi));
  json rep = {{"total_variation", total_variation(xi)}, {"tv_reduced", tv_r}, {"tv_fully_reduced", tv_t},
              {"lipschitz", 1.0}, {"upper_bound", tv_r}};
  const double tol = 1e-12 * (1.0 + tv_r);
  if (tv_r == 0.0) {
    rep["rho"] = 0.0;
    checks.add(label + "rho_zero", true, 0.0, 0.0);
    return rep;
  }
  const int n = chain_index ? *chain_index : r.chain_bottom();
  if (n > 0 || n < r.chain_bottom())
    throw ConfigError("chain_index must lie in [" + std::to_string(r.chain_bottom()) + ", 0]");
  const LowerBoundSets lb = build_lower_bound_sets(r, n, slack);
  const RhoMeasurement m = measure_rho(lb.p1, lb.p2, lb.driving);
  rep["rho"] = num(m.rho);
  rep["at"] = num(m.at);
  rep["chain_index"] = n;
  rep["chain_bottom"] = r.chain_bottom();
  rep["driving_negated"] = lb.flipped;
  rep["sets"] = {{"p1", to_json(lb.p1)}, {"p2", to_json(lb.p2)}, {"final1", to_json(m.final1)}, {"final2", to_json(m.final2)}};
  checks.add(label + "rho_le_reduced", m.rho <= tv_r + tol, m.rho, tv_r);
  checks.add(label + "rho_le_fully_reduced", m.rho <= tv_t + tol, m.rho, tv_t);
  if (n == r.chain_bottom()) {
    const double lo = (1.0 - 2.0 * slack) * tv_t;
    checks.add(label + "rho_ge_lower", m.rho >= lo - tol, m.rho, lo);
  }
  return rep;
}

int cmd_rho(const Globals& g, std::ostream& out) {
  const Config c = load_config(g, "rho");
  const json& j = c.doc;
  const auto mode = get<std::string>(j, "mode", "rho config");
  CheckList checks;
  json summary = {{"mode", mode}};
  if (!g.out.empty()) ensure_dir(g.out);
  if (mode == "interval") {
    allow_keys(j, {"version", "mode", "path", "chain_index", "slack"}, "rho config");
    const SampledPath xi = parse_path(c, get<json>(j, "path", "rho config"), "path");
    std::optional<int> n;
    if (j.contains("chain_index")) n = get<int>(j, "chain_index", "rho config");
    const double slack = get_or<double>(j, "slack", 0.01, "rho config");
    if (!(slack > 0.0 && slack < 1.0)) throw ConfigError("slack must lie in (0,1)");
    summary.update(interval_report(xi, n, slack, checks, ""));
  } else if (mode == "interval_random") {
    allow_keys(j, {"version", "mode", "count", "segments", "slack", "seed"}, "rho config");
    const auto count = get<std::size_t>(j, "count", "rho config");
    const auto seg = get<std::vector<int>>(j, "segments", "rho config");
    if (seg.size() != 2 || seg[0] < 1 || seg[1] < seg[0]) throw ConfigError("segments must be [min, max] with 1 <= min <= max");
    const double slack = get_or<double>(j, "slack", 0.01, "rho config");
    if (!(slack > 0.0 && slack < 1.0)) throw ConfigError("slack must lie in (0,1)");
    const std::uint64_t seed = g.seed ? *g.seed : get<std::uint64_t>(j, "seed", "rho config");
    std::ostringstream csv;
    csv << "index,tv_reduced,tv_fully_reduced,rho,ratio\n";
    double min_ratio = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < count; ++i) {
      std::mt19937_64 rng(stream_seed(seed, i));
      while (true) {
        const int segs = seg[0] + static_cast<int>(rng() % static_cast<std::uint64_t>(seg[1] - seg[0] + 1));
        const SampledPath xi = random_reduced_path(rng, segs);
        CheckList local;
        json rep;
        try {
          rep = interval_report(xi, std::nullopt, slack, local, "");
        } catch (const ConstraintError&) {
          ++rejected;
          continue;
        }
        const double rho = rep["rho"].get<double>(), tvt = rep["tv_fully_reduced"].get<double>();
        const double ratio = rho / tvt;
        min_ratio = std::min(min_ratio, ratio);
        max_ratio = std::max(max_ratio, ratio);
        for (const auto& it : local.items) {
          if (!it["pass"].get<bool>()) {
            checks.add("path" + std::to_string(i) + "." + it["name"].get<std::string>(), false, it["value"].get<double>(),
                       it["bound"].get<double>());
          }
        }
        csv << i << ',' << format_double(rep["tv_reduced"].get<double>()) << ',' << format_double(tvt) << ','
            << format_double(rho) << ',' << format_double(ratio) << '\n';
        break;
      }
    }
    checks.add("all_paths", checks.ok, min_ratio, 1.0 - 2.0 * slack);
    summary["count"] = count;
    summary["rejected_constructions"] = rejected;
    summary["min_ratio"] = num(min_ratio);
    summary["max_ratio"] = max_ratio;
    if (!g.out.empty()) write_text(fs::path(g.out) / "rho.csv", csv.str());
  } else if (mode == "plane_three_slopes") {
    allow_keys(j, {"version", "mode", "deltas", "spacing"}, "rho config");
    const auto d = get_vec(j, "deltas", 3, "rho config");
    const double dx = get<double>(j, "spacing", "rho config");
    PlaneScenario sc;
    try {
      sc = three_slopes_scenario(d[0], d[1], d[2], dx);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("rho config: ") + e.what());
    }
    const auto m = measure_rho_2d(sc.p1, sc.p2, sc.xi, sc.roi);
    const double total = d[0] + d[1] + d[2];
    summary["rho"] = num(m.rho);
    summary["at"] = {m.at[0], m.at[1]};
    summary["differing_cells"] = m.differing;
    summary["delta_sum"] = total;
    summary["grid"] = {{"nx", sc.p1.nx()}, {"ny", sc.p1.ny()}, {"spacing", dx}};
    checks.add("rho_ge_0.95_delta_sum", m.rho >= 0.95 * total, m.rho, 0.95 * total);
    checks.add("rho_le_delta_sum", m.rho <= total + 2.0 * dx, m.rho, total + 2.0 * dx);
    if (!g.out.empty()) {
      const fs::path o(g.out);
      write_pgm(o / "p1.pgm", sc.p1);
      write_pgm(o / "p2.pgm", sc.p2);
      write_pgm(o / "final1.pgm", evolve_set_2d(sc.p1, sc.xi, sc.roi));
      write_pgm(o / "final2.pgm", evolve_set_2d(sc.p2, sc.xi, sc.roi));
    }
  } else {
    throw ConfigError("unknown rho mode '" + mode + "'");
  }
  return finish(g, summary, checks, out);
}

// ---------------------------------------------------------------- brownian

std::string tail_csv(const std::vector<TailEstimate>& t) {
  std::ostringstream s;
  s << "x,p_hat,ci95,n\n";
  for (const auto& e : t)
    s << format_double(e.x) << ',' << format_double(e.p_hat) << ',' << format_double(e.ci95) << ',' << e.n << '\n';
  return s.str();
}

json tail_json(const std::vector<TailEstimate>& t) {
  json a = json::array();
  for (const auto& e : t) a.push_back({{"x", e.x}, {"p_hat", e.p_hat}, {"ci95", e.ci95}, {"n", e.n}});
  return a;
}

json ks_json(const KsResult& k) {
  return {{"statistic", k.statistic}, {"p_value", k.p_value}, {"effective_n", k.effective_n}};
}

int cmd_brownian(const Globals& g, std::ostream& out) {
  const Config c = load_config(g, "brownian");
  const json& j = c.doc;
  const std::string w = "brownian config";
  allow_keys(j, {"version", "kind", "n_samples", "n_steps", "T", "seed", "thresholds", "level", "floor", "repetitions", "t_max"}, w);
  const auto kind = get<std::string>(j, "kind", w);
  const auto n = get<std::size_t>(j, "n_samples", w);
  const auto steps = get_or<std::size_t>(j, "n_steps", 10000, w);
  const double horizon = get_or<double>(j, "T", 1.0, w);
  const std::uint64_t seed = g.seed ? *g.seed : get<std::uint64_t>(j, "seed", w);
  const auto xs = get_or<std::vector<double>>(j, "thresholds", {}, w);
  if (n == 0 || steps == 0 || !(horizon > 0.0)) throw ConfigError("n_samples, n_steps and T must be positive");
  const double default_floor = 10.0 * std::sqrt(horizon / static_cast<double>(steps));
  if (!g.out.empty()) ensure_dir(g.out);

  json summary = {{"kind", kind}, {"n_samples", n}, {"n_steps", steps}, {"T", horizon}, {"seed", seed}};
  CheckList checks;
  auto need_thresholds = [&] {
    if (xs.empty()) throw ConfigError("kind '" + kind + "' needs thresholds");
    if (!std::is_sorted(xs.begin(), xs.end())) throw ConfigError("thresholds must be increasing");
  };
  if (kind == "L1" || kind == "tv_reduced_T1") {
    need_thresholds();
    const auto tk = kind == "L1" ? TailKind::L1 : TailKind::tv_reduced_T1;
    const auto v = tail_samples(tk, n, seed, steps, horizon);
    const auto t = tail_estimates(v, xs);
    const auto m = moments(v);
    summary["tail"] = tail_json(t);
    summary["moments"] = {{"mean", m.mean}, {"mean_se", m.mean_se}, {"variance", m.variance}, {"variance_se", m.variance_se}};
    if (!g.out.empty()) write_text(fs::path(g.out) / "tail.csv", tail_csv(t));
    for (std::size_t i = 1; i < t.size(); ++i)
      checks.add("monotone_" + format_double(t[i].x), t[i].p_hat <= t[i - 1].p_hat, t[i].p_hat, t[i - 1].p_hat);
    if (kind == "L1") {
      const double mb = 3.0 * std::sqrt(0.5 / static_cast<double>(n));
      checks.add("mean", std::abs(m.mean - 2.0) <= mb, m.mean, mb);
      checks.add("variance", std::abs(m.variance - 0.5) <= 3.0 * m.variance_se, m.variance, 3.0 * m.variance_se);
      json trend = json::array();
      double prev = std::numeric_limits<double>::infinity();
      for (const auto& e : t) {
        if (e.x < 3.0 - 1e-12) continue;
        const double s = e.p_hat > 0 ? std::log(e.p_hat) / (e.x * std::log(e.x)) : -std::numeric_limits<double>::infinity();
        trend.push_back({{"x", e.x}, {"log_ratio", num(s)}});
        checks.add("trend_range_" + format_double(e.x), s > -1.6 && s < -0.5, s, -1.0);
        checks.add("trend_decreasing_" + format_double(e.x), s < prev, s, prev);
        prev = s;
      }
      summary["trend"] = trend;
    } else {
      json conc = json::array();
      for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        auto var_log = [&](const TailEstimate& e) { return (1.0 - e.p_hat) / (static_cast<double>(e.n) * e.p_hat); };
        const bool usable = t[i - 1].p_hat > 0 && t[i].p_hat > 0 && t[i + 1].p_hat > 0;
        const double d2 = usable ? std::log(t[i + 1].p_hat) - 2.0 * std::log(t[i].p_hat) + std::log(t[i - 1].p_hat)
                                 : std::numeric_limits<double>::quiet_NaN();
        const double ci = usable ? 1.96 * std::sqrt(var_log(t[i - 1]) + 4.0 * var_log(t[i]) + var_log(t[i + 1]))
                                 : std::numeric_limits<double>::quiet_NaN();
        conc.push_back({{"x", t[i].x}, {"second_difference", num(d2)}, {"ci95", num(ci)}});
        checks.add("log_concave_" + format_double(t[i].x), usable && d2 <= 2.0 * ci, d2, 2.0 * ci);
      }
      summary["log_concavity"] = conc;
    }
  } else if (kind == "length_identity") {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = sample_brownian(steps, horizon, stream_seed(seed, i)).path;
      worst = std::max(worst, check_length_identity(p).relative_error());
    }
    summary["max_relative_error"] = worst;
    checks.add("max_relative_error", worst <= 1e-9, worst, 1e-9);
  } else if (kind == "jump_ratios") {
    const double level = get_or<double>(j, "level", 1.0, w);
    const double floor = get_or<double>(j, "floor", default_floor, w);
    std::vector<JumpSkeleton> sk;
    std::size_t short_paths = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = sample_brownian(steps, horizon, stream_seed(seed, i)).path;
      const auto hit = range_hit_time(p, level);
      if (!hit || *hit <= 0.0) {
        ++short_paths;
        continue;
      }
      sk.push_back(jump_skeleton(p.truncated(*hit)));
    }
    JumpRatioResult res;
    try {
      res = jump_ratio_test(sk, level, floor);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("jump ratio test: ") + e.what());
    }
    summary["level"] = level;
    summary["floor"] = floor;
    summary["ks"] = ks_json(res.ks);
    summary["ratios"] = res.ratios;
    summary["used"] = res.used;
    summary["skipped"] = res.skipped + short_paths;
    checks.add("ks_p_value", res.ks.p_value > 0.01, res.ks.p_value, 0.01);
  } else if (kind == "bridge") {
    const double level = get_or<double>(j, "level", 1.0, w);
    const double floor = get_or<double>(j, "floor", default_floor, w);
    const auto reps = get_or<std::size_t>(j, "repetitions", 20, w);
    const double t_max = get_or<double>(j, "t_max", 64.0, w);
    const double dt = horizon / static_cast<double>(steps);
    if (!(floor > 0.0 && floor < level)) throw ConfigError("floor must lie in (0, level)");
    std::ostringstream csv;
    csv << "rep,statistic,p_value,resampled\n";
    std::size_t pass = 0;
    json rows = json::array();
    for (std::size_t r = 0; r < reps; ++r) {
      const std::uint64_t rs = stream_seed(seed, r);
      const auto batch = stopped_lengths(n, stream_seed(rs, 0), dt, level, floor, t_max);
      Rng ref_rng(stream_seed(rs, 1));
      std::vector<double> ref(n);
      for (auto& x : ref) x = level * sample_L1_floored(ref_rng, floor / level);
      const auto ks = ks_two_sample(batch.lengths, ref);
      pass += ks.p_value > 0.01;
      rows.push_back({{"rep", r}, {"ks", ks_json(ks)}, {"resampled", batch.resampled}});
      csv << r << ',' << format_double(ks.statistic) << ',' << format_double(ks.p_value) << ',' << batch.resampled << '\n';
    }
    const double frac = static_cast<double>(pass) / static_cast<double>(reps);
    summary["level"] = level;
    summary["floor"] = floor;
    summary["repetitions"] = rows;
    summary["pass_fraction"] = frac;
    if (!g.out.empty()) write_text(fs::path(g.out) / "bridge.csv", csv.str());
    checks.add("pass_fraction", frac >= 0.95, frac, 0.95);
  } else {
    throw ConfigError("unknown brownian kind '" + kind + "'");
  }
  return finish(g, summary, checks, out);
}

}  // namespace

SampledPath random_reduced_path(std::mt19937_64& rng, int segments, double lo, double hi) {
  std::uniform_real_distribution<double> amp(lo, hi);
  std::vector<Breakpoint> pts{{0.0, 0.0}};
  double sign = rng() % 2 ? 1.0 : -1.0;
  for (int i = 1; i <= segments; ++i) {
    pts.push_back({static_cast<double>(i), pts.back().value + sign * amp(rng)});
    sign = -sign;
  }
  return reduce(SampledPath(std::move(pts))).path();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pathwise Hamilton-Jacobi solvers, path skeletons and Brownian skeleton statistics"};
  app.set_help_all_flag("--help-all");
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--check", g.check, "Exit with status 4 when an acceptance threshold fails");
  auto* seed_opt = app.add_option("--seed", seed, "Override the configured seed");
  app.require_subcommand(1, 1);

  std::string path_file;
  bool full = false;
  auto* red = app.add_subcommand("reduce", "Skeleton of a path CSV; prints TV(xi),TV(R),TV(full R)");
  red->add_option("path", path_file, "Path CSV with header t,value")->required();
  red->add_flag("--full", full, "Write the fully reduced path instead of the reduced one");
  auto* sol = app.add_subcommand("solve", "Solve along a path (and its reductions) on a grid");
  auto* rho = app.add_subcommand("rho", "Measure the range of dependence of lower-bound sets");
  auto* bro = app.add_subcommand("brownian", "Monte Carlo experiments on Brownian skeletons");
  for (auto* s : {red, sol, rho, bro}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*red) return cmd_reduce(g, path_file, full, out);
    if (*sol) return cmd_solve(g, out);
    if (*rho) return cmd_rho(g, out);
    return cmd_brownian(g, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ConstraintError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const MarginError& e) {
    err << "margin error: " << e.what() << '\n';
    return kMarginError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace rhj::cli
