#include "kapila/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace kapila {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto s = trim(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("bad number for '" + key + "': '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto s = trim(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("bad integer for '" + key + "': '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto s = trim(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean for '" + key + "': '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(to_double(key, item));
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  const auto ids = example_ids();
  if (std::find(ids.begin(), ids.end(), case_id) == ids.end())
    throw ConfigError("unknown case '" + case_id + "'");
  if (nx < 0 || ny < 0) throw ConfigError("cell counts must be non-negative");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (format != "csv") throw ConfigError("unsupported output format '" + format + "'");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw ConfigError("snapshot times must be sorted");
  if (cfl && !(*cfl > 0.0 && *cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (kappa && !(*kappa >= 0.0 && *kappa < 2.0)) throw ConfigError("kappa must lie in [0, 2)");
  if (c_im && !(*c_im >= 0.0 && *c_im <= 1.0)) throw ConfigError("c_im must lie in [0, 1]");
  if (t_end && !(*t_end > 0.0)) throw ConfigError("end time must be positive");
}

RunConfig parse_run_config(const std::string& text, RunConfig c) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "case") c.case_id = value;
    else if (key == "cells" || key == "nx") c.nx = to_int(key, value);
    else if (key == "ny") c.ny = to_int(key, value);
    else if (key == "full_domain") c.full_domain = to_bool(key, value);
    else if (key == "cfl") c.cfl = to_double(key, value);
    else if (key == "kappa") c.kappa = to_double(key, value);
    else if (key == "c_im") c.c_im = to_double(key, value);
    else if (key == "t_end") c.t_end = to_double(key, value);
    else if (key == "snapshots") c.snapshot_times = to_list(key, value);
    else if (key == "output") c.output_dir = value;
    else if (key == "workers") c.workers = to_int(key, value);
    else if (key == "format") c.format = value;
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return c;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), base);
}

ProblemSpec resolve_spec(const RunConfig& config) {
  config.validate();
  ExampleOptions opt;
  opt.nx = config.nx;
  opt.ny = config.ny;
  opt.full_domain = config.full_domain;
  ProblemSpec spec = build_example(config.case_id, opt);
  if (config.cfl) spec.cfl = *config.cfl;
  if (config.kappa) spec.kappa = *config.kappa;
  if (config.c_im) spec.c_im = *config.c_im;
  if (config.t_end) {
    spec.t_end = *config.t_end;
    std::erase_if(spec.snapshot_times, [&](double t) { return t > spec.t_end; });
    if (spec.snapshot_times.empty() || spec.snapshot_times.back() != spec.t_end)
      spec.snapshot_times.push_back(spec.t_end);
  }
  if (!config.snapshot_times.empty()) spec.snapshot_times = config.snapshot_times;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------

double SnapshotData::time() const {
  const auto it = header.find("time");
  if (it == header.end()) throw ConfigError("snapshot header has no time");
  return to_double("time", it->second);
}

std::size_t SnapshotData::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("snapshot has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<std::string> snapshot_columns(bool two_d) {
  if (two_d) return {"x", "y", "zeta1", "rho", "u", "v", "p", "alpha1", "rho1", "rho2", "c"};
  return {"x", "zeta1", "rho", "u", "p", "alpha1", "rho1", "rho2", "c"};
}

void write_snapshot(const std::string& path, const Solver& solver, const ProblemSpec& spec) {
  const Grid& g = solver.grid();
  const auto& eos = solver.eos();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "# kapila snapshot\n";
  out << "# case: " << spec.id << "\n";
  out << "# name: " << spec.name << "\n";
  out << "# time: " << fmt(solver.state().t) << "\n";
  out << "# step: " << solver.state().step << "\n";
  out << "# dims: " << (g.two_d ? 2 : 1) << "\n";
  out << "# nx: " << g.nx << "\n# ny: " << g.ny << "\n";
  out << "# x_range: " << fmt(g.x_min) << "," << fmt(g.x_max) << "\n";
  if (g.two_d) out << "# y_range: " << fmt(g.y_min) << "," << fmt(g.y_max) << "\n";
  const auto& cfg = solver.config();
  out << "# cfl: " << fmt(cfg.cfl) << "\n# kappa: " << fmt(cfg.reconstruction.kappa)
      << "\n# c_im: " << fmt(cfg.c_im) << "\n";
  out << "# eos: " << fmt(eos.phase1.gamma) << "," << fmt(eos.phase1.pi) << ","
      << fmt(eos.phase2.gamma) << "," << fmt(eos.phase2.pi) << "\n";
  out << "# version: " << kVersion << "\n";
  const auto cols = snapshot_columns(g.two_d);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << "\n";
  const auto prim = solver.primitives();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const PrimitiveState& w = prim[g.index(i, j)];
      out << fmt(g.xc(i));
      if (g.two_d) out << "," << fmt(g.yc(j));
      out << "," << fmt(w.zeta1) << "," << fmt(w.rho) << "," << fmt(w.u);
      if (g.two_d) out << "," << fmt(w.v);
      out << "," << fmt(w.p) << "," << fmt(w.alpha1) << "," << fmt(w.phase_density(1)) << ","
          << fmt(w.phase_density(2)) << "," << fmt(wood_sound_speed(w, eos)) << "\n";
    }
  }
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

SnapshotData parse_snapshot(const std::string& text) {
  SnapshotData d;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos)
        d.header[trim(line.substr(1, colon - 1))] = trim(line.substr(colon + 1));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string item;
    while (std::getline(ls, item, ',')) cells.push_back(trim(item));
    if (d.columns.empty()) {
      d.columns = cells;
      continue;
    }
    if (cells.size() != d.columns.size())
      throw ShapeMismatchError("row with " + std::to_string(cells.size()) + " entries, expected " +
                               std::to_string(d.columns.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(to_double("cell", c));
    d.rows.push_back(std::move(row));
  }
  if (d.columns.empty()) throw ConfigError("snapshot has no column header");
  return d;
}

SnapshotData read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read snapshot '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_snapshot(ss.str());
}

CompareReport compare_snapshots(const SnapshotData& a, const SnapshotData& b,
                                const CompareTolerance& tol) {
  if (a.columns != b.columns) throw ShapeMismatchError("snapshot columns differ");
  if (a.rows.size() != b.rows.size())
    throw ShapeMismatchError("row counts differ: " + std::to_string(a.rows.size()) + " vs " +
                             std::to_string(b.rows.size()));
  CompareReport rep;
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    FieldDiff d;
    d.field = a.columns[c];
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      const double diff = std::abs(a.rows[r][c] - b.rows[r][c]);
      d.l1 += diff;
      d.linf = std::max(d.linf, diff);
    }
    if (!a.rows.empty()) d.l1 /= static_cast<double>(a.rows.size());
    d.pass = d.l1 <= tol.l1 && d.linf <= tol.linf;
    rep.pass = rep.pass && d.pass;
    rep.fields.push_back(d);
  }
  return rep;
}

CompareReport compare_golden(const std::string& snapshot, const std::string& golden,
                             const CompareTolerance& tol) {
  return compare_snapshots(read_snapshot(snapshot), read_snapshot(golden), tol);
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json spec_json(const ProblemSpec& spec, const RunConfig& config) {
  const Grid& g = spec.grid;
  return {{"case", spec.id},
          {"name", spec.name},
          {"dims", g.two_d ? 2 : 1},
          {"nx", g.nx},
          {"ny", g.ny},
          {"x_range", {g.x_min, g.x_max}},
          {"y_range", {g.y_min, g.y_max}},
          {"boundaries",
           {to_string(g.x_lo), to_string(g.x_hi), to_string(g.y_lo), to_string(g.y_hi)}},
          {"eos",
           {{"gamma1", spec.eos.phase1.gamma},
            {"pi1", spec.eos.phase1.pi},
            {"gamma2", spec.eos.phase2.gamma},
            {"pi2", spec.eos.phase2.pi}}},
          {"t_end", spec.t_end},
          {"cfl", spec.cfl},
          {"kappa", spec.kappa},
          {"c_im", spec.c_im},
          {"snapshot_times", spec.snapshot_times},
          {"workers", config.workers},
          {"version", kVersion}};
}

}  // namespace

RunResult run(const RunConfig& config) {
  RunResult result;
  ProblemSpec spec;
  try {
    spec = resolve_spec(config);
    fs::create_directories(config.output_dir);
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfigError;
    result.message = e.what();
    return result;
  } catch (const fs::filesystem_error& e) {
    result.exit_code = kExitConfigError;
    result.message = e.what();
    return result;
  }

  nlohmann::json manifest;
  manifest["parameters"] = spec_json(spec, config);
  const fs::path dir(config.output_dir);
  result.manifest = (dir / "manifest.json").string();

  std::optional<Solver> solver;
  try {
    solver.emplace(spec.grid, spec.eos, spec.scheme_config(config.workers), spec.initial_state());
  } catch (const Error& e) {
    result.exit_code = kExitConfigError;
    result.message = e.what();
    return result;
  }

  int index = 0;
  auto on_snapshot = [&](const Solver& s) {
    const std::string name = "snapshot_" + spec.id + "_" + std::to_string(index++) + ".csv";
    write_snapshot((dir / name).string(), s, spec);
    result.snapshots.push_back((dir / name).string());
  };

  SimulationSummary sum;
  try {
    sum = simulate(*solver, spec.t_end, spec.snapshot_times, on_snapshot);
  } catch (const Error& e) {
    result.exit_code = kExitSolverFailure;
    result.message = e.what();
    const std::string dump = (dir / "failure_dump.csv").string();
    write_snapshot(dump, *solver, spec);
    manifest["status"] = "solver-failure";
    manifest["error"] = e.what();
    manifest["failure_dump"] = dump;
    manifest["last_good_time"] = solver->state().t;
    std::ofstream(result.manifest) << manifest.dump(2) << "\n";
    return result;
  }

  nlohmann::json metrics;
  std::vector<double> drift;
  for (int k = 0; k < 5; ++k) {
    const double ref = std::abs(sum.totals_initial[k]);
    const double d = std::abs(sum.totals_final[k] - sum.totals_initial[k]);
    drift.push_back(ref > 0.0 ? d / ref : d);
  }
  metrics["steps"] = sum.steps;
  metrics["final_time"] = sum.t;
  metrics["conservation_drift"] = {{"zeta1_rho", drift[0]}, {"rho", drift[1]},
                                   {"rho_u", drift[2]},     {"rho_v", drift[3]},
                                   {"rho_E", drift[4]}};
  metrics["alpha1_min"] = sum.alpha_min;
  metrics["alpha1_max"] = sum.alpha_max;
  metrics["max_cn_residual"] = sum.max_cn_residual;
  metrics["cutoff_clamped_cells"] = sum.clamped_cells;
  metrics["void_cells"] = sum.void_cells;
  const auto prim = solver->primitives();
  if (spec.riemann && !spec.grid.two_d) {
    const auto e = riemann_field_errors(spec, prim, solver->state().t);
    metrics["relative_l1_error"] = {{"p", e.p}, {"u", e.u}, {"rho", e.rho}, {"alpha1", e.alpha1}};
  }
  if (spec.entropy) {
    const auto e = entropy_errors(prim, spec.grid, *spec.entropy, spec.eos);
    metrics["entropy_error"] = {{"water_l1", e.e1_l1},   {"water_linf", e.e1_linf},
                                {"air_l1", e.e2_l1},     {"air_linf", e.e2_linf},
                                {"mixture_l1", e.e_l1},  {"mixture_linf", e.e_linf}};
  }
  manifest["status"] = "ok";
  manifest["metrics"] = metrics;
  manifest["snapshots"] = result.snapshots;
  std::ofstream(result.manifest) << manifest.dump(2) << "\n";
  return result;
}

}  // namespace kapila
