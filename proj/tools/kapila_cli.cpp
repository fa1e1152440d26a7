// Command-line driver: run, riemann, convergence, compare.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kapila/io.hpp"

namespace {

using namespace kapila;

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(what + ": bad number '" + item + "'");
    }
  }
  if (expected && v.size() != expected)
    throw ConfigError(what + ": expected " + std::to_string(expected) + " comma-separated values");
  return v;
}

// alpha1,rho1,rho2,u,p
PrimitiveState parse_state(const std::string& text, const std::string& what) {
  const auto v = parse_numbers(text, 5, what);
  return mixture_state(v[0], v[1], v[2], v[3], 0.0, v[4]);
}

int run_riemann(const std::string& left, const std::string& right, const std::string& eos_text,
                double time, double x0, double xmin, double xmax, int points,
                const std::string& out_path) {
  const auto e = parse_numbers(eos_text, 4, "--eos");
  const TwoPhaseEos eos{{e[0], e[1]}, {e[2], e[3]}};
  eos.validate();
  const auto wl = parse_state(left, "--left");
  const auto wr = parse_state(right, "--right");
  check_state(wl, eos);
  check_state(wr, eos);
  if (!(time > 0.0) || points < 2 || !(xmax > xmin)) throw ConfigError("bad sampling parameters");
  const WaveFan fan = solve_exact(wl, wr, eos);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot write '" + out_path + "'");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", fan.p_star);
  out << "# p_star: " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", fan.u_star);
  out << "# u_star: " << buf << "\n";
  out << "# time: " << time << "\n";
  out << "x,zeta1,rho,u,p,alpha1,rho1,rho2,c\n";
  for (int k = 0; k < points; ++k) {
    const double x = xmin + (xmax - xmin) * (k + 0.5) / points;
    const PrimitiveState w = sample(fan, (x - x0) / time, eos);
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
    for (double val : {w.zeta1, w.rho, w.u, w.p, w.alpha1, w.phase_density(1), w.phase_density(2),
                       wood_sound_speed(w, eos)}) {
      std::snprintf(buf, sizeof buf, ",%.17g", val);
      out << buf;
    }
    out << "\n";
  }
  return kExitOk;
}

int run_convergence(const std::string& case_id, const std::string& cells, int workers) {
  std::vector<int> res;
  for (double v : parse_numbers(cells, 0, "--cells")) res.push_back(static_cast<int>(v));
  const ConvergenceTable t = convergence_study(case_id, res, workers);
  std::vector<std::vector<double>> cols(6);
  for (const auto& e : t.errors) {
    const double vals[6] = {e.e1_l1, e.e1_linf, e.e2_l1, e.e2_linf, e.e_l1, e.e_linf};
    for (int k = 0; k < 6; ++k) cols[k].push_back(vals[k]);
  }
  std::vector<std::vector<double>> orders;
  for (const auto& c : cols) orders.push_back(convergence_orders(t.resolutions, c));
  std::printf("%6s", "N");
  for (const char* h : {"water_L1", "water_Linf", "air_L1", "air_Linf", "mix_L1", "mix_Linf"})
    std::printf(" %11s %6s", h, "order");
  std::printf("\n");
  for (std::size_t r = 0; r < t.resolutions.size(); ++r) {
    std::printf("%6d", t.resolutions[r]);
    for (int k = 0; k < 6; ++k) {
      if (r == 0) std::printf(" %11.3e %6s", cols[k][r], "-");
      else std::printf(" %11.3e %6.2f", cols[k][r], orders[k][r - 1]);
    }
    std::printf("\n");
  }
  std::printf("# wall time %.2f s\n", t.seconds);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume solver for the five-equation two-phase flow model"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string config_path, snapshots_text;
  double cfl = 0, kappa = -1, c_im = -1, t_end = 0;
  auto* run_cmd = app.add_subcommand("run", "simulate a test case");
  run_cmd->add_option("--config", config_path, "key = value configuration file");
  run_cmd->add_option("--case", rc.case_id, "case id: 1, 2, 2p, 3, 4, 5, 6");
  run_cmd->add_option("--cells,--nx", rc.nx, "cells in x (0: case default)");
  run_cmd->add_option("--ny", rc.ny, "cells in y (0: case default)");
  run_cmd->add_flag("--full-domain", rc.full_domain, "2D cases: simulate both halves");
  run_cmd->add_option("--cfl", cfl, "CFL number override");
  run_cmd->add_option("--kappa", kappa, "reconstruction parameter override");
  run_cmd->add_option("--c-im", c_im, "source implicitness override");
  run_cmd->add_option("--t-end", t_end, "end time override");
  run_cmd->add_option("--snapshots", snapshots_text, "comma-separated snapshot times");
  run_cmd->add_option("--out", rc.output_dir, "output directory");
  run_cmd->add_option("--workers", rc.workers, "worker threads");

  std::string left, right, eos_text = "4.4,6e8,1.4,0", riemann_out;
  double r_time = 1e-4, x0 = 0.5, xmin = 0.0, xmax = 1.0;
  int points = 1000;
  auto* rie = app.add_subcommand("riemann", "exact Riemann solution profile as CSV");
  rie->add_option("--left", left, "alpha1,rho1,rho2,u,p")->required();
  rie->add_option("--right", right, "alpha1,rho1,rho2,u,p")->required();
  rie->add_option("--eos", eos_text, "gamma1,pi1,gamma2,pi2");
  rie->add_option("--time", r_time, "sampling time");
  rie->add_option("--x0", x0, "initial discontinuity position");
  rie->add_option("--xmin", xmin);
  rie->add_option("--xmax", xmax);
  rie->add_option("--points", points);
  rie->add_option("--out", riemann_out, "output file (default stdout)");

  std::string conv_case = "1", conv_cells = "20,40,80,160,320,640";
  int conv_workers = 1;
  auto* conv = app.add_subcommand("convergence", "entropy-error convergence table");
  conv->add_option("--case", conv_case);
  conv->add_option("--cells", conv_cells, "comma-separated resolutions");
  conv->add_option("--workers", conv_workers);

  std::string snap, golden;
  CompareTolerance tol;
  auto* cmp = app.add_subcommand("compare", "compare a snapshot with a golden file");
  cmp->add_option("snapshot", snap)->required();
  cmp->add_option("golden", golden)->required();
  cmp->add_option("--l1", tol.l1, "mean absolute tolerance");
  cmp->add_option("--linf", tol.linf, "max absolute tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*run_cmd) {
      RunConfig cfg;
      if (!config_path.empty()) cfg = load_run_config(config_path);
      // Flags override the file.
      if (run_cmd->count("--case")) cfg.case_id = rc.case_id;
      if (run_cmd->count("--cells")) cfg.nx = rc.nx;
      if (run_cmd->count("--ny")) cfg.ny = rc.ny;
      if (rc.full_domain) cfg.full_domain = true;
      if (run_cmd->count("--cfl")) cfg.cfl = cfl;
      if (run_cmd->count("--kappa")) cfg.kappa = kappa;
      if (run_cmd->count("--c-im")) cfg.c_im = c_im;
      if (run_cmd->count("--t-end")) cfg.t_end = t_end;
      if (!snapshots_text.empty()) cfg.snapshot_times = parse_numbers(snapshots_text, 0, "--snapshots");
      if (run_cmd->count("--out")) cfg.output_dir = rc.output_dir;
      if (run_cmd->count("--workers")) cfg.workers = rc.workers;
      const RunResult r = run(cfg);
      if (r.exit_code != kExitOk) std::cerr << "error: " << r.message << "\n";
      for (const auto& s : r.snapshots) std::cout << s << "\n";
      if (!r.manifest.empty() && r.exit_code != kExitConfigError) std::cout << r.manifest << "\n";
      return r.exit_code;
    }
    if (*rie) return run_riemann(left, right, eos_text, r_time, x0, xmin, xmax, points, riemann_out);
    if (*conv) return run_convergence(conv_case, conv_cells, conv_workers);
    if (*cmp) {
      const CompareReport rep = compare_golden(snap, golden, tol);
      for (const auto& f : rep.fields)
        std::printf("%-8s L1 %.3e  Linf %.3e  %s\n", f.field.c_str(), f.l1, f.linf,
                    f.pass ? "ok" : "FAIL");
      std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
      return rep.pass ? kExitOk : kExitSolverFailure;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ShapeMismatchError& e) {
    std::cerr << "shape mismatch: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolverFailure;
  }
  return kExitOk;
}
