#include "kapila/cases.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace kapila {

namespace {

TwoPhaseEos water_air(double pi_water) { return {{4.4, pi_water}, {1.4, 0.0}}; }

ProblemSpec riemann_case(const std::string& id, const std::string& name, int nx_default,
                         const ExampleOptions& opt, const TwoPhaseEos& eos,
                         const PrimitiveState& left, const PrimitiveState& right, double x0,
                         double t_end) {
  ProblemSpec s;
  s.id = id;
  s.name = name;
  s.eos = eos;
  s.grid = Grid::line(opt.nx > 0 ? opt.nx : nx_default, 0.0, 1.0, BoundaryKind::Transmissive,
                      BoundaryKind::Transmissive);
  s.riemann = RiemannData{left, right, x0};
  s.initial = [left, right, x0](double x, double) { return x < x0 ? left : right; };
  s.t_end = t_end;
  s.snapshot_times = {t_end};
  return s;
}

// Shock-bubble layout: domain [0, length] x [-height/2, height/2], bubble of
// radius r centred on the axis at x = xb, planar shock at x = xs moving
// towards -x with the post-shock fluid on the right.
struct BubbleLayout {
  double length, height, xb, r, xs;
};

ProblemSpec bubble_case(const std::string& id, const std::string& name, const BubbleLayout& geo,
                        int nx_default, int ny_half_default, const ExampleOptions& opt,
                        const TwoPhaseEos& eos, const PrimitiveState& bubble,
                        const PrimitiveState& pre, const PrimitiveState& post) {
  ProblemSpec s;
  s.id = id;
  s.name = name;
  s.eos = eos;
  const int nx = opt.nx > 0 ? opt.nx : nx_default;
  const double half = 0.5 * geo.height;
  if (opt.full_domain) {
    const int ny = opt.ny > 0 ? opt.ny : 2 * ny_half_default;
    s.grid = Grid::plane(nx, ny, 0.0, geo.length, -half, half, BoundaryKind::Transmissive,
                         BoundaryKind::Transmissive, BoundaryKind::Transmissive,
                         BoundaryKind::Transmissive);
  } else {
    const int ny = opt.ny > 0 ? opt.ny : ny_half_default;
    s.grid = Grid::plane(nx, ny, 0.0, geo.length, 0.0, half, BoundaryKind::Transmissive,
                         BoundaryKind::Transmissive, BoundaryKind::Reflective,
                         BoundaryKind::Transmissive);
  }
  s.initial = [geo, bubble, pre, post](double x, double y) {
    const double dxb = x - geo.xb;
    if (dxb * dxb + y * y < geo.r * geo.r) return bubble;
    return x > geo.xs ? post : pre;
  };
  return s;
}

}  // namespace

FieldState ProblemSpec::initial_state() const {
  FieldState f;
  f.cells.resize(grid.cell_count());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const PrimitiveState w = initial(grid.xc(i), grid.yc(j));
      check_state(w, eos);
      f.cells[grid.index(i, j)] = primitive_to_conserved(w, eos);
    }
  }
  return f;
}

SchemeConfig ProblemSpec::scheme_config(int workers) const {
  SchemeConfig c;
  c.cfl = cfl;
  c.reconstruction.kappa = kappa;
  c.c_im = c_im;
  c.void_density = void_density;
  c.workers = workers;
  return c;
}

void ProblemSpec::validate() const {
  if (!(t_end > 0.0)) throw ConfigError("end time must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  grid.validate();
  eos.validate();
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw ConfigError("snapshot times must be sorted");
  for (double t : snapshot_times)
    if (t < 0.0 || t > t_end * (1.0 + 1e-12)) throw ConfigError("snapshot time beyond end time");
}

PrimitiveState mixture_state(double alpha1, double rho1, double rho2, double u, double v,
                             double p) {
  PrimitiveState w;
  w.rho = alpha1 * rho1 + (1.0 - alpha1) * rho2;
  w.zeta1 = alpha1 * rho1 / w.rho;
  w.u = u;
  w.v = v;
  w.p = p;
  w.alpha1 = alpha1;
  return w;
}

PrimitiveState post_shock_state(double mach, const PrimitiveState& pre, const StiffenedGas& gas,
                                int direction) {
  if (!(mach >= 1.0)) throw ConfigError("shock Mach number must be >= 1");
  if (pre.u != 0.0 || pre.v != 0.0) throw ConfigError("pre-shock state must be at rest");
  const double g = gas.gamma;
  const double pbar = pre.p + gas.pi;
  const double c0 = std::sqrt(g * pbar / pre.rho);
  const double m2 = mach * mach;
  const double density_ratio = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0);
  const double pressure_ratio = 1.0 + 2.0 * g / (g + 1.0) * (m2 - 1.0);
  const double sigma = direction * mach * c0;
  PrimitiveState post = pre;
  post.rho = pre.rho * density_ratio;
  post.p = pbar * pressure_ratio - gas.pi;
  post.u = sigma * (1.0 - 1.0 / density_ratio);
  return post;
}

std::vector<std::string> example_ids() { return {"1", "2", "2p", "3", "4", "5", "6"}; }

ProblemSpec build_example(const std::string& id, const ExampleOptions& opt) {
  if (id == "1") {
    constexpr double s1 = 0.05, s2 = 5000.0, zeta = 0.992;
    const TwoPhaseEos eos = water_air(6000.0);
    ProblemSpec s;
    s.id = id;
    s.name = "smooth isentropic water-air mixture";
    s.eos = eos;
    s.grid = Grid::line(opt.nx > 0 ? opt.nx : 40, 0.0, 1.0, BoundaryKind::Periodic,
                        BoundaryKind::Periodic);
    s.initial = [eos](double x, double) {
      const double rho1 = 20.0 + 2.0 * std::sin(2.0 * std::numbers::pi * x);
      const double p = s1 * std::pow(rho1, eos.phase1.gamma) - eos.phase1.pi;
      const double rho2 = std::pow((p + eos.phase2.pi) / s2, 1.0 / eos.phase2.gamma);
      const double alpha1 = zeta * rho2 / (zeta * rho2 + (1.0 - zeta) * rho1);
      PrimitiveState w = mixture_state(alpha1, rho1, rho2, 0.0, 0.0, p);
      w.zeta1 = zeta;
      return w;
    };
    s.t_end = 5e-3;
    s.snapshot_times = {s.t_end};
    s.entropy = EntropyReference{s1, s2};
    return s;
  }
  if (id == "2" || id == "2p") {
    const double p_high = id == "2" ? 1e9 : 1e7;
    const auto left = mixture_state(1.0 - kTraceFraction, 1000.0, 1.0, 0.0, 0.0, p_high);
    const auto right = mixture_state(kTraceFraction, 1000.0, 1.0, 0.0, 0.0, 1e5);
    auto s = riemann_case(id,
                          id == "2" ? "water-air shock tube, density ratio 1000"
                                    : "attenuated water-air shock tube, pressure ratio 100",
                          200, opt, water_air(6e8), left, right, 0.7, id == "2" ? 2.2e-4 : 1.5e-4);
    return s;
  }
  if (id == "3") {
    const auto left = mixture_state(0.5, 1000.0, 50.0, 0.0, 0.0, 1e9);
    const auto right = mixture_state(0.5, 1000.0, 50.0, 0.0, 0.0, 1e5);
    return riemann_case(id, "two-phase water-air mixture shock tube", 200, opt, water_air(6e8),
                        left, right, 0.5, 2e-4);
  }
  if (id == "4") {
    const auto left = mixture_state(0.99, 1000.0, 1.0, -100.0, 0.0, 1e5);
    const auto right = mixture_state(0.99, 1000.0, 1.0, 100.0, 0.0, 1e5);
    auto s = riemann_case(id, "cavitation by symmetric expansion", 500, opt, water_air(6e8), left,
                          right, 0.5, 1.85e-3);
    s.c_im = 1.0;
    s.void_density = 1e-6;
    return s;
  }
  if (id == "5") {
    // Lengths in metres, pressure in Pa; phase 1 is air, phase 2 helium.
    const TwoPhaseEos eos{{1.4, 0.0}, {1.648, 0.0}};
    const double p0 = 101325.0;
    const double rho_he = 0.1819, rho_air = 1.0;
    const auto pre = mixture_state(1.0 - kTraceFraction, rho_air, rho_he, 0.0, 0.0, p0);
    const auto bubble = mixture_state(kTraceFraction, rho_air, rho_he, 0.0, 0.0, p0);
    const double mach = 1.22;
    const PrimitiveState air_pre{1.0, rho_air, 0.0, 0.0, p0, 1.0};
    const auto air_post = post_shock_state(mach, air_pre, eos.phase1);
    const double rho_he_post = rho_he * std::pow(air_post.p / p0, 1.0 / eos.phase2.gamma);
    const auto post = mixture_state(1.0 - kTraceFraction, air_post.rho, rho_he_post, air_post.u,
                                    0.0, air_post.p);
    const BubbleLayout geo{3.293, 0.89, 0.50, 0.25, 0.50 + 0.25 + 1.00};
    auto s = bubble_case(id, "shock in air hitting a helium cylinder", geo, 370, 50, opt, eos,
                         bubble, pre, post);
    s.cfl = 0.45;
    const double c0 = std::sqrt(eos.phase1.gamma * p0 / rho_air);
    const double t_impact = (geo.xs - (geo.xb + geo.r)) / (mach * c0);
    for (double dt_us : {62.0, 245.0, 427.0, 983.0}) s.snapshot_times.push_back(t_impact + dt_us * 1e-6);
    s.t_end = s.snapshot_times.back();
    return s;
  }
  if (id == "6") {
    // Phase 1 is water, phase 2 air; nondimensional units.
    const TwoPhaseEos eos = water_air(6000.0);
    const double rho_w = 1.0, rho_air = 0.0012, p0 = 1.0;
    const auto pre = mixture_state(1.0 - kTraceFraction, rho_w, rho_air, 0.0, 0.0, p0);
    const auto bubble = mixture_state(kTraceFraction, rho_w, rho_air, 0.0, 0.0, p0);
    const PrimitiveState water_pre{1.0, rho_w, 0.0, 0.0, p0, 1.0};
    const auto water_post = post_shock_state(1.72, water_pre, eos.phase1);
    const double rho_air_post = rho_air * std::pow(water_post.p / p0, 1.0 / eos.phase2.gamma);
    const auto post = mixture_state(1.0 - kTraceFraction, water_post.rho, rho_air_post,
                                    water_post.u, 0.0, water_post.p);
    const BubbleLayout geo{12.0, 12.0, 6.0, 2.4, 6.0 + 2.4 + 0.6};
    auto s = bubble_case(id, "shock in water hitting an air cylinder", geo, 120, 60, opt, eos,
                         bubble, pre, post);
    s.cfl = 0.25;
    s.snapshot_times = {0.015, 0.020, 0.025, 0.030, 0.035, 0.040};
    s.t_end = 0.040;
    return s;
  }
  throw ConfigError("unknown example id '" + id + "'");
}

double phase_entropy(double zeta_k, double gamma_k, double q) {
  return std::pow(zeta_k, gamma_k) * q;
}

EntropyErrors entropy_errors(const std::vector<PrimitiveState>& cells, const Grid& grid,
                             const EntropyReference& ref, const TwoPhaseEos& eos) {
  EntropyErrors e;
  const double vol = grid.cell_volume();
  for (const auto& w : cells) {
    double err[2];
    for (int k = 1; k <= 2; ++k) {
      const auto& gas = eos.phase(k);
      const double rho_k = w.zeta(k) * w.rho / w.alpha(k);
      const double q = (w.p + gas.pi) / std::pow(rho_k, gas.gamma);
      err[k - 1] = phase_entropy(w.zeta(k), gas.gamma, q) -
                   phase_entropy(w.zeta(k), gas.gamma, k == 1 ? ref.s1 : ref.s2);
    }
    const double mix = w.zeta1 * err[0] + w.zeta2() * err[1];
    e.e1_l1 += vol * std::abs(err[0]);
    e.e2_l1 += vol * std::abs(err[1]);
    e.e_l1 += vol * std::abs(mix);
    e.e1_linf = std::max(e.e1_linf, std::abs(err[0]));
    e.e2_linf = std::max(e.e2_linf, std::abs(err[1]));
    e.e_linf = std::max(e.e_linf, std::abs(mix));
  }
  return e;
}

PrimitiveState exact_reference(const ProblemSpec& spec, double x, double t) {
  if (!spec.riemann) throw ConfigError("case '" + spec.id + "' has no Riemann data");
  const auto& rd = *spec.riemann;
  if (t <= 0.0) return x < rd.x0 ? rd.left : rd.right;
  const WaveFan fan = solve_exact(rd.left, rd.right, spec.eos);
  return sample(fan, (x - rd.x0) / t, spec.eos);
}

FieldErrors riemann_field_errors(const ProblemSpec& spec, const std::vector<PrimitiveState>& cells,
                                 double t) {
  if (!spec.riemann) throw ConfigError("case '" + spec.id + "' has no Riemann data");
  const auto& rd = *spec.riemann;
  const WaveFan fan = solve_exact(rd.left, rd.right, spec.eos);
  const Grid& g = spec.grid;
  std::array<double, 4> l1{}, lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (int i = 0; i < g.nx; ++i) {
    const PrimitiveState ex = sample(fan, (g.xc(i) - rd.x0) / t, spec.eos);
    const PrimitiveState& w = cells[g.index(i)];
    const std::array<double, 4> a{ex.p, ex.u, ex.rho, ex.alpha1}, b{w.p, w.u, w.rho, w.alpha1};
    for (int k = 0; k < 4; ++k) {
      l1[k] += g.dx() * std::abs(a[k] - b[k]);
      lo[k] = std::min(lo[k], a[k]);
      hi[k] = std::max(hi[k], a[k]);
    }
  }
  const double length = g.x_max - g.x_min;
  std::array<double, 4> rel{};
  for (int k = 0; k < 4; ++k) {
    const double range = hi[k] - lo[k];
    rel[k] = range > 0.0 ? l1[k] / (length * range) : l1[k] / length;
  }
  return {rel[0], rel[1], rel[2], rel[3]};
}

double level_crossing(const std::vector<double>& xs, const std::vector<double>& values,
                      double level, double xa, double xb) {
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (xs[i] < xa || xs[i + 1] > xb) continue;
    const double a = values[i] - level, b = values[i + 1] - level;
    if (a == 0.0) return xs[i];
    if ((a < 0.0) != (b < 0.0)) return xs[i] + (xs[i + 1] - xs[i]) * a / (a - b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SimulationSummary simulate(Solver& solver, double t_end, const std::vector<double>& snapshots,
                           const SnapshotObserver& on_snapshot, const StepObserver& on_step) {
  SimulationSummary sum;
  sum.totals_initial = conserved_totals(solver.state(), solver.grid());
  std::vector<double> targets;
  for (double t : snapshots)
    if (t >= solver.state().t) targets.push_back(t);
  if (targets.empty() || targets.back() < t_end) targets.push_back(t_end);
  std::sort(targets.begin(), targets.end());
  const auto wanted = [&](double t) {
    return std::find(snapshots.begin(), snapshots.end(), t) != snapshots.end();
  };

  for (double target : targets) {
    while (solver.state().t < target) {
      const double cap = target - solver.state().t;
      const StepReport r = solver.step(cap);
      ++sum.steps;
      sum.alpha_min = std::min(sum.alpha_min, r.alpha_min);
      sum.alpha_max = std::max(sum.alpha_max, r.alpha_max);
      sum.max_cn_residual = std::max(sum.max_cn_residual, r.max_cn_residual);
      sum.clamped_cells += r.clamped_cells;
      sum.void_cells += r.void_cells;
      sum.checked_cells += r.checked_cells;
      sum.min_lower_margin = std::min(sum.min_lower_margin, r.min_lower_margin);
      sum.min_upper_margin = std::min(sum.min_upper_margin, r.min_upper_margin);
      if (on_step) on_step(solver, r);
      if (r.dt == cap) break;  // landed on the target
    }
    if (on_snapshot && wanted(target)) on_snapshot(solver);
  }
  sum.t = solver.state().t;
  sum.totals_final = conserved_totals(solver.state(), solver.grid());
  return sum;
}

SimulationSummary simulate(const ProblemSpec& spec, int workers, const SnapshotObserver& on_snapshot,
                           const StepObserver& on_step) {
  spec.validate();
  Solver solver(spec.grid, spec.eos, spec.scheme_config(workers), spec.initial_state());
  return simulate(solver, spec.t_end, spec.snapshot_times, on_snapshot, on_step);
}

std::vector<double> convergence_orders(const std::vector<int>& resolutions,
                                       const std::vector<double>& errors) {
  std::vector<double> orders;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    orders.push_back(std::log(errors[k - 1] / errors[k]) /
                     std::log(static_cast<double>(resolutions[k]) / resolutions[k - 1]));
  }
  return orders;
}

ConvergenceTable convergence_study(const std::string& id, const std::vector<int>& resolutions,
                                   int workers) {
  ConvergenceTable table;
  const auto start = std::chrono::steady_clock::now();
  for (int n : resolutions) {
    ExampleOptions opt;
    opt.nx = n;
    const ProblemSpec spec = build_example(id, opt);
    if (!spec.entropy) throw ConfigError("case '" + id + "' has no entropy reference");
    spec.validate();
    Solver solver(spec.grid, spec.eos, spec.scheme_config(workers), spec.initial_state());
    simulate(solver, spec.t_end, {});
    table.resolutions.push_back(n);
    table.errors.push_back(entropy_errors(solver.primitives(), spec.grid, *spec.entropy, spec.eos));
  }
  table.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

}  // namespace kapila
