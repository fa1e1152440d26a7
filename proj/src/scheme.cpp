#include "kapila/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

namespace kapila {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs f(k) for k in [0, n).  The exception from the lowest failing index is
// rethrown so failures are reported deterministically.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  std::exception_ptr first;
  long first_index = static_cast<long>(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static) num_threads(workers > 0 ? workers : 1)
  for (long k = 0; k < count; ++k) {
    try {
      f(k);
    } catch (...) {
#pragma omp critical(kapila_parallel_error)
      {
        if (k < first_index) {
          first_index = k;
          first = std::current_exception();
        }
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

// Source cell for ghost layer `layer` (1 or 2) on the low or high side.
int ghost_source(int layer, int n, BoundaryKind kind, bool low) {
  if (kind == BoundaryKind::Periodic) return low ? n - layer : layer - 1;
  return low ? layer - 1 : n - layer;
}

Vec6 swap_uv(Vec6 w) {
  std::swap(w[2], w[3]);
  return w;
}

PrimitiveState swap_uv(PrimitiveState w) {
  std::swap(w.u, w.v);
  return w;
}

Vec5 head5(const Vec6& w) { return {w[0], w[1], w[2], w[3], w[4]}; }

PrimitiveState face_state(const Vec6& center, const Vec6& slope, double half_width) {
  Vec6 w{};
  for (int k = 0; k < 6; ++k) w[k] = center[k] + half_width * slope[k];
  w[kAlphaW] = std::clamp(w[kAlphaW], 0.0, 1.0);
  return from_w(w);
}

std::string where(const char* axis, int i, int j) {
  std::ostringstream os;
  os << axis << "-interface (" << i << ", " << j << ")";
  return os.str();
}

double d_rho_e_dp(double alpha1, const TwoPhaseEos& eos) {
  return alpha1 / (eos.phase1.gamma - 1.0) + (1.0 - alpha1) / (eos.phase2.gamma - 1.0);
}

double d_rho_e_dalpha(double p, const TwoPhaseEos& eos) {
  return eos.phase1.rho_e(p) - eos.phase2.rho_e(p);
}

}  // namespace

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Periodic: return "periodic";
    case BoundaryKind::Transmissive: return "transmissive";
    case BoundaryKind::Reflective: return "reflective";
  }
  return "?";
}

BoundaryKind boundary_from_string(const std::string& name) {
  if (name == "periodic") return BoundaryKind::Periodic;
  if (name == "transmissive") return BoundaryKind::Transmissive;
  if (name == "reflective") return BoundaryKind::Reflective;
  throw ConfigError("unknown boundary kind '" + name + "'");
}

Grid Grid::line(int nx, double x_min, double x_max, BoundaryKind lo, BoundaryKind hi) {
  Grid g;
  g.nx = nx;
  g.x_min = x_min;
  g.x_max = x_max;
  g.x_lo = lo;
  g.x_hi = hi;
  g.validate();
  return g;
}

Grid Grid::plane(int nx, int ny, double x_min, double x_max, double y_min, double y_max,
                 BoundaryKind x_lo, BoundaryKind x_hi, BoundaryKind y_lo, BoundaryKind y_hi) {
  Grid g;
  g.two_d = true;
  g.nx = nx;
  g.ny = ny;
  g.x_min = x_min;
  g.x_max = x_max;
  g.y_min = y_min;
  g.y_max = y_max;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.y_lo = y_lo;
  g.y_hi = y_hi;
  g.validate();
  return g;
}

double Grid::xc(int i) const { return x_min + (i + 0.5) * dx(); }

double Grid::yc(int j) const {
  if (!two_d) return 0.0;
  return 0.5 * (y_min + y_max) + (j + 0.5 - 0.5 * ny) * dy();
}

void Grid::validate() const {
  if (nx < 4) throw ConfigError("grid needs nx >= 4");
  if (!(x_max > x_min)) throw ConfigError("grid needs x_max > x_min");
  if (two_d) {
    if (ny < 4) throw ConfigError("grid needs ny >= 4");
    if (!(y_max > y_min)) throw ConfigError("grid needs y_max > y_min");
  } else if (ny != 1) {
    throw ConfigError("a 1D grid has ny == 1");
  }
  if ((x_lo == BoundaryKind::Periodic) != (x_hi == BoundaryKind::Periodic))
    throw ConfigError("periodic boundaries must be paired in x");
  if (two_d && (y_lo == BoundaryKind::Periodic) != (y_hi == BoundaryKind::Periodic))
    throw ConfigError("periodic boundaries must be paired in y");
}

void SchemeConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(c_im >= 0.0 && c_im <= 1.0)) throw ConfigError("c_im must lie in [0, 1]");
  if (!(void_density >= 0.0 && void_density < 1.0)) throw ConfigError("void_density must lie in [0, 1)");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  reconstruction.validate();
}

std::array<double, 6> physical_flux(const PrimitiveState& w, const TwoPhaseEos& eos) {
  const ConservedState u = primitive_to_conserved(w, eos);
  return {u.zr * w.u, u.mx, u.mx * w.u + w.p, u.my * w.u, (u.en + w.p) * w.u, w.u * w.alpha1};
}

std::array<double, 6> conserved_time_derivative(const PrimitiveState& w, const Vec5& dv,
                                                double dAlpha_dt, const TwoPhaseEos& eos) {
  const double rho_t = dv[kRho];
  const double rho_e_t = d_rho_e_dp(w.alpha1, eos) * dv[kP] + d_rho_e_dalpha(w.p, eos) * dAlpha_dt;
  return {dv[kZeta] * w.rho + w.zeta1 * rho_t,
          rho_t,
          rho_t * w.u + w.rho * dv[kU],
          rho_t * w.v + w.rho * dv[kV],
          rho_e_t + 0.5 * rho_t * (w.u * w.u + w.v * w.v) + w.rho * (w.u * dv[kU] + w.v * dv[kV]),
          dAlpha_dt};
}

InterfaceRecord compute_interface_flux(const GrpResult& grp, double dt, const TwoPhaseEos& eos,
                                       const std::string& where) {
  if (!(dt >= 0.0)) throw FluxFailureError(where + ": negative time step");
  InterfaceRecord rec;
  rec.star = grp.star;
  rec.dV_dt = grp.dV_dt;
  rec.dAlpha_dt = grp.dAlpha_dt;
  const PrimitiveState& s = grp.star;
  rec.u_star = s.u;
  rec.u_hat = s.u + dt * grp.dV_dt[kU];
  rec.ua_star = s.u * s.alpha1;
  rec.ua_rate = s.u * grp.dAlpha_dt + s.alpha1 * grp.dV_dt[kU];
  if (grp.vacuum) {
    // Only the floor pressure acts across a void.
    rec.flux = {s.rho * s.zeta1 * s.u, s.rho * s.u, s.p, 0.0, 0.0, rec.ua_star};
    return rec;
  }

  const auto u0 = primitive_to_conserved(s, eos).as_array();
  const auto du = conserved_time_derivative(s, grp.dV_dt, grp.dAlpha_dt, eos);
  std::array<double, 6> um{};
  for (int k = 0; k < 6; ++k) um[k] = u0[k] + 0.5 * dt * du[k];
  ConservedState mid = ConservedState::from_array(um);
  mid.alpha1 = std::clamp(mid.alpha1, 0.0, 1.0);
  if (!(mid.rho > 0.0) || !std::isfinite(mid.en) || !std::isfinite(mid.mx) ||
      !std::isfinite(mid.my)) {
    throw FluxFailureError(where + ": mid-time state has non-positive density");
  }
  double p = 0.0;
  try {
    p = mixture_pressure(mid.internal_energy(), mid.alpha1, eos);
  } catch (const Error& e) {
    throw FluxFailureError(where + ": mid-time pressure: " + e.what());
  }
  if (!std::isfinite(p)) throw FluxFailureError(where + ": mid-time pressure is not finite");
  const double u = mid.mx / mid.rho;
  rec.flux = {mid.zr * u,      mid.mx, mid.mx * u + p, mid.my * u, (mid.en + p) * u,
              rec.ua_star + 0.5 * dt * rec.ua_rate};
  return rec;
}

DivergenceEstimate divergence_estimates(const InterfaceRecord& west, const InterfaceRecord& east,
                                        const InterfaceRecord* south,
                                        const InterfaceRecord* north, double dt, const Grid& grid) {
  DivergenceEstimate d;
  d.eta_n = (east.u_star - west.u_star) / grid.dx();
  d.eta_np1 = (east.u_hat - west.u_hat) / grid.dx();
  double rate = (east.dV_dt[kU] - west.dV_dt[kU]) / grid.dx();
  if (south != nullptr && north != nullptr) {
    d.eta_n += (north->u_star - south->u_star) / grid.dy();
    d.eta_np1 += (north->u_hat - south->u_hat) / grid.dy();
    rate += (north->dV_dt[kU] - south->dV_dt[kU]) / grid.dy();
  }
  // Exact decomposition eta^{n+1} = eta^n + dt eta_t; the rate is taken
  // directly so dt = 0 is well defined.
  d.eta_t = dt > 0.0 ? (d.eta_np1 - d.eta_n) / dt : rate;
  return d;
}

std::array<double, 2> cn_residual(double xi, double alpha_tilde, double theta, double rho_e_np1,
                                  const TwoPhaseEos& eos) {
  // Extended precision: at low liquid pressure L1 is a small difference of
  // terms of size gamma1 pi1, and |f| <= 1e-12 is out of reach in double.
  using real = long double;
  const real x = xi;
  const real g1 = eos.phase1.gamma, p1 = eos.phase1.pi;
  const real g2 = eos.phase2.gamma, p2 = eos.phase2.pi;
  const real l1 = (g1 - 1) * (g2 - 1) * static_cast<real>(rho_e_np1) - g1 * p1 * (g2 - 1) * x -
                  g2 * p2 * (g1 - 1) * (1 - x);
  const real l2 = (g2 - g1) * x + g1 - 1;
  const real dl1 = -g1 * p1 * (g2 - 1) + g2 * p2 * (g1 - 1);
  const real dl2 = g2 - g1;
  const real n = g2 * l1 + g2 * p2 * l2;
  const real dn = g2 * dl1 + g2 * p2 * dl2;
  const real a = (g2 - g1) * x + g1;
  const real b = (g2 * p2 - g1 * p1) * x + g1 * p1;
  const real d = a * l1 + b * l2;
  const real dd = (g2 - g1) * l1 + a * dl1 + (g2 * p2 - g1 * p1) * l2 + b * dl2;
  const real k = n / d;
  const real dk = (dn * d - n * dd) / (d * d);
  const real th = theta;
  return {static_cast<double>(x - static_cast<real>(alpha_tilde) - th * x * k),
          static_cast<double>(1 - th * (k + x * dk))};
}

CnResult cn_alpha_update(double alpha_tilde, double theta, double rho_e_np1,
                         const TwoPhaseEos& eos, double c_im) {
  CnResult out;
  if (!(c_im >= 0.0 && c_im <= 1.0)) throw ConfigError("c_im must lie in [0, 1]");
  if (!std::isfinite(alpha_tilde) || !std::isfinite(theta))
    throw BoundViolationError("non-finite volume-fraction update");
  if (alpha_tilde == 0.0) return out;  // f(0; 0) = 0
  if (alpha_tilde < 0.0 || alpha_tilde > 1.0 - theta) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha_tilde = " << alpha_tilde << " outside [0, 1 - theta], theta = " << theta;
    throw BoundViolationError(os.str());
  }
  if (c_im == 0.0 || theta == 0.0) {
    out.alpha = alpha_tilde;
    return out;
  }
  // f(1; 1 - theta) = 0.  For theta > 0 and a stiff/soft pair f is not
  // monotone near 1 and a second root exists at this exact point; take 1.
  if (alpha_tilde == 1.0 - theta) {
    out.alpha = 1.0;
    return out;
  }

  constexpr double kStop = 1e-15;
  constexpr double kAccept = 1e-12;
  auto f = [&](double x) { return cn_residual(x, alpha_tilde, theta, rho_e_np1, eos); };

  double lo = 0.0, hi = 1.0;
  double x = std::clamp(alpha_tilde, 0.0, 1.0);
  double best = x, best_res = kInf;
  for (int it = 0; it < 50; ++it) {
    const auto [fx, dfx] = f(x);
    out.iterations = it + 1;
    if (std::isfinite(fx) && std::abs(fx) < best_res) {
      best = x;
      best_res = std::abs(fx);
    }
    if (std::abs(fx) <= kStop) break;
    if (fx < 0.0) lo = x; else hi = x;
    double next = x - fx / dfx;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 1e-17) break;
    x = next;
  }
  // Where f is steep, neighbouring doubles of xi already differ by more than
  // kAccept in f; a root resolved to one ulp is then the best available.
  auto attainable = [&](double x) {
    const double ulp = std::nextafter(x, 2.0) - x;
    return std::max(kAccept, 2.0 * std::abs(f(x)[1]) * ulp);
  };
  if (best_res <= kAccept || best_res <= attainable(best)) {
    out.alpha = best;
    out.residual = best_res;
    return out;
  }

  // Bisection fallback over the whole interval.
  out.bisection = true;
  lo = 0.0;
  hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid)[0];
    if (std::isfinite(fm) && std::abs(fm) < best_res) {
      best = mid;
      best_res = std::abs(fm);
    }
    if (fm < 0.0) lo = mid; else hi = mid;
    if (best_res <= kStop || hi - lo <= 0.0 || mid == lo || mid == hi) break;
  }
  if (!(best_res <= kAccept || best_res <= attainable(best))) {
    std::ostringstream os;
    os.precision(17);
    os << "volume-fraction solve failed: |f| = " << best_res << " (alpha_tilde = " << alpha_tilde
       << ", theta = " << theta << ")";
    throw SolverFailureError(os.str(), lo, hi);
  }
  out.alpha = best;
  out.residual = best_res;
  return out;
}

double admissible_dt(double a, double b, double c) {
  const double disc = b * b + 4.0 * a * c;
  if (b > 0.0) {
    if (disc < 0.0) return kInf;
    return 2.0 * c / (b + std::sqrt(disc));
  }
  if (a > 0.0) return (-b + std::sqrt(disc)) / (2.0 * a);
  return kInf;
}

BoundQuadratic lower_bound_quadratic(const SourceUpdateState& s) {
  return {0.5 * s.beta_t, s.beta - (1.0 - s.c_im) * s.alpha_bar * s.k_n * s.eta_n, s.alpha_bar};
}

BoundQuadratic upper_bound_quadratic(const SourceUpdateState& s) {
  return {s.c_im * s.eta_t - 0.5 * s.beta_t,
          s.c_im * s.eta_n + (1.0 - s.c_im) * s.alpha_bar * s.k_n * s.eta_n - s.beta,
          1.0 - s.alpha_bar};
}

double cell_bound_dt(const SourceUpdateState& s) {
  double dt = kInf;
  if (s.alpha_bar > kBoundCutoff) {
    const auto q = lower_bound_quadratic(s);
    dt = std::min(dt, admissible_dt(q.a, q.b, q.c));
  }
  if (s.alpha_bar < 1.0 - kBoundCutoff) {
    const auto q = upper_bound_quadratic(s);
    dt = std::min(dt, admissible_dt(q.a, q.b, q.c));
  }
  return dt;
}

// ---------------------------------------------------------------------------

Solver::Solver(Grid grid, TwoPhaseEos eos, SchemeConfig config, FieldState initial)
    : grid_(grid), eos_(eos), config_(config), state_(std::move(initial)) {
  grid_.validate();
  eos_.validate();
  config_.validate();
  if (state_.cells.size() != grid_.cell_count())
    throw ConfigError("field size does not match the grid");
  const std::size_t ng = static_cast<std::size_t>(gnx()) * (grid_.ny + 2 * gy());
  w_.assign(ng, Vec6{});
  sx_.assign(ng, Vec6{});
  sy_.assign(ng, Vec6{});
  grp_x_.resize(static_cast<std::size_t>(grid_.nx + 1) * grid_.ny);
  hat_x_.assign(grp_x_.size(), Vec6{});
  if (grid_.two_d) {
    grp_y_.resize(static_cast<std::size_t>(grid_.nx) * (grid_.ny + 1));
    hat_y_.assign(grp_y_.size(), Vec6{});
  }
}

std::vector<PrimitiveState> Solver::primitives() const {
  std::vector<PrimitiveState> out(state_.cells.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = conserved_to_primitive(state_.cells[k], eos_);
  return out;
}

void Solver::load_primitives() {
  const int nx = grid_.nx;
  parallel_for(grid_.cell_count(), config_.workers, [&](long k) {
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    try {
      w_[g(i, j)] = to_w(conserved_to_primitive(state_.cells[k], eos_));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "cell (" << i << ", " << j << "): " << e.what();
      throw StepFailureError(os.str());
    }
  });
}

void Solver::fill_ghost_values() {
  const int nx = grid_.nx, ny = grid_.ny;
  for (int j = 0; j < ny; ++j) {
    for (int layer = 1; layer <= Grid::kGhost; ++layer) {
      Vec6 lo = w_[g(ghost_source(layer, nx, grid_.x_lo, true), j)];
      Vec6 hi = w_[g(ghost_source(layer, nx, grid_.x_hi, false), j)];
      if (grid_.x_lo == BoundaryKind::Reflective) lo[2] = -lo[2];
      if (grid_.x_hi == BoundaryKind::Reflective) hi[2] = -hi[2];
      w_[g(-layer, j)] = lo;
      w_[g(nx - 1 + layer, j)] = hi;
    }
  }
  if (!grid_.two_d) return;
  for (int i = 0; i < nx; ++i) {
    for (int layer = 1; layer <= Grid::kGhost; ++layer) {
      Vec6 lo = w_[g(i, ghost_source(layer, ny, grid_.y_lo, true))];
      Vec6 hi = w_[g(i, ghost_source(layer, ny, grid_.y_hi, false))];
      if (grid_.y_lo == BoundaryKind::Reflective) lo[3] = -lo[3];
      if (grid_.y_hi == BoundaryKind::Reflective) hi[3] = -hi[3];
      w_[g(i, -layer)] = lo;
      w_[g(i, ny - 1 + layer)] = hi;
    }
  }
}

void Solver::compute_slopes() {
  const int nx = grid_.nx;
  const double dx = grid_.dx(), dy = grid_.dy();
  const auto& rc = config_.reconstruction;
  parallel_for(grid_.cell_count(), config_.workers, [&](long k) {
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    CellLinearData cell;
    cell.center_value = w_[g(i, j)];
    cell.grad_x = have_hat_ ? kapila::compute_slopes(w_[g(i - 1, j)], cell.center_value,
                                                     w_[g(i + 1, j)], hat_x_[fx(i, j)],
                                                     hat_x_[fx(i + 1, j)], rc, dx)
                            : initial_slopes(w_[g(i - 1, j)], cell.center_value, w_[g(i + 1, j)],
                                             rc, dx);
    if (grid_.two_d) {
      cell.grad_y = have_hat_ ? kapila::compute_slopes(w_[g(i, j - 1)], cell.center_value,
                                                       w_[g(i, j + 1)], hat_y_[fy(i, j)],
                                                       hat_y_[fy(i, j + 1)], rc, dy)
                              : initial_slopes(w_[g(i, j - 1)], cell.center_value,
                                               w_[g(i, j + 1)], rc, dy);
    }
    clamp_alpha_gradient(cell, dx, grid_.two_d ? dy : 0.0);
    sx_[g(i, j)] = cell.grad_x;
    sy_[g(i, j)] = cell.grad_y;
  });
}

void Solver::fill_ghost_slopes() {
  const int nx = grid_.nx, ny = grid_.ny;
  // Ghost slope along the normal: -S s for mirror boundaries, where S flips
  // the normal velocity; tangential slopes are S s.
  auto mirror = [](Vec6 s, bool negate_all, bool reflective, int normal) {
    if (negate_all)
      for (double& x : s) x = -x;
    if (reflective) s[normal] = -s[normal];
    return s;
  };
  for (int j = 0; j < ny; ++j) {
    const int src_lo = ghost_source(1, nx, grid_.x_lo, true);
    const int src_hi = ghost_source(1, nx, grid_.x_hi, false);
    const bool plo = grid_.x_lo == BoundaryKind::Periodic;
    const bool phi = grid_.x_hi == BoundaryKind::Periodic;
    const bool rlo = grid_.x_lo == BoundaryKind::Reflective;
    const bool rhi = grid_.x_hi == BoundaryKind::Reflective;
    sx_[g(-1, j)] = mirror(sx_[g(src_lo, j)], !plo, rlo, 2);
    sy_[g(-1, j)] = mirror(sy_[g(src_lo, j)], false, rlo, 2);
    sx_[g(nx, j)] = mirror(sx_[g(src_hi, j)], !phi, rhi, 2);
    sy_[g(nx, j)] = mirror(sy_[g(src_hi, j)], false, rhi, 2);
  }
  if (!grid_.two_d) return;
  for (int i = 0; i < nx; ++i) {
    const int src_lo = ghost_source(1, ny, grid_.y_lo, true);
    const int src_hi = ghost_source(1, ny, grid_.y_hi, false);
    const bool plo = grid_.y_lo == BoundaryKind::Periodic;
    const bool phi = grid_.y_hi == BoundaryKind::Periodic;
    const bool rlo = grid_.y_lo == BoundaryKind::Reflective;
    const bool rhi = grid_.y_hi == BoundaryKind::Reflective;
    sy_[g(i, -1)] = mirror(sy_[g(i, src_lo)], !plo, rlo, 3);
    sx_[g(i, -1)] = mirror(sx_[g(i, src_lo)], false, rlo, 3);
    sy_[g(i, ny)] = mirror(sy_[g(i, src_hi)], !phi, rhi, 3);
    sx_[g(i, ny)] = mirror(sx_[g(i, src_hi)], false, rhi, 3);
  }
}

void Solver::solve_interfaces() {
  const int nx = grid_.nx, ny = grid_.ny;
  const double hx = 0.5 * grid_.dx(), hy = 0.5 * grid_.dy();
  const bool transverse = grid_.two_d && config_.transverse;

  parallel_for(grp_x_.size(), config_.workers, [&](long k) {
    const int i = static_cast<int>(k % (nx + 1)), j = static_cast<int>(k / (nx + 1));
    const std::size_t l = g(i - 1, j), r = g(i, j);
    const PrimitiveState wl = face_state(w_[l], sx_[l], hx);
    const PrimitiveState wr = face_state(w_[r], sx_[r], -hx);
    SlopeSet sl{head5(sx_[l]), head5(sy_[l]), sx_[l][kAlphaW], sy_[l][kAlphaW]};
    SlopeSet sr{head5(sx_[r]), head5(sy_[r]), sx_[r][kAlphaW], sy_[r][kAlphaW]};
    try {
      grp_x_[k] = solve_grp(wl, wr, sl, sr, eos_, transverse);
    } catch (const Error& e) {
      throw FluxFailureError(where("x", i, j) + ": " + e.what());
    }
  });
  if (!grid_.two_d) return;

  parallel_for(grp_y_.size(), config_.workers, [&](long k) {
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    const std::size_t b = g(i, j - 1), t = g(i, j);
    const PrimitiveState wb = swap_uv(face_state(w_[b], sy_[b], hy));
    const PrimitiveState wt = swap_uv(face_state(w_[t], sy_[t], -hy));
    const Vec6 syb = swap_uv(sy_[b]), sxb = swap_uv(sx_[b]);
    const Vec6 syt = swap_uv(sy_[t]), sxt = swap_uv(sx_[t]);
    SlopeSet sb{head5(syb), head5(sxb), syb[kAlphaW], sxb[kAlphaW]};
    SlopeSet st{head5(syt), head5(sxt), syt[kAlphaW], sxt[kAlphaW]};
    try {
      grp_y_[k] = solve_grp(wb, wt, sb, st, eos_, transverse);
    } catch (const Error& e) {
      throw FluxFailureError(where("y", i, j) + ": " + e.what());
    }
  });
  (void)ny;
}

double Solver::time_step(double dt_cap, StepReport& report) {
  const int nx = grid_.nx;
  const double dx = grid_.dx(), dy = grid_.dy();
  const std::size_t n = grid_.cell_count();
  std::vector<double> signal(n), bound(n);

  // Rates of the interface records do not depend on dt.
  auto rec = [&](const GrpResult& r) { return compute_interface_flux(r, 0.0, eos_); };
  parallel_for(n, config_.workers, [&](long k) {
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    const PrimitiveState w = from_w(w_[g(i, j)]);
    const double c = wood_sound_speed(w, eos_);
    signal[k] = (std::abs(w.u) + c) / dx;
    if (grid_.two_d) signal[k] = std::max(signal[k], (std::abs(w.v) + c) / dy);

    const InterfaceRecord west = rec(grp_x_[fx(i, j)]), east = rec(grp_x_[fx(i + 1, j)]);
    SourceUpdateState s;
    s.c_im = config_.c_im;
    s.alpha_bar = w.alpha1;
    s.k_n = source_coefficient(w.p, w.alpha1, eos_);
    DivergenceEstimate d;
    if (grid_.two_d) {
      const InterfaceRecord south = rec(grp_y_[fy(i, j)]), north = rec(grp_y_[fy(i, j + 1)]);
      d = divergence_estimates(west, east, &south, &north, 0.0, grid_);
      s.beta = (east.ua_star - west.ua_star) / dx + (north.ua_star - south.ua_star) / dy;
      s.beta_t = (east.ua_rate - west.ua_rate) / dx + (north.ua_rate - south.ua_rate) / dy;
    } else {
      d = divergence_estimates(west, east, nullptr, nullptr, 0.0, grid_);
      s.beta = (east.ua_star - west.ua_star) / dx;
      s.beta_t = (east.ua_rate - west.ua_rate) / dx;
    }
    s.eta_n = d.eta_n;
    s.eta_t = d.eta_t;
    bound[k] = cell_bound_dt(s);
  });

  double max_signal = 0.0, dt_bound = kInf;
  for (std::size_t k = 0; k < n; ++k) {
    max_signal = std::max(max_signal, signal[k]);
    dt_bound = std::min(dt_bound, bound[k]);
  }
  if (!(max_signal > 0.0) || !std::isfinite(max_signal))
    throw StepFailureError("no finite wave speed in the field");
  report.dt_cfl = config_.cfl / max_signal;
  report.dt_bound = dt_bound;
  // Small margin so round-off in the substituted bound cannot bite.
  double dt = std::min({report.dt_cfl, dt_bound * (1.0 - 1e-6), dt_cap});
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    std::ostringstream os;
    os << "no admissible time step (cfl " << report.dt_cfl << ", bound " << dt_bound << ")";
    throw StepFailureError(os.str());
  }
  return dt;
}

namespace {

// Lift the pressure of a near-empty cell back above the cavitation floor by
// adding internal energy.  Returns whether anything changed.
bool repair_void(ConservedState& cs, const TwoPhaseEos& eos) {
  if (!(cs.rho > 0.0)) return false;
  double floor = -std::numeric_limits<double>::infinity();
  if (cs.alpha1 > kVanishedPhase) floor = std::max(floor, -eos.phase1.pi);
  if (1.0 - cs.alpha1 > kVanishedPhase) floor = std::max(floor, -eos.phase2.pi);
  const double target = floor + 1e-12 * std::max(1.0, std::abs(floor));
  double p = -std::numeric_limits<double>::infinity();
  try {
    p = mixture_pressure(cs.internal_energy(), cs.alpha1, eos);
  } catch (const Error&) {
  }
  if (p >= target) return false;
  cs.en += mixture_rho_e(target, cs.alpha1, eos) - cs.internal_energy();
  return true;
}

struct CellOutcome {
  double residual = 0.0;
  int iterations = 0;
  bool bisection = false;
  bool clamped = false;
  bool checked = false;
  bool voided = false;
  double lower_margin = kInf;
  double upper_margin = kInf;
};

}  // namespace

FieldState Solver::advance(double dt, StepReport& report) {
  const int nx = grid_.nx, ny = grid_.ny;
  const double dx = grid_.dx(), dy = grid_.dy();
  const double dtdx = dt / dx, dtdy = dt / dy;
  const double cim = config_.c_im;

  std::vector<InterfaceRecord> rx(grp_x_.size()), ry(grp_y_.size());
  parallel_for(rx.size(), config_.workers, [&](long k) {
    rx[k] = compute_interface_flux(grp_x_[k], dt, eos_,
                                   where("x", static_cast<int>(k % (nx + 1)),
                                         static_cast<int>(k / (nx + 1))));
  });
  parallel_for(ry.size(), config_.workers, [&](long k) {
    ry[k] = compute_interface_flux(grp_y_[k], dt, eos_,
                                   where("y", static_cast<int>(k % nx), static_cast<int>(k / nx)));
    std::swap(ry[k].flux[2], ry[k].flux[3]);
  });

  FieldState next;
  next.cells.resize(grid_.cell_count());
  next.t = state_.t + dt;
  next.step = state_.step + 1;
  std::vector<CellOutcome> outcome(grid_.cell_count());
  double void_rho = 0.0;
  if (config_.void_density > 0.0) {
    for (const auto& c : state_.cells) void_rho = std::max(void_rho, c.rho);
    void_rho *= config_.void_density;
  }

  parallel_for(grid_.cell_count(), config_.workers, [&](long k) {
    const int i = static_cast<int>(k % nx), j = static_cast<int>(k / nx);
    const InterfaceRecord& west = rx[fx(i, j)];
    const InterfaceRecord& east = rx[fx(i + 1, j)];
    const InterfaceRecord* south = grid_.two_d ? &ry[fy(i, j)] : nullptr;
    const InterfaceRecord* north = grid_.two_d ? &ry[fy(i, j + 1)] : nullptr;

    auto u = state_.cells[k].as_array();
    std::array<double, 6> un{};
    for (int q = 0; q < 6; ++q) {
      un[q] = u[q] - dtdx * (east.flux[q] - west.flux[q]);
      if (grid_.two_d) un[q] -= dtdy * (north->flux[q] - south->flux[q]);
    }

    const PrimitiveState w = from_w(w_[g(i, j)]);
    const DivergenceEstimate d = divergence_estimates(west, east, south, north, dt, grid_);
    const double k_n = source_coefficient(w.p, w.alpha1, eos_);
    const double abar = u[5];
    double alpha_tilde = un[5] + (1.0 - cim) * dt * abar * k_n * d.eta_n;
    const double theta = cim * dt * d.eta_np1;

    CellOutcome& out = outcome[k];
    const bool lower = abar > kBoundCutoff, upper = abar < 1.0 - kBoundCutoff;
    out.checked = lower || upper;
    if (lower) out.lower_margin = alpha_tilde;
    if (upper) out.upper_margin = 1.0 - theta - alpha_tilde;
    const double lo_clamp = 0.0, hi_clamp = std::max(0.0, 1.0 - theta);
    if ((lower && alpha_tilde < 0.0) || (upper && alpha_tilde > 1.0 - theta)) {
      std::ostringstream os;
      os.precision(17);
      os << "cell (" << i << ", " << j << "): alpha_tilde = " << alpha_tilde
         << " violates [0, 1 - theta] with theta = " << theta;
      throw BoundViolationError(os.str());
    }
    if (alpha_tilde < lo_clamp || alpha_tilde > hi_clamp) {
      alpha_tilde = std::clamp(alpha_tilde, lo_clamp, hi_clamp);
      out.clamped = true;
    }

    ConservedState cs = ConservedState::from_array(un);
    try {
      const CnResult cn = cn_alpha_update(alpha_tilde, theta, cs.internal_energy(), eos_, cim);
      cs.alpha1 = cn.alpha;
      out.residual = cn.residual;
      out.iterations = cn.iterations;
      out.bisection = cn.bisection;
      if (cs.rho < void_rho) out.voided = repair_void(cs, eos_);
      check_state(conserved_to_primitive(cs, eos_), eos_);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "cell (" << i << ", " << j << ") at t = " << state_.t << ": " << e.what();
      throw StepFailureError(os.str());
    }
    next.cells[k] = cs;
  });

  for (std::size_t k = 0; k < outcome.size(); ++k) {
    const CellOutcome& o = outcome[k];
    report.max_cn_residual = std::max(report.max_cn_residual, o.residual);
    report.max_cn_iterations = std::max(report.max_cn_iterations, o.iterations);
    report.bisection_cells += o.bisection ? 1 : 0;
    report.clamped_cells += o.clamped ? 1 : 0;
    report.void_cells += o.voided ? 1 : 0;
    report.checked_cells += o.checked ? 1 : 0;
    report.min_lower_margin = std::min(report.min_lower_margin, o.lower_margin);
    report.min_upper_margin = std::min(report.min_upper_margin, o.upper_margin);
    report.alpha_min = std::min(report.alpha_min, next.cells[k].alpha1);
    report.alpha_max = std::max(report.alpha_max, next.cells[k].alpha1);
  }

  // Evolved interface values for the next reconstruction.
  auto evolved = [dt](const InterfaceRecord& r) {
    Vec6 h = to_w(r.star);
    for (int q = 0; q < 5; ++q) h[q] += dt * r.dV_dt[q];
    h[kAlphaW] += dt * r.dAlpha_dt;
    return h;
  };
  for (std::size_t k = 0; k < rx.size(); ++k) hat_x_[k] = evolved(rx[k]);
  for (std::size_t k = 0; k < ry.size(); ++k) hat_y_[k] = swap_uv(evolved(ry[k]));
  (void)ny;
  return next;
}

StepReport Solver::step(double dt_cap) {
  StepReport report;
  load_primitives();
  fill_ghost_values();
  compute_slopes();
  fill_ghost_slopes();
  solve_interfaces();
  const double dt = time_step(dt_cap, report);
  report.dt = dt;
  const std::vector<Vec6> saved_x = hat_x_, saved_y = hat_y_;
  try {
    state_ = advance(dt, report);
  } catch (...) {
    hat_x_ = saved_x;
    hat_y_ = saved_y;
    throw;
  }
  have_hat_ = true;
  return report;
}

FieldState step(const FieldState& state, const Grid& grid, const TwoPhaseEos& eos,
                const SchemeConfig& config, StepReport* report) {
  Solver solver(grid, eos, config, state);
  const StepReport r = solver.step();
  if (report != nullptr) *report = r;
  return solver.state();
}

std::array<double, 5> conserved_totals(const FieldState& state, const Grid& grid) {
  std::array<double, 5> t{};
  for (const auto& c : state.cells) {
    t[0] += c.zr;
    t[1] += c.rho;
    t[2] += c.mx;
    t[3] += c.my;
    t[4] += c.en;
  }
  for (double& x : t) x *= grid.cell_volume();
  return t;
}

}  // namespace kapila
