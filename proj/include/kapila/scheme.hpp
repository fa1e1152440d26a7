#pragma once

// Unsplit GRP finite-volume update with a semi-implicit volume-fraction
// source and a time-step controller that keeps alpha1 in [0, 1].

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "kapila/eos.hpp"
#include "kapila/grp_acoustic.hpp"
#include "kapila/reconstruction.hpp"

namespace kapila {

enum class BoundaryKind { Periodic, Transmissive, Reflective };

std::string to_string(BoundaryKind kind);
BoundaryKind boundary_from_string(const std::string& name);

struct Grid {
  static constexpr int kGhost = 2;

  bool two_d = false;
  int nx = 4;
  int ny = 1;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  BoundaryKind x_lo = BoundaryKind::Transmissive;
  BoundaryKind x_hi = BoundaryKind::Transmissive;
  BoundaryKind y_lo = BoundaryKind::Transmissive;
  BoundaryKind y_hi = BoundaryKind::Transmissive;

  static Grid line(int nx, double x_min, double x_max, BoundaryKind lo, BoundaryKind hi);
  static Grid plane(int nx, int ny, double x_min, double x_max, double y_min, double y_max,
                    BoundaryKind x_lo, BoundaryKind x_hi, BoundaryKind y_lo, BoundaryKind y_hi);

  double dx() const { return (x_max - x_min) / nx; }
  double dy() const { return two_d ? (y_max - y_min) / ny : 1.0; }
  double cell_volume() const { return dx() * dy(); }
  double xc(int i) const;
  /// Written about the mid-line so that rows j and ny-1-j are exact mirrors.
  double yc(int j) const;
  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i);
  }
  void validate() const;
};

struct FieldState {
  std::vector<ConservedState> cells;  // row-major, index = j * nx + i
  double t = 0.0;
  long step = 0;
};

struct SchemeConfig {
  double cfl = 0.6;
  ReconstructionConfig reconstruction;
  double c_im = 0.5;
  int workers = 1;
  bool transverse = true;
  // Cells lighter than void_density times the densest cell whose recovered
  // pressure falls to the cavitation floor are treated as void: their
  // pressure is reset just above the floor.  Zero disables the rule.
  double void_density = 0.0;
  void validate() const;
};

/// One interface, in its normal frame (u is the face-normal velocity).
struct InterfaceRecord {
  PrimitiveState star;
  Vec5 dV_dt{};
  double dAlpha_dt = 0.0;
  std::array<double, 6> flux{};  // F(U^{n+1/2}); last entry is the alpha1 flux
  double u_star = 0.0;           // normal velocity at t^n
  double u_hat = 0.0;            // evolved normal velocity at t^{n+1}
  double ua_star = 0.0;          // (u alpha1)*
  double ua_rate = 0.0;          // d(u alpha1)/dt at the interface
};

/// Mid-time flux from a GRP result.  The alpha1 flux is the Taylor midpoint
/// (u alpha1)* + dt/2 d(u alpha1)/dt.  Throws FluxFailureError naming
/// `where` when the mid-time state is unusable.
InterfaceRecord compute_interface_flux(const GrpResult& grp, double dt, const TwoPhaseEos& eos,
                                       const std::string& where = "interface");

/// Conserved time derivative from primitive ones by the chain rule.
std::array<double, 6> conserved_time_derivative(const PrimitiveState& w, const Vec5& dV_dt,
                                                double dAlpha_dt, const TwoPhaseEos& eos);

/// Physical flux F(U) in the x direction.
std::array<double, 6> physical_flux(const PrimitiveState& w, const TwoPhaseEos& eos);

struct DivergenceEstimate {
  double eta_n = 0.0;
  double eta_np1 = 0.0;
  double eta_t = 0.0;
};

/// Gauss-Green divergence of a cell from its face records.  Pass nullptr
/// for the y faces in 1D.
DivergenceEstimate divergence_estimates(const InterfaceRecord& west, const InterfaceRecord& east,
                                        const InterfaceRecord* south,
                                        const InterfaceRecord* north, double dt, const Grid& grid);

struct SourceUpdateState {
  double alpha_bar = 0.0;
  double alpha_tilde = 0.0;
  double theta = 0.0;
  double eta_n = 0.0, eta_np1 = 0.0, eta_t = 0.0;
  double beta = 0.0, beta_t = 0.0;
  double k_n = 0.0;  // source coefficient at t^n
  double c_im = 0.5;
};

struct CnResult {
  double alpha = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool bisection = false;
};

/// f(xi) = xi - alpha_tilde - theta xi K(xi) with K written through the
/// pressure relation at fixed rho e.  Returns f and df/dxi.
std::array<double, 2> cn_residual(double xi, double alpha_tilde, double theta, double rho_e_np1,
                                  const TwoPhaseEos& eos);

/// Root xi in [0, 1] of the Crank-Nicolson volume-fraction equation.
CnResult cn_alpha_update(double alpha_tilde, double theta, double rho_e_np1,
                         const TwoPhaseEos& eos, double c_im);

/// Largest dt0 with a dt^2 + b dt - c <= 0 on [0, dt0], c > 0.  Infinity when
/// the inequality never binds.
double admissible_dt(double a, double b, double c);

/// Quadratic coefficients (a, b, c) of the lower and upper alpha1 bounds.
struct BoundQuadratic {
  double a = 0.0, b = 0.0, c = 0.0;
};
BoundQuadratic lower_bound_quadratic(const SourceUpdateState& s);
BoundQuadratic upper_bound_quadratic(const SourceUpdateState& s);

/// Volume fractions outside (cutoff, 1 - cutoff) are not constrained by the
/// controller.
inline constexpr double kBoundCutoff = 1e-6;

/// Bound-derived step for one cell (infinity when unconstrained).
double cell_bound_dt(const SourceUpdateState& s);

struct StepReport {
  double dt = 0.0;
  double dt_cfl = 0.0;
  double dt_bound = std::numeric_limits<double>::infinity();
  double max_cn_residual = 0.0;
  int max_cn_iterations = 0;
  long bisection_cells = 0;
  long clamped_cells = 0;    // cutoff cells whose alpha_tilde was clamped
  long checked_cells = 0;    // cells where the bound was verified directly
  double min_lower_margin = std::numeric_limits<double>::infinity();  // min alpha_tilde
  double min_upper_margin = std::numeric_limits<double>::infinity();  // min 1-theta-alpha_tilde
  double alpha_min = 1.0, alpha_max = 0.0;
  long void_cells = 0;  // cells reset by the void rule
};

class Solver {
 public:
  Solver(Grid grid, TwoPhaseEos eos, SchemeConfig config, FieldState initial);

  /// Advance one step with dt <= dt_cap.  On failure the state is unchanged.
  StepReport step(double dt_cap = std::numeric_limits<double>::infinity());

  const FieldState& state() const { return state_; }
  const Grid& grid() const { return grid_; }
  const TwoPhaseEos& eos() const { return eos_; }
  const SchemeConfig& config() const { return config_; }
  std::vector<PrimitiveState> primitives() const;

 private:
  int gnx() const { return grid_.nx + 2 * Grid::kGhost; }
  int gy() const { return grid_.two_d ? Grid::kGhost : 0; }
  std::size_t g(int i, int j) const {
    return static_cast<std::size_t>(j + gy()) * gnx() + static_cast<std::size_t>(i + Grid::kGhost);
  }
  std::size_t fx(int i, int j) const { return static_cast<std::size_t>(j) * (grid_.nx + 1) + i; }
  std::size_t fy(int i, int j) const { return static_cast<std::size_t>(j) * grid_.nx + i; }

  void load_primitives();
  void fill_ghost_values();
  void compute_slopes();
  void fill_ghost_slopes();
  void solve_interfaces();
  double time_step(double dt_cap, StepReport& report);
  FieldState advance(double dt, StepReport& report);

  Grid grid_;
  TwoPhaseEos eos_;
  SchemeConfig config_;
  FieldState state_;

  std::vector<Vec6> w_, sx_, sy_;       // ghost-extended
  std::vector<GrpResult> grp_x_, grp_y_;
  std::vector<Vec6> hat_x_, hat_y_;     // evolved interface values What
  bool have_hat_ = false;
};

/// Stateless single step: slopes from the bootstrap reconstruction.
FieldState step(const FieldState& state, const Grid& grid, const TwoPhaseEos& eos,
                const SchemeConfig& config, StepReport* report = nullptr);

/// Totals of zeta1 rho, rho, rho u, rho v, rho E (cell volume included).
std::array<double, 5> conserved_totals(const FieldState& state, const Grid& grid);

}  // namespace kapila
