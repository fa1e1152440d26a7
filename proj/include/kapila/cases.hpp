#pragma once

// Test problems, reference solutions and error metrics.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kapila/riemann_exact.hpp"
#include "kapila/scheme.hpp"

namespace kapila {

/// Volume fraction used for a nominally absent phase.
inline constexpr double kTraceFraction = 1e-8;

struct RiemannData {
  PrimitiveState left;
  PrimitiveState right;
  double x0 = 0.5;
};

/// Isentrope constants: (p + pi_k) / rho_k^gamma_k = S_k.
struct EntropyReference {
  double s1 = 0.0;
  double s2 = 0.0;
};

struct ProblemSpec {
  std::string id;
  std::string name;
  Grid grid;
  TwoPhaseEos eos;
  std::function<PrimitiveState(double x, double y)> initial;
  double t_end = 0.0;
  double cfl = 0.6;
  double kappa = 1.5;
  double c_im = 0.5;
  double void_density = 0.0;
  std::vector<double> snapshot_times;
  std::optional<RiemannData> riemann;
  std::optional<EntropyReference> entropy;

  FieldState initial_state() const;
  SchemeConfig scheme_config(int workers = 1) const;
  void validate() const;
};

struct ExampleOptions {
  int nx = 0;  // 0 keeps the default resolution
  int ny = 0;
  bool full_domain = false;  // 2D cases: simulate both halves
};

/// Ids: "1".."6" and "2p" (shock tube with pressure ratio 100).
ProblemSpec build_example(const std::string& id, const ExampleOptions& options = {});
std::vector<std::string> example_ids();

/// State behind a shock of Mach number `mach` running into `pre` (at rest).
/// direction = -1 for a shock moving towards -x, +1 towards +x.
PrimitiveState post_shock_state(double mach, const PrimitiveState& pre, const StiffenedGas& gas,
                                int direction = -1);

/// Cell-average primitive state of a two-phase mixture given phase data.
PrimitiveState mixture_state(double alpha1, double rho1, double rho2, double u, double v,
                             double p);

struct EntropyErrors {
  double e1_l1 = 0.0, e1_linf = 0.0;
  double e2_l1 = 0.0, e2_linf = 0.0;
  double e_l1 = 0.0, e_linf = 0.0;
};

/// h_k(q) = zeta_k^gamma_k q with the local mass fraction.
double phase_entropy(double zeta_k, double gamma_k, double q);

EntropyErrors entropy_errors(const std::vector<PrimitiveState>& cells, const Grid& grid,
                             const EntropyReference& ref, const TwoPhaseEos& eos);

/// Exact solution of a Riemann-data case at (x, t).
PrimitiveState exact_reference(const ProblemSpec& spec, double x, double t);

/// Relative L1 error of the fields p, u, rho, alpha1 against the exact
/// solution, each normalised by the exact max - min range of that field.
struct FieldErrors {
  double p = 0.0, u = 0.0, rho = 0.0, alpha1 = 0.0;
};
FieldErrors riemann_field_errors(const ProblemSpec& spec, const std::vector<PrimitiveState>& cells,
                                 double t);

/// Linear-interpolated position in [xa, xb] where `values` (sampled at xs)
/// first crosses `level`.  NaN when there is no crossing.
double level_crossing(const std::vector<double>& xs, const std::vector<double>& values,
                      double level, double xa, double xb);

// ---------------------------------------------------------------------------
// Time integration.

struct SimulationSummary {
  long steps = 0;
  double t = 0.0;
  double alpha_min = 1.0;
  double alpha_max = 0.0;
  double max_cn_residual = 0.0;
  long clamped_cells = 0;
  long void_cells = 0;
  long checked_cells = 0;
  double min_lower_margin = std::numeric_limits<double>::infinity();
  double min_upper_margin = std::numeric_limits<double>::infinity();
  std::array<double, 5> totals_initial{};
  std::array<double, 5> totals_final{};
};

using StepObserver = std::function<void(const Solver&, const StepReport&)>;
using SnapshotObserver = std::function<void(const Solver&)>;

/// Advance to spec.t_end, landing exactly on every snapshot time.  The
/// snapshot observer fires at each requested time; the step observer after
/// every accepted step.
SimulationSummary simulate(Solver& solver, double t_end, const std::vector<double>& snapshots,
                           const SnapshotObserver& on_snapshot = {},
                           const StepObserver& on_step = {});

SimulationSummary simulate(const ProblemSpec& spec, int workers = 1,
                           const SnapshotObserver& on_snapshot = {},
                           const StepObserver& on_step = {});

// ---------------------------------------------------------------------------
// Convergence studies.

/// log(E_a / E_b) / log(N_b / N_a) for consecutive entries.
std::vector<double> convergence_orders(const std::vector<int>& resolutions,
                                       const std::vector<double>& errors);

struct ConvergenceTable {
  std::vector<int> resolutions;
  std::vector<EntropyErrors> errors;
  double seconds = 0.0;
};

/// Example-1 style entropy convergence over the given resolutions.
ConvergenceTable convergence_study(const std::string& id, const std::vector<int>& resolutions,
                                   int workers = 1);

}  // namespace kapila
