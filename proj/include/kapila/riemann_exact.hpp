#pragma once

// Exact solution of the planar two-phase Riemann problem with constant data.
//
// Shocks obey the per-phase Hugoniot
//   zeta_k = zeta_k^0,  rho (u - sigma) = rho^0 (u^0 - sigma) = m,
//   p - p^0 = m^2 (tau - tau^0),
//   e_k - e_k^0 + (p + p^0)/2 (tau_k - tau_k^0) = 0,
// which for stiffened gases gives tau_k(p) in closed form.  Rarefactions
// follow the per-phase isentropes (p + pi_k) tau_k^{gamma_k} = const; only the
// velocity u(p) = u^0 +- int dp / (rho c) with the Wood speed c needs
// quadrature.

#include "kapila/eos.hpp"

namespace kapila {

enum class WaveKind { Shock, Rarefaction };
enum class Side { Left, Right };

struct ShockBranch {
  double u_behind;
  PrimitiveState behind;
  double sigma;      // shock speed
  double mass_flux;  // |m|, positive
};

struct RarefactionBranch {
  double u_behind;
  PrimitiveState behind;
  double head;  // characteristic speed at the undisturbed edge
  double tail;  // characteristic speed at the star edge
};

struct WaveFan {
  PrimitiveState left;   // undisturbed data
  PrimitiveState right;
  double p_star = 0.0;
  double u_star = 0.0;
  WaveKind left_wave = WaveKind::Rarefaction;
  WaveKind right_wave = WaveKind::Rarefaction;
  PrimitiveState left_star;
  PrimitiveState right_star;
  // For a shock head == tail == sigma.
  double left_head = 0.0, left_tail = 0.0;
  double right_head = 0.0, right_tail = 0.0;
  double sigma_left = 0.0, sigma_right = 0.0;
  double m_left = 0.0, m_right = 0.0;
  int iterations = 0;
  // The rarefactions cannot meet above the cavitation floor: a void at
  // p_star == floor with rho = 0 separates the tails, where u = xi.
  bool vacuum = false;
};

/// Lowest admissible pressure for an expansion out of `pre`: max over
/// non-vanished phases of -pi_k.
double cavitation_floor(const PrimitiveState& pre, const TwoPhaseEos& eos);

/// Shock connecting `pre` to pressure p_star >= pre.p.  `side` selects the
/// wave family (Left: u - c family, pre-state on the left).
ShockBranch shock_branch(double p_star, const PrimitiveState& pre, const TwoPhaseEos& eos,
                         Side side = Side::Left);

/// Rarefaction connecting `pre` to p_star <= pre.p.
RarefactionBranch rarefaction_branch(double p_star, const PrimitiveState& pre,
                                     const TwoPhaseEos& eos, Side side = Side::Left);

/// Riemann state on the isentrope through `pre` at pressure p (no velocity).
PrimitiveState isentrope_state(double p, const PrimitiveState& pre, const TwoPhaseEos& eos);

WaveFan solve_exact(const PrimitiveState& left, const PrimitiveState& right,
                    const TwoPhaseEos& eos);

/// Self-similar solution at xi = x / t.  At xi == u_star the two contact
/// sides are averaged.  Inside a void the state has rho = 0 and u = xi.
PrimitiveState sample(const WaveFan& fan, double xi, const TwoPhaseEos& eos);

/// Reflect a state through the plane normal to x (u -> -u).
inline PrimitiveState mirror_x(PrimitiveState w) {
  w.u = -w.u;
  return w;
}

}  // namespace kapila
