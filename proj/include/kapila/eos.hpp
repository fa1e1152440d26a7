#pragma once

// Stiffened-gas closures for a two-phase mixture in pressure and temperature
// disequilibrium-free (Kapila) form, and conversions between conserved and
// primitive variables.

#include <array>

#include "kapila/errors.hpp"

namespace kapila {

/// Volume fractions at or below this are treated as a vanished phase.
inline constexpr double kVanishedPhase = 1e-9;

/// p = (gamma - 1) rho e - gamma pi
struct StiffenedGas {
  double gamma = 1.4;
  double pi = 0.0;

  /// rho_k c_k^2, which for a stiffened gas depends on pressure only.
  double impedance_squared(double p) const { return gamma * (p + pi); }
  /// Volumetric internal energy rho_k e_k of the pure phase at pressure p.
  double rho_e(double p) const { return (p + gamma * pi) / (gamma - 1.0); }
  void validate() const;
};

struct TwoPhaseEos {
  StiffenedGas phase1;
  StiffenedGas phase2;

  const StiffenedGas& phase(int k) const { return k == 1 ? phase1 : phase2; }
  void validate() const;
};

/// Primitive variables.  The complements alpha2 = 1 - alpha1 and
/// zeta2 = 1 - zeta1 are derived on demand and never stored.
struct PrimitiveState {
  double zeta1 = 0.0;
  double rho = 1.0;
  double u = 0.0;
  double v = 0.0;
  double p = 1.0;
  double alpha1 = 0.0;

  double zeta2() const { return 1.0 - zeta1; }
  double alpha2() const { return 1.0 - alpha1; }
  double alpha(int k) const { return k == 1 ? alpha1 : alpha2(); }
  double zeta(int k) const { return k == 1 ? zeta1 : zeta2(); }
  /// rho_k = zeta_k rho / alpha_k, with alpha_k clamped at kVanishedPhase.
  double phase_density(int k) const;

  friend bool operator==(const PrimitiveState&, const PrimitiveState&) = default;
};

/// U = [zeta1 rho, rho, rho u, rho v, rho E, alpha1]
struct ConservedState {
  double zr = 0.0;
  double rho = 1.0;
  double mx = 0.0;
  double my = 0.0;
  double en = 0.0;
  double alpha1 = 0.0;

  /// rho e = rho E - |rho u|^2 / (2 rho)
  double internal_energy() const { return en - 0.5 * (mx * mx + my * my) / rho; }

  std::array<double, 6> as_array() const { return {zr, rho, mx, my, en, alpha1}; }
  static ConservedState from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

/// c_k = sqrt(gamma (p + pi) / rho_k).  `phase` is only used in diagnostics.
double phase_sound_speed(double p, double rho_k, const StiffenedGas& gas, int phase = 0);

/// Wood mixture sound speed, 1/(rho c^2) = sum_k alpha_k / (rho_k c_k^2).
double wood_sound_speed(const PrimitiveState& w, const TwoPhaseEos& eos);

/// rho c^2 of the mixture (Wood), skipping vanished phases.
double mixture_impedance_squared(double p, double alpha1, const TwoPhaseEos& eos);

/// Mixture volumetric internal energy at (p, alpha1).
double mixture_rho_e(double p, double alpha1, const TwoPhaseEos& eos);

/// Numerator and denominator of the pressure relation p = L1 / L2.
struct PressureRelation {
  double l1;
  double l2;
};
PressureRelation pressure_relation(double rho_e, double alpha1, const TwoPhaseEos& eos);

/// Pressure recovered from the mixture internal energy and volume fraction.
double mixture_pressure(double rho_e, double alpha1, const TwoPhaseEos& eos);

/// K = rho2 c2^2 / (alpha1 rho2 c2^2 + alpha2 rho1 c1^2)
double source_coefficient(double p, double alpha1, const TwoPhaseEos& eos);

ConservedState primitive_to_conserved(const PrimitiveState& w, const TwoPhaseEos& eos);
PrimitiveState conserved_to_primitive(const ConservedState& u, const TwoPhaseEos& eos);

/// Throws InvalidStateError when w violates the primitive-state invariants.
void check_state(const PrimitiveState& w, const TwoPhaseEos& eos);

}  // namespace kapila
