#pragma once

// Acoustic generalized Riemann problem solver.  The quasi-linear system for
// V = (zeta1, rho, u, v, p),
//   V_t + A(V) V_x + B(V) V_y = 0,
// is frozen at the Riemann star state and split into characteristic fields,
// which yields the instantaneous interface time derivative from the one-sided
// slopes.  The volume-fraction rate follows from alpha1 tau = zeta1 tau1.

#include <array>

#include "kapila/eos.hpp"
#include "kapila/riemann_exact.hpp"

namespace kapila {

using Vec5 = std::array<double, 5>;
using Mat5 = std::array<Vec5, 5>;

/// Component indices of V.
enum VIndex : int { kZeta = 0, kRho = 1, kU = 2, kV = 3, kP = 4 };

/// Volume fractions outside (cutoff, 1 - cutoff) carry no alpha1 rate.
inline constexpr double kGrpAlphaCutoff = 1e-6;

/// One-sided spatial gradients at the interface foot point.
struct SlopeSet {
  Vec5 dV_dx{};
  Vec5 dV_dy{};
  double dAlpha_dx = 0.0;
  double dAlpha_dy = 0.0;
};

struct GrpResult {
  PrimitiveState star;
  Vec5 dV_dt{};
  double dAlpha_dt = 0.0;
  bool vacuum = false;  // star has rho = 0, derivatives are zero
};

struct CharacteristicSystem {
  Mat5 A{};
  Mat5 B{};
  Mat5 R{};  // columns are right eigenvectors
  Mat5 L{};  // inverse of R
  Vec5 lambda{};
  Vec5 lambda_plus{};
  Vec5 lambda_minus{};
  Vec5 upwind_plus{};   // 1 for lambda > 0, 1/2 for lambda == 0
  Vec5 upwind_minus{};  // 1 for lambda < 0, 1/2 for lambda == 0
  double c = 0.0;       // Wood sound speed
};

Vec5 primitive_vector(const PrimitiveState& w);
Mat5 matmul(const Mat5& a, const Mat5& b);
Vec5 matvec(const Mat5& a, const Vec5& x);

CharacteristicSystem build_characteristic_system(const PrimitiveState& star,
                                                 const TwoPhaseEos& eos);

/// Coefficient matrices of the quasi-linear system at w.
Mat5 coefficient_matrix_x(const PrimitiveState& w, double c);
Mat5 coefficient_matrix_y(const PrimitiveState& w, double c);

/// (dV/dt)* by characteristic upwinding.  Without `transverse` the
/// y-derivative terms are dropped.
Vec5 acoustic_time_derivatives(const PrimitiveState& star, const SlopeSet& left,
                               const SlopeSet& right, const TwoPhaseEos& eos, bool transverse);

/// (tau1 d rho1/dt)*, with the entropy slope written through p and rho1
/// slopes taken from the side upwind of the contact.
struct PhaseDensityRate {
  double value = 0.0;
  bool vanished = false;
};
PhaseDensityRate phase_density_time_derivative(const PrimitiveState& star, double dp_dt,
                                               const SlopeSet& upwind, const TwoPhaseEos& eos,
                                               bool transverse);

/// (d alpha1/dt)* = alpha1 (-(tau1 rho1_t) + zeta1_t / zeta1 + tau rho_t).
double alpha_time_derivative(const PrimitiveState& star, double d_taurho1_dt, double dZeta_dt,
                             double dRho_dt);

/// Slopes from the side upwind of the contact (u* = 0: average).
SlopeSet upwind_slopes(double u_star, const SlopeSet& left, const SlopeSet& right);

GrpResult solve_grp(const PrimitiveState& left, const PrimitiveState& right,
                    const SlopeSet& slopes_left, const SlopeSet& slopes_right,
                    const TwoPhaseEos& eos, bool transverse);

}  // namespace kapila
