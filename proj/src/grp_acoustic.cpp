#include "kapila/grp_acoustic.hpp"

#include <cmath>

namespace kapila {

namespace {

double plus_part(double x) { return x > 0.0 ? x : 0.0; }
double minus_part(double x) { return x < 0.0 ? x : 0.0; }
double upwind_plus(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? 0.0 : 0.5); }
double upwind_minus(double x) { return x < 0.0 ? 1.0 : (x > 0.0 ? 0.0 : 0.5); }

// Characteristic amplitudes L d for the five fields, ordered
// (u - c, v-shear, entropy/density, zeta, u + c).
struct Amplitudes {
  double a1, av, arho, azeta, a5;
};

Amplitudes project(const Vec5& d, double rho_c, double c2) {
  return {0.5 * (d[kP] - rho_c * d[kU]), d[kV], d[kRho] - d[kP] / c2, d[kZeta],
          0.5 * (d[kP] + rho_c * d[kU])};
}

// B(V*) e for a y-slope vector e.
Vec5 transverse_flux(const PrimitiveState& s, double rho_c2, const Vec5& e) {
  return {s.v * e[kZeta], s.v * e[kRho] + s.rho * e[kV], s.v * e[kU],
          s.v * e[kV] + e[kP] / s.rho, rho_c2 * e[kV] + s.v * e[kP]};
}

}  // namespace

Vec5 primitive_vector(const PrimitiveState& w) { return {w.zeta1, w.rho, w.u, w.v, w.p}; }

Mat5 matmul(const Mat5& a, const Mat5& b) {
  Mat5 c{};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Vec5 matvec(const Mat5& a, const Vec5& x) {
  Vec5 y{};
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 5; ++k) y[i] += a[i][k] * x[k];
  return y;
}

Mat5 coefficient_matrix_x(const PrimitiveState& w, double c) {
  Mat5 a{};
  for (int i = 0; i < 5; ++i) a[i][i] = w.u;
  a[kRho][kU] = w.rho;
  a[kU][kP] = 1.0 / w.rho;
  a[kP][kU] = w.rho * c * c;
  return a;
}

Mat5 coefficient_matrix_y(const PrimitiveState& w, double c) {
  Mat5 b{};
  for (int i = 0; i < 5; ++i) b[i][i] = w.v;
  b[kRho][kV] = w.rho;
  b[kV][kP] = 1.0 / w.rho;
  b[kP][kV] = w.rho * c * c;
  return b;
}

CharacteristicSystem build_characteristic_system(const PrimitiveState& star,
                                                 const TwoPhaseEos& eos) {
  CharacteristicSystem cs;
  const double c = wood_sound_speed(star, eos);
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidStateError("degenerate sound speed");
  cs.c = c;
  cs.A = coefficient_matrix_x(star, c);
  cs.B = coefficient_matrix_y(star, c);
  const double rc = star.rho * c;
  const double c2 = c * c;

  // Columns: R1 (u-c), R2 = e_v, R3 = e_rho, R4 = e_zeta, R5 (u+c).
  cs.R[kRho][0] = 1.0 / c2;
  cs.R[kU][0] = -1.0 / rc;
  cs.R[kP][0] = 1.0;
  cs.R[kV][1] = 1.0;
  cs.R[kRho][2] = 1.0;
  cs.R[kZeta][3] = 1.0;
  cs.R[kRho][4] = 1.0 / c2;
  cs.R[kU][4] = 1.0 / rc;
  cs.R[kP][4] = 1.0;

  cs.L[0][kU] = -0.5 * rc;
  cs.L[0][kP] = 0.5;
  cs.L[1][kV] = 1.0;
  cs.L[2][kRho] = 1.0;
  cs.L[2][kP] = -1.0 / c2;
  cs.L[3][kZeta] = 1.0;
  cs.L[4][kU] = 0.5 * rc;
  cs.L[4][kP] = 0.5;

  cs.lambda = {star.u - c, star.u, star.u, star.u, star.u + c};
  for (int k = 0; k < 5; ++k) {
    cs.lambda_plus[k] = plus_part(cs.lambda[k]);
    cs.lambda_minus[k] = minus_part(cs.lambda[k]);
    cs.upwind_plus[k] = upwind_plus(cs.lambda[k]);
    cs.upwind_minus[k] = upwind_minus(cs.lambda[k]);
  }
  return cs;
}

Vec5 acoustic_time_derivatives(const PrimitiveState& star, const SlopeSet& left,
                               const SlopeSet& right, const TwoPhaseEos& eos, bool transverse) {
  const double c = wood_sound_speed(star, eos);
  const double c2 = c * c;
  const double rho_c = star.rho * c;
  const double l1 = star.u - c, l5 = star.u + c, l0 = star.u;

  const auto xl = project(left.dV_dx, rho_c, c2);
  const auto xr = project(right.dV_dx, rho_c, c2);

  // Characteristic rates r_k = (L A V_x)_k + (L B V_y)_k, upwinded.
  double r1 = plus_part(l1) * xl.a1 + minus_part(l1) * xr.a1;
  double r5 = plus_part(l5) * xl.a5 + minus_part(l5) * xr.a5;
  double rv = plus_part(l0) * xl.av + minus_part(l0) * xr.av;
  double rrho = plus_part(l0) * xl.arho + minus_part(l0) * xr.arho;
  double rzeta = plus_part(l0) * xl.azeta + minus_part(l0) * xr.azeta;

  if (transverse) {
    const double rho_c2 = star.rho * c2;
    const auto yl = project(transverse_flux(star, rho_c2, left.dV_dy), rho_c, c2);
    const auto yr = project(transverse_flux(star, rho_c2, right.dV_dy), rho_c, c2);
    r1 += upwind_plus(l1) * yl.a1 + upwind_minus(l1) * yr.a1;
    r5 += upwind_plus(l5) * yl.a5 + upwind_minus(l5) * yr.a5;
    rv += upwind_plus(l0) * yl.av + upwind_minus(l0) * yr.av;
    rrho += upwind_plus(l0) * yl.arho + upwind_minus(l0) * yr.arho;
    rzeta += upwind_plus(l0) * yl.azeta + upwind_minus(l0) * yr.azeta;
  }

  Vec5 dv{};
  dv[kZeta] = -rzeta;
  dv[kRho] = -(r1 + r5) / c2 - rrho;
  dv[kU] = -(r5 - r1) / rho_c;
  dv[kV] = -rv;
  dv[kP] = -(r1 + r5);
  return dv;
}

SlopeSet upwind_slopes(double u_star, const SlopeSet& left, const SlopeSet& right) {
  if (u_star > 0.0) return left;
  if (u_star < 0.0) return right;
  SlopeSet avg;
  for (int k = 0; k < 5; ++k) {
    avg.dV_dx[k] = 0.5 * (left.dV_dx[k] + right.dV_dx[k]);
    avg.dV_dy[k] = 0.5 * (left.dV_dy[k] + right.dV_dy[k]);
  }
  avg.dAlpha_dx = 0.5 * (left.dAlpha_dx + right.dAlpha_dx);
  avg.dAlpha_dy = 0.5 * (left.dAlpha_dy + right.dAlpha_dy);
  return avg;
}

PhaseDensityRate phase_density_time_derivative(const PrimitiveState& star, double dp_dt,
                                               const SlopeSet& upwind, const TwoPhaseEos& eos,
                                               bool transverse) {
  PhaseDensityRate out;
  if (star.alpha1 < kGrpAlphaCutoff || star.zeta1 < kGrpAlphaCutoff) {
    out.vanished = true;
    return out;
  }
  const double z1 = eos.phase1.impedance_squared(star.p);  // rho1 c1^2
  // c1^2 (rho1)_x = rho1 c1^2 (zeta_x / zeta + rho_x / rho - alpha_x / alpha)
  auto entropy_slope = [&](const Vec5& d, double dalpha) {
    const double log_rho1 = d[kZeta] / star.zeta1 + d[kRho] / star.rho - dalpha / star.alpha1;
    return d[kP] - z1 * log_rho1;
  };
  double advective = star.u * entropy_slope(upwind.dV_dx, upwind.dAlpha_dx);
  if (transverse) advective += star.v * entropy_slope(upwind.dV_dy, upwind.dAlpha_dy);
  out.value = (dp_dt + advective) / z1;
  return out;
}

double alpha_time_derivative(const PrimitiveState& star, double d_taurho1_dt, double dZeta_dt,
                             double dRho_dt) {
  if (!(star.alpha1 > kGrpAlphaCutoff && star.alpha1 < 1.0 - kGrpAlphaCutoff)) return 0.0;
  if (!(star.zeta1 > kGrpAlphaCutoff)) return 0.0;
  return star.alpha1 * (-d_taurho1_dt + dZeta_dt / star.zeta1 + dRho_dt / star.rho);
}

GrpResult solve_grp(const PrimitiveState& left, const PrimitiveState& right,
                    const SlopeSet& slopes_left, const SlopeSet& slopes_right,
                    const TwoPhaseEos& eos, bool transverse) {
  const WaveFan fan = solve_exact(left, right, eos);
  GrpResult res;
  res.star = sample(fan, 0.0, eos);
  if (!(res.star.rho > 0.0)) {
    // Void at the interface: nothing to propagate.
    res.vacuum = true;
    return res;
  }
  res.dV_dt = acoustic_time_derivatives(res.star, slopes_left, slopes_right, eos, transverse);
  const auto up = upwind_slopes(res.star.u, slopes_left, slopes_right);
  const auto rate = phase_density_time_derivative(res.star, res.dV_dt[kP], up, eos, transverse);
  res.dAlpha_dt =
      rate.vanished ? 0.0
                    : alpha_time_derivative(res.star, rate.value, res.dV_dt[kZeta], res.dV_dt[kRho]);
  return res;
}

}  // namespace kapila
