#include "kapila/riemann_exact.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

namespace kapila {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kQuadratureTolerance = 1e-13;

// Everything below works on a left-facing wave (u - c family, undisturbed
// state on the left).  Right-facing waves are handled by reflecting the data
// through x -> -x, which keeps the two sides bitwise symmetric.

bool present(const PrimitiveState& pre, int k) { return pre.alpha(k) > kVanishedPhase; }

void require_feasible(const PrimitiveState& pre, const TwoPhaseEos& eos) {
  for (int k = 1; k <= 2; ++k) {
    if (present(pre, k) && !(eos.phase(k).impedance_squared(pre.p) > 0.0)) {
      std::ostringstream os;
      os << "phase " << k << " has p + pi <= 0 in the undisturbed state (p=" << pre.p << ")";
      throw InfeasibleJumpError(os.str());
    }
  }
  if (!(pre.rho > 0.0)) throw InfeasibleJumpError("non-positive undisturbed density");
}

// Specific volume and volume fraction on the isentrope through `pre`.
struct IsentropePoint {
  double tau;
  double alpha1;
};

IsentropePoint isentrope_point(double p, const PrimitiveState& pre, const TwoPhaseEos& eos) {
  const double tau0 = 1.0 / pre.rho;
  std::array<double, 2> part{};  // alpha_k tau (zeta_k tau_k)
  for (int k = 1; k <= 2; ++k) {
    const double w = pre.alpha(k) * tau0;
    if (!present(pre, k)) {
      part[k - 1] = w;
      continue;
    }
    const auto& gas = eos.phase(k);
    part[k - 1] = w * std::pow((pre.p + gas.pi) / (p + gas.pi), 1.0 / gas.gamma);
  }
  const double tau = part[0] + part[1];
  return {tau, part[0] / tau};
}

// 1 / (rho c) on the isentrope.
double inverse_impedance(double p, const PrimitiveState& pre, const TwoPhaseEos& eos) {
  const auto pt = isentrope_point(p, pre, eos);
  const double rho_c2 = mixture_impedance_squared(p, pt.alpha1, eos);
  return std::sqrt(pt.tau / rho_c2);
}

// Isentrope parametrised by d = p - floor.  Working in d keeps p + pi_k
// exact for the phase that sets the floor, where tau_k blows up.
struct FloorPoint {
  double tau;
  double alpha1;
  double inv_impedance;  // 1 / (rho c)
};

FloorPoint isentrope_above_floor(double d, double floor, const PrimitiveState& pre,
                                 const TwoPhaseEos& eos) {
  const double tau0 = 1.0 / pre.rho;
  std::array<double, 2> part{}, x{};
  for (int k = 1; k <= 2; ++k) {
    const double w = pre.alpha(k) * tau0;
    if (!present(pre, k)) {
      part[k - 1] = w;
      continue;
    }
    const auto& gas = eos.phase(k);
    x[k - 1] = d + (floor + gas.pi);
    part[k - 1] = w * std::pow((pre.p + gas.pi) / x[k - 1], 1.0 / gas.gamma);
  }
  const double tau = part[0] + part[1];
  double compliance = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const double a = part[k - 1] / tau;
    if (present(pre, k)) compliance += a / (eos.phase(k).gamma * x[k - 1]);
  }
  // Split root keeps d -> 0 from overflowing; the excluded sliver is negligible.
  const double inv = std::sqrt(tau) * std::sqrt(compliance);
  return {tau, part[0] / tau, std::isfinite(inv) ? inv : 0.0};
}

// int_p^{p0} dq / (rho c)
double rarefaction_integral(double p, const PrimitiveState& pre, const TwoPhaseEos& eos) {
  if (p == pre.p) return 0.0;
  const double floor = cavitation_floor(pre, eos);
  const double reach = pre.p - floor;
  if (pre.p - p < 1e-3 * reach) {
    // Analytic within reach of p0: one Kronrod panel is exact to round-off.
    auto f = [&](double q) { return inverse_impedance(q, pre, eos); };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, p, pre.p, 0,
                                                                         kQuadratureTolerance);
  }
  // Double-exponential rule in the distance above the floor, which also copes
  // with the integrable singularity when p reaches the floor.  Adaptive
  // Kronrod stalls there: its error estimate never meets the tolerance.
  thread_local boost::math::quadrature::tanh_sinh<double> ts(10);
  auto g = [&](double d) { return isentrope_above_floor(d, floor, pre, eos).inv_impedance; };
  return ts.integrate(g, std::max(p - floor, 0.0), reach, kQuadratureTolerance);
}

// Edge of the void at pressure `floor`, reached with velocity u.  A side whose
// own floor is lower keeps a finite density there.
PrimitiveState void_edge(const PrimitiveState& pre, const TwoPhaseEos& eos, double floor,
                         double u) {
  if (cavitation_floor(pre, eos) < floor) {
    PrimitiveState w = isentrope_state(floor, pre, eos);
    w.u = u;
    return w;
  }
  PrimitiveState w = pre;
  w.p = floor;
  w.rho = 0.0;
  w.u = u;
  w.alpha1 = std::clamp(isentrope_above_floor(1e-30 * (pre.p - floor), floor, pre, eos).alpha1,
                        0.0, 1.0);
  return w;
}

// sum_k alpha_k tau0 * 2 / D_k, so that tau0 - tau = (p - p0) * S.
struct ShockCompliance {
  double s;
  double ds;  // dS/dp
};

ShockCompliance shock_compliance(double p, const PrimitiveState& pre, const TwoPhaseEos& eos) {
  const double tau0 = 1.0 / pre.rho;
  ShockCompliance out{0.0, 0.0};
  for (int k = 1; k <= 2; ++k) {
    if (!present(pre, k)) continue;
    const auto& gas = eos.phase(k);
    const double d = (gas.gamma + 1.0) * p + (gas.gamma - 1.0) * pre.p + 2.0 * gas.gamma * gas.pi;
    const double w = pre.alpha(k) * tau0;
    out.s += 2.0 * w / d;
    out.ds -= 2.0 * w * (gas.gamma + 1.0) / (d * d);
  }
  return out;
}

PrimitiveState shocked_state(double p, const PrimitiveState& pre, const TwoPhaseEos& eos,
                             double s) {
  const double tau0 = 1.0 / pre.rho;
  const double tau = tau0 - (p - pre.p) * s;
  double part1 = pre.alpha1 * tau0;
  if (present(pre, 1)) {
    const auto& gas = eos.phase1;
    const double n = (gas.gamma + 1.0) * pre.p + (gas.gamma - 1.0) * p + 2.0 * gas.gamma * gas.pi;
    const double d = (gas.gamma + 1.0) * p + (gas.gamma - 1.0) * pre.p + 2.0 * gas.gamma * gas.pi;
    part1 *= n / d;
  }
  PrimitiveState w = pre;
  w.p = p;
  w.rho = 1.0 / tau;
  w.alpha1 = std::clamp(part1 / tau, 0.0, 1.0);
  return w;
}

// Velocity jump of a left-facing wave: u_behind = pre.u - f(p).
struct WaveJump {
  double f;
  double df;
};

WaveJump wave_jump(double p, const PrimitiveState& pre, const TwoPhaseEos& eos) {
  if (p >= pre.p) {
    const auto c = shock_compliance(p, pre, eos);
    const double root = std::sqrt(c.s);
    const double dp = p - pre.p;
    return {dp * root, root + 0.5 * dp * c.ds / root};
  }
  return {-rarefaction_integral(p, pre, eos), inverse_impedance(p, pre, eos)};
}

double sound_speed_on(const PrimitiveState& w, const TwoPhaseEos& eos) {
  return std::sqrt(mixture_impedance_squared(w.p, w.alpha1, eos) / w.rho);
}

// Left-facing wave description in the normalised frame.
struct LeftWave {
  WaveKind kind;
  PrimitiveState star;
  double head;
  double tail;
  double sigma;
  double m;
};

LeftWave left_wave(double p_star, double u_star, const PrimitiveState& pre,
                   const TwoPhaseEos& eos) {
  LeftWave lw{};
  if (p_star >= pre.p) {
    const auto br = shock_branch(p_star, pre, eos, Side::Left);
    lw.kind = WaveKind::Shock;
    lw.star = br.behind;
    lw.sigma = br.sigma;
    lw.head = lw.tail = br.sigma;
    lw.m = br.mass_flux;
  } else {
    lw.kind = WaveKind::Rarefaction;
    lw.star = isentrope_state(p_star, pre, eos);
    lw.head = pre.u - sound_speed_on(pre, eos);
    lw.sigma = std::numeric_limits<double>::quiet_NaN();
    lw.m = 0.0;
  }
  lw.star.u = u_star;
  if (lw.kind == WaveKind::Rarefaction) lw.tail = u_star - sound_speed_on(lw.star, eos);
  return lw;
}

// State at similarity coordinate xi < u_star for a left-facing wave.
PrimitiveState sample_left(const PrimitiveState& pre, const PrimitiveState& star, WaveKind kind,
                           double head, double tail, double xi, const TwoPhaseEos& eos) {
  if (kind == WaveKind::Shock) return xi < head ? pre : star;
  if (xi <= head) return pre;
  if (xi >= tail) return star;
  // Inside the fan: u(p) - c(p) = xi.
  auto lambda = [&](double p) {
    auto w = isentrope_state(p, pre, eos);
    w.u = pre.u + rarefaction_integral(p, pre, eos);
    return w.u - sound_speed_on(w, eos) - xi;
  };
  double lo = star.p, hi = pre.p;
  if (!(star.rho > 0.0)) {
    // Void edge: step just above the floor.
    lo += std::max(1e-30 * (hi - lo), 8.0 * std::numeric_limits<double>::epsilon() * std::abs(lo));
  }
  double flo = lambda(lo), fhi = lambda(hi);
  PrimitiveState w;
  if (flo * fhi > 0.0) {
    // Round-off at the fan edges.
    w = std::abs(flo) < std::abs(fhi) ? star : pre;
    return w;
  }
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(lambda, lo, hi, flo, fhi, tol, iters);
  const double p = 0.5 * (a + b);
  w = isentrope_state(p, pre, eos);
  w.u = pre.u + rarefaction_integral(p, pre, eos);
  return w;
}

PrimitiveState average_sides(const PrimitiveState& a, const PrimitiveState& b) {
  PrimitiveState w = a;
  w.zeta1 = 0.5 * (a.zeta1 + b.zeta1);
  w.rho = 0.5 * (a.rho + b.rho);
  w.v = 0.5 * (a.v + b.v);
  w.alpha1 = 0.5 * (a.alpha1 + b.alpha1);
  return w;
}

}  // namespace

double cavitation_floor(const PrimitiveState& pre, const TwoPhaseEos& eos) {
  double floor = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 2; ++k)
    if (present(pre, k)) floor = std::max(floor, -eos.phase(k).pi);
  return floor;
}

PrimitiveState isentrope_state(double p, const PrimitiveState& pre, const TwoPhaseEos& eos) {
  const auto pt = isentrope_point(p, pre, eos);
  PrimitiveState w = pre;
  w.p = p;
  w.rho = 1.0 / pt.tau;
  w.alpha1 = std::clamp(pt.alpha1, 0.0, 1.0);
  return w;
}

ShockBranch shock_branch(double p_star, const PrimitiveState& pre, const TwoPhaseEos& eos,
                         Side side) {
  if (side == Side::Right) {
    auto br = shock_branch(p_star, mirror_x(pre), eos, Side::Left);
    br.u_behind = -br.u_behind;
    br.behind = mirror_x(br.behind);
    br.sigma = -br.sigma;
    return br;
  }
  require_feasible(pre, eos);
  if (p_star < pre.p) throw InfeasibleJumpError("shock branch requires p_star >= p_pre");
  const auto c = shock_compliance(p_star, pre, eos);
  if (!(c.s > 0.0)) throw InfeasibleJumpError("non-positive shock compliance");
  ShockBranch br;
  br.mass_flux = 1.0 / std::sqrt(c.s);
  br.u_behind = pre.u - (p_star - pre.p) * std::sqrt(c.s);
  br.behind = shocked_state(p_star, pre, eos, c.s);
  br.behind.u = br.u_behind;
  br.sigma = pre.u - br.mass_flux / pre.rho;
  return br;
}

RarefactionBranch rarefaction_branch(double p_star, const PrimitiveState& pre,
                                     const TwoPhaseEos& eos, Side side) {
  if (side == Side::Right) {
    auto br = rarefaction_branch(p_star, mirror_x(pre), eos, Side::Left);
    br.u_behind = -br.u_behind;
    br.behind = mirror_x(br.behind);
    br.head = -br.head;
    br.tail = -br.tail;
    return br;
  }
  require_feasible(pre, eos);
  if (p_star > pre.p) throw InfeasibleJumpError("rarefaction branch requires p_star <= p_pre");
  if (!(p_star > cavitation_floor(pre, eos))) {
    std::ostringstream os;
    os << "rarefaction reaches the cavitation floor (p_star=" << p_star << ")";
    throw CavitationError(os.str());
  }
  RarefactionBranch br;
  br.u_behind = pre.u + rarefaction_integral(p_star, pre, eos);
  br.behind = isentrope_state(p_star, pre, eos);
  br.behind.u = br.u_behind;
  br.head = pre.u - sound_speed_on(pre, eos);
  br.tail = br.u_behind - sound_speed_on(br.behind, eos);
  return br;
}

WaveFan solve_exact(const PrimitiveState& left, const PrimitiveState& right,
                    const TwoPhaseEos& eos) {
  require_feasible(left, eos);
  require_feasible(right, eos);
  const PrimitiveState lpre = left;
  const PrimitiveState rpre = mirror_x(right);

  WaveFan fan;
  fan.left = left;
  fan.right = right;

  const double du = right.u - left.u;
  double p_star = left.p;
  int iterations = 0;
  WaveJump jl{0.0, 0.0}, jr{0.0, 0.0};

  const bool trivial = left.p == right.p && left.u == right.u;
  if (!trivial) {
    const double cl = sound_speed_on(left, eos);
    const double cr = sound_speed_on(right, eos);
    const double zl = left.rho * cl, zr = right.rho * cr;
    const double floor = std::max(cavitation_floor(left, eos), cavitation_floor(right, eos));
    const double scale_u =
        std::max({1.0, std::abs(left.u), std::abs(right.u), cl, cr});
    const double tol = 1e-12 * scale_u;
    const double p_scale = std::max({1.0, std::abs(left.p), std::abs(right.p), std::abs(floor)});

    double guess = (zr * left.p + zl * right.p - zl * zr * du) / (zl + zr);
    if (!(guess > floor)) guess = floor + 0.5 * (std::min(left.p, right.p) - floor);
    p_star = guess;

    double lo = floor, hi = std::numeric_limits<double>::infinity();
    const double p_min = std::min(left.p, right.p);
    bool converged = false, floor_checked = false;
    for (iterations = 1; iterations <= kMaxIterations; ++iterations) {
      jl = wave_jump(p_star, lpre, eos);
      jr = wave_jump(p_star, rpre, eos);
      const double g = (jl.f + jr.f) + du;
      if (std::abs(g) <= tol) {
        converged = true;
        break;
      }
      if (g < 0.0) {
        lo = p_star;
      } else {
        hi = p_star;
        if (!floor_checked && lo == floor && p_star - floor < 1e-2 * (p_min - floor)) {
          floor_checked = true;
          const double g_floor = du - rarefaction_integral(floor, lpre, eos) -
                                 rarefaction_integral(floor, rpre, eos);
          if (g_floor >= 0.0) {
            fan.vacuum = true;
            break;
          }
        }
      }
      if (std::isfinite(hi) && hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * p_scale) {
        if (lo == floor) {
          // Marginal void: g(floor) is zero to quadrature accuracy.
          fan.vacuum = true;
          break;
        }
        converged = true;
        break;
      }
      double next = p_star - g / (jl.df + jr.df);
      if (!(next > lo && next < hi)) {
        next = std::isfinite(hi) ? 0.5 * (lo + hi) : std::max(2.0 * p_star, p_star + p_scale);
      }
      p_star = next;
    }
    if (fan.vacuum) {
      fan.p_star = floor;
      fan.iterations = iterations;
      const double ul = left.u + rarefaction_integral(floor, lpre, eos);
      const double ur = right.u - rarefaction_integral(floor, rpre, eos);
      fan.u_star = 0.5 * (ul + ur);
      fan.left_wave = fan.right_wave = WaveKind::Rarefaction;
      fan.left_star = void_edge(lpre, eos, floor, ul);
      fan.right_star = mirror_x(void_edge(rpre, eos, floor, -ur));
      fan.left_head = left.u - cl;
      fan.right_head = right.u + cr;
      fan.left_tail = ul;
      fan.right_tail = ur;
      fan.sigma_left = fan.sigma_right = std::numeric_limits<double>::quiet_NaN();
      return fan;
    }
    if (!converged) {
      throw SolverFailureError("exact Riemann solver did not converge", lo, hi);
    }
  } else {
    jl = {0.0, 0.0};
    jr = {0.0, 0.0};
  }

  fan.p_star = p_star;
  fan.u_star = 0.5 * (left.u + right.u) + 0.5 * (jr.f - jl.f);
  fan.iterations = iterations;

  const auto lw = left_wave(p_star, fan.u_star, lpre, eos);
  const auto rw = left_wave(p_star, -fan.u_star, rpre, eos);
  fan.left_wave = lw.kind;
  fan.left_star = lw.star;
  fan.left_head = lw.head;
  fan.left_tail = lw.tail;
  fan.sigma_left = lw.sigma;
  fan.m_left = lw.m;
  fan.right_wave = rw.kind;
  fan.right_star = mirror_x(rw.star);
  fan.right_head = -rw.head;
  fan.right_tail = -rw.tail;
  fan.sigma_right = -rw.sigma;
  fan.m_right = rw.m;
  return fan;
}

PrimitiveState sample(const WaveFan& fan, double xi, const TwoPhaseEos& eos) {
  if (fan.vacuum && xi > fan.left_tail && xi < fan.right_tail) {
    PrimitiveState w = xi < fan.u_star   ? fan.left_star
                       : xi > fan.u_star ? fan.right_star
                                         : average_sides(fan.left_star, fan.right_star);
    w.rho = 0.0;
    w.u = xi;
    return w;
  }
  if (xi < fan.u_star) {
    return sample_left(fan.left, fan.left_star, fan.left_wave, fan.left_head, fan.left_tail, xi,
                       eos);
  }
  if (xi > fan.u_star) {
    return mirror_x(sample_left(mirror_x(fan.right), mirror_x(fan.right_star), fan.right_wave,
                                -fan.right_head, -fan.right_tail, -xi, eos));
  }
  return average_sides(fan.left_star, fan.right_star);
}

}  // namespace kapila
