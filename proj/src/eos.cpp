#include "kapila/eos.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kapila {

namespace {

std::string describe(const PrimitiveState& w) {
  std::ostringstream os;
  os.precision(17);
  os << "(zeta1=" << w.zeta1 << ", rho=" << w.rho << ", u=" << w.u << ", v=" << w.v
     << ", p=" << w.p << ", alpha1=" << w.alpha1 << ")";
  return os.str();
}

}  // namespace

void StiffenedGas::validate() const {
  if (!(gamma > 1.0) || !(pi >= 0.0)) {
    std::ostringstream os;
    os << "invalid stiffened gas: gamma=" << gamma << " pi=" << pi;
    throw ConfigError(os.str());
  }
}

void TwoPhaseEos::validate() const {
  phase1.validate();
  phase2.validate();
}

double PrimitiveState::phase_density(int k) const {
  return zeta(k) * rho / std::max(alpha(k), kVanishedPhase);
}

double phase_sound_speed(double p, double rho_k, const StiffenedGas& gas, int phase) {
  const double radicand = gas.gamma * (p + gas.pi) / rho_k;
  if (!(rho_k > 0.0) || !(radicand > 0.0)) {
    std::ostringstream os;
    os << "phase " << phase << ": non-positive sound speed radicand (p=" << p
       << ", rho_k=" << rho_k << ")";
    throw InvalidStateError(os.str());
  }
  return std::sqrt(radicand);
}

double mixture_impedance_squared(double p, double alpha1, const TwoPhaseEos& eos) {
  const double a2 = 1.0 - alpha1;
  if (alpha1 >= 1.0) return eos.phase1.impedance_squared(p);
  if (a2 >= 1.0) return eos.phase2.impedance_squared(p);
  double compliance = 0.0;
  if (alpha1 > kVanishedPhase) {
    const double z1 = eos.phase1.impedance_squared(p);
    if (!(z1 > 0.0)) throw InvalidStateError("phase 1: p + pi1 <= 0 in Wood speed");
    compliance += alpha1 / z1;
  }
  if (a2 > kVanishedPhase) {
    const double z2 = eos.phase2.impedance_squared(p);
    if (!(z2 > 0.0)) throw InvalidStateError("phase 2: p + pi2 <= 0 in Wood speed");
    compliance += a2 / z2;
  }
  return 1.0 / compliance;
}

double wood_sound_speed(const PrimitiveState& w, const TwoPhaseEos& eos) {
  if (!(w.rho > 0.0)) throw InvalidStateError("non-positive density " + describe(w));
  if (w.alpha1 >= 1.0) return phase_sound_speed(w.p, w.rho, eos.phase1, 1);
  if (w.alpha1 <= 0.0) return phase_sound_speed(w.p, w.rho, eos.phase2, 2);
  return std::sqrt(mixture_impedance_squared(w.p, w.alpha1, eos) / w.rho);
}

double mixture_rho_e(double p, double alpha1, const TwoPhaseEos& eos) {
  return alpha1 * eos.phase1.rho_e(p) + (1.0 - alpha1) * eos.phase2.rho_e(p);
}

PressureRelation pressure_relation(double rho_e, double alpha1, const TwoPhaseEos& eos) {
  const double g1 = eos.phase1.gamma, g2 = eos.phase2.gamma;
  const double p1 = eos.phase1.pi, p2 = eos.phase2.pi;
  const double l1 = (g1 - 1.0) * (g2 - 1.0) * rho_e - g1 * p1 * (g2 - 1.0) * alpha1 -
                    g2 * p2 * (g1 - 1.0) * (1.0 - alpha1);
  const double l2 = (g2 - g1) * alpha1 + g1 - 1.0;
  return {l1, l2};
}

double mixture_pressure(double rho_e, double alpha1, const TwoPhaseEos& eos) {
  const auto [l1, l2] = pressure_relation(rho_e, alpha1, eos);
  if (!(l2 > 0.0)) {
    std::ostringstream os;
    os << "degenerate pressure relation: L2=" << l2 << " at alpha1=" << alpha1;
    throw DegenerateEosError(os.str());
  }
  return l1 / l2;
}

double source_coefficient(double p, double alpha1, const TwoPhaseEos& eos) {
  const double z1 = eos.phase1.impedance_squared(p);
  const double z2 = eos.phase2.impedance_squared(p);
  return z2 / (alpha1 * z2 + (1.0 - alpha1) * z1);
}

ConservedState primitive_to_conserved(const PrimitiveState& w, const TwoPhaseEos& eos) {
  ConservedState u;
  u.zr = w.zeta1 * w.rho;
  u.rho = w.rho;
  u.mx = w.rho * w.u;
  u.my = w.rho * w.v;
  u.en = mixture_rho_e(w.p, w.alpha1, eos) + 0.5 * w.rho * (w.u * w.u + w.v * w.v);
  u.alpha1 = w.alpha1;
  return u;
}

PrimitiveState conserved_to_primitive(const ConservedState& u, const TwoPhaseEos& eos) {
  if (!(u.rho > 0.0) || !std::isfinite(u.rho)) {
    std::ostringstream os;
    os << "non-positive density rho=" << u.rho;
    throw InvalidStateError(os.str());
  }
  PrimitiveState w;
  w.rho = u.rho;
  w.zeta1 = u.zr / u.rho;
  w.u = u.mx / u.rho;
  w.v = u.my / u.rho;
  w.alpha1 = u.alpha1;
  const double rho_e = u.internal_energy();
  if (!std::isfinite(rho_e)) throw InvalidStateError("non-finite internal energy");
  w.p = mixture_pressure(rho_e, u.alpha1, eos);
  return w;
}

void check_state(const PrimitiveState& w, const TwoPhaseEos& eos) {
  const bool finite = std::isfinite(w.zeta1) && std::isfinite(w.rho) && std::isfinite(w.u) &&
                      std::isfinite(w.v) && std::isfinite(w.p) && std::isfinite(w.alpha1);
  if (!finite) throw InvalidStateError("non-finite state " + describe(w));
  if (!(w.rho > 0.0)) throw InvalidStateError("non-positive density " + describe(w));
  if (w.alpha1 < 0.0 || w.alpha1 > 1.0)
    throw InvalidStateError("volume fraction out of [0,1] " + describe(w));
  for (int k = 1; k <= 2; ++k) {
    if (w.alpha(k) > kVanishedPhase && !(eos.phase(k).impedance_squared(w.p) > 0.0)) {
      std::ostringstream os;
      os << "phase " << k << ": p + pi <= 0 " << describe(w);
      throw InvalidStateError(os.str());
    }
  }
}

}  // namespace kapila
