#pragma once

// Independent reference implementations used only by the tests.  None of
// this calls into the library, so agreement is a genuine cross-check.

#include <algorithm>
#include <array>
#include <vector>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

// Classical single-phase stiffened-gas Riemann solver.  Pressure functions
// written in terms of p + pi, star pressure by bisection on the monotone
// velocity mismatch.
struct Gas {
  double gamma;
  double pi;
};

struct Side {
  double rho, u, p;
};

struct Star {
  double p, u;
};

inline double sound(const Gas& g, const Side& s) {
  return std::sqrt(g.gamma * (s.p + g.pi) / s.rho);
}

inline double wave_function(double p, const Gas& g, const Side& s) {
  const double pk = s.p + g.pi, q = p + g.pi;
  if (p > s.p) {
    const double a = 2.0 / ((g.gamma + 1.0) * s.rho);
    const double b = (g.gamma - 1.0) / (g.gamma + 1.0) * pk;
    return (p - s.p) * std::sqrt(a / (q + b));
  }
  const double c = sound(g, s);
  return 2.0 * c / (g.gamma - 1.0) *
         (std::pow(q / pk, (g.gamma - 1.0) / (2.0 * g.gamma)) - 1.0);
}

inline Star solve(const Gas& g, const Side& l, const Side& r) {
  const double du = r.u - l.u;
  auto mismatch = [&](double p) { return wave_function(p, g, l) + wave_function(p, g, r) + du; };
  double lo = -g.pi, hi = std::max(l.p, r.p) + g.pi + 1.0;
  if (mismatch(lo) > 0.0) throw std::runtime_error("oracle: vacuum");
  while (mismatch(hi) < 0.0) hi = 2.0 * hi + g.pi;
  for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (mismatch(mid) < 0.0 ? lo : hi) = mid;
  }
  const double p = 0.5 * (lo + hi);
  return {p, 0.5 * (l.u + r.u) + 0.5 * (wave_function(p, g, r) - wave_function(p, g, l))};
}

// Residuals of the normal-shock jump conditions for a single stiffened gas,
// in the frame of a shock moving with speed s.  Each entry is relative to
// the flux magnitude.
inline std::array<double, 3> jump_residuals(const Gas& g, const Side& a, const Side& b, double s) {
  auto e = [&](const Side& x) { return (x.p + g.gamma * g.pi) / ((g.gamma - 1.0) * x.rho); };
  const double wa = a.u - s, wb = b.u - s;
  const double ma = a.rho * wa, mb = b.rho * wb;
  const double fa = ma * wa + a.p, fb = mb * wb + b.p;
  const double ha = e(a) + a.p / a.rho + 0.5 * wa * wa;
  const double hb = e(b) + b.p / b.rho + 0.5 * wb * wb;
  return {std::abs(ma - mb) / std::abs(ma), std::abs(fa - fb) / std::abs(fa),
          std::abs(ha - hb) / std::abs(ha)};
}

// Volume-fraction rate of the five-equation model evaluated directly from
// the nonconservative form
//   alpha_t = -u alpha_x - v alpha_y + alpha1 (K - 1) (u_x + v_y),
//   K = rho2 c2^2 / (alpha1 rho2 c2^2 + alpha2 rho1 c1^2).
inline double alpha_rate(double alpha1, double u, double v, double alpha_x, double alpha_y,
                         double u_x, double v_y, double z1, double z2) {
  const double k = z2 / (alpha1 * z2 + (1.0 - alpha1) * z1);
  return -u * alpha_x - v * alpha_y + alpha1 * (k - 1.0) * (u_x + v_y);
}

// Velocity gained by a two-phase mixture expanding isentropically from p0 to
// the floor p = 0 (both phases with pi_k >= 0, so p + pi_k > 0 above zero).
// Each phase follows (p + pi_k) tau_k^gamma_k = const; c is the Wood speed.
// The substitution p = p0 t^m removes the endpoint singularity before a
// composite Simpson rule.
inline double expansion_capacity(double p0, double rho0, double alpha1, const Gas& g1,
                                 const Gas& g2, int panels = 40000) {
  const double tau0 = 1.0 / rho0;
  const Gas g[2] = {g1, g2};
  const double a0[2] = {alpha1, 1.0 - alpha1};
  auto inv_impedance = [&](double p) {
    double part[2], tau = 0.0;
    for (int k = 0; k < 2; ++k) {
      part[k] = a0[k] * tau0 * std::pow((p0 + g[k].pi) / (p + g[k].pi), 1.0 / g[k].gamma);
      tau += part[k];
    }
    double compliance = 0.0;
    for (int k = 0; k < 2; ++k) compliance += part[k] / tau / (g[k].gamma * (p + g[k].pi));
    return std::sqrt(tau) * std::sqrt(compliance);
  };
  constexpr double m = 50.0;
  auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double p = p0 * std::pow(t, m);
    if (!(p > 0.0)) return 0.0;
    return inv_impedance(p) * m * p0 * std::pow(t, m - 1.0);
  };
  const double h = 1.0 / panels;
  double sum = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return sum * h / 3.0;
}

// Self-similar solution at xi = x / t for the same single-gas problem.
inline Side sample(const Gas& g, const Side& l, const Side& r, double xi) {
  const Star st = solve(g, l, r);
  const bool left = xi < st.u;
  const Side& k = left ? l : r;
  const double dir = left ? -1.0 : 1.0;
  const double pk = k.p + g.pi, q = st.p + g.pi;
  const double ck = sound(g, k);
  const double gm = (g.gamma - 1.0) / (g.gamma + 1.0);
  if (st.p > k.p) {
    const double ratio = q / pk;
    const double s = k.u + dir * ck * std::sqrt((g.gamma + 1.0) / (2.0 * g.gamma) * ratio +
                                                (g.gamma - 1.0) / (2.0 * g.gamma));
    if (dir * (xi - s) > 0.0) return k;
    return {k.rho * (ratio + gm) / (gm * ratio + 1.0), st.u, st.p};
  }
  const double head = k.u + dir * ck;
  const double rho_star = k.rho * std::pow(q / pk, 1.0 / g.gamma);
  const double tail = st.u + dir * std::sqrt(g.gamma * q / rho_star);
  if (dir * (xi - head) > 0.0) return k;
  if (dir * (xi - tail) < 0.0) return {rho_star, st.u, st.p};
  // inside the fan
  const double u = 2.0 / (g.gamma + 1.0) * (-dir * ck + 0.5 * (g.gamma - 1.0) * k.u + xi);
  const double c = 2.0 / (g.gamma + 1.0) * (ck - dir * 0.5 * (g.gamma - 1.0) * (k.u - xi));
  const double rho = k.rho * std::pow(c / ck, 2.0 / (g.gamma - 1.0));
  return {rho, u, pk * std::pow(rho / k.rho, g.gamma) - g.pi};
}

// MUSCL-Hancock with minmod slopes on primitive variables and the exact
// Godunov flux, transmissive ends.  A textbook second-order single-gas
// scheme, unrelated to the generalized Riemann solver.
inline std::vector<Side> muscl_hancock(const Gas& g, std::vector<Side> w, double dx, double t_end,
                                       double cfl = 0.8) {
  const std::size_t n = w.size();
  auto minmod = [](double a, double b) { return a * b <= 0.0 ? 0.0 : (a > 0 ? std::min(a, b) : std::max(a, b)); };
  auto energy = [&](const Side& s) {
    return (s.p + g.gamma * g.pi) / (g.gamma - 1.0) + 0.5 * s.rho * s.u * s.u;
  };
  auto flux = [&](const Side& s) -> std::array<double, 3> {
    return {s.rho * s.u, s.rho * s.u * s.u + s.p, (energy(s) + s.p) * s.u};
  };
  double t = 0.0;
  while (t < t_end) {
    double smax = 0.0;
    for (const auto& s : w) smax = std::max(smax, std::abs(s.u) + sound(g, s));
    const double dt = std::min(cfl * dx / smax, t_end - t);
    std::vector<Side> ext(n + 4);
    for (std::size_t i = 0; i < n; ++i) ext[i + 2] = w[i];
    ext[0] = ext[1] = w.front();
    ext[n + 2] = ext[n + 3] = w.back();
    std::vector<Side> wl(n + 4), wr(n + 4);  // evolved face states of each cell
    for (std::size_t i = 1; i + 1 < n + 4; ++i) {
      const Side &a = ext[i - 1], &b = ext[i], &c = ext[i + 1];
      const double dr = minmod(b.rho - a.rho, c.rho - b.rho);
      const double du = minmod(b.u - a.u, c.u - b.u);
      const double dp = minmod(b.p - a.p, c.p - b.p);
      const double cs2 = g.gamma * (b.p + g.pi) / b.rho;
      const double h = 0.5 * dt / dx;
      const double rr = b.rho - h * (b.u * dr + b.rho * du);
      const double ur = b.u - h * (b.u * du + dp / b.rho);
      const double pr = b.p - h * (b.rho * cs2 * du + b.u * dp);
      wl[i] = {rr - 0.5 * dr, ur - 0.5 * du, pr - 0.5 * dp};
      wr[i] = {rr + 0.5 * dr, ur + 0.5 * du, pr + 0.5 * dp};
    }
    std::vector<std::array<double, 3>> f(n + 1);
    for (std::size_t k = 0; k <= n; ++k) f[k] = flux(sample(g, wr[k + 1], wl[k + 2], 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 3> u{w[i].rho, w[i].rho * w[i].u, energy(w[i])};
      for (int q = 0; q < 3; ++q) u[q] -= dt / dx * (f[i + 1][q] - f[i][q]);
      const double vel = u[1] / u[0];
      w[i] = {u[0], vel, (g.gamma - 1.0) * (u[2] - 0.5 * u[0] * vel * vel) - g.gamma * g.pi};
    }
    t += dt;
  }
  return w;
}

}  // namespace oracle
