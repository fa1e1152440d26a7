#include "kapila/reconstruction.hpp"

#include <algorithm>
#include <cmath>

namespace kapila {

void ReconstructionConfig::validate() const {
  if (!(kappa >= 0.0 && kappa < 2.0)) throw ConfigError("kappa must lie in [0, 2)");
}

Vec6 to_w(const PrimitiveState& w) { return {w.zeta1, w.rho, w.u, w.v, w.p, w.alpha1}; }

PrimitiveState from_w(const Vec6& w) { return {w[0], w[1], w[2], w[3], w[4], w[5]}; }

double minmod3(double a, double b, double c) {
  if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
  if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
  return 0.0;
}

Vec6 compute_slopes(const Vec6& w_minus, const Vec6& w_center, const Vec6& w_plus,
                    const Vec6& face_minus, const Vec6& face_plus,
                    const ReconstructionConfig& config, double dx) {
  Vec6 s{};
  for (int k = 0; k < 6; ++k) {
    s[k] = minmod3((w_center[k] - w_minus[k]) / dx,
                   config.kappa * (face_plus[k] - face_minus[k]) / dx,
                   (w_plus[k] - w_center[k]) / dx);
  }
  return s;
}

Vec6 initial_slopes(const Vec6& w_minus, const Vec6& w_center, const Vec6& w_plus,
                    const ReconstructionConfig& config, double dx) {
  Vec6 s{};
  for (int k = 0; k < 6; ++k) {
    s[k] = minmod3((w_center[k] - w_minus[k]) / dx,
                   config.kappa * (w_plus[k] - w_minus[k]) / (2.0 * dx),
                   (w_plus[k] - w_center[k]) / dx);
  }
  return s;
}

void clamp_alpha_gradient(CellLinearData& cell, double dx, double dy) {
  const double a = cell.center_value[kAlphaW];
  const double excursion =
      0.5 * std::abs(cell.grad_x[kAlphaW]) * dx + 0.5 * std::abs(cell.grad_y[kAlphaW]) * dy;
  if (excursion <= 0.0) return;
  const double room = std::max(0.0, std::min(a, 1.0 - a));
  if (excursion <= room) return;
  const double scale = room / excursion;
  cell.grad_x[kAlphaW] *= scale;
  cell.grad_y[kAlphaW] *= scale;
}

std::vector<CellLinearData> initial_reconstruction(std::span<const Vec6> cells,
                                                   const ReconstructionConfig& config, double dx) {
  std::vector<CellLinearData> out(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out[i].center_value = cells[i];
    if (i == 0 || i + 1 == cells.size()) continue;
    out[i].grad_x = initial_slopes(cells[i - 1], cells[i], cells[i + 1], config, dx);
    clamp_alpha_gradient(out[i], dx, 0.0);
  }
  return out;
}

}  // namespace kapila
