#pragma once

// Slope-limited piecewise-linear reconstruction of the primitive variables
// W = (zeta1, rho, u, v, p, alpha1).  The central slope candidate uses the
// GRP-evolved interface values from the previous step.

#include <array>
#include <span>
#include <vector>

#include "kapila/eos.hpp"

namespace kapila {

using Vec6 = std::array<double, 6>;

/// Component index of alpha1 in W.
inline constexpr int kAlphaW = 5;

struct ReconstructionConfig {
  double kappa = 1.5;
  void validate() const;
};

struct CellLinearData {
  Vec6 center_value{};
  Vec6 grad_x{};
  Vec6 grad_y{};
};

Vec6 to_w(const PrimitiveState& w);
PrimitiveState from_w(const Vec6& w);

double minmod3(double a, double b, double c);

/// minmod((W_i - W_{i-1})/dx, kappa (What_{i+1/2} - What_{i-1/2})/dx,
///        (W_{i+1} - W_i)/dx), componentwise.
Vec6 compute_slopes(const Vec6& w_minus, const Vec6& w_center, const Vec6& w_plus,
                    const Vec6& face_minus, const Vec6& face_plus,
                    const ReconstructionConfig& config, double dx);

/// Bootstrap variant: the kappa-term uses the central difference.
Vec6 initial_slopes(const Vec6& w_minus, const Vec6& w_center, const Vec6& w_plus,
                    const ReconstructionConfig& config, double dx);

/// Scale the alpha1 gradient so the four cell-corner values stay in [0, 1].
void clamp_alpha_gradient(CellLinearData& cell, double dx, double dy);

/// 1D convenience: bootstrap slopes for every cell of `cells`; the two end
/// cells get zero slope.
std::vector<CellLinearData> initial_reconstruction(std::span<const Vec6> cells,
                                                   const ReconstructionConfig& config, double dx);

}  // namespace kapila
