#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gsls/lqr.hpp"

namespace gsls {

// Achievability mismatch Delta of an approximate response, stored as
// per-mode FIR coefficients delta(i, tau) for tau = 0..n. The dense
// transfer matrix is V diag(Delta_i(z)) V^T.
struct Residual {
  Eigen::MatrixXd delta;  // N x (n+1)

  int n_modes() const { return static_cast<int>(delta.rows()); }
  int fir_len() const { return static_cast<int>(delta.cols()) - 1; }
};

// Per-mode recursion: delta_i[0] = lx_i[1] - 1,
// delta_i[t] = lx_i[t+1] - a_i lx_i[t] - b_i lu_i[t],
// delta_i[n] = -a_i lx_i[n] - b_i lu_i[n].
Residual residual(const GraphSymmetricSystem& gss,
                  const FilterResponse& response);
Residual residual_spectral(const GraphSymmetricSystem& gss,
                           const SpectralResponse& spectral);

// Max lag-wise error of the dense achievability identity
// (zI - A) Phi_x - B Phi_u = I + Delta; a from-scratch check of the
// per-mode recursion.
double residual_dense_check(const GraphSymmetricSystem& gss,
                            const FilterResponse& response,
                            const Residual& res);

// Dense lag slices Delta[tau] = V diag(delta(., tau)) V^T.
std::vector<Eigen::MatrixXd> residual_dense_lags(const Gmd& gmd,
                                                 const Residual& res);

struct HinfBound {
  double lower = 0.0;  // max over modes and grid frequencies
  double upper = 0.0;  // lower + derivative bound on the grid gap
};

// H-infinity norm of Delta by frequency sampling: lower is the grid max of
// |Delta_i(e^{jw})|, upper adds the trigonometric-polynomial derivative
// bound (pi/M) max_i sum_t t |delta_i[t]|. Certification uses upper.
HinfBound hinf_norm(const Residual& res, int grid_size = 1024);

// Same bound, refined by doubling the grid until upper - lower <= gap_target
// (or the grid cap is reached).
HinfBound hinf_norm_certified(const Residual& res, int grid_size,
                              double gap_target, int max_grid = 1 << 21);

// l1 -> l1 induced norm of the dense lag stack: max column absolute sum
// accumulated over lags.
double l1_induced_norm(const std::vector<Eigen::MatrixXd>& dense_lags);

struct StabilityResult {
  bool certified = false;  // small-gain certificate: hinf upper < 1
  bool exact = false;      // all per-mode roots of 1 + Delta_i(z) in the disk
  double margin = 0.0;     // 1 - max root modulus
};

// Exact test via companion-matrix roots of
// (1 + delta[0]) z^n + delta[1] z^{n-1} + ... + delta[n] per mode.
StabilityResult is_stabilizing(const Residual& res, int grid_size = 1024);

// Squared H2 cost of the achieved maps Phi (I + Delta)^{-1}, evaluated per
// mode by long division with a certified geometric tail bound.
double achieved_cost(const GraphSymmetricSystem& gss,
                     const FilterResponse& response, const Residual& res,
                     int eval_len = 0);

}  // namespace gsls
