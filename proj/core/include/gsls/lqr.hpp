#pragma once

#include <Eigen/Dense>
#include <string>

#include "gsls/gss.hpp"

namespace gsls {

// A pair of graph-filter transfer matrices (Phi_x, Phi_u) stored as FIR
// taps: phi_x(k, t) is the Markov parameter of hop-k tap at lag t+1.
// Responses are strictly proper, so lag indexing starts at tau = 1.
struct FilterResponse {
  int f_hops = 0;
  int fir_len = 0;
  Eigen::MatrixXd phi_x;  // F x n
  Eigen::MatrixXd phi_u;  // F x n
  std::string gmd_hash;

  static FilterResponse zero(int f_hops, int fir_len,
                             const std::string& gmd_hash = "");
};

// Per-mode scalar FIR realization of a FilterResponse:
// lx(i, t) = sum_k phi_x(k, t) lambda_i^k.
struct SpectralResponse {
  Eigen::MatrixXd lx;  // N x n
  Eigen::MatrixXd lu;  // N x n
};

SpectralResponse to_spectral(const Gmd& gmd, const FilterResponse& response);

struct ScalarDare {
  double p = 0.0;
  double kappa = 0.0;
};

// Stabilizing solution of the scalar discrete-time algebraic Riccati
// equation via the positive root of the equivalent quadratic, refined by a
// fixed-point sweep. Requires q >= 0, r > 0 and (a, b) stabilizable.
ScalarDare solve_dare_scalar(double a, double b, double q, double r);

struct CentralizedSolution {
  Eigen::VectorXd kappa_per_mode;
  Eigen::VectorXd p_per_mode;
  Eigen::MatrixXd k_dense;
  double j_opt = 0.0;  // trace(P): squared-H2 optimal cost
};

CentralizedSolution centralized_solution(const GraphSymmetricSystem& gss);

struct OptimalResponses {
  FilterResponse response;      // F = N hop taps
  double closed_loop_radius = 0.0;
  double tail_bound = 0.0;      // rho^n / (1 - rho), FIR truncation tail
};

// FIR expansion of the optimal closed-loop maps: per mode,
// lx_i[t] = c_i^{t-1}, lu_i[t] = kappa_i c_i^{t-1} with c_i the closed-loop
// pole, converted to hop taps lag by lag.
OptimalResponses optimal_responses(const GraphSymmetricSystem& gss,
                                   int fir_len);

// Squared H2 cost sum_i sum_t (q_i lx^2 + r_i lu^2); equals the stationary
// average LQR cost under unit-covariance noise.
double h2_cost(const GraphSymmetricSystem& gss, const FilterResponse& response);
double h2_cost_spectral(const GraphSymmetricSystem& gss,
                        const SpectralResponse& spectral);

}  // namespace gsls
