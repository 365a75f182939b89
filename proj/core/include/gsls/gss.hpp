#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "gsls/gmd.hpp"

namespace gsls {

// Plant and cost model whose A, B, Q, R are simultaneously diagonalized by
// the GMD eigenbasis; everything is stored as per-mode spectra with dense
// caches V diag(.) V^T.
struct GraphSymmetricSystem {
  Gmd gmd;
  Eigen::VectorXd lam_a, lam_b, lam_q, lam_r;
  Eigen::MatrixXd a, b, q, r;

  static GraphSymmetricSystem from_spectra(Gmd gmd, Eigen::VectorXd lam_a,
                                           Eigen::VectorXd lam_b,
                                           Eigen::VectorXd lam_q,
                                           Eigen::VectorXd lam_r);

  int n_modes() const { return gmd.n_nodes; }
};

// Random instance: A, B eigenvalues i.i.d. standard normal, Q = R = I.
// Unstable modes with near-zero control authority get lam_b resampled.
GraphSymmetricSystem generate_random_gss(const Gmd& gmd, std::uint64_t seed);

struct SymmetryCheck {
  bool ok = false;
  double off_diagonal_ratio = 0.0;
};

// Off-diagonal energy of V^T m V relative to its total energy; a matrix is
// graph symmetric when the ratio is below tol.
SymmetryCheck verify_graph_symmetric(const Eigen::MatrixXd& m, const Gmd& gmd,
                                     double tol = 1e-10);

struct QuadraticInvarianceReport {
  double max_off_diagonal_ratio = 0.0;
  bool all_pass = false;
  int n_unstable_modes_formal = 0;  // modes expanded formally with |a_i| >= 1
  int n_samples = 0;
};

// Samples random graph-symmetric FIR controllers K, expands the plant
// G = (zI - A)^{-1} B per mode to fir_len lags, forms K G K by scalar FIR
// convolution and verifies each lag slice is graph symmetric.
QuadraticInvarianceReport check_quadratic_invariance(
    const GraphSymmetricSystem& gss, std::uint64_t seed, int n_samples,
    int fir_len, double tol = 1e-8);

}  // namespace gsls
