#include "gsls/lqr.hpp"

#include <cmath>
#include <sstream>

#include "gsls/errors.hpp"

namespace gsls {

FilterResponse FilterResponse::zero(int f_hops, int fir_len,
                                    const std::string& gmd_hash) {
  FilterResponse r;
  r.f_hops = f_hops;
  r.fir_len = fir_len;
  r.phi_x = Eigen::MatrixXd::Zero(f_hops, fir_len);
  r.phi_u = Eigen::MatrixXd::Zero(f_hops, fir_len);
  r.gmd_hash = gmd_hash;
  return r;
}

SpectralResponse to_spectral(const Gmd& gmd, const FilterResponse& response) {
  const int n = gmd.n_nodes;
  if (response.f_hops > n) throw InvalidArg("response has more hops than N");
  Eigen::MatrixXd vand(n, response.f_hops);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k < response.f_hops; ++k) {
      vand(i, k) = p;
      p *= gmd.eigvals[i];
    }
  }
  SpectralResponse spectral;
  spectral.lx = vand * response.phi_x;
  spectral.lu = vand * response.phi_u;
  return spectral;
}

ScalarDare solve_dare_scalar(double a, double b, double q, double r) {
  if (q < 0 || r <= 0) throw InvalidArg("need q >= 0, r > 0");
  if (b == 0.0) {
    if (std::abs(a) >= 1.0)
      throw Unstabilizable("b = 0 with |a| >= 1 is unstabilizable");
    return {q / (1.0 - a * a), 0.0};
  }
  // p solves b^2 p^2 + (r - q b^2 - a^2 r) p - q r = 0; the positive root is
  // the stabilizing solution.
  const double b2 = b * b;
  const double beta = r - q * b2 - a * a * r;
  const double disc = beta * beta + 4.0 * b2 * q * r;
  double p = (-beta + std::sqrt(disc)) / (2.0 * b2);
  // One fixed-point sweep to wash out cancellation in the quadratic formula.
  p = a * a * p - a * a * p * p * b2 / (r + p * b2) + q;
  const double kappa = -b * p * a / (r + b2 * p);
  return {p, kappa};
}

CentralizedSolution centralized_solution(const GraphSymmetricSystem& gss) {
  const int n = gss.n_modes();
  CentralizedSolution sol;
  sol.kappa_per_mode.resize(n);
  sol.p_per_mode.resize(n);
  for (int i = 0; i < n; ++i) {
    try {
      const auto dare = solve_dare_scalar(gss.lam_a[i], gss.lam_b[i],
                                          gss.lam_q[i], gss.lam_r[i]);
      sol.p_per_mode[i] = dare.p;
      sol.kappa_per_mode[i] = dare.kappa;
    } catch (const Unstabilizable&) {
      std::ostringstream os;
      os << "mode " << i << " is unstabilizable";
      throw Unstabilizable(os.str(), i);
    }
  }
  const Eigen::MatrixXd& v = gss.gmd.eigvecs;
  sol.k_dense = v * sol.kappa_per_mode.asDiagonal() * v.transpose();
  sol.j_opt = sol.p_per_mode.sum();
  return sol;
}

OptimalResponses optimal_responses(const GraphSymmetricSystem& gss,
                                   int fir_len) {
  if (fir_len < 1) throw InvalidArg("fir_len must be >= 1");
  const int n = gss.n_modes();
  const auto central = centralized_solution(gss);

  Eigen::VectorXd closed(n);
  for (int i = 0; i < n; ++i)
    closed[i] = gss.lam_a[i] + gss.lam_b[i] * central.kappa_per_mode[i];
  const double rho = closed.cwiseAbs().maxCoeff();
  if (rho >= 1.0) throw UnstableClosedLoop("closed-loop spectral radius >= 1");

  // Per-mode Markov parameters, converted lag by lag to hop taps.
  OptimalResponses out;
  out.closed_loop_radius = rho;
  out.tail_bound = std::pow(rho, fir_len) / (1.0 - rho);
  out.response.f_hops = n;
  out.response.fir_len = fir_len;
  out.response.phi_x.resize(n, fir_len);
  out.response.phi_u.resize(n, fir_len);
  out.response.gmd_hash = gss.gmd.hash();

  Eigen::VectorXd lx = Eigen::VectorXd::Ones(n);
  for (int t = 0; t < fir_len; ++t) {
    const Eigen::VectorXd lu = central.kappa_per_mode.cwiseProduct(lx);
    out.response.phi_x.col(t) = spectral_to_taps(gss.gmd, lx).coeffs;
    out.response.phi_u.col(t) = spectral_to_taps(gss.gmd, lu).coeffs;
    lx = closed.cwiseProduct(lx);
  }
  return out;
}

double h2_cost_spectral(const GraphSymmetricSystem& gss,
                        const SpectralResponse& spectral) {
  double cost = 0.0;
  for (int i = 0; i < gss.n_modes(); ++i) {
    cost += gss.lam_q[i] * spectral.lx.row(i).squaredNorm() +
            gss.lam_r[i] * spectral.lu.row(i).squaredNorm();
  }
  return cost;
}

double h2_cost(const GraphSymmetricSystem& gss,
               const FilterResponse& response) {
  return h2_cost_spectral(gss, to_spectral(gss.gmd, response));
}

}  // namespace gsls
