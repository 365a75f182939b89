#include "gsls/sls.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>

#include "gsls/errors.hpp"

namespace gsls {

Residual residual_spectral(const GraphSymmetricSystem& gss,
                           const SpectralResponse& spectral) {
  const int n_modes = gss.n_modes();
  const int n = static_cast<int>(spectral.lx.cols());
  if (spectral.lx.rows() != n_modes || spectral.lu.rows() != n_modes)
    throw InvalidArg("spectral response size mismatch");
  Residual res;
  res.delta.resize(n_modes, n + 1);
  for (int i = 0; i < n_modes; ++i) {
    const double a = gss.lam_a[i], b = gss.lam_b[i];
    res.delta(i, 0) = spectral.lx(i, 0) - 1.0;
    for (int t = 1; t < n; ++t) {
      res.delta(i, t) = spectral.lx(i, t) - a * spectral.lx(i, t - 1) -
                        b * spectral.lu(i, t - 1);
    }
    res.delta(i, n) =
        -a * spectral.lx(i, n - 1) - b * spectral.lu(i, n - 1);
  }
  return res;
}

Residual residual(const GraphSymmetricSystem& gss,
                  const FilterResponse& response) {
  return residual_spectral(gss, to_spectral(gss.gmd, response));
}

double residual_dense_check(const GraphSymmetricSystem& gss,
                            const FilterResponse& response,
                            const Residual& res) {
  const int n_modes = gss.n_modes();
  const int n = response.fir_len;
  // Dense lag slices of Phi_x, Phi_u.
  std::vector<Eigen::MatrixXd> px(n), pu(n);
  for (int t = 0; t < n; ++t) {
    HopTapVector hx{response.phi_x.col(t)}, hu{response.phi_u.col(t)};
    px[t] = eval_graph_filter(gss.gmd, hx);
    pu[t] = eval_graph_filter(gss.gmd, hu);
  }
  const auto dense_delta = residual_dense_lags(gss.gmd, res);
  // Lag-by-lag: [ (zI - A) Phi_x - B Phi_u ](z) = I + Delta(z).
  double max_err = 0.0;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n_modes, n_modes);
  for (int t = 0; t <= n; ++t) {
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n_modes, n_modes);
    if (t < n) lhs += px[t];                          // z * Phi_x term
    if (t >= 1) lhs -= gss.a * px[t - 1] + gss.b * pu[t - 1];
    Eigen::MatrixXd rhs = dense_delta[t];
    if (t == 0) rhs += eye;
    max_err = std::max(max_err, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return max_err;
}

std::vector<Eigen::MatrixXd> residual_dense_lags(const Gmd& gmd,
                                                 const Residual& res) {
  std::vector<Eigen::MatrixXd> lags;
  lags.reserve(res.fir_len() + 1);
  for (int t = 0; t <= res.fir_len(); ++t) {
    lags.push_back(gmd.eigvecs * res.delta.col(t).asDiagonal() *
                   gmd.eigvecs.transpose());
  }
  return lags;
}

HinfBound hinf_norm(const Residual& res, int grid_size) {
  if (grid_size < 64) throw InvalidArg("grid_size must be >= 64");
  const int n_modes = res.n_modes();
  const int n = res.fir_len();
  HinfBound bound;
  double max_deriv = 0.0;
  for (int i = 0; i < n_modes; ++i) {
    double deriv = 0.0;
    for (int t = 1; t <= n; ++t) deriv += t * std::abs(res.delta(i, t));
    max_deriv = std::max(max_deriv, deriv);
    // |Delta_i| is symmetric about omega = pi for real coefficients.
    for (int m = 0; m <= grid_size / 2; ++m) {
      const double w = 2.0 * std::numbers::pi * m / grid_size;
      const std::complex<double> zinv = std::polar(1.0, -w);
      std::complex<double> val = res.delta(i, n);
      for (int t = n - 1; t >= 0; --t) val = val * zinv + res.delta(i, t);
      bound.lower = std::max(bound.lower, std::abs(val));
    }
  }
  bound.upper = bound.lower + std::numbers::pi / grid_size * max_deriv;
  return bound;
}

HinfBound hinf_norm_certified(const Residual& res, int grid_size,
                              double gap_target, int max_grid) {
  HinfBound bound = hinf_norm(res, grid_size);
  while (bound.upper - bound.lower > gap_target && grid_size < max_grid) {
    grid_size *= 2;
    bound = hinf_norm(res, grid_size);
  }
  return bound;
}

double l1_induced_norm(const std::vector<Eigen::MatrixXd>& dense_lags) {
  if (dense_lags.empty()) return 0.0;
  Eigen::VectorXd col_sums =
      Eigen::VectorXd::Zero(dense_lags.front().cols());
  for (const auto& lag : dense_lags)
    col_sums += lag.cwiseAbs().colwise().sum().transpose();
  return col_sums.maxCoeff();
}

StabilityResult is_stabilizing(const Residual& res, int grid_size) {
  const int n_modes = res.n_modes();
  const int n = res.fir_len();
  StabilityResult out;
  out.exact = true;
  double max_root = 0.0;
  for (int i = 0; i < n_modes; ++i) {
    const double lead = 1.0 + res.delta(i, 0);
    if (lead == 0.0)
      throw DegenerateResponse("leading coefficient of Phi_x is singular");
    // Roots of (1 + d0) z^n + d1 z^{n-1} + ... + dn, dropping trailing zeros.
    int deg = n;
    while (deg > 0 && res.delta(i, deg) == 0.0) --deg;
    if (deg == 0) continue;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int t = 1; t <= deg; ++t)
      companion(0, t - 1) = -res.delta(i, t) / lead;
    for (int t = 1; t < deg; ++t) companion(t, t - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
    max_root = std::max(max_root, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  out.margin = 1.0 - max_root;
  out.exact = max_root < 1.0;
  out.certified = hinf_norm(res, grid_size).upper < 1.0;
  if (out.certified && !out.exact)
    throw std::logic_error(
        "small-gain certificate held but a mode root left the unit disk");
  return out;
}

double achieved_cost(const GraphSymmetricSystem& gss,
                     const FilterResponse& response, const Residual& res,
                     int eval_len) {
  const auto stability = is_stabilizing(res);
  if (!stability.exact)
    throw Unstable("achieved maps are unstable; cost is infinite");
  const double margin = std::max(stability.margin, 1e-12);
  const auto spectral = to_spectral(gss.gmd, response);
  const int n_modes = gss.n_modes();
  const int n = response.fir_len;
  const int cap = std::max(
      4 * n, static_cast<int>(std::min(10.0 * n / margin, 4.0e6)));
  if (eval_len <= 0) eval_len = std::min(cap, std::max(8 * n, 256));

  const double rho = 1.0 - margin;
  double cost = 0.0;
  for (int i = 0; i < n_modes; ++i) {
    const double lead = 1.0 + res.delta(i, 0);
    // Long division of Lambda_i(z) by 1 + Delta_i(z) for both channels.
    auto expand_energy = [&](const Eigen::VectorXd& num, double weight) {
      std::vector<double> out;
      out.reserve(eval_len);
      double energy = 0.0;
      int len = eval_len;
      for (int t = 1; t <= len; ++t) {
        double val = (t <= n) ? num[t - 1] : 0.0;
        const int smax = std::min(n, t - 1);
        for (int s = 1; s <= smax; ++s)
          val -= res.delta(i, s) * out[t - 1 - s];
        val /= lead;
        out.push_back(val);
        energy += val * val;
        // Grow until the geometric tail estimate is negligible.
        if (t == len && len < cap) {
          double recent = 0.0;
          for (int s = std::max(0, t - n); s < t; ++s)
            recent = std::max(recent, std::abs(out[s]));
          const double tail =
              recent * recent * rho * rho / (1.0 - rho * rho) * n;
          if (tail > 1e-7 * std::max(energy, 1e-30))
            len = std::min(cap, len * 2);
        }
      }
      cost += weight * energy;
    };
    expand_energy(spectral.lx.row(i), gss.lam_q[i]);
    expand_energy(spectral.lu.row(i), gss.lam_r[i]);
  }
  return cost;
}

}  // namespace gsls
