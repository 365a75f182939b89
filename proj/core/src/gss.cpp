#include "gsls/gss.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "gsls/errors.hpp"

namespace gsls {

GraphSymmetricSystem GraphSymmetricSystem::from_spectra(
    Gmd gmd, Eigen::VectorXd lam_a, Eigen::VectorXd lam_b,
    Eigen::VectorXd lam_q, Eigen::VectorXd lam_r) {
  const int n = gmd.n_nodes;
  if (lam_a.size() != n || lam_b.size() != n || lam_q.size() != n ||
      lam_r.size() != n)
    throw InvalidArg("spectrum size mismatch");
  if ((lam_q.array() < 0).any()) throw InvalidArg("Q must be PSD");
  if ((lam_r.array() <= 0).any()) throw InvalidArg("R must be PD");
  for (int i = 0; i < n; ++i) {
    if (std::abs(lam_a[i]) >= 1.0 && lam_b[i] == 0.0)
      throw Unstabilizable("mode is unstable and uncontrollable", i);
  }
  GraphSymmetricSystem gss;
  const Eigen::MatrixXd& v = gmd.eigvecs;
  gss.a = v * lam_a.asDiagonal() * v.transpose();
  gss.b = v * lam_b.asDiagonal() * v.transpose();
  gss.q = v * lam_q.asDiagonal() * v.transpose();
  gss.r = v * lam_r.asDiagonal() * v.transpose();
  gss.gmd = std::move(gmd);
  gss.lam_a = std::move(lam_a);
  gss.lam_b = std::move(lam_b);
  gss.lam_q = std::move(lam_q);
  gss.lam_r = std::move(lam_r);
  return gss;
}

GraphSymmetricSystem generate_random_gss(const Gmd& gmd, std::uint64_t seed) {
  const int n = gmd.n_nodes;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd lam_a(n), lam_b(n);
  for (int i = 0; i < n; ++i) lam_a[i] = normal(rng);
  for (int i = 0; i < n; ++i) lam_b[i] = normal(rng);
  // Stabilizability guard: an unstable mode with nearly no control authority
  // sends the Riccati solution to infinity.
  for (int i = 0; i < n; ++i) {
    while (std::abs(lam_a[i]) >= 1.0 && std::abs(lam_b[i]) < 1e-3) {
      lam_b[i] = normal(rng);
    }
  }
  return GraphSymmetricSystem::from_spectra(gmd, lam_a, lam_b,
                                            Eigen::VectorXd::Ones(n),
                                            Eigen::VectorXd::Ones(n));
}

SymmetryCheck verify_graph_symmetric(const Eigen::MatrixXd& m, const Gmd& gmd,
                                     double tol) {
  if (m.rows() != gmd.n_nodes || m.cols() != gmd.n_nodes)
    throw InvalidArg("matrix size does not match GMD");
  const Eigen::MatrixXd d = gmd.eigvecs.transpose() * m * gmd.eigvecs;
  const double total = d.squaredNorm();
  SymmetryCheck check;
  if (total == 0.0) {
    check.ok = true;
    check.off_diagonal_ratio = 0.0;
    return check;
  }
  const double diag = d.diagonal().squaredNorm();
  check.off_diagonal_ratio = (total - diag) / total;
  check.ok = check.off_diagonal_ratio < tol;
  return check;
}

QuadraticInvarianceReport check_quadratic_invariance(
    const GraphSymmetricSystem& gss, std::uint64_t seed, int n_samples,
    int fir_len, double tol) {
  const int n = gss.n_modes();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> hops_dist(1, n);

  QuadraticInvarianceReport report;
  report.n_samples = n_samples;
  report.all_pass = true;
  for (int i = 0; i < n; ++i) {
    if (std::abs(gss.lam_a[i]) >= 1.0) ++report.n_unstable_modes_formal;
  }

  // Plant Markov parameters G[t] = A^{t-1} B for t = 1..fir_len, computed on
  // the dense route. Unstable modes are expanded formally.
  std::vector<Eigen::MatrixXd> g_lags(fir_len + 1,
                                      Eigen::MatrixXd::Zero(n, n));
  Eigen::MatrixXd a_pow = Eigen::MatrixXd::Identity(n, n);
  for (int t = 1; t <= fir_len; ++t) {
    g_lags[t] = a_pow * gss.b;
    a_pow = a_pow * gss.a;
  }

  for (int sample = 0; sample < n_samples; ++sample) {
    const int f = hops_dist(rng);
    const int k_len = 3;  // controller FIR lags 0..k_len-1
    // K[l] = sum_k phi_k[l] S^k with random taps.
    std::vector<Eigen::MatrixXd> k_lags;
    for (int l = 0; l < k_len; ++l) {
      HopTapVector taps;
      taps.coeffs.resize(f);
      for (int k = 0; k < f; ++k) taps.coeffs[k] = normal(rng);
      k_lags.push_back(eval_graph_filter(gss.gmd, taps));
    }

    auto conv = [&](const std::vector<Eigen::MatrixXd>& x,
                    const std::vector<Eigen::MatrixXd>& y) {
      std::vector<Eigen::MatrixXd> out(fir_len + 1,
                                       Eigen::MatrixXd::Zero(n, n));
      for (std::size_t lx = 0; lx < x.size(); ++lx) {
        for (std::size_t ly = 0; ly < y.size(); ++ly) {
          if (lx + ly <= static_cast<std::size_t>(fir_len))
            out[lx + ly] += x[lx] * y[ly];
        }
      }
      return out;
    };

    const auto kg = conv(k_lags, g_lags);
    const auto kgk = conv(kg, k_lags);
    for (const auto& slice : kgk) {
      const auto check = verify_graph_symmetric(slice, gss.gmd, tol);
      report.max_off_diagonal_ratio =
          std::max(report.max_off_diagonal_ratio, check.off_diagonal_ratio);
      if (!check.ok) report.all_pass = false;
    }
  }
  return report;
}

}  // namespace gsls
