#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gsls/errors.hpp"
#include "gsls/lqr.hpp"

using namespace gsls;

namespace {

// Independent fixed-point iteration of the scalar Riccati recursion.
ScalarDare dare_iteration_oracle(double a, double b, double q, double r) {
  double p = q;
  for (int it = 0; it < 100000; ++it) {
    const double next =
        q + a * a * p - (a * b * p) * (a * b * p) / (r + b * b * p);
    if (std::abs(next - p) < 1e-13 * std::max(1.0, std::abs(next))) {
      p = next;
      break;
    }
    p = next;
  }
  ScalarDare d;
  d.p = p;
  d.kappa = -a * b * p / (r + b * b * p);
  return d;
}

GraphSymmetricSystem deadbeat_system(int n, std::uint64_t seed) {
  const Gmd gmd = generate_random_gmd(n, 2, seed);
  return GraphSymmetricSystem::from_spectra(
      gmd, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n),
      Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n));
}

}  // namespace

TEST_CASE("scalar dare closed form") {
  const ScalarDare trivial = solve_dare_scalar(0.0, 1.0, 1.0, 1.0);
  CHECK(trivial.p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trivial.kappa == doctest::Approx(0.0).epsilon(1e-12));

  // Frozen oracle from fixed-point iteration of the Riccati recursion.
  const ScalarDare half = solve_dare_scalar(0.5, 1.0, 1.0, 1.0);
  CHECK(half.p == doctest::Approx(1.1327822185).epsilon(1e-9));
  CHECK(half.kappa == doctest::Approx(-0.2655644371).epsilon(1e-9));

  // Stress case near the unstabilizability guard.
  const ScalarDare stiff = solve_dare_scalar(1.5, 0.001, 1.0, 1.0);
  CHECK(std::isfinite(stiff.p));
  CHECK(std::abs(1.5 + 0.001 * stiff.kappa) < 1.0);

  // Against the iteration oracle on a spread of parameters.
  for (double a : {-1.8, -0.9, 0.0, 0.3, 0.99, 1.2}) {
    for (double b : {0.1, 1.0, 2.5}) {
      const ScalarDare got = solve_dare_scalar(a, b, 1.0, 1.0);
      const ScalarDare want = dare_iteration_oracle(a, b, 1.0, 1.0);
      CHECK(got.p == doctest::Approx(want.p).epsilon(1e-8));
      CHECK(got.kappa == doctest::Approx(want.kappa).epsilon(1e-8));
    }
  }

  CHECK_THROWS_AS(solve_dare_scalar(1.0, 0.0, 1.0, 1.0), Unstabilizable);
  CHECK_THROWS_AS(solve_dare_scalar(0.5, 1.0, -1.0, 1.0), InvalidArg);
  CHECK_THROWS_AS(solve_dare_scalar(0.5, 1.0, 1.0, 0.0), InvalidArg);
}

TEST_CASE("centralized solution on the deadbeat system") {
  const GraphSymmetricSystem gss = deadbeat_system(6, 41);
  const CentralizedSolution sol = centralized_solution(gss);
  CHECK(sol.k_dense.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sol.j_opt == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("centralized gain is graph symmetric") {
  const Gmd gmd = generate_random_gmd(10, 3, 23);
  const GraphSymmetricSystem gss = generate_random_gss(gmd, 24);
  const CentralizedSolution sol = centralized_solution(gss);
  const SymmetryCheck chk = verify_graph_symmetric(sol.k_dense, gss.gmd);
  CHECK(chk.ok);
  CHECK(chk.off_diagonal_ratio < 1e-10);
  // Closed loop a + b kappa is a contraction mode by mode.
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(gss.lam_a[i] + gss.lam_b[i] * sol.kappa_per_mode[i]) <
          1.0);
  }
}

TEST_CASE("per-mode dare matches a dense matrix dare iteration") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Gmd gmd = generate_random_gmd(4, 2, 300 + seed);
    const GraphSymmetricSystem gss = generate_random_gss(gmd, 400 + seed);
    const CentralizedSolution sol = centralized_solution(gss);

    Eigen::MatrixXd p = gss.q;
    for (int it = 0; it < 200000; ++it) {
      const Eigen::MatrixXd apb = gss.a.transpose() * p * gss.b;
      const Eigen::MatrixXd gain =
          (gss.r + gss.b.transpose() * p * gss.b).ldlt().solve(apb.transpose());
      Eigen::MatrixXd next =
          gss.q + gss.a.transpose() * p * gss.a - apb * gain;
      // Symmetrize: asymmetric rounding noise would otherwise be amplified
      // through A' P A when A is unstable.
      next = 0.5 * (next + next.transpose()).eval();
      const double step = (next - p).cwiseAbs().maxCoeff();
      p = next;
      if (step < 1e-14 * std::max(1.0, p.cwiseAbs().maxCoeff())) break;
    }
    CHECK(sol.j_opt == doctest::Approx(p.trace()).epsilon(1e-8));
    const Eigen::VectorXd p_modes =
        (gmd.eigvecs.transpose() * p * gmd.eigvecs).diagonal();
    CHECK((p_modes - sol.p_per_mode).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("optimal responses of the deadbeat system") {
  const GraphSymmetricSystem gss = deadbeat_system(4, 43);
  const OptimalResponses opt = optimal_responses(gss, 6);
  // Phi_x = z^{-1} I: only the hop-0 tap at lag 1 is nonzero.
  CHECK(opt.response.phi_x(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::MatrixXd rest = opt.response.phi_x;
  rest(0, 0) = 0.0;
  CHECK(rest.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(opt.response.phi_u.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(opt.closed_loop_radius == doctest::Approx(0.0));
}

TEST_CASE("fir cost converges to trace(P)") {
  const Gmd gmd = generate_random_gmd(10, 3, 61);
  const GraphSymmetricSystem gss = generate_random_gss(gmd, 62);
  const CentralizedSolution sol = centralized_solution(gss);
  const OptimalResponses opt = optimal_responses(gss, 60);
  const double cost = h2_cost(gss, opt.response);
  CHECK(cost == doctest::Approx(sol.j_opt).epsilon(5e-3));
  // Longer horizons strictly shrink the gap, bounded by the tail estimate.
  const double gap20 =
      std::abs(h2_cost(gss, optimal_responses(gss, 20).response) - sol.j_opt);
  const double gap40 =
      std::abs(h2_cost(gss, optimal_responses(gss, 40).response) - sol.j_opt);
  CHECK(gap40 < gap20);
}

TEST_CASE("h2 cost basics and dense oracle") {
  const Gmd gmd = generate_random_gmd(4, 2, 71);
  const GraphSymmetricSystem gss = generate_random_gss(gmd, 72);

  const FilterResponse zero = FilterResponse::zero(2, 3, gmd.hash());
  CHECK(h2_cost(gss, zero) == 0.0);

  // Phi_x = z^{-1} I, Phi_u = 0 with Q = R = I costs exactly N.
  FilterResponse delay = FilterResponse::zero(1, 3, gmd.hash());
  delay.phi_x(0, 0) = 1.0;
  CHECK(h2_cost(gss, delay) == doctest::Approx(4.0).epsilon(1e-12));

  // Dense Frobenius oracle on a random response.
  FilterResponse rnd = FilterResponse::zero(3, 4, gmd.hash());
  rnd.phi_x.setRandom();
  rnd.phi_u.setRandom();
  double dense = 0.0;
  for (int t = 0; t < 4; ++t) {
    HopTapVector tx, tu;
    tx.coeffs = rnd.phi_x.col(t);
    tu.coeffs = rnd.phi_u.col(t);
    dense += (gss.q.llt().matrixL().transpose() * eval_graph_filter(gmd, tx))
                 .squaredNorm();
    dense += (gss.r.llt().matrixL().transpose() * eval_graph_filter(gmd, tu))
                 .squaredNorm();
  }
  CHECK(h2_cost(gss, rnd) == doctest::Approx(dense).epsilon(1e-10));

  // Spectral route agrees.
  const SpectralResponse sp = to_spectral(gmd, rnd);
  CHECK(h2_cost_spectral(gss, sp) == doctest::Approx(dense).epsilon(1e-10));
}
