#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gsls/errors.hpp"
#include "gsls/gss.hpp"
#include "gsls/lqr.hpp"
#include "gsls/simulate.hpp"
#include "gsls/sls.hpp"
#include "gsls/synthesis.hpp"

using namespace gsls;

TEST_CASE("impulse response of the exact optimal controller") {
  const Gmd gmd = generate_random_gmd(6, 2, 101);
  const GraphSymmetricSystem gss = generate_random_gss(gmd, 102);
  // Long enough that the FIR tail is far below the comparison tolerance.
  const double rho = optimal_responses(gss, 4).closed_loop_radius;
  const int n = std::max(
      20, static_cast<int>(std::ceil(std::log(1e-13) / std::log(rho))));
  const OptimalResponses opt = optimal_responses(gss, n);
  const Trajectory traj =
      simulate_closed_loop(gss, opt.response, n + 1, 0, NoiseKind::impulse);

  // w(0) = e_0, so x(t) is the first column of the dense lag Phi_x[t].
  for (int t = 1; t <= n; ++t) {
    HopTapVector taps;
    taps.coeffs = opt.response.phi_x.col(t - 1);
    const Eigen::VectorXd expect = eval_graph_filter(gmd, taps).col(0);
    CHECK((traj.states.row(t).transpose() - expect).cwiseAbs().maxCoeff() <
          1e-9);
  }
  CHECK(traj.disturbances(0, 0) == 1.0);
  CHECK(traj.disturbances.cwiseAbs().sum() == 1.0);
}

TEST_CASE("empirical cost approaches the analytic achieved cost") {
  const Gmd gmd = generate_random_gmd(6, 2, 103);
  const GraphSymmetricSystem gss = generate_random_gss(gmd, 104);
  const OptimalResponses opt = optimal_responses(gss, 10);
  const Residual res = residual(gss, opt.response);
  const double analytic = achieved_cost(gss, opt.response, res);
  const Trajectory traj =
      simulate_closed_loop(gss, opt.response, 50000, 7, NoiseKind::gaussian);
  CHECK(traj.empirical_cost ==
        doctest::Approx(analytic).epsilon(0.03));
}

TEST_CASE("simulation is deterministic in the seed") {
  const Gmd gmd = generate_random_gmd(5, 2, 105);
  const GraphSymmetricSystem gss = generate_random_gss(gmd, 106);
  const OptimalResponses opt = optimal_responses(gss, 8);
  const Trajectory a =
      simulate_closed_loop(gss, opt.response, 200, 9, NoiseKind::gaussian);
  const Trajectory b =
      simulate_closed_loop(gss, opt.response, 200, 9, NoiseKind::gaussian);
  CHECK(a.states == b.states);
  CHECK(a.empirical_cost == b.empirical_cost);
}

TEST_CASE("degenerate responses are rejected") {
  const Gmd gmd = generate_random_gmd(4, 2, 107);
  const GraphSymmetricSystem gss = generate_random_gss(gmd, 108);
  const FilterResponse zero = FilterResponse::zero(2, 4, gmd.hash());
  CHECK_THROWS_AS(
      simulate_closed_loop(gss, zero, 10, 0, NoiseKind::gaussian),
      DegenerateResponse);
}

TEST_CASE("distributed execution matches the centralized simulation") {
  const Gmd gmd = generate_random_gmd(8, 3, 109);
  const GraphSymmetricSystem gss = generate_random_gss(gmd, 110);
  const OptimalResponses opt = optimal_responses(gss, 10);
  const int horizon = 100;
  const auto f3 = gsls::truncate(opt.response, 3).first;

  // F = 1 controllers need no exchanges at all.
  const auto f1 = gsls::truncate(opt.response, 1).first;
  const DistributedRun run1 =
      run_distributed_controller(gss, f1, horizon, 3);
  CHECK(run1.message_count == 0);
  const Trajectory central1 =
      simulate_closed_loop(gss, f1, horizon, 3, NoiseKind::gaussian);
  CHECK((run1.trajectory.states - central1.states).cwiseAbs().maxCoeff() ==
        0.0);

  // F-hop filters take F - 1 one-hop rounds of 2|E| messages per step.
  const DistributedRun run3 = run_distributed_controller(gss, f3, horizon, 3);
  const long long edges = static_cast<long long>(gmd.edges.size());
  CHECK(run3.message_count == horizon * 2LL * 2 * edges);

  // Trajectory agreement needs a stabilizing truncation, otherwise both
  // simulations diverge and the comparison is vacuous.
  FilterResponse stable = opt.response;
  for (int f = 4; f <= 8; ++f) {
    const FilterResponse candidate = gsls::truncate(opt.response, f).first;
    if (is_stabilizing(residual(gss, candidate)).exact) {
      stable = candidate;
      break;
    }
  }
  const DistributedRun run =
      run_distributed_controller(gss, stable, horizon, 3);
  const Trajectory central =
      simulate_closed_loop(gss, stable, horizon, 3, NoiseKind::gaussian);
  CHECK((run.trajectory.states - central.states).cwiseAbs().maxCoeff() <
        1e-9);
  CHECK((run.trajectory.inputs - central.inputs).cwiseAbs().maxCoeff() <
        1e-9);
}
