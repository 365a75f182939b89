#include "gsls/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gsls/errors.hpp"

namespace gsls {

namespace {

Eigen::MatrixXd make_disturbances(int horizon, int n, std::uint64_t seed,
                                  NoiseKind noise) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(horizon, n);
  if (noise == NoiseKind::impulse) {
    w(0, 0) = 1.0;
    return w;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < horizon; ++t)
    for (int i = 0; i < n; ++i) w(t, i) = normal(rng);
  return w;
}

void check_realizable(const GraphSymmetricSystem& gss,
                      const FilterResponse& response) {
  const SpectralResponse spectral = to_spectral(gss.gmd, response);
  for (int i = 0; i < gss.n_modes(); ++i) {
    if (std::abs(spectral.lx(i, 0)) < 1e-12)
      throw DegenerateResponse(
          "Phi_x leading lag is singular; controller not realizable");
  }
}

double quad_form(const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  return v.dot(m * v);
}

}  // namespace

Trajectory simulate_closed_loop(const GraphSymmetricSystem& gss,
                                const FilterResponse& response, int horizon,
                                std::uint64_t seed, NoiseKind noise) {
  if (horizon < 1) throw InvalidArg("horizon must be >= 1");
  check_realizable(gss, response);
  const int n_nodes = gss.n_modes();
  const int n = response.fir_len;

  // Dense lag matrices of the controller filters.
  std::vector<Eigen::MatrixXd> px(n), pu(n);
  for (int t = 0; t < n; ++t) {
    px[t] = eval_graph_filter(gss.gmd, HopTapVector{response.phi_x.col(t)});
    pu[t] = eval_graph_filter(gss.gmd, HopTapVector{response.phi_u.col(t)});
  }

  Trajectory traj;
  traj.states.setZero(horizon, n_nodes);
  traj.inputs.setZero(horizon, n_nodes);
  traj.disturbances = make_disturbances(horizon, n_nodes, seed, noise);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_nodes);
  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(n_nodes);
  std::vector<Eigen::VectorXd> what_hist;  // w_hat(t), newest last

  double cost = 0.0;
  for (int t = 0; t < horizon; ++t) {
    const Eigen::VectorXd what = x - x_hat;
    what_hist.push_back(what);
    if (static_cast<int>(what_hist.size()) > n)
      what_hist.erase(what_hist.begin());

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n_nodes);
    for (int tau = 1; tau <= n; ++tau) {
      const int idx = static_cast<int>(what_hist.size()) - tau;
      if (idx < 0) break;
      u += pu[tau - 1] * what_hist[idx];
    }
    Eigen::VectorXd next_hat = Eigen::VectorXd::Zero(n_nodes);
    for (int tau = 2; tau <= n; ++tau) {
      const int idx = static_cast<int>(what_hist.size()) - (tau - 1);
      if (idx < 0) break;
      next_hat += px[tau - 1] * what_hist[idx];
    }

    traj.states.row(t) = x.transpose();
    traj.inputs.row(t) = u.transpose();
    cost += quad_form(gss.q, x) + quad_form(gss.r, u);

    x = gss.a * x + gss.b * u + traj.disturbances.row(t).transpose();
    x_hat = next_hat;
  }
  traj.empirical_cost = cost / horizon;
  return traj;
}

DistributedRun run_distributed_controller(const GraphSymmetricSystem& gss,
                                          const FilterResponse& response,
                                          int horizon, std::uint64_t seed) {
  if (horizon < 1) throw InvalidArg("horizon must be >= 1");
  check_realizable(gss, response);
  const int n_nodes = gss.n_modes();
  const int n = response.fir_len;
  const int f = response.f_hops;

  // Sorted neighbor lists fix the per-node reduction order.
  std::vector<std::vector<int>> neighbors(n_nodes);
  for (auto& [i, j] : gss.gmd.edges) {
    neighbors[i].push_back(j);
    neighbors[j].push_back(i);
  }
  for (auto& list : neighbors) std::sort(list.begin(), list.end());

  // One synchronous round: each node combines its own value and the values
  // received from its one-hop neighbors.
  const Eigen::MatrixXd& s = gss.gmd.s;
  auto shift_round = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      double acc = s(i, i) * v[i];
      for (int j : neighbors[i]) acc += s(i, j) * v[j];
      out[i] = acc;
    }
    return out;
  };

  DistributedRun run;
  run.trajectory.states.setZero(horizon, n_nodes);
  run.trajectory.inputs.setZero(horizon, n_nodes);
  run.trajectory.disturbances =
      make_disturbances(horizon, n_nodes, seed, NoiseKind::gaussian);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_nodes);
  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(n_nodes);
  // Power history: powers[t % n] holds S^k w_hat(t) for k = 0..F-1.
  std::vector<std::vector<Eigen::VectorXd>> power_hist;
  const long long messages_per_round = 2LL * gss.gmd.edges.size();

  double cost = 0.0;
  for (int t = 0; t < horizon; ++t) {
    const Eigen::VectorXd what = x - x_hat;
    std::vector<Eigen::VectorXd> powers;
    powers.reserve(f);
    powers.push_back(what);
    for (int k = 1; k < f; ++k) {
      powers.push_back(shift_round(powers.back()));
      run.message_count += messages_per_round;
    }
    power_hist.push_back(std::move(powers));
    if (static_cast<int>(power_hist.size()) > n)
      power_hist.erase(power_hist.begin());

    // Local tap combination: node i only touches its own entries.
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n_nodes);
    Eigen::VectorXd next_hat = Eigen::VectorXd::Zero(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      double ui = 0.0, xi = 0.0;
      for (int tau = 1; tau <= n; ++tau) {
        const int idx = static_cast<int>(power_hist.size()) - tau;
        if (idx < 0) break;
        for (int k = 0; k < f; ++k)
          ui += response.phi_u(k, tau - 1) * power_hist[idx][k][i];
      }
      // x_hat(t+1) uses w_hat(t - tau + 2): the lag is shifted by one.
      for (int tau = 2; tau <= n; ++tau) {
        const int idx = static_cast<int>(power_hist.size()) - (tau - 1);
        if (idx < 0) break;
        for (int k = 0; k < f; ++k)
          xi += response.phi_x(k, tau - 1) * power_hist[idx][k][i];
      }
      u[i] = ui;
      next_hat[i] = xi;
    }

    run.trajectory.states.row(t) = x.transpose();
    run.trajectory.inputs.row(t) = u.transpose();
    cost += quad_form(gss.q, x) + quad_form(gss.r, u);

    x = gss.a * x + gss.b * u + run.trajectory.disturbances.row(t).transpose();
    x_hat = next_hat;
  }
  run.trajectory.empirical_cost = cost / horizon;
  return run;
}

}  // namespace gsls
