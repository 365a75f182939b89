#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "gsls/lqr.hpp"

namespace gsls {

enum class NoiseKind { gaussian, impulse };

struct Trajectory {
  Eigen::MatrixXd states;        // T x N
  Eigen::MatrixXd inputs;        // T x N
  Eigen::MatrixXd disturbances;  // T x N
  double empirical_cost = 0.0;   // (1/T) sum x'Qx + u'Ru
};

// Closed-loop run of the internal-state controller realization:
//   w_hat(t) = x(t) - x_hat(t)
//   u(t)     = sum_{tau=1..n} Phi_u[tau] w_hat(t - tau + 1)
//   x_hat(t+1) = sum_{tau=2..n} Phi_x[tau] w_hat(t - tau + 2)
// Histories are zero-initialized; under exact achievability
// w_hat(t) = w(t-1).
Trajectory simulate_closed_loop(const GraphSymmetricSystem& gss,
                                const FilterResponse& response, int horizon,
                                std::uint64_t seed, NoiseKind noise);

struct DistributedRun {
  Trajectory trajectory;
  long long message_count = 0;  // one message per edge direction per round
};

// Same realization, with every graph-filter application computed by
// synchronous one-hop exchange rounds; each node only combines neighbor
// values, with a fixed per-node reduction order.
DistributedRun run_distributed_controller(const GraphSymmetricSystem& gss,
                                          const FilterResponse& response,
                                          int horizon, std::uint64_t seed);

}  // namespace gsls
