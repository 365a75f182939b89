#pragma once

// Internal log-barrier solver for the spectral-domain truncation programs:
// a convex quadratic objective over smooth convex inequality constraints
// (frequency-grid magnitude constraints or smoothed column-sum constraints).
// Not installed; synthesis.cpp is the only client.

#include <Eigen/Dense>

namespace gsls::detail {

// A family of smooth convex constraints g_j(x) <= 0, j = 0..count-1.
class ConstraintSet {
 public:
  virtual ~ConstraintSet() = default;
  virtual int count() const = 0;
  virtual void eval(const Eigen::VectorXd& x, Eigen::VectorXd& g) const = 0;
  // Accumulates, over all constraints with positive slack s_j:
  //   grad1 += sum_j grad g_j / s_j
  //   grad2 += sum_j grad g_j / s_j^2          (only if grad2 != nullptr)
  //   hess  += sum_j [hess g_j / s_j + grad g_j grad g_j^T / s_j^2]
  virtual void accumulate_barrier(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& slack,
                                  Eigen::VectorXd& grad1,
                                  Eigen::VectorXd* grad2,
                                  Eigen::MatrixXd& hess) const = 0;
};

struct QuadraticObjective {
  // f0(x) = x^T h x + g^T x + c  (h symmetric PSD)
  Eigen::MatrixXd h;
  Eigen::VectorXd g;
  double c = 0.0;

  double value(const Eigen::VectorXd& x) const {
    return x.dot(h * x) + g.dot(x) + c;
  }
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double duality_gap = 0.0;  // m / t at exit
  int newton_iters = 0;
  bool converged = false;
};

// Minimizes f0 over {g_j(x) <= 0} starting from a strictly feasible x0.
BarrierResult minimize_with_barrier(const QuadraticObjective& objective,
                                    const ConstraintSet& constraints,
                                    const Eigen::VectorXd& x0, double tol,
                                    int max_newton_iters);

struct Phase1Result {
  Eigen::VectorXd x;
  double s_upper = 0.0;  // best achieved max-violation bound
  double s_lower = 0.0;  // certified lower bound on min max-violation
  int newton_iters = 0;
  bool found_strictly_feasible = false;
};

// Minimizes s subject to g_j(x) <= s. Stops early once s < -target_slack.
Phase1Result phase1_feasibility(const ConstraintSet& constraints,
                                const Eigen::VectorXd& x0,
                                double target_slack, int max_newton_iters);

}  // namespace gsls::detail
