#include "barrier_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace gsls::detail {

namespace {

constexpr double kBarrierMu = 20.0;
constexpr double kNewtonTol = 1e-9;
constexpr double kRidge = 1e-11;

double barrier_value(const Eigen::VectorXd& slack) {
  double phi = 0.0;
  for (int j = 0; j < slack.size(); ++j) {
    if (slack[j] <= 0.0) return std::numeric_limits<double>::infinity();
    phi -= std::log(slack[j]);
  }
  return phi;
}

}  // namespace

BarrierResult minimize_with_barrier(const QuadraticObjective& objective,
                                    const ConstraintSet& constraints,
                                    const Eigen::VectorXd& x0, double tol,
                                    int max_newton_iters) {
  const int d = static_cast<int>(x0.size());
  const int m = constraints.count();
  BarrierResult result;
  result.x = x0;

  Eigen::VectorXd g(m), slack(m);
  constraints.eval(result.x, g);
  slack = -g;
  if (slack.minCoeff() <= 0.0) {
    result.converged = false;
    result.objective = objective.value(result.x);
    result.duality_gap = std::numeric_limits<double>::infinity();
    return result;
  }

  double t = std::max(1.0, m / std::max(1.0, std::abs(objective.value(x0))));
  Eigen::VectorXd grad(d), step(d), x_trial(d), g_trial(m);
  Eigen::MatrixXd hess(d, d);

  while (result.newton_iters < max_newton_iters) {
    // Newton inner loop for the centering problem at this t. The per-stage
    // cap keeps late stages from chasing rounding noise in t * f(x); the
    // outer duality-gap test remains the convergence criterion.
    constexpr int kMaxItersPerStage = 60;
    const int stage_budget =
        std::min(max_newton_iters, result.newton_iters + kMaxItersPerStage);
    for (; result.newton_iters < stage_budget; ++result.newton_iters) {
      grad = t * (2.0 * (objective.h * result.x) + objective.g);
      hess = 2.0 * t * objective.h;
      constraints.accumulate_barrier(result.x, slack, grad, nullptr, hess);
      hess.diagonal().array() += kRidge * (1.0 + hess.diagonal().maxCoeff());

      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      step = -ldlt.solve(grad);
      const double decrement2 = -grad.dot(step);
      if (!(decrement2 > 0)) break;
      if (decrement2 / 2.0 < kNewtonTol) break;

      // Backtracking line search on t*f0 + barrier.
      const double f_cur = t * objective.value(result.x) + barrier_value(slack);
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        x_trial = result.x + alpha * step;
        constraints.eval(x_trial, g_trial);
        if (g_trial.maxCoeff() < 0.0) {
          const double f_trial =
              t * objective.value(x_trial) + barrier_value(-g_trial);
          if (f_trial <= f_cur - 1e-4 * alpha * decrement2) {
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      result.x = x_trial;
      slack = -g_trial;
    }
    if (std::getenv("GSLS_DEBUG_BARRIER"))
      std::fprintf(stderr, "stage t=%.3e iters=%d obj=%.6e\n", t,
                   result.newton_iters, objective.value(result.x));
    result.duality_gap = m / t;
    if (result.duality_gap <
        tol * (1.0 + std::abs(objective.value(result.x)))) {
      result.converged = true;
      break;
    }
    t *= kBarrierMu;
  }
  result.objective = objective.value(result.x);
  return result;
}

Phase1Result phase1_feasibility(const ConstraintSet& constraints,
                                const Eigen::VectorXd& x0,
                                double target_slack, int max_newton_iters) {
  const int d = static_cast<int>(x0.size());
  const int m = constraints.count();
  Phase1Result result;
  result.x = x0;

  Eigen::VectorXd g(m);
  constraints.eval(result.x, g);
  double s = g.maxCoeff() + std::max(0.1, 0.1 * std::abs(g.maxCoeff()));

  double t = 1.0;
  Eigen::VectorXd slack(m), grad1(d), grad2(d), grad_full(d + 1),
      step(d + 1), x_trial(d), g_trial(m);
  Eigen::MatrixXd hess(d, d), hess_full(d + 1, d + 1);

  auto recompute_slack = [&](const Eigen::VectorXd& gv, double sv) {
    return (sv - gv.array()).matrix().eval();
  };
  slack = recompute_slack(g, s);

  while (result.newton_iters < max_newton_iters) {
    constexpr int kMaxItersPerStage = 60;
    const int stage_budget =
        std::min(max_newton_iters, result.newton_iters + kMaxItersPerStage);
    for (; result.newton_iters < stage_budget; ++result.newton_iters) {
      if (s < -target_slack) break;
      grad1.setZero();
      grad2.setZero();
      hess.setZero();
      constraints.accumulate_barrier(result.x, slack, grad1, &grad2, hess);
      double inv_sum = 0.0, inv2_sum = 0.0;
      for (int j = 0; j < m; ++j) {
        inv_sum += 1.0 / slack[j];
        inv2_sum += 1.0 / (slack[j] * slack[j]);
      }
      grad_full.head(d) = grad1;
      grad_full[d] = t - inv_sum;
      hess_full.topLeftCorner(d, d) = hess;
      hess_full.block(0, d, d, 1) = -grad2;
      hess_full.block(d, 0, 1, d) = -grad2.transpose();
      hess_full(d, d) = inv2_sum;
      hess_full.diagonal().array() +=
          kRidge * (1.0 + hess_full.diagonal().maxCoeff());

      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess_full);
      step = -ldlt.solve(grad_full);
      const double decrement2 = -grad_full.dot(step);
      if (!(decrement2 > 0) || decrement2 / 2.0 < kNewtonTol) break;

      const double f_cur = t * s + barrier_value(slack);
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        x_trial = result.x + alpha * step.head(d);
        const double s_trial = s + alpha * step[d];
        constraints.eval(x_trial, g_trial);
        const Eigen::VectorXd slack_trial = recompute_slack(g_trial, s_trial);
        if (slack_trial.minCoeff() > 0.0) {
          const double f_trial = t * s_trial + barrier_value(slack_trial);
          if (f_trial <= f_cur - 1e-4 * alpha * decrement2) {
            accepted = true;
            result.x = x_trial;
            s = s_trial;
            g = g_trial;
            slack = slack_trial;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
    }
    if (s < -target_slack) break;
    if (m / t < 1e-7) break;  // dual gap small enough to classify s
    t *= kBarrierMu;
  }
  result.s_upper = s;
  result.s_lower = s - m / t;
  result.found_strictly_feasible = s < 0.0;
  return result;
}

}  // namespace gsls::detail
