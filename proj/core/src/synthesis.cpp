#include "gsls/synthesis.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "barrier_solver.hpp"
#include "gsls/errors.hpp"

namespace gsls {

namespace {

using detail::BarrierResult;
using detail::ConstraintSet;
using detail::QuadraticObjective;

Eigen::MatrixXd vandermonde_powers(const Eigen::VectorXd& eigvals, int f_hops) {
  Eigen::MatrixXd w(eigvals.size(), f_hops);
  for (int i = 0; i < eigvals.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < f_hops; ++k) {
      w(i, k) = p;
      p *= eigvals[i];
    }
  }
  return w;
}

// Variable layout: x = [vec(phi_x) | vec(phi_u)], both F x n column-major.
struct Layout {
  int f, n;
  int dim() const { return 2 * f * n; }
  Eigen::Map<const Eigen::MatrixXd> phi_x(const Eigen::VectorXd& x) const {
    return {x.data(), f, n};
  }
  Eigen::Map<const Eigen::MatrixXd> phi_u(const Eigen::VectorXd& x) const {
    return {x.data() + f * n, f, n};
  }
};

Eigen::VectorXd pack(const FilterResponse& r) {
  Eigen::VectorXd x(2 * r.f_hops * r.fir_len);
  Eigen::Map<Eigen::MatrixXd>(x.data(), r.f_hops, r.fir_len) = r.phi_x;
  Eigen::Map<Eigen::MatrixXd>(x.data() + r.f_hops * r.fir_len, r.f_hops,
                              r.fir_len) = r.phi_u;
  return x;
}

FilterResponse unpack(const Eigen::VectorXd& x, const Layout& layout,
                      const std::string& gmd_hash) {
  FilterResponse r;
  r.f_hops = layout.f;
  r.fir_len = layout.n;
  r.phi_x = layout.phi_x(x);
  r.phi_u = layout.phi_u(x);
  r.gmd_hash = gmd_hash;
  return r;
}

// Frequency-sampled magnitude constraints |Delta_i(e^{jw_m})|^2 <= cap^2.
// Delta_i is affine in the per-mode spectral variables y_i = (lx_i, lu_i).
class HinfGridConstraints final : public ConstraintSet {
 public:
  HinfGridConstraints(const GraphSymmetricSystem& gss,
                      const Eigen::MatrixXd& w, const Layout& layout,
                      int grid_size, double cap)
      : w_(w), layout_(layout), cap2_(cap * cap) {
    const int n_modes = gss.n_modes();
    const int n = layout.n;
    n_freq_ = grid_size / 2 + 1;
    for (int i = 0; i < n_modes; ++i) {
      Eigen::MatrixXd c_re(n_freq_, 2 * n), c_im(n_freq_, 2 * n);
      const double a = gss.lam_a[i], b = gss.lam_b[i];
      for (int m = 0; m < n_freq_; ++m) {
        const double omega = 2.0 * std::numbers::pi * m / grid_size;
        for (int t = 0; t < n; ++t) {
          const std::complex<double> zt = std::polar(1.0, -omega * t);
          const std::complex<double> zt1 = std::polar(1.0, -omega * (t + 1));
          const std::complex<double> cx = zt - a * zt1;
          const std::complex<double> cu = -b * zt1;
          c_re(m, t) = cx.real();
          c_im(m, t) = cx.imag();
          c_re(m, n + t) = cu.real();
          c_im(m, n + t) = cu.imag();
        }
      }
      c_re_.push_back(std::move(c_re));
      c_im_.push_back(std::move(c_im));
    }
  }

  int count() const override {
    return static_cast<int>(c_re_.size()) * n_freq_;
  }

  Eigen::VectorXd mode_vars(const Eigen::VectorXd& x, int i) const {
    const int n = layout_.n;
    Eigen::VectorXd y(2 * n);
    y.head(n) = (w_.row(i) * layout_.phi_x(x)).transpose();
    y.tail(n) = (w_.row(i) * layout_.phi_u(x)).transpose();
    return y;
  }

  void eval(const Eigen::VectorXd& x, Eigen::VectorXd& g) const override {
    const int n_modes = static_cast<int>(c_re_.size());
    g.resize(count());
    for (int i = 0; i < n_modes; ++i) {
      const Eigen::VectorXd y = mode_vars(x, i);
      const Eigen::VectorXd re =
          (c_re_[i] * y).array() - 1.0;  // real offset from the -I term
      const Eigen::VectorXd im = c_im_[i] * y;
      g.segment(i * n_freq_, n_freq_) =
          re.array().square() + im.array().square() - cap2_;
    }
  }

  void accumulate_barrier(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& slack,
                          Eigen::VectorXd& grad1, Eigen::VectorXd* grad2,
                          Eigen::MatrixXd& hess) const override {
    const int n_modes = static_cast<int>(c_re_.size());
    const int n = layout_.n;
    const int f = layout_.f;
    for (int i = 0; i < n_modes; ++i) {
      const Eigen::VectorXd y = mode_vars(x, i);
      const Eigen::VectorXd re = (c_re_[i] * y).array() - 1.0;
      const Eigen::VectorXd im = c_im_[i] * y;
      const Eigen::VectorXd s = slack.segment(i * n_freq_, n_freq_);
      const Eigen::VectorXd w1 = s.cwiseInverse();
      const Eigen::VectorXd w2 = w1.cwiseProduct(w1);

      const Eigen::MatrixXd g_rows =
          re.asDiagonal() * c_re_[i] + im.asDiagonal() * c_im_[i];
      Eigen::MatrixXd hy =
          2.0 * (c_re_[i].transpose() * w1.asDiagonal() * c_re_[i] +
                 c_im_[i].transpose() * w1.asDiagonal() * c_im_[i]) +
          4.0 * g_rows.transpose() * w2.asDiagonal() * g_rows;
      const Eigen::VectorXd gy1 = 2.0 * g_rows.transpose() * w1;

      const Eigen::MatrixXd outer = w_.row(i).transpose() * w_.row(i);
      auto base = [&](int p) {
        // spectral index p -> first tap index of its lag block
        return (p < n) ? p * f : f * n + (p - n) * f;
      };
      for (int p = 0; p < 2 * n; ++p) {
        grad1.segment(base(p), f) += gy1[p] * w_.row(i).transpose();
        for (int q = 0; q < 2 * n; ++q) {
          hess.block(base(p), base(q), f, f) += hy(p, q) * outer;
        }
      }
      if (grad2 != nullptr) {
        const Eigen::VectorXd gy2 = 2.0 * g_rows.transpose() * w2;
        for (int p = 0; p < 2 * n; ++p) {
          grad2->segment(base(p), f) += gy2[p] * w_.row(i).transpose();
        }
      }
    }
  }

 private:
  Eigen::MatrixXd w_;
  Layout layout_;
  double cap2_;
  int n_freq_ = 0;
  std::vector<Eigen::MatrixXd> c_re_, c_im_;
};

// One smoothed column-sum constraint per node j:
//   sum_{tau,i} sqrt([Delta[tau]]_{ij}^2 + eps^2) <= cap.
// The smoothing overestimates |.|, so feasibility implies the true l1
// column bound.
class L1ColumnConstraints final : public ConstraintSet {
 public:
  L1ColumnConstraints(const GraphSymmetricSystem& gss,
                      const Eigen::MatrixXd& w, const Layout& layout,
                      double cap, double eps = 1e-6)
      : gss_(gss), w_(w), layout_(layout), cap_(cap), eps_(eps) {
    const Eigen::MatrixXd& v = gss.gmd.eigvecs;
    for (int j = 0; j < gss.n_modes(); ++j) {
      m_maps_.push_back(v * v.row(j).asDiagonal());
    }
  }

  int count() const override { return gss_.n_modes(); }

  Eigen::MatrixXd delta_of(const Eigen::VectorXd& x) const {
    const int n = layout_.n;
    const Eigen::MatrixXd lx = w_ * layout_.phi_x(x);
    const Eigen::MatrixXd lu = w_ * layout_.phi_u(x);
    Eigen::MatrixXd delta(gss_.n_modes(), n + 1);
    delta.col(0) = lx.col(0).array() - 1.0;
    for (int t = 1; t < n; ++t) {
      delta.col(t) = lx.col(t) - gss_.lam_a.cwiseProduct(lx.col(t - 1)) -
                     gss_.lam_b.cwiseProduct(lu.col(t - 1));
    }
    delta.col(n) = -gss_.lam_a.cwiseProduct(lx.col(n - 1)) -
                   gss_.lam_b.cwiseProduct(lu.col(n - 1));
    return delta;
  }

  void eval(const Eigen::VectorXd& x, Eigen::VectorXd& g) const override {
    const Eigen::MatrixXd delta = delta_of(x);
    g.resize(count());
    for (int j = 0; j < count(); ++j) {
      const Eigen::MatrixXd d = m_maps_[j] * delta;
      g[j] = (d.array().square() + eps_ * eps_).sqrt().sum() - cap_;
    }
  }

  // Distributes a gradient in delta-space back onto the tap variables.
  void delta_grad_to_x(const Eigen::MatrixXd& g_delta,
                       Eigen::VectorXd& g_x) const {
    const int n = layout_.n;
    const int f = layout_.f;
    g_x.setZero(layout_.dim());
    Eigen::Map<Eigen::MatrixXd> gx(g_x.data(), f, n);
    Eigen::Map<Eigen::MatrixXd> gu(g_x.data() + f * n, f, n);
    for (int t = 0; t <= n; ++t) {
      if (t < n) gx.col(t) += w_.transpose() * g_delta.col(t);
      if (t >= 1) {
        gx.col(t - 1) -=
            w_.transpose() * gss_.lam_a.cwiseProduct(g_delta.col(t));
        gu.col(t - 1) -=
            w_.transpose() * gss_.lam_b.cwiseProduct(g_delta.col(t));
      }
    }
  }

  void accumulate_barrier(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& slack,
                          Eigen::VectorXd& grad1, Eigen::VectorXd* grad2,
                          Eigen::MatrixXd& hess) const override {
    const int n = layout_.n;
    const int f = layout_.f;
    const int n_modes = gss_.n_modes();
    const Eigen::MatrixXd delta = delta_of(x);
    Eigen::VectorXd g_x(layout_.dim());
    for (int j = 0; j < count(); ++j) {
      const double w1 = 1.0 / slack[j];
      const double w2 = w1 * w1;
      const Eigen::MatrixXd d = m_maps_[j] * delta;
      const Eigen::ArrayXXd root = (d.array().square() + eps_ * eps_).sqrt();
      const Eigen::MatrixXd sigma = (d.array() / root).matrix();
      const Eigen::MatrixXd g_delta = m_maps_[j].transpose() * sigma;
      delta_grad_to_x(g_delta, g_x);
      grad1 += w1 * g_x;
      if (grad2 != nullptr) *grad2 += w2 * g_x;
      hess.selfadjointView<Eigen::Lower>().rankUpdate(g_x, w2);

      // Curvature term, lag block by lag block.
      const Eigen::ArrayXXd curv = eps_ * eps_ / (root * root * root);
      for (int t = 0; t <= n; ++t) {
        const Eigen::MatrixXd c_t = m_maps_[j].transpose() *
                                    curv.col(t).matrix().asDiagonal() *
                                    m_maps_[j];
        // delta[:,t] = Wx phi_x(:,t) - diag(a) W phi_x(:,t-1)
        //              - diag(b) W phi_u(:,t-1)
        std::vector<std::pair<int, Eigen::MatrixXd>> terms;
        if (t < n) terms.emplace_back(t * f, w_);
        if (t >= 1) {
          terms.emplace_back((t - 1) * f,
                             (-gss_.lam_a).asDiagonal() * w_);
          terms.emplace_back(f * n + (t - 1) * f,
                             (-gss_.lam_b).asDiagonal() * w_);
        }
        for (const auto& [bp, gp] : terms) {
          for (const auto& [bq, gq] : terms) {
            hess.block(bp, bq, f, f) +=
                w1 * (gp.transpose() * c_t * gq);
          }
        }
      }
      (void)n_modes;
    }
    hess = hess.selfadjointView<Eigen::Lower>();
  }

 private:
  double eps_;
  const GraphSymmetricSystem& gss_;
  Eigen::MatrixXd w_;
  Layout layout_;
  double cap_;
  std::vector<Eigen::MatrixXd> m_maps_;  // M_j = V diag(V_{j,:})
};

enum class ObjectiveKind { lqr_cost, projection_distance };

QuadraticObjective build_objective(const GraphSymmetricSystem& gss,
                                   const Eigen::MatrixXd& w,
                                   const Layout& layout, ObjectiveKind kind,
                                   const SpectralResponse* target) {
  const int f = layout.f, n = layout.n;
  QuadraticObjective obj;
  obj.h = Eigen::MatrixXd::Zero(layout.dim(), layout.dim());
  obj.g = Eigen::VectorXd::Zero(layout.dim());
  Eigen::VectorXd wx, wu;
  if (kind == ObjectiveKind::lqr_cost) {
    wx = gss.lam_q;
    wu = gss.lam_r;
  } else {
    wx = wu = Eigen::VectorXd::Ones(gss.n_modes());
  }
  const Eigen::MatrixXd gx = w.transpose() * wx.asDiagonal() * w;
  const Eigen::MatrixXd gu = w.transpose() * wu.asDiagonal() * w;
  for (int t = 0; t < n; ++t) {
    obj.h.block(t * f, t * f, f, f) = gx;
    obj.h.block(f * n + t * f, f * n + t * f, f, f) = gu;
  }
  if (kind == ObjectiveKind::projection_distance) {
    for (int t = 0; t < n; ++t) {
      obj.g.segment(t * f, f) = -2.0 * w.transpose() * target->lx.col(t);
      obj.g.segment(f * n + t * f, f) = -2.0 * w.transpose() * target->lu.col(t);
    }
    obj.c = target->lx.squaredNorm() + target->lu.squaredNorm();
  }
  return obj;
}

struct ProgramResult {
  SynthesisOutcome outcome;
};

SynthesisOutcome solve_truncation_program(const GraphSymmetricSystem& gss,
                                          const SynthesisConfig& config,
                                          ObjectiveKind kind,
                                          const FilterResponse& opt_response,
                                          double gamma) {
  const int f = config.f_hops;
  const int n = config.fir_len;
  const Layout layout{f, n};
  const double cap = gamma - config.constraint_margin;
  if (cap <= 0.0) throw InvalidArg("gamma must exceed constraint_margin");

  // The program is solved in an orthonormalized basis of the Vandermonde
  // columns (taps = R^{-1} z with W = Q R): an affine change of variables
  // that leaves the program unchanged but keeps the Newton systems well
  // conditioned even when W is nearly rank deficient.
  const Eigen::MatrixXd w_taps = vandermonde_powers(gss.gmd.eigvals, f);
  const Eigen::HouseholderQR<Eigen::MatrixXd> w_qr(w_taps);
  const Eigen::MatrixXd w =
      w_qr.householderQ() *
      Eigen::MatrixXd::Identity(gss.n_modes(), f);  // thin Q factor
  const Eigen::MatrixXd r_fac = w_qr.matrixQR()
                                    .topRows(f)
                                    .triangularView<Eigen::Upper>();
  auto taps_to_z = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd z(v.size());
    Eigen::Map<Eigen::MatrixXd>(z.data(), f, 2 * n) =
        r_fac * Eigen::Map<const Eigen::MatrixXd>(v.data(), f, 2 * n);
    return z;
  };
  auto z_to_taps = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd v(z.size());
    Eigen::Map<Eigen::MatrixXd>(v.data(), f, 2 * n) =
        r_fac.triangularView<Eigen::Upper>().solve(
            Eigen::Map<const Eigen::MatrixXd>(z.data(), f, 2 * n));
    return v;
  };

  std::unique_ptr<ConstraintSet> constraints;
  if (config.norm_mode == NormMode::hinf_grid) {
    constraints = std::make_unique<HinfGridConstraints>(gss, w, layout,
                                                        config.grid_size, cap);
  } else {
    constraints = std::make_unique<L1ColumnConstraints>(gss, w, layout, cap);
  }

  const SpectralResponse opt_spectral = to_spectral(gss.gmd, opt_response);
  const QuadraticObjective objective = build_objective(
      gss, w, layout, kind,
      kind == ObjectiveKind::projection_distance ? &opt_spectral : nullptr);

  SynthesisOutcome outcome;
  outcome.diagnostics.note = "";

  // Initial point: the naive projection when strictly feasible, else a
  // feasibility phase from zero.
  Eigen::VectorXd x0;
  bool have_start = false;
  {
    const FilterResponse naive = naive_projection(gss, opt_response, f);
    Eigen::VectorXd candidate = taps_to_z(pack(naive));
    Eigen::VectorXd g;
    constraints->eval(candidate, g);
    outcome.diagnostics.max_constraint_violation = g.maxCoeff();
    if (g.maxCoeff() < -1e-9) {
      x0 = std::move(candidate);
      have_start = true;
      outcome.diagnostics.note = "start=naive_projection";
    }
  }
  if (!have_start) {
    const auto phase1 = detail::phase1_feasibility(
        *constraints, Eigen::VectorXd::Zero(layout.dim()), 1e-4,
        config.max_iters);
    outcome.diagnostics.phase1_iters = phase1.newton_iters;
    if (phase1.s_upper < -1e-9) {
      // Any strictly feasible point will do as a barrier start.
      x0 = phase1.x;
      outcome.diagnostics.note = "start=phase1";
    } else if (phase1.s_lower > -1e-6) {
      // Certified (or borderline) infeasible at the margin-tightened cap.
      outcome.status = SynthesisStatus::infeasible;
      outcome.diagnostics.max_constraint_violation =
          std::max(outcome.diagnostics.max_constraint_violation,
                   phase1.s_lower);
      outcome.diagnostics.note = "phase1 infeasible";
      return outcome;
    } else {
      outcome.status = SynthesisStatus::solver_failure;
      outcome.diagnostics.note = "phase1 undecided";
      return outcome;
    }
  }

  const BarrierResult solved = detail::minimize_with_barrier(
      objective, *constraints, x0, config.solver_tol, config.max_iters);
  outcome.diagnostics.newton_iters = solved.newton_iters;
  outcome.diagnostics.duality_gap = solved.duality_gap;
  if (!solved.converged) {
    outcome.status = SynthesisStatus::solver_failure;
    outcome.diagnostics.note += "; barrier did not converge";
    return outcome;
  }

  FilterResponse response = unpack(z_to_taps(solved.x), layout,
                                   gss.gmd.hash());

  // Post-verification: recompute the certificate from scratch; solver
  // output is never trusted raw.
  const Residual res = residual(gss, response);
  double certified = 0.0;
  if (config.norm_mode == NormMode::hinf_grid) {
    const auto bound = hinf_norm_certified(
        res, config.grid_size,
        std::max(1e-4, config.constraint_margin / 2.0));
    certified = bound.upper;
    outcome.diagnostics.post_norm_lower = bound.lower;
  } else {
    certified = l1_induced_norm(residual_dense_lags(gss.gmd, res));
    outcome.diagnostics.post_norm_lower = certified;
  }
  if (certified > gamma) {
    outcome.status = SynthesisStatus::solver_failure;
    outcome.certified_gamma = certified;
    std::ostringstream os;
    os << "; post-verification failed: " << certified << " > " << gamma;
    outcome.diagnostics.note += os.str();
    return outcome;
  }

  outcome.status = SynthesisStatus::feasible;
  outcome.certified_gamma = certified;
  outcome.objective_value = solved.objective;
  outcome.response = std::move(response);
  return outcome;
}

SynthesisOutcome solve_with_optional_bisection(
    const GraphSymmetricSystem& gss, const SynthesisConfig& config,
    ObjectiveKind kind, const FilterResponse& opt_response) {
  config.validate();
  if (config.f_hops > gss.n_modes())
    throw InvalidArg("f_hops exceeds the number of modes");
  if (!config.bisect_gamma) {
    return solve_truncation_program(gss, config, kind, opt_response,
                                    config.gamma);
  }
  // Golden-section search on the quasi-convex objective over gamma.
  auto score = [&](const SynthesisOutcome& outcome, double gamma) {
    if (outcome.status != SynthesisStatus::feasible)
      return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(0.0, outcome.objective_value)) / (1.0 - gamma);
  };
  const double phi_ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = config.constraint_margin + 0.01, hi = 0.995;
  double g1 = hi - phi_ratio * (hi - lo), g2 = lo + phi_ratio * (hi - lo);
  auto eval_at = [&](double gamma) {
    return solve_truncation_program(gss, config, kind, opt_response, gamma);
  };
  SynthesisOutcome o1 = eval_at(g1), o2 = eval_at(g2);
  double s1 = score(o1, g1), s2 = score(o2, g2);
  for (int iter = 0; iter < 16; ++iter) {
    if (s1 <= s2) {
      hi = g2;
      g2 = g1;
      o2 = o1;
      s2 = s1;
      g1 = hi - phi_ratio * (hi - lo);
      o1 = eval_at(g1);
      s1 = score(o1, g1);
    } else {
      lo = g1;
      g1 = g2;
      o1 = o2;
      s1 = s2;
      g2 = lo + phi_ratio * (hi - lo);
      o2 = eval_at(g2);
      s2 = score(o2, g2);
    }
  }
  SynthesisOutcome best = (s1 <= s2) ? std::move(o1) : std::move(o2);
  std::ostringstream os;
  os << "; bisected gamma=" << ((s1 <= s2) ? g1 : g2);
  best.diagnostics.note += os.str();
  return best;
}

}  // namespace

void SynthesisConfig::validate() const {
  if (f_hops < 1) throw InvalidArg("f_hops must be >= 1");
  if (fir_len < 1) throw InvalidArg("fir_len must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArg("gamma must be in (0,1)");
  if (constraint_margin < 0.0 || constraint_margin > 0.05)
    throw InvalidArg("constraint_margin must be in [0, 0.05]");
  if (grid_size < 64) throw InvalidArg("grid_size must be >= 64");
  if (solver_tol <= 0.0) throw InvalidArg("solver_tol must be positive");
  if (max_iters < 1) throw InvalidArg("max_iters must be >= 1");
}

std::pair<FilterResponse, FilterResponse> truncate(
    const FilterResponse& response, int f_hops) {
  if (f_hops < 1 || f_hops > response.f_hops)
    throw InvalidArg("truncation point outside [1, f_hops]");
  FilterResponse head;
  head.f_hops = f_hops;
  head.fir_len = response.fir_len;
  head.phi_x = response.phi_x.topRows(f_hops);
  head.phi_u = response.phi_u.topRows(f_hops);
  head.gmd_hash = response.gmd_hash;

  FilterResponse tail = response;
  tail.phi_x.topRows(f_hops).setZero();
  tail.phi_u.topRows(f_hops).setZero();
  return {std::move(head), std::move(tail)};
}

FilterResponse naive_projection(const GraphSymmetricSystem& gss,
                                const FilterResponse& opt_response,
                                int f_hops) {
  const int n_modes = gss.n_modes();
  if (opt_response.f_hops != n_modes)
    throw InvalidArg("optimal response must have N hop taps");
  if (f_hops == n_modes) return opt_response;
  if (f_hops < 1 || f_hops > n_modes) throw InvalidArg("invalid f_hops");

  const Eigen::MatrixXd w_full =
      vandermonde_powers(gss.gmd.eigvals, n_modes);
  const Eigen::MatrixXd w_head = w_full.leftCols(f_hops);
  const Eigen::MatrixXd w_tail = w_full.rightCols(n_modes - f_hops);
  // gram^{-1} cross equals the pseudo-inverse of the head block applied to
  // the tail block; evaluating it through the QR factorization of w_head
  // avoids squaring the Vandermonde conditioning in the gram system.
  const Eigen::HouseholderQR<Eigen::MatrixXd> head_qr(w_head);
  const Eigen::VectorXd r_diag =
      head_qr.matrixQR().diagonal().head(f_hops).cwiseAbs();
  if (r_diag.minCoeff() == 0.0 ||
      r_diag.maxCoeff() / r_diag.minCoeff() > 1e12)
    throw IllConditioned("Vandermonde head block is numerically singular");

  FilterResponse out;
  out.f_hops = f_hops;
  out.fir_len = opt_response.fir_len;
  out.gmd_hash = opt_response.gmd_hash;
  const Eigen::MatrixXd eps_x =
      head_qr.solve(w_tail * opt_response.phi_x.bottomRows(n_modes - f_hops));
  const Eigen::MatrixXd eps_u =
      head_qr.solve(w_tail * opt_response.phi_u.bottomRows(n_modes - f_hops));
  out.phi_x = opt_response.phi_x.topRows(f_hops) + eps_x;
  out.phi_u = opt_response.phi_u.topRows(f_hops) + eps_u;

  // The correction must satisfy the normal equations gram * eps = cross *
  // phi_tail of the per-lag program.
  const auto [gram, cross] =
      vandermonde_projection_matrices(gss.gmd.eigvals, f_hops);
  const double scale =
      1.0 + std::max(eps_x.cwiseAbs().maxCoeff(), eps_u.cwiseAbs().maxCoeff());
  const double normal_eq_err = std::max(
      (gram * eps_x -
       cross * opt_response.phi_x.bottomRows(n_modes - f_hops))
          .cwiseAbs()
          .maxCoeff(),
      (gram * eps_u -
       cross * opt_response.phi_u.bottomRows(n_modes - f_hops))
          .cwiseAbs()
          .maxCoeff());
  if (normal_eq_err > 1e-6 * scale * gram.cwiseAbs().maxCoeff())
    throw std::logic_error("projection violates the normal equations");

  // Cross-check the closed form against a direct least-squares solve of the
  // same per-lag program.
  const auto qr = w_head.colPivHouseholderQr();
  auto ls_solve = [&](const Eigen::MatrixXd& target) {
    Eigen::MatrixXd y = qr.solve(target);
    y += qr.solve(target - w_head * y);
    return y;
  };
  const Eigen::MatrixXd ls_x = ls_solve(w_full * opt_response.phi_x);
  const Eigen::MatrixXd ls_u = ls_solve(w_full * opt_response.phi_u);
  const double disagreement =
      std::max((ls_x - out.phi_x).cwiseAbs().maxCoeff(),
               (ls_u - out.phi_u).cwiseAbs().maxCoeff());
  if (disagreement > 1e-6)
    throw std::logic_error(
        "closed-form projection disagrees with least squares");
  return out;
}

SynthesisOutcome robust_sls_synthesize(const GraphSymmetricSystem& gss,
                                       const SynthesisConfig& config) {
  const auto opt = optimal_responses(gss, config.fir_len);
  return solve_with_optional_bisection(gss, config, ObjectiveKind::lqr_cost,
                                       opt.response);
}

SynthesisOutcome robust_projection(const GraphSymmetricSystem& gss,
                                   const FilterResponse& opt_response,
                                   const SynthesisConfig& config) {
  if (opt_response.fir_len != config.fir_len)
    throw InvalidArg("opt_response FIR length must match config");
  return solve_with_optional_bisection(
      gss, config, ObjectiveKind::projection_distance, opt_response);
}

SuboptimalityBound suboptimality_bound(const GraphSymmetricSystem& gss,
                                       const FilterResponse& opt_response,
                                       int f_hops, int grid_size) {
  if (opt_response.f_hops != gss.n_modes())
    throw InvalidArg("optimal response must have N hop taps");
  const auto [head, tail] = truncate(opt_response, f_hops);
  const SpectralResponse tail_spectral = to_spectral(gss.gmd, tail);
  // Residual of the tail alone, without the -I achievability offset.
  Residual res = residual_spectral(gss, tail_spectral);
  res.delta.col(0).array() += 1.0;

  SuboptimalityBound out;
  const auto norm = hinf_norm_certified(res, grid_size, 1e-4);
  out.delta_star_norm = norm.upper;
  if (norm.upper >= 1.0) return out;
  // J of the optimal response is trace(P) exactly; the FIR representation of
  // opt_response understates it by the truncated tail energy, which would
  // break the bound at F = N where it holds with equality.
  const double j_opt = std::sqrt(centralized_solution(gss).j_opt);
  const double j_tail = std::sqrt(h2_cost_spectral(gss, tail_spectral));
  out.bound = (j_opt + j_tail) / (1.0 - norm.upper);
  return out;
}

}  // namespace gsls
