#pragma once

#include <optional>
#include <string>
#include <utility>

#include "gsls/sls.hpp"

namespace gsls {

enum class NormMode { hinf_grid, l1_induced };

struct SynthesisConfig {
  int f_hops = 3;
  int fir_len = 10;
  double gamma = 0.98;
  NormMode norm_mode = NormMode::hinf_grid;
  int grid_size = 1024;
  double constraint_margin = 0.005;
  double solver_tol = 1e-6;
  int max_iters = 600;
  bool bisect_gamma = false;

  void validate() const;
};

enum class SynthesisStatus { feasible, infeasible, solver_failure };

struct SynthesisDiagnostics {
  int newton_iters = 0;
  int phase1_iters = 0;
  double duality_gap = 0.0;
  double post_norm_lower = 0.0;
  double max_constraint_violation = 0.0;
  std::string note;
};

struct SynthesisOutcome {
  SynthesisStatus status = SynthesisStatus::solver_failure;
  std::optional<FilterResponse> response;
  double certified_gamma = 0.0;   // post-verified norm upper bound
  double objective_value = 0.0;
  SynthesisDiagnostics diagnostics;
};

// Splits hop taps at F: head keeps hops 0..F-1, tail keeps hops F.. (tail is
// returned with the original hop count, leading hops zeroed).
std::pair<FilterResponse, FilterResponse> truncate(
    const FilterResponse& response, int f_hops);

// Closed-form H2 projection of the optimal N-hop response onto F hops,
// lag by lag, via the Vandermonde gram/cross matrices. Cross-checked
// against a direct least-squares solve. No stability guarantee.
FilterResponse naive_projection(const GraphSymmetricSystem& gss,
                                const FilterResponse& opt_response,
                                int f_hops);

// Robust truncation: minimizes the H2 cost over F-hop FIR responses subject
// to the residual-norm constraint ||Delta|| <= gamma. Feasible outcomes are
// post-verified against an independently recomputed certificate.
SynthesisOutcome robust_sls_synthesize(const GraphSymmetricSystem& gss,
                                       const SynthesisConfig& config);

// Same constraint set; objective is the projection distance to the optimal
// response instead of the cost.
SynthesisOutcome robust_projection(const GraphSymmetricSystem& gss,
                                   const FilterResponse& opt_response,
                                   const SynthesisConfig& config);

struct SuboptimalityBound {
  std::optional<double> bound;  // unsquared-cost units; empty if ||D*|| >= 1
  double delta_star_norm = 0.0;
};

// A priori bound from the truncation tail of the optimal response:
// (J* + J_tail) / (1 - ||Delta*||), with J the unsquared H2 cost.
SuboptimalityBound suboptimality_bound(const GraphSymmetricSystem& gss,
                                       const FilterResponse& opt_response,
                                       int f_hops, int grid_size = 1024);

}  // namespace gsls
