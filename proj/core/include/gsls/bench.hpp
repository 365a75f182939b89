#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gsls/synthesis.hpp"

namespace gsls {

enum class Method { naive, robust_sls, robust_projection };

std::string method_name(Method method);
std::optional<Method> method_from_name(const std::string& name);

// Monte Carlo sweep over random instances and truncation widths F. The
// defaults match the benchmark protocol: 10 nodes, 3-nearest graphs, 50
// trials, FIR length 10, gamma = 0.98, F = 1..10, all three methods.
struct ExperimentConfig {
  int n_nodes = 10;
  int k_nearest = 3;
  int n_trials = 50;
  int fir_len = 10;
  double gamma = 0.98;
  int f_min = 1;
  int f_max = 10;
  std::vector<Method> methods = {Method::naive, Method::robust_sls,
                                 Method::robust_projection};
  std::uint64_t seed = 0;
  int grid_size = 1024;
  double margin = 0.005;
  std::string output_dir = ".";
  int workers = 0;  // 0: GSLS_WORKERS env var, else hardware concurrency

  void validate() const;
};

struct TrialResult {
  std::uint64_t seed = 0;  // per-trial substream seed
  int trial = 0;
  int f_hops = 0;
  Method method = Method::naive;
  SynthesisStatus status = SynthesisStatus::feasible;
  bool certified = false;
  bool exact_stable = false;
  double nominal_cost = 0.0;            // squared H2 of the synthesized taps
  double achieved_cost = 0.0;           // +inf when unstable or infeasible
  std::optional<double> apriori_bound;  // tail bound, unsquared units
  double delta_norm = 0.0;
  double wall_time_ms = 0.0;
};

struct Fig1Row {
  int f_hops = 0;
  Method method = Method::naive;
  double pct_stable = 0.0;  // naive: % exactly stable; robust: % feasible
};

struct Fig2Row {
  int f_hops = 0;
  Method method = Method::naive;
  double p25 = 0.0, p50 = 0.0, p75 = 0.0;  // achieved cost percentiles
};

struct BenchmarkResult {
  std::vector<TrialResult> trials;  // sorted by (trial, F, method)
  std::vector<Fig1Row> fig1;
  std::vector<Fig2Row> fig2;
};

// Runs all (trial, F, method) cells; individual failures are recorded as
// solver_failure rows and never abort the sweep. Trials run concurrently up
// to the worker cap; the merged output is deterministic for a given seed.
BenchmarkResult run_benchmark(
    const ExperimentConfig& config,
    const std::function<void(int done, int total)>& progress = {});

// Writes fig1.csv (F, method, pct_stable), fig2.csv (F, method, p25, p50,
// p75) and trials.csv under config.output_dir. Infinite values are written
// as the literal "inf".
void write_benchmark_csvs(const BenchmarkResult& result,
                          const std::string& output_dir);

}  // namespace gsls
