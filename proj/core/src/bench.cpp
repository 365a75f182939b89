#include "gsls/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "gsls/errors.hpp"
#include "gsls/serialization.hpp"
#include "gsls/sls.hpp"

namespace gsls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// splitmix64, matching the substream convention of the generators.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

int resolve_workers(int requested, int n_trials) {
  int workers = requested;
  if (workers <= 0) {
    if (const char* env = std::getenv("GSLS_WORKERS"))
      workers = std::atoi(env);
  }
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(workers, 1, std::max(1, n_trials));
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return kInf;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::ptrdiff_t>(
      std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<std::ptrdiff_t>(rank, 1) - 1];
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

SynthesisConfig make_synth_config(const ExperimentConfig& config, int f_hops) {
  SynthesisConfig sc;
  sc.f_hops = f_hops;
  sc.fir_len = config.fir_len;
  sc.gamma = config.gamma;
  sc.grid_size = config.grid_size;
  sc.constraint_margin = config.margin;
  return sc;
}

void evaluate_response(const GraphSymmetricSystem& gss,
                       const FilterResponse& response, int grid_size,
                       TrialResult& row) {
  const Residual res = residual(gss, response);
  const StabilityResult stab = is_stabilizing(res, grid_size);
  row.exact_stable = stab.exact;
  row.nominal_cost = h2_cost(gss, response);
  row.delta_norm = hinf_norm(res, grid_size).lower;
  row.achieved_cost =
      stab.exact ? achieved_cost(gss, response, res) : kInf;
}

void run_cell(const GraphSymmetricSystem& gss,
              const OptimalResponses& opt, const ExperimentConfig& config,
              int f_hops, Method method, TrialResult& row) {
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case Method::naive: {
        const FilterResponse response =
            naive_projection(gss, opt.response, f_hops);
        row.status = SynthesisStatus::feasible;
        row.certified = false;
        evaluate_response(gss, response, config.grid_size, row);
        break;
      }
      case Method::robust_sls:
      case Method::robust_projection: {
        const SynthesisConfig sc = make_synth_config(config, f_hops);
        const SynthesisOutcome outcome =
            method == Method::robust_sls
                ? robust_sls_synthesize(gss, sc)
                : robust_projection(gss, opt.response, sc);
        row.status = outcome.status;
        row.certified = outcome.status == SynthesisStatus::feasible;
        if (row.certified) {
          evaluate_response(gss, *outcome.response, config.grid_size, row);
        } else {
          row.achieved_cost = kInf;
        }
        if (method == Method::robust_sls) {
          row.apriori_bound =
              suboptimality_bound(gss, opt.response, f_hops, config.grid_size)
                  .bound;
        }
        break;
      }
    }
  } catch (const std::exception&) {
    row.status = SynthesisStatus::solver_failure;
    row.certified = false;
    row.exact_stable = false;
    row.achieved_cost = kInf;
  }
  row.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
}

std::vector<TrialResult> run_trial(const ExperimentConfig& config, int trial) {
  const std::uint64_t trial_seed = mix64(config.seed + 1000003ull * trial);
  std::vector<TrialResult> rows;
  GraphSymmetricSystem gss = [&] {
    const Gmd gmd =
        generate_random_gmd(config.n_nodes, config.k_nearest, trial_seed);
    return generate_random_gss(gmd, mix64(trial_seed ^ 0x517cc1b727220a95ull));
  }();
  const OptimalResponses opt = optimal_responses(gss, config.fir_len);

  for (int f = config.f_min; f <= config.f_max; ++f) {
    for (Method method : config.methods) {
      TrialResult row;
      row.seed = trial_seed;
      row.trial = trial;
      row.f_hops = f;
      row.method = method;
      run_cell(gss, opt, config, f, method, row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::naive:
      return "naive";
    case Method::robust_sls:
      return "robust_sls";
    case Method::robust_projection:
      return "robust_projection";
  }
  return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "naive") return Method::naive;
  if (name == "robust_sls") return Method::robust_sls;
  if (name == "robust_projection") return Method::robust_projection;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (n_nodes < 2) throw InvalidArg("n_nodes must be >= 2");
  if (k_nearest < 1 || k_nearest >= n_nodes)
    throw InvalidArg("k_nearest must be in [1, n_nodes)");
  if (n_trials < 1) throw InvalidArg("n_trials must be >= 1");
  if (fir_len < 1) throw InvalidArg("fir_len must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArg("gamma must be in (0,1)");
  if (f_min < 1 || f_max < f_min || f_max > n_nodes)
    throw InvalidArg("F range must satisfy 1 <= f_min <= f_max <= n_nodes");
  if (methods.empty()) throw InvalidArg("at least one method required");
  if (grid_size < 64) throw InvalidArg("grid_size must be >= 64");
}

BenchmarkResult run_benchmark(
    const ExperimentConfig& config,
    const std::function<void(int done, int total)>& progress) {
  config.validate();
  const int n_trials = config.n_trials;
  std::vector<std::vector<TrialResult>> per_trial(n_trials);

  std::atomic<int> next{0}, done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (;;) {
      const int trial = next.fetch_add(1);
      if (trial >= n_trials) return;
      per_trial[trial] = run_trial(config, trial);
      const int finished = ++done;
      if (progress) {
        std::scoped_lock lock(progress_mutex);
        progress(finished, n_trials);
      }
    }
  };
  const int n_workers = resolve_workers(config.workers, n_trials);
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  BenchmarkResult result;
  for (auto& rows : per_trial)
    result.trials.insert(result.trials.end(), rows.begin(), rows.end());

  for (int f = config.f_min; f <= config.f_max; ++f) {
    for (Method method : config.methods) {
      int stable = 0, count = 0;
      std::vector<double> costs;
      for (const TrialResult& row : result.trials) {
        if (row.f_hops != f || row.method != method) continue;
        ++count;
        costs.push_back(row.achieved_cost);
        const bool ok = method == Method::naive
                            ? row.exact_stable
                            : row.status == SynthesisStatus::feasible;
        if (ok) ++stable;
      }
      if (count == 0) continue;
      result.fig1.push_back({f, method, 100.0 * stable / count});
      result.fig2.push_back({f, method, percentile(costs, 0.25),
                             percentile(costs, 0.50), percentile(costs, 0.75)});
    }
  }
  return result;
}

void write_benchmark_csvs(const BenchmarkResult& result,
                          const std::string& output_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  const fs::path dir(output_dir);

  {
    std::ofstream out(dir / "fig1.csv");
    if (!out) throw InvalidArg("cannot write fig1.csv in " + output_dir);
    out << "F,method,pct_stable\n";
    for (const Fig1Row& row : result.fig1)
      out << row.f_hops << ',' << method_name(row.method) << ','
          << csv_number(row.pct_stable) << '\n';
  }
  {
    std::ofstream out(dir / "fig2.csv");
    if (!out) throw InvalidArg("cannot write fig2.csv in " + output_dir);
    out << "F,method,p25,p50,p75\n";
    for (const Fig2Row& row : result.fig2)
      out << row.f_hops << ',' << method_name(row.method) << ','
          << csv_number(row.p25) << ',' << csv_number(row.p50) << ','
          << csv_number(row.p75) << '\n';
  }
  {
    std::ofstream out(dir / "trials.csv");
    if (!out) throw InvalidArg("cannot write trials.csv in " + output_dir);
    out << "trial,seed,F,method,status,certified,exact_stable,nominal_cost,"
           "achieved_cost,apriori_bound,delta_norm,wall_time_ms\n";
    for (const TrialResult& row : result.trials) {
      out << row.trial << ',' << row.seed << ',' << row.f_hops << ','
          << method_name(row.method) << ',' << status_name(row.status) << ','
          << (row.certified ? 1 : 0) << ',' << (row.exact_stable ? 1 : 0)
          << ',' << csv_number(row.nominal_cost) << ','
          << csv_number(row.achieved_cost) << ','
          << (row.apriori_bound ? csv_number(*row.apriori_bound)
                                : std::string())
          << ',' << csv_number(row.delta_norm) << ','
          << csv_number(row.wall_time_ms) << '\n';
    }
  }
}

}  // namespace gsls
