#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gsls/bench.hpp"
#include "gsls/errors.hpp"

using namespace gsls;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig config;
  config.n_nodes = 6;
  config.k_nearest = 2;
  config.n_trials = 2;
  config.fir_len = 8;
  config.f_min = 2;
  config.f_max = 3;
  config.methods = {Method::naive, Method::robust_sls};
  config.seed = 5;
  config.workers = 1;
  return config;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m :
       {Method::naive, Method::robust_sls, Method::robust_projection}) {
    CHECK(method_from_name(method_name(m)) == m);
  }
  CHECK_FALSE(method_from_name("bogus").has_value());
}

TEST_CASE("experiment config validation") {
  ExperimentConfig config = tiny_config();
  config.f_max = config.n_nodes + 1;
  CHECK_THROWS_AS(config.validate(), InvalidArg);
  config = tiny_config();
  config.n_trials = 0;
  CHECK_THROWS_AS(config.validate(), InvalidArg);
  config = tiny_config();
  config.methods.clear();
  CHECK_THROWS_AS(config.validate(), InvalidArg);
}

TEST_CASE("benchmark sweep shape and determinism") {
  const ExperimentConfig config = tiny_config();
  const BenchmarkResult a = run_benchmark(config);
  const BenchmarkResult b = run_benchmark(config);

  const int cells = config.n_trials * (config.f_max - config.f_min + 1) *
                    static_cast<int>(config.methods.size());
  REQUIRE(static_cast<int>(a.trials.size()) == cells);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].seed == b.trials[i].seed);
    CHECK(a.trials[i].status == b.trials[i].status);
    CHECK(a.trials[i].nominal_cost == b.trials[i].nominal_cost);
    CHECK(a.trials[i].achieved_cost == b.trials[i].achieved_cost);
  }

  // One figure row per (F, method) cell.
  CHECK(a.fig1.size() == 2 * config.methods.size());
  CHECK(a.fig2.size() == 2 * config.methods.size());
  for (const Fig1Row& row : a.fig1) {
    CHECK(row.pct_stable >= 0.0);
    CHECK(row.pct_stable <= 100.0);
  }
  // Feasible trials carry finite costs; infeasible ones are infinite.
  for (const TrialResult& t : a.trials) {
    if (t.status == SynthesisStatus::feasible && t.exact_stable) {
      CHECK(std::isfinite(t.achieved_cost));
    }
    if (t.status != SynthesisStatus::feasible) {
      CHECK(std::isinf(t.achieved_cost));
    }
  }
}

TEST_CASE("benchmark csv export") {
  const ExperimentConfig config = tiny_config();
  const BenchmarkResult result = run_benchmark(config);
  write_benchmark_csvs(result, ".");

  auto first_line = [](const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    return line;
  };
  CHECK(first_line("fig1.csv") == "F,method,pct_stable");
  CHECK(first_line("fig2.csv") == "F,method,p25,p50,p75");
  CHECK(first_line("trials.csv").rfind("trial,seed,F,method,status", 0) == 0);
  std::remove("fig1.csv");
  std::remove("fig2.csv");
  std::remove("trials.csv");
}
