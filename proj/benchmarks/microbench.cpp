#include <benchmark/benchmark.h>

#include "gsls/sls.hpp"
#include "gsls/synthesis.hpp"

namespace {

gsls::GraphSymmetricSystem make_system(int n_nodes) {
  const gsls::Gmd gmd = gsls::generate_random_gmd(n_nodes, 3, 42);
  return gsls::generate_random_gss(gmd, 43);
}

void bm_eval_graph_filter(benchmark::State& state) {
  const auto gss = make_system(static_cast<int>(state.range(0)));
  Eigen::VectorXd taps = Eigen::VectorXd::LinSpaced(5, 1.0, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gsls::eval_graph_filter(gss.gmd, gsls::HopTapVector{taps}));
  }
}
BENCHMARK(bm_eval_graph_filter)->Arg(10)->Arg(50)->Arg(100);

void bm_hinf_norm(benchmark::State& state) {
  const auto gss = make_system(10);
  const auto opt = gsls::optimal_responses(gss, 10);
  const auto res = gsls::residual(gss, opt.response);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gsls::hinf_norm(res, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(bm_hinf_norm)->Arg(256)->Arg(1024)->Arg(4096);

void bm_exact_stability(benchmark::State& state) {
  const auto gss = make_system(10);
  const auto opt = gsls::optimal_responses(gss, 10);
  const auto res = gsls::residual(gss, opt.response);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gsls::is_stabilizing(res));
  }
}
BENCHMARK(bm_exact_stability);

void bm_robust_synthesis(benchmark::State& state) {
  const auto gss = make_system(10);
  gsls::SynthesisConfig config;
  config.f_hops = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gsls::robust_sls_synthesize(gss, config));
  }
}
BENCHMARK(bm_robust_synthesis)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
