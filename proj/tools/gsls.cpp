// Command-line interface: synth, eval, bench, validate, gen.
#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gsls/bench.hpp"
#include "gsls/errors.hpp"
#include "gsls/serialization.hpp"
#include "gsls/simulate.hpp"
#include "gsls/sls.hpp"
#include "gsls/synthesis.hpp"

namespace {

using nlohmann::json;

// --config file values override command-line flags.
template <class T>
void override_from(const json& cfg, const char* key, T& value) {
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json cfg = gsls::load_json_file(path);
  if (!cfg.is_object()) throw gsls::InvalidArg("--config must be an object");
  return cfg;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const gsls::InvalidArg*>(&e)) return "invalid_argument";
  if (dynamic_cast<const gsls::DegenerateGraph*>(&e))
    return "degenerate_graph";
  if (dynamic_cast<const gsls::IllConditioned*>(&e)) return "ill_conditioned";
  if (dynamic_cast<const gsls::Unstabilizable*>(&e)) return "unstabilizable";
  if (dynamic_cast<const gsls::UnstableClosedLoop*>(&e))
    return "unstable_closed_loop";
  if (dynamic_cast<const gsls::DegenerateResponse*>(&e))
    return "degenerate_response";
  if (dynamic_cast<const gsls::Unstable*>(&e)) return "unstable";
  if (dynamic_cast<const gsls::SolverFailure*>(&e)) return "solver_failure";
  return "internal_error";
}

gsls::NormMode parse_norm(const std::string& name) {
  if (name == "hinf") return gsls::NormMode::hinf_grid;
  if (name == "l1") return gsls::NormMode::l1_induced;
  throw gsls::InvalidArg("unknown norm mode: " + name);
}

json evaluate_response_json(const gsls::GraphSymmetricSystem& gss,
                            const gsls::FilterResponse& response,
                            int grid_size) {
  const gsls::Residual res = gsls::residual(gss, response);
  const gsls::StabilityResult stab = gsls::is_stabilizing(res, grid_size);
  const auto hinf = gsls::hinf_norm_certified(res, grid_size, 1e-4);
  json j{{"nominal_cost", gsls::h2_cost(gss, response)},
         {"exact_stable", stab.exact},
         {"certified_stable", stab.certified},
         {"stability_margin", stab.margin},
         {"delta_hinf_lower", hinf.lower},
         {"delta_hinf_upper", hinf.upper},
         {"delta_l1",
          gsls::l1_induced_norm(gsls::residual_dense_lags(gss.gmd, res))}};
  if (stab.exact) j["achieved_cost"] = gsls::achieved_cost(gss, response, res);
  return j;
}

int cmd_gen(int n_nodes, int k_nearest, std::uint64_t seed,
            const std::string& out_path) {
  const gsls::Gmd gmd = gsls::generate_random_gmd(n_nodes, k_nearest, seed);
  const auto gss = gsls::generate_random_gss(gmd, seed + 1);
  const json j = gsls::to_json(gss);
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    gsls::save_json_file(out_path, j);
    std::cout << json{{"written", out_path},
                      {"gmd_hash", gmd.hash()},
                      {"diameter", gsls::graph_diameter(gmd)}}
                     .dump()
              << "\n";
  }
  return 0;
}

int cmd_synth(const std::string& system_path, const std::string& method_name,
              const gsls::SynthesisConfig& config,
              const std::string& out_path) {
  const auto method = gsls::method_from_name(method_name);
  if (!method) throw gsls::InvalidArg("unknown method: " + method_name);
  const auto gss = gsls::gss_from_json(gsls::load_json_file(system_path));
  config.validate();

  json out;
  std::optional<gsls::FilterResponse> response;
  if (*method == gsls::Method::naive) {
    const auto opt = gsls::optimal_responses(gss, config.fir_len);
    response = gsls::naive_projection(gss, opt.response, config.f_hops);
    out["status"] = "feasible";
    out["method"] = "naive";
  } else {
    gsls::SynthesisOutcome outcome;
    if (*method == gsls::Method::robust_sls) {
      outcome = gsls::robust_sls_synthesize(gss, config);
    } else {
      const auto opt = gsls::optimal_responses(gss, config.fir_len);
      outcome = gsls::robust_projection(gss, opt.response, config);
    }
    out = gsls::to_json(outcome);
    out["method"] = method_name;
    out.erase("response");
    if (outcome.status == gsls::SynthesisStatus::feasible)
      response = std::move(outcome.response);
  }
  if (response) {
    out["evaluation"] = evaluate_response_json(gss, *response,
                                               config.grid_size);
    if (!out_path.empty()) {
      gsls::save_json_file(out_path, gsls::to_json(*response));
      out["response_written"] = out_path;
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_eval(const std::string& system_path, const std::string& response_path,
             int grid_size) {
  const auto gss = gsls::gss_from_json(gsls::load_json_file(system_path));
  const auto response =
      gsls::response_from_json(gsls::load_json_file(response_path));
  if (!response.gmd_hash.empty() && response.gmd_hash != gss.gmd.hash())
    throw gsls::InvalidArg(
        "response was synthesized against a different system (gmd hash "
        "mismatch)");
  std::cout << evaluate_response_json(gss, response, grid_size).dump(2)
            << "\n";
  return 0;
}

int cmd_bench(const gsls::ExperimentConfig& config) {
  const auto result = gsls::run_benchmark(config, [](int done, int total) {
    std::cerr << "\rtrials " << done << "/" << total << std::flush;
    if (done == total) std::cerr << "\n";
  });
  gsls::write_benchmark_csvs(result, config.output_dir);
  int feasible = 0;
  for (const auto& row : result.trials)
    if (row.status == gsls::SynthesisStatus::feasible) ++feasible;
  std::cout << json{{"trials", result.trials.size()},
                    {"feasible_cells", feasible},
                    {"output_dir", config.output_dir}}
                   .dump(2)
            << "\n";
  return 0;
}

struct CheckTally {
  int failures = 0;
  void expect(bool ok, const std::string& what, int trial) {
    if (!ok) {
      ++failures;
      std::cerr << json{{"check_failed", what}, {"trial", trial}}.dump()
                << "\n";
    }
  }
};

int cmd_validate(int n_trials, std::uint64_t seed, int n_nodes,
                 int k_nearest) {
  CheckTally tally;
  for (int trial = 0; trial < n_trials; ++trial) {
    const std::uint64_t s = seed + 7919ull * trial;
    const gsls::Gmd gmd = gsls::generate_random_gmd(n_nodes, k_nearest, s);
    const auto gss = gsls::generate_random_gss(gmd, s ^ 0xa5a5a5a5ull);
    const int n = 12;
    const auto opt = gsls::optimal_responses(gss, n);

    // Every lag slice of the optimal response is graph symmetric.
    bool symmetric = true;
    for (int t = 0; t < n; ++t) {
      const auto sx = gsls::verify_graph_symmetric(
          gsls::eval_graph_filter(
              gmd, gsls::HopTapVector{opt.response.phi_x.col(t)}),
          gmd, 1e-8);
      symmetric = symmetric && sx.ok;
    }
    tally.expect(symmetric, "optimal response lag slices graph symmetric",
                 trial);

    // The per-mode residual recursion matches the dense identity.
    const auto res = gsls::residual(gss, opt.response);
    tally.expect(gsls::residual_dense_check(gss, opt.response, res) < 1e-8,
                 "residual recursion matches dense identity", trial);

    // Quadratic invariance of sampled graph-symmetric controllers.
    const auto qi = gsls::check_quadratic_invariance(gss, s + 17, 3, 8);
    tally.expect(qi.all_pass, "quadratic invariance lag slices", trial);

    // Distributed execution tracks the centralized simulation.
    const auto central =
        gsls::simulate_closed_loop(gss, opt.response, 100, s,
                                   gsls::NoiseKind::gaussian);
    const auto dist =
        gsls::run_distributed_controller(gss, opt.response, 100, s);
    tally.expect((central.states - dist.trajectory.states)
                         .cwiseAbs()
                         .maxCoeff() < 1e-9,
                 "distributed execution matches centralized", trial);

    // Replay: the logged trajectory obeys the plant dynamics.
    double replay_err = 0.0;
    for (int t = 0; t + 1 < central.states.rows(); ++t) {
      const Eigen::VectorXd next =
          gss.a * central.states.row(t).transpose() +
          gss.b * central.inputs.row(t).transpose() +
          central.disturbances.row(t).transpose();
      replay_err = std::max(
          replay_err,
          (central.states.row(t + 1).transpose() - next).cwiseAbs().maxCoeff());
    }
    tally.expect(replay_err < 1e-10, "trajectory replays plant dynamics",
                 trial);

    // Exact stability agrees with decaying impulse-response energy.
    const auto stab = gsls::is_stabilizing(res);
    const auto impulse = gsls::simulate_closed_loop(
        gss, opt.response, 2000, s, gsls::NoiseKind::impulse);
    const Eigen::VectorXd energy = impulse.states.rowwise().squaredNorm();
    const double total = energy.sum();
    const double tail = energy.tail(200).sum();
    tally.expect(stab.exact == (total > 0.0 && tail < 0.01 * total),
                 "exact stability matches impulse energy decay", trial);
  }

  // Empirical cost cross-check on one instance (slow, so only once).
  {
    const gsls::Gmd gmd = gsls::generate_random_gmd(n_nodes, k_nearest, seed);
    const auto gss = gsls::generate_random_gss(gmd, seed ^ 0xa5a5a5a5ull);
    const auto opt = gsls::optimal_responses(gss, 12);
    const auto res = gsls::residual(gss, opt.response);
    const double analytic = gsls::achieved_cost(gss, opt.response, res);
    const auto traj = gsls::simulate_closed_loop(gss, opt.response, 50000,
                                                 seed + 3,
                                                 gsls::NoiseKind::gaussian);
    tally.expect(std::abs(traj.empirical_cost - analytic) < 0.03 * analytic,
                 "empirical cost within 3% of analytic", 0);
  }

  std::cout << json{{"trials", n_trials}, {"failures", tally.failures}}.dump(2)
            << "\n";
  return tally.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed LQR synthesis for graph symmetric systems"};
  app.require_subcommand(1);

  std::string config_path;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random system instance");
  int gen_nodes = 10, gen_k = 3;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--nodes", gen_nodes, "Number of nodes");
  gen->add_option("--k", gen_k, "Nearest-neighbor count");
  gen->add_option("--seed", gen_seed, "Random seed")->required();
  gen->add_option("--out", gen_out, "Output path (stdout if omitted)");

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize one controller");
  std::string synth_system, synth_method = "robust_sls", synth_out,
              synth_norm = "hinf";
  gsls::SynthesisConfig sc;
  synth->add_option("--system", synth_system, "System JSON path")->required();
  synth->add_option("--method", synth_method,
                    "naive | robust_sls | robust_projection");
  synth->add_option("--hops", sc.f_hops, "Filter taps F");
  synth->add_option("--fir-len", sc.fir_len, "FIR horizon n");
  synth->add_option("--gamma", sc.gamma, "Residual norm cap");
  synth->add_option("--norm", synth_norm, "hinf | l1");
  synth->add_option("--grid", sc.grid_size, "Frequency grid size");
  synth->add_option("--margin", sc.constraint_margin, "Constraint margin");
  synth->add_option("--tol", sc.solver_tol, "Solver tolerance");
  synth->add_option("--max-iters", sc.max_iters, "Newton iteration cap");
  synth->add_flag("--bisect", sc.bisect_gamma, "Bisect over gamma");
  synth->add_option("--out", synth_out, "Write the response JSON here");
  synth->add_option("--config", config_path, "JSON config overriding flags");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a saved response");
  std::string eval_system, eval_response;
  int eval_grid = 1024;
  eval->add_option("--system", eval_system, "System JSON path")->required();
  eval->add_option("--response", eval_response, "Response JSON path")
      ->required();
  eval->add_option("--grid", eval_grid, "Frequency grid size");

  // bench
  auto* bench = app.add_subcommand("bench", "Run the benchmark sweep");
  gsls::ExperimentConfig bc;
  std::string bench_methods = "naive,robust_sls,robust_projection";
  bench->add_option("--seed", bc.seed, "Ensemble seed")->required();
  bench->add_option("--nodes", bc.n_nodes, "Number of nodes");
  bench->add_option("--k", bc.k_nearest, "Nearest-neighbor count");
  bench->add_option("--trials", bc.n_trials, "Number of trials");
  bench->add_option("--fir-len", bc.fir_len, "FIR horizon n");
  bench->add_option("--gamma", bc.gamma, "Residual norm cap");
  bench->add_option("--f-min", bc.f_min, "Smallest F");
  bench->add_option("--f-max", bc.f_max, "Largest F");
  bench->add_option("--methods", bench_methods, "Comma-separated methods");
  bench->add_option("--grid", bc.grid_size, "Frequency grid size");
  bench->add_option("--margin", bc.margin, "Constraint margin");
  bench->add_option("--out-dir", bc.output_dir, "CSV output directory");
  bench->add_option("--workers", bc.workers,
                    "Worker cap (0: GSLS_WORKERS or hardware)");
  bench->add_option("--config", config_path, "JSON config overriding flags");

  // validate
  auto* validate =
      app.add_subcommand("validate", "Run the property suite");
  int val_trials = 20, val_nodes = 10, val_k = 3;
  std::uint64_t val_seed = 1;
  validate->add_option("--trials", val_trials, "Number of random instances");
  validate->add_option("--seed", val_seed, "Random seed");
  validate->add_option("--nodes", val_nodes, "Number of nodes");
  validate->add_option("--k", val_k, "Nearest-neighbor count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_nodes, gen_k, gen_seed, gen_out);
    if (synth->parsed()) {
      const json cfg = load_config(config_path);
      override_from(cfg, "method", synth_method);
      override_from(cfg, "hops", sc.f_hops);
      override_from(cfg, "fir_len", sc.fir_len);
      override_from(cfg, "gamma", sc.gamma);
      override_from(cfg, "norm", synth_norm);
      override_from(cfg, "grid", sc.grid_size);
      override_from(cfg, "margin", sc.constraint_margin);
      override_from(cfg, "tol", sc.solver_tol);
      override_from(cfg, "max_iters", sc.max_iters);
      override_from(cfg, "bisect", sc.bisect_gamma);
      sc.norm_mode = parse_norm(synth_norm);
      return cmd_synth(synth_system, synth_method, sc, synth_out);
    }
    if (eval->parsed()) return cmd_eval(eval_system, eval_response, eval_grid);
    if (bench->parsed()) {
      const json cfg = load_config(config_path);
      override_from(cfg, "nodes", bc.n_nodes);
      override_from(cfg, "k", bc.k_nearest);
      override_from(cfg, "trials", bc.n_trials);
      override_from(cfg, "fir_len", bc.fir_len);
      override_from(cfg, "gamma", bc.gamma);
      override_from(cfg, "f_min", bc.f_min);
      override_from(cfg, "f_max", bc.f_max);
      override_from(cfg, "methods", bench_methods);
      override_from(cfg, "grid", bc.grid_size);
      override_from(cfg, "margin", bc.margin);
      override_from(cfg, "out_dir", bc.output_dir);
      override_from(cfg, "workers", bc.workers);
      bc.methods.clear();
      std::stringstream ss(bench_methods);
      std::string token;
      while (std::getline(ss, token, ',')) {
        const auto m = gsls::method_from_name(token);
        if (!m) throw gsls::InvalidArg("unknown method: " + token);
        bc.methods.push_back(*m);
      }
      return cmd_bench(bc);
    }
    if (validate->parsed())
      return cmd_validate(val_trials, val_seed, val_nodes, val_k);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", error_kind(e)}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  return 2;
}
