#include "gsls/serialization.hpp"

#include <fstream>
#include <ostream>

#include "gsls/errors.hpp"

namespace gsls {

namespace {

using nlohmann::json;

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_rows(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw InvalidArg(std::string(what) + ": expected an array of rows");
  const auto rows = static_cast<int>(j.size());
  const auto cols = static_cast<int>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw InvalidArg(std::string(what) + ": ragged rows");
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArg(std::string(what) + ": expected array");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

nlohmann::json to_json(const Gmd& gmd) {
  json edges = json::array();
  for (const auto& [i, j] : gmd.edges) edges.push_back(json::array({i, j}));
  json flat = json::array();
  for (int i = 0; i < gmd.n_nodes; ++i)
    for (int j = 0; j < gmd.n_nodes; ++j) flat.push_back(gmd.s(i, j));
  return json{{"n", gmd.n_nodes}, {"edges", std::move(edges)},
              {"s", std::move(flat)}};
}

Gmd gmd_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const auto& flat = j.at("s");
  if (!flat.is_array() || static_cast<int>(flat.size()) != n * n)
    throw InvalidArg("gmd: \"s\" must hold n*n row-major entries");
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c) s(i, c) = flat[i * n + c].get<double>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw InvalidArg("gmd: bad edge");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return Gmd::from_matrix(s, std::move(edges));
}

nlohmann::json to_json(const GraphSymmetricSystem& gss) {
  auto vec = [](const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
  };
  return json{{"gmd", to_json(gss.gmd)},
              {"lam_a", vec(gss.lam_a)},
              {"lam_b", vec(gss.lam_b)},
              {"lam_q", vec(gss.lam_q)},
              {"lam_r", vec(gss.lam_r)}};
}

GraphSymmetricSystem gss_from_json(const nlohmann::json& j) {
  return GraphSymmetricSystem::from_spectra(
      gmd_from_json(j.at("gmd")), vector_from(j.at("lam_a"), "lam_a"),
      vector_from(j.at("lam_b"), "lam_b"), vector_from(j.at("lam_q"), "lam_q"),
      vector_from(j.at("lam_r"), "lam_r"));
}

nlohmann::json to_json(const FilterResponse& response) {
  return json{{"F", response.f_hops},
              {"n", response.fir_len},
              {"phi_x", matrix_rows(response.phi_x)},
              {"phi_u", matrix_rows(response.phi_u)},
              {"gmd_hash", response.gmd_hash}};
}

FilterResponse response_from_json(const nlohmann::json& j) {
  FilterResponse response;
  response.f_hops = j.at("F").get<int>();
  response.fir_len = j.at("n").get<int>();
  response.phi_x = matrix_from_rows(j.at("phi_x"), "phi_x");
  response.phi_u = matrix_from_rows(j.at("phi_u"), "phi_u");
  response.gmd_hash = j.value("gmd_hash", std::string());
  if (response.phi_x.rows() != response.f_hops ||
      response.phi_x.cols() != response.fir_len ||
      response.phi_u.rows() != response.f_hops ||
      response.phi_u.cols() != response.fir_len)
    throw InvalidArg("response: tap matrices do not match F x n");
  return response;
}

std::string status_name(SynthesisStatus status) {
  switch (status) {
    case SynthesisStatus::feasible:
      return "feasible";
    case SynthesisStatus::infeasible:
      return "infeasible";
    case SynthesisStatus::solver_failure:
      return "solver_failure";
  }
  return "unknown";
}

nlohmann::json to_json(const SynthesisOutcome& outcome) {
  json j{{"status", status_name(outcome.status)},
         {"certified_gamma", outcome.certified_gamma},
         {"objective_value", outcome.objective_value},
         {"diagnostics",
          {{"newton_iters", outcome.diagnostics.newton_iters},
           {"phase1_iters", outcome.diagnostics.phase1_iters},
           {"duality_gap", outcome.diagnostics.duality_gap},
           {"post_norm_lower", outcome.diagnostics.post_norm_lower},
           {"max_constraint_violation",
            outcome.diagnostics.max_constraint_violation},
           {"note", outcome.diagnostics.note}}}};
  if (outcome.response) j["response"] = to_json(*outcome.response);
  return j;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,node,x,u,w\n";
  for (int t = 0; t < trajectory.states.rows(); ++t)
    for (int i = 0; i < trajectory.states.cols(); ++i)
      out << t << ',' << i << ',' << trajectory.states(t, i) << ','
          << trajectory.inputs(t, i) << ',' << trajectory.disturbances(t, i)
          << '\n';
}

void write_residual_csv(std::ostream& out, const Residual& residual) {
  out << "mode,tau,value\n";
  for (int i = 0; i < residual.delta.rows(); ++i)
    for (int tau = 0; tau < residual.delta.cols(); ++tau)
      out << i << ',' << tau << ',' << residual.delta(i, tau) << '\n';
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArg("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArg("failed to parse " + path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArg("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw InvalidArg("failed writing " + path);
}

}  // namespace gsls
