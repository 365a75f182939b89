#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "gsls/simulate.hpp"
#include "gsls/sls.hpp"
#include "gsls/synthesis.hpp"

namespace gsls {

// JSON schemas:
//   Gmd:            {"n": int, "edges": [[i,j],...], "s": row-major array}
//   GSS:            {"gmd": <Gmd>, "lam_a": [...], "lam_b": [...],
//                    "lam_q": [...], "lam_r": [...]}
//   FilterResponse: {"F": int, "n": int, "phi_x": [[...]], "phi_u": [[...]],
//                    "gmd_hash": string}
// The eigendecomposition and the dense system caches are never serialized;
// they are rebuilt (and re-validated) on load.
nlohmann::json to_json(const Gmd& gmd);
Gmd gmd_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GraphSymmetricSystem& gss);
GraphSymmetricSystem gss_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FilterResponse& response);
FilterResponse response_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SynthesisOutcome& outcome);

std::string status_name(SynthesisStatus status);

// CSV export, columns: t, node, x, u, w.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

// Residual debug dump, columns: mode, tau, value.
void write_residual_csv(std::ostream& out, const Residual& residual);

// File helpers; throw InvalidArg on I/O or parse failure.
nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace gsls
