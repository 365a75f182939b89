#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gsls {

// Coefficients of a matrix polynomial in the shift operator S,
// h_0 I + h_1 S + ... + h_{F-1} S^{F-1}.
struct HopTapVector {
  Eigen::VectorXd coeffs;

  int f_hops() const { return static_cast<int>(coeffs.size()); }
};

// Graph matrix description: a symmetric shift operator S sharing the
// Laplacian sparsity pattern of an undirected graph, normalized to unit
// spectral radius, together with its orthonormal eigendecomposition.
struct Gmd {
  int n_nodes = 0;
  Eigen::MatrixXd s;
  std::vector<std::pair<int, int>> edges;  // unordered pairs, i < j, sorted
  Eigen::MatrixXd eigvecs;                 // columns v_i, orthonormal
  Eigen::VectorXd eigvals;                 // sorted ascending

  // Minimum pairwise eigenvalue gap required for the Vandermonde machinery.
  static constexpr double kDistinctnessTol = 1e-6;

  // Builds the eigendecomposition and validates symmetry, the sparsity
  // pattern and eigenvalue distinctness. Throws InvalidArg / DegenerateGraph.
  static Gmd from_matrix(const Eigen::MatrixXd& s,
                         std::vector<std::pair<int, int>> edges);

  bool has_edge(int i, int j) const;

  // FNV-1a over n_nodes and the raw entries of s; identifies the instance
  // a FilterResponse was synthesized against.
  std::string hash() const;
};

// Random instance generation following the benchmark protocol: N points on
// [0,1], links to the k nearest, N(0,1) values symmetrized on the Laplacian
// pattern, spectral radius normalized to 1. Retries (fresh substream) when
// the eigenvalues are not distinct.
Gmd generate_random_gmd(int n_nodes, int k_nearest, std::uint64_t seed);

// Largest hop-count shortest path; pairs in different components are skipped.
int graph_diameter(const Gmd& gmd);

// Horner evaluation of sum_k h_k S^k.
Eigen::MatrixXd eval_graph_filter(const Gmd& gmd, const HopTapVector& taps);

// Inverts the spectral map: finds taps h with sum_k h_k lambda_i^k = value_i
// for every mode, via QR on the N x N Vandermonde matrix.
HopTapVector spectral_to_taps(const Gmd& gmd,
                              const Eigen::VectorXd& per_mode_values);

// Gram and cross moment matrices of the Vandermonde rows, split at hop F:
// gram = sum_i l_iF l_iF^T (F x F), cross = sum_i l_iF l_i(N-F)^T.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> vandermonde_projection_matrices(
    const Eigen::VectorXd& eigvals, int f_hops);

}  // namespace gsls
