#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gsls/errors.hpp"
#include "gsls/gmd.hpp"

using namespace gsls;

namespace {

Gmd two_node_path() {
  Eigen::MatrixXd s(2, 2);
  s << 0.0, 1.0, 1.0, 0.0;
  return Gmd::from_matrix(s, {{0, 1}});
}

}  // namespace

TEST_CASE("random gmd has unit spectral radius and the declared shape") {
  const Gmd g = generate_random_gmd(10, 3, 17);
  CHECK(g.n_nodes == 10);
  CHECK(g.eigvals.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  // Orthonormal eigenbasis.
  const Eigen::MatrixXd vtv = g.eigvecs.transpose() * g.eigvecs;
  CHECK((vtv - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <
        1e-12);
  // Reconstruction.
  const Eigen::MatrixXd recon =
      g.eigvecs * g.eigvals.asDiagonal() * g.eigvecs.transpose();
  CHECK((recon - g.s).cwiseAbs().maxCoeff() < 1e-12);
  // Sparsity honors the edge set.
  for (int i = 0; i < 10; ++i) {
    for (int j = i + 1; j < 10; ++j) {
      if (!g.has_edge(i, j)) CHECK(g.s(i, j) == 0.0);
    }
  }
}

TEST_CASE("smallest valid graph") {
  const Gmd g = generate_random_gmd(2, 1, 3);
  CHECK(g.n_nodes == 2);
  CHECK(g.edges.size() == 1);
  CHECK(g.s(0, 1) != 0.0);
  CHECK(g.s(0, 1) == g.s(1, 0));
}

TEST_CASE("gmd generation is deterministic in the seed") {
  const Gmd a = generate_random_gmd(10, 3, 99);
  const Gmd b = generate_random_gmd(10, 3, 99);
  CHECK(a.s == b.s);
  CHECK(a.hash() == b.hash());
  const Gmd c = generate_random_gmd(10, 3, 100);
  CHECK(a.hash() != c.hash());
}

TEST_CASE("gmd generation rejects bad arguments") {
  CHECK_THROWS_AS(generate_random_gmd(1, 1, 0), InvalidArg);
  CHECK_THROWS_AS(generate_random_gmd(10, 0, 0), InvalidArg);
  CHECK_THROWS_AS(generate_random_gmd(10, 10, 0), InvalidArg);
}

TEST_CASE("from_matrix validates symmetry, sparsity and distinctness") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.0, 1.0, 0.5, 0.0;
  CHECK_THROWS_AS(Gmd::from_matrix(bad, {{0, 1}}), InvalidArg);

  Eigen::MatrixXd offpattern(2, 2);
  offpattern << 0.0, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(Gmd::from_matrix(offpattern, {}), InvalidArg);

  // Repeated eigenvalues: the identity.
  CHECK_THROWS_AS(Gmd::from_matrix(Eigen::MatrixXd::Identity(3, 3), {}),
                  DegenerateGraph);
}

TEST_CASE("eval_graph_filter basics") {
  const Gmd g = generate_random_gmd(4, 2, 5);
  const int n = g.n_nodes;

  HopTapVector ident;
  ident.coeffs = Eigen::VectorXd::Ones(1);
  CHECK((eval_graph_filter(g, ident) - Eigen::MatrixXd::Identity(n, n))
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  HopTapVector shift;
  shift.coeffs = Eigen::VectorXd::Zero(2);
  shift.coeffs[1] = 1.0;
  CHECK((eval_graph_filter(g, shift) - g.s).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("eval_graph_filter matches spectral evaluation") {
  const Gmd g = generate_random_gmd(4, 2, 21);
  HopTapVector taps;
  taps.coeffs = Eigen::VectorXd(3);
  taps.coeffs << 1.0, 2.0, 3.0;
  Eigen::VectorXd diag(4);
  for (int i = 0; i < 4; ++i) {
    const double lam = g.eigvals[i];
    diag[i] = 1.0 + 2.0 * lam + 3.0 * lam * lam;
  }
  const Eigen::MatrixXd oracle =
      g.eigvecs * diag.asDiagonal() * g.eigvecs.transpose();
  CHECK((eval_graph_filter(g, taps) - oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectral_to_taps inverts the spectral map") {
  const Gmd g = generate_random_gmd(4, 2, 8);

  const HopTapVector constant =
      spectral_to_taps(g, Eigen::VectorXd::Ones(4));
  CHECK(constant.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(constant.coeffs.tail(3).cwiseAbs().maxCoeff() < 1e-9);

  const HopTapVector shift = spectral_to_taps(g, g.eigvals);
  CHECK(shift.coeffs[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(shift.coeffs[0]) < 1e-9);
  CHECK(shift.coeffs.tail(2).cwiseAbs().maxCoeff() < 1e-9);

  // Round trip on random values.
  Eigen::VectorXd values(4);
  values << 0.3, -1.2, 0.7, 2.1;
  const HopTapVector taps = spectral_to_taps(g, values);
  const Eigen::MatrixXd filt = eval_graph_filter(g, taps);
  const Eigen::VectorXd recovered =
      (g.eigvecs.transpose() * filt * g.eigvecs).diagonal();
  CHECK((recovered - values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("vandermonde projection moment matrices") {
  Eigen::VectorXd pm(2);
  pm << 1.0, -1.0;
  auto [gram_pm, cross_pm] = vandermonde_projection_matrices(pm, 1);
  CHECK(gram_pm(0, 0) == doctest::Approx(2.0));
  CHECK(cross_pm(0, 0) == doctest::Approx(0.0));

  Eigen::VectorXd zo(2);
  zo << 0.0, 1.0;
  auto [gram_zo, cross_zo] = vandermonde_projection_matrices(zo, 1);
  CHECK(gram_zo(0, 0) == doctest::Approx(2.0));
  CHECK(cross_zo(0, 0) == doctest::Approx(1.0));

  // F = N-1: the single cross column is sum_i lam_i^{N-1} * powers.
  const Gmd g = generate_random_gmd(4, 2, 2);
  auto [gram, cross] = vandermonde_projection_matrices(g.eigvals, 3);
  CHECK(cross.cols() == 1);
  Eigen::VectorXd col = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < 4; ++i) {
    const double lam = g.eigvals[i];
    const double tail = lam * lam * lam;
    Eigen::VectorXd powers(3);
    powers << 1.0, lam, lam * lam;
    col += tail * powers;
  }
  CHECK((cross.col(0) - col).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((gram - gram.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("graph diameter of a path") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 4);
  std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}};
  double v = 0.4;
  for (auto& [i, j] : edges) {
    s(i, j) = s(j, i) = (v += 0.13);
  }
  s.diagonal() << 0.05, -0.1, 0.15, -0.2;
  const Gmd g = Gmd::from_matrix(s, edges);
  CHECK(graph_diameter(g) == 3);
  CHECK(graph_diameter(two_node_path()) == 1);
}
