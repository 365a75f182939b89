#include "gsls/gmd.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cstring>
#include <deque>
#include <random>
#include <set>
#include <sstream>

#include "gsls/errors.hpp"

namespace gsls {

namespace {

// splitmix64; used to derive independent substreams from (seed, counter).
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double min_eig_gap(const Eigen::VectorXd& sorted_eigvals) {
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < sorted_eigvals.size(); ++i) {
    gap = std::min(gap, sorted_eigvals[i + 1] - sorted_eigvals[i]);
  }
  return gap;
}

}  // namespace

Gmd Gmd::from_matrix(const Eigen::MatrixXd& s,
                     std::vector<std::pair<int, int>> edges) {
  const int n = static_cast<int>(s.rows());
  if (n < 1 || s.cols() != n) throw InvalidArg("GMD matrix must be square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArg("GMD matrix must be symmetric");
  }
  std::set<std::pair<int, int>> edge_set;
  for (auto& [i, j] : edges) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
      throw InvalidArg("invalid edge");
    edge_set.emplace(std::min(i, j), std::max(i, j));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (s(i, j) != 0.0 && !edge_set.count({i, j}))
        throw InvalidArg("nonzero off-diagonal entry outside the edge set");
    }
  }

  Gmd g;
  g.n_nodes = n;
  g.s = s;
  g.edges.assign(edge_set.begin(), edge_set.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success)
    throw DegenerateGraph("eigendecomposition failed");
  g.eigvals = es.eigenvalues();
  g.eigvecs = es.eigenvectors();
  const double rho = g.eigvals.cwiseAbs().maxCoeff();
  if (min_eig_gap(g.eigvals) <= kDistinctnessTol * rho)
    throw DegenerateGraph("eigenvalues not distinct");
  return g;
}

bool Gmd::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

std::string Gmd::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  feed(&n_nodes, sizeof(n_nodes));
  feed(s.data(), sizeof(double) * static_cast<std::size_t>(s.size()));
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

Gmd generate_random_gmd(int n_nodes, int k_nearest, std::uint64_t seed) {
  if (n_nodes < 2) throw InvalidArg("n_nodes must be >= 2");
  if (k_nearest < 1 || k_nearest >= n_nodes)
    throw InvalidArg("k_nearest must be in [1, n_nodes)");

  constexpr int kMaxRetries = 100;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    std::mt19937_64 rng(mix64(seed + 0x51a5u * attempt));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::VectorXd u(n_nodes);
    for (int i = 0; i < n_nodes; ++i) u[i] = unif(rng);

    std::set<std::pair<int, int>> edge_set;
    for (int i = 0; i < n_nodes; ++i) {
      std::vector<int> order(n_nodes);
      for (int j = 0; j < n_nodes; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        double da = std::abs(u[a] - u[i]), db = std::abs(u[b] - u[i]);
        if (da != db) return da < db;
        return a < b;
      });
      int linked = 0;
      for (int j : order) {
        if (j == i) continue;
        edge_set.emplace(std::min(i, j), std::max(i, j));
        if (++linked == k_nearest) break;
      }
    }

    // Laplacian sparsity pattern: all edges plus the diagonal.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      for (int j = 0; j < n_nodes; ++j) {
        if (i == j || edge_set.count({std::min(i, j), std::max(i, j)}))
          m(i, j) = normal(rng);
      }
    }
    Eigen::MatrixXd s = 0.5 * (m + m.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) continue;
    const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
    if (rho <= 0) continue;
    Eigen::VectorXd lam = es.eigenvalues() / rho;
    if (min_eig_gap(lam) <= Gmd::kDistinctnessTol) continue;

    Gmd g;
    g.n_nodes = n_nodes;
    g.s = s / rho;
    g.edges.assign(edge_set.begin(), edge_set.end());
    g.eigvals = lam;
    g.eigvecs = es.eigenvectors();
    return g;
  }
  throw DegenerateGraph("no GMD with distinct eigenvalues after 100 retries");
}

int graph_diameter(const Gmd& gmd) {
  const int n = gmd.n_nodes;
  std::vector<std::vector<int>> adj(n);
  for (auto& [i, j] : gmd.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  int diameter = 0;
  for (int src = 0; src < n; ++src) {
    std::vector<int> dist(n, -1);
    std::deque<int> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    for (int d : dist) diameter = std::max(diameter, d);
  }
  return diameter;
}

Eigen::MatrixXd eval_graph_filter(const Gmd& gmd, const HopTapVector& taps) {
  const int f = taps.f_hops();
  if (f < 1) throw InvalidArg("taps must have at least one coefficient");
  if (f > gmd.n_nodes) throw InvalidArg("taps exceed N hops");
  // Horner: ((h_{F-1} S + h_{F-2} I) S + ...) + h_0 I
  Eigen::MatrixXd acc =
      taps.coeffs[f - 1] * Eigen::MatrixXd::Identity(gmd.n_nodes, gmd.n_nodes);
  for (int k = f - 2; k >= 0; --k) {
    acc = acc * gmd.s;
    acc.diagonal().array() += taps.coeffs[k];
  }
  return acc;
}

HopTapVector spectral_to_taps(const Gmd& gmd,
                              const Eigen::VectorXd& per_mode_values) {
  const int n = gmd.n_nodes;
  if (per_mode_values.size() != n)
    throw InvalidArg("per_mode_values size mismatch");
  Eigen::MatrixXd vand(n, n);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) {
      vand(i, k) = p;
      p *= gmd.eigvals[i];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vand,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()(n - 1);
  const double cond =
      smin > 0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
  if (cond > 1e12) {
    std::ostringstream os;
    os << "Vandermonde condition number " << cond << " exceeds 1e12";
    throw IllConditioned(os.str());
  }
  HopTapVector taps;
  taps.coeffs = vand.colPivHouseholderQr().solve(per_mode_values);
  return taps;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> vandermonde_projection_matrices(
    const Eigen::VectorXd& eigvals, int f_hops) {
  const int n = static_cast<int>(eigvals.size());
  if (f_hops < 1 || f_hops >= n) throw InvalidArg("need 1 <= F < N");
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(f_hops, f_hops);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(f_hops, n - f_hops);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd powers(n);
    double p = 1.0;
    for (int k = 0; k < n; ++k) {
      powers[k] = p;
      p *= eigvals[i];
    }
    gram += powers.head(f_hops) * powers.head(f_hops).transpose();
    cross += powers.head(f_hops) * powers.tail(n - f_hops).transpose();
  }
  return {gram, cross};
}

}  // namespace gsls
