#pragma once

// Spring-network model of a flexible object carried by n robots along one
// axis. Units throughout: cm, N, s, N/cm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cohesive/jacobi.hpp"

namespace cohesive {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Undirected stiffness link between two robots (0-based indices).
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double stiffness = 0.0;  // N/cm

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Robots connected in a line: robot i is linked to robot i+1.
class StiffnessChain {
 public:
  /// neighbor.size() + 1 robots; leader.size() must match that count.
  StiffnessChain(std::vector<double> neighbor, std::vector<double> leader)
      : neighbor_(std::move(neighbor)), leader_(std::move(leader)) {
    if (leader_.empty()) throw ModelError("chain needs at least one robot");
    if (leader_.size() != neighbor_.size() + 1) {
      throw ModelError("chain of " + std::to_string(leader_.size()) +
                       " robots needs " + std::to_string(leader_.size() - 1) +
                       " neighbor stiffnesses, got " +
                       std::to_string(neighbor_.size()));
    }
    for (std::size_t i = 0; i < neighbor_.size(); ++i) {
      if (!(neighbor_[i] > 0.0) || !std::isfinite(neighbor_[i])) {
        throw ModelError("neighbor stiffness " + std::to_string(i + 1) +
                         " must be positive");
      }
    }
    for (std::size_t i = 0; i < leader_.size(); ++i) {
      if (!(leader_[i] >= 0.0) || !std::isfinite(leader_[i])) {
        throw ModelError("leader stiffness " + std::to_string(i + 1) +
                         " must be non-negative");
      }
    }
  }

  std::size_t size() const { return leader_.size(); }
  const std::vector<double>& neighbor_stiffness() const { return neighbor_; }
  const std::vector<double>& leader_stiffness() const { return leader_; }

  StiffnessChain with_leader_stiffness(std::size_t robot, double value) const {
    auto leader = leader_;
    leader.at(robot) = value;
    return {neighbor_, std::move(leader)};
  }

  friend bool operator==(const StiffnessChain&, const StiffnessChain&) = default;

 private:
  std::vector<double> neighbor_;
  std::vector<double> leader_;
};

/// General undirected stiffness graph with virtual-source pinning.
class StiffnessNetwork {
 public:
  StiffnessNetwork(std::size_t robots, std::vector<Edge> edges,
                   std::vector<double> leader)
      : edges_(std::move(edges)),
        leader_(std::move(leader)),
        coupling_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(robots),
                                        static_cast<Eigen::Index>(robots))) {
    if (robots == 0) throw ModelError("network needs at least one robot");
    if (leader_.size() != robots) {
      throw ModelError("leader stiffness list has " +
                       std::to_string(leader_.size()) + " entries for " +
                       std::to_string(robots) + " robots");
    }
    for (const auto& e : edges_) {
      if (e.a >= robots || e.b >= robots) {
        throw ModelError("edge references robot outside 1.." +
                         std::to_string(robots));
      }
      if (e.a == e.b) throw ModelError("self-loop edge on robot " + std::to_string(e.a + 1));
      if (!(e.stiffness > 0.0) || !std::isfinite(e.stiffness)) {
        throw ModelError("edge stiffness must be positive");
      }
      const auto i = static_cast<Eigen::Index>(e.a);
      const auto j = static_cast<Eigen::Index>(e.b);
      if (coupling_(i, j) != 0.0) {
        throw ModelError("duplicate edge " + std::to_string(e.a + 1) + "-" +
                         std::to_string(e.b + 1));
      }
      coupling_(i, j) = e.stiffness;
      coupling_(j, i) = e.stiffness;
    }
    for (std::size_t i = 0; i < leader_.size(); ++i) {
      if (!(leader_[i] >= 0.0) || !std::isfinite(leader_[i])) {
        throw ModelError("leader stiffness " + std::to_string(i + 1) +
                         " must be non-negative");
      }
    }
  }

  explicit StiffnessNetwork(const StiffnessChain& chain)
      : StiffnessNetwork(chain.size(), chain_edges(chain), chain.leader_stiffness()) {}

  std::size_t size() const { return leader_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& leader_stiffness() const { return leader_; }
  double leader_stiffness(std::size_t robot) const { return leader_.at(robot); }
  bool is_leader(std::size_t robot) const { return leader_.at(robot) > 0.0; }

  /// k_{i,j}; zero when i and j are not linked.
  double stiffness(std::size_t i, std::size_t j) const {
    return coupling_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& coupling() const { return coupling_; }

  /// True when the links are exactly (i, i+1) for every i, in any order.
  bool is_chain() const {
    if (edges_.size() + 1 != size()) return false;
    for (std::size_t i = 0; i + 1 < size(); ++i) {
      if (stiffness(i, i + 1) == 0.0) return false;
    }
    return true;
  }

  StiffnessChain as_chain() const {
    if (!is_chain()) throw ModelError("network is not a chain");
    std::vector<double> neighbor;
    neighbor.reserve(edges_.size());
    for (std::size_t i = 0; i + 1 < size(); ++i) neighbor.push_back(stiffness(i, i + 1));
    return {std::move(neighbor), leader_};
  }

  /// Same links and leaders; edge order does not matter.
  friend bool operator==(const StiffnessNetwork& l, const StiffnessNetwork& r) {
    return l.coupling_ == r.coupling_ && l.leader_ == r.leader_;
  }

 private:
  static std::vector<Edge> chain_edges(const StiffnessChain& chain) {
    std::vector<Edge> edges;
    const auto& k = chain.neighbor_stiffness();
    for (std::size_t i = 0; i < k.size(); ++i) edges.push_back({i, i + 1, k[i]});
    return edges;
  }

  std::vector<Edge> edges_;
  std::vector<double> leader_;
  Eigen::MatrixXd coupling_;
};

/// Pinned Laplacian K, leader vector B and the eigendecomposition of K.
class PinnedLaplacian {
 public:
  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& leader_vector() const { return leader_; }
  const Eigen::VectorXd& eigenvalues() const { return eigen_.values; }
  const Eigen::MatrixXd& eigenvectors() const { return eigen_.vectors; }
  double lambda_min() const { return eigen_.values(0); }
  double lambda_max() const { return eigen_.values(eigen_.values.size() - 1); }

 private:
  friend PinnedLaplacian build_pinned_laplacian(const StiffnessNetwork&, std::size_t);

  Eigen::MatrixXd matrix_;
  Eigen::VectorXd leader_;
  EigenDecomposition eigen_;
};

/// K[k][k] = k_{k,d} + sum_j k_{k,j}, K[k][j] = -k_{k,j}; B_k = k_{k,d}.
inline PinnedLaplacian build_pinned_laplacian(
    const StiffnessNetwork& network,
    std::size_t size_cap = kDefaultEigenSizeCap) {
  const auto& leader = network.leader_stiffness();
  if (std::none_of(leader.begin(), leader.end(), [](double k) { return k > 0.0; })) {
    throw ModelError("unpinned network: no robot has a virtual-source stiffness");
  }
  const auto n = static_cast<Eigen::Index>(network.size());
  PinnedLaplacian out;
  out.matrix_ = -network.coupling();
  out.leader_ = Eigen::VectorXd(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double kd = leader[static_cast<std::size_t>(k)];
    out.leader_(k) = kd;
    out.matrix_(k, k) = kd + network.coupling().row(k).sum();
  }
  out.eigen_ = eigen_decompose(out.matrix_, size_cap);
  const auto& lambda = out.eigen_.values;
  if (lambda(0) <= 1e-12 * lambda(lambda.size() - 1)) {
    // Happens when a connected component has no leader.
    throw ModelError("unpinned network: pinned Laplacian is singular");
  }
  return out;
}

inline PinnedLaplacian build_pinned_laplacian(
    const StiffnessChain& chain, std::size_t size_cap = kDefaultEigenSizeCap) {
  return build_pinned_laplacian(StiffnessNetwork(chain), size_cap);
}

/// Force the object exerts on one robot: f_k = sum_j k_{k,j} (y_k - y_j).
/// The virtual-source term is not included.
inline double measured_force(const StiffnessNetwork& network,
                             std::span<const double> positions,
                             std::size_t robot) {
  if (positions.size() != network.size()) {
    throw ModelError("position vector size does not match robot count");
  }
  if (robot >= network.size()) throw ModelError("robot index out of range");
  double f = 0.0;
  for (std::size_t j = 0; j < network.size(); ++j) {
    const double k = network.stiffness(robot, j);
    if (k != 0.0) f += k * (positions[robot] - positions[j]);
  }
  return f;
}

inline double measured_force(const StiffnessNetwork& network,
                             const Eigen::VectorXd& positions, std::size_t robot) {
  return measured_force(network,
                        std::span<const double>(positions.data(),
                                                static_cast<std::size_t>(positions.size())),
                        robot);
}

/// All neighbor forces at once, accumulated edge by edge.
inline Eigen::VectorXd neighbor_forces(const StiffnessNetwork& network,
                                       const Eigen::VectorXd& positions) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(positions.size());
  for (const auto& e : network.edges()) {
    const auto a = static_cast<Eigen::Index>(e.a);
    const auto b = static_cast<Eigen::Index>(e.b);
    const double stretch = e.stiffness * (positions(a) - positions(b));
    f(a) += stretch;
    f(b) -= stretch;
  }
  return f;
}

/// One static push: `robot` displaced by `displacement` cm, all others held,
/// no virtual source, object force `measured_force` N read at that robot.
struct CalibrationRecord {
  std::size_t robot = 0;
  double displacement = 0.0;
  double measured_force = 0.0;
};

/// Recovers chain stiffnesses from pushes made in chain order:
/// k_{1,2} = f_1/y_1, then k_{i,i+1} = f_i/y_i - k_{i-1,i}.
/// Leader stiffnesses of the returned chain are zero; pin it with
/// StiffnessChain::with_leader_stiffness.
inline StiffnessChain calibrate_stiffness(std::span<const CalibrationRecord> records) {
  if (records.empty()) throw ModelError("calibration needs at least one record");
  std::vector<double> stiffness;
  stiffness.reserve(records.size());
  double previous = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.robot != i) {
      throw ModelError("calibration record " + std::to_string(i + 1) +
                       " must move robot " + std::to_string(i + 1));
    }
    if (r.displacement == 0.0 || !std::isfinite(r.displacement)) {
      throw ModelError("calibration record " + std::to_string(i + 1) +
                       " has zero displacement");
    }
    const double k = r.measured_force / r.displacement - previous;
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw ModelError("inconsistent calibration data: stiffness " +
                       std::to_string(i + 1) + "-" + std::to_string(i + 2) +
                       " recovered as " + std::to_string(k));
    }
    stiffness.push_back(k);
    previous = k;
  }
  std::vector<double> leader(stiffness.size() + 1, 0.0);
  return {std::move(stiffness), std::move(leader)};
}

inline StiffnessChain calibrate_stiffness(const std::vector<CalibrationRecord>& records) {
  return calibrate_stiffness(std::span<const CalibrationRecord>(records));
}

}  // namespace cohesive
