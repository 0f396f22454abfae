/**
 * @file network.hpp
 * @brief Tree-shaped 1D tube networks: geometry, refinement, orientation and
 *        the finite-difference helpers (radius slopes, 2-paths) built on them.
 *
 * Nodes are addressed by dense indices 0..N-1 in the order they were given;
 * the user-facing integer ids from the geometry document are kept alongside.
 * The axial direction x points away from the root, so "left" means the
 * neighbour toward the root and "right" means any child.
 */
#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fjnet {

/// Raised for malformed geometry documents and mesh-invariant violations.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node {
  int id = 0;
  std::array<double, 3> position{0.0, 0.0, 0.0};
  double radius = 1.0;
};

struct Edge {
  int a = 0;  ///< node id
  int b = 0;  ///< node id
  /// Edge length; when absent the Euclidean distance between the endpoints is used.
  std::optional<double> length;
};

/// Neighbour of a node: dense index plus the length of the connecting edge.
struct Link {
  int node = 0;
  double length = 0.0;
};

enum class Side { TowardRoot, AwayFromRoot };

/// Root-based orientation of a tree. Index-based.
struct Orientation {
  std::vector<int> parent;                 ///< -1 for the root
  std::vector<double> parent_length;       ///< 0 for the root
  std::vector<std::vector<int>> children;  ///< away-from-root neighbours
  std::vector<double> arc_length;          ///< distance from the root along the tree
};

/**
 * Immutable, validated tree network. Construction checks connectivity,
 * acyclicity, positive radii and edge lengths, and that the root is a leaf.
 */
class NetworkMesh {
 public:
  NetworkMesh(std::vector<Node> nodes, std::vector<Edge> edges, int root_id);

  std::size_t size() const { return nodes_.size(); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  const Node& node(int index) const { return nodes_.at(static_cast<std::size_t>(index)); }
  double radius(int index) const { return node(index).radius; }
  double x(int index) const { return node(index).position[0]; }

  int root() const { return root_; }  ///< dense index of the root
  int root_id() const { return nodes_[static_cast<std::size_t>(root_)].id; }
  int index_of(int id) const;
  bool has_id(int id) const { return index_.contains(id); }

  /// Resolved length of edge e (explicit value or Euclidean distance).
  double edge_length(std::size_t e) const { return lengths_.at(e); }
  double total_length() const;

  std::span<const Link> neighbors(int index) const { return adjacency_.at(static_cast<std::size_t>(index)); }
  std::size_t degree(int index) const { return neighbors(index).size(); }
  bool is_leaf(int index) const { return degree(index) == 1; }
  std::size_t max_degree() const;

  /// Leaves in index order; the root is always among them.
  std::vector<int> leaves() const;

  const Orientation& orientation() const { return orientation_; }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<double> lengths_;
  std::vector<std::vector<Link>> adjacency_;
  std::unordered_map<int, int> index_;
  int root_ = 0;
  Orientation orientation_;
};

/// Parse the line-oriented geometry document (`node`, `edge`, `root`, `#` comments).
NetworkMesh load_mesh(std::string_view text);
NetworkMesh load_mesh_file(const std::string& path);

/// Emit the geometry grammar; shortest round-trip decimal formatting.
std::string save_mesh(const NetworkMesh& mesh);

/// Bisect every edge `levels` times. New nodes take fresh ids above the
/// current maximum and the linear interpolant of the endpoint radii.
NetworkMesh refine(const NetworkMesh& mesh, int levels);

/// Orientation labelling (computed once at construction).
const Orientation& orient(const NetworkMesh& mesh);

/// Straight cable on [x0, x1] with n nodes, radii taken from `radius_at`, rooted at x0.
template <class RadiusFn>
NetworkMesh make_cable(double x0, double x1, int n, RadiusFn&& radius_at);

// ---------------------------------------------------------------------------
// Radius profiles

struct Tabulated {};
struct Cone {
  double lambda = 0.0;
};
struct Sinusoid {
  double gamma = 1.0;
};

/// Cross-sectional radius: per-node table or one of the analytic shapes.
class RadiusProfile {
 public:
  using Kind = std::variant<Tabulated, Cone, Sinusoid>;

  RadiusProfile() = default;
  explicit RadiusProfile(Kind kind) : kind_(kind) {}

  const Kind& kind() const { return kind_; }
  bool is_analytic() const { return !std::holds_alternative<Tabulated>(kind_); }

  /// Closed-form R(x); throws for Tabulated.
  double radius(double x) const;
  /// Closed-form dR/dx; throws for Tabulated.
  double derivative(double x) const;

 private:
  Kind kind_{Tabulated{}};
};

/// Walk origin -> first -> second along two consecutive edges.
struct TwoPath {
  int origin = 0;
  int first = 0;
  int second = 0;
  double dx1 = 0.0;
  double dx2 = 0.0;
};

/// Weights of the second-order one-sided derivative along a 2-path:
/// f'(origin) ~ w0 f0 + w1 f1 + w2 f2, measured in the path direction.
struct PathWeights {
  double w0, w1, w2;
};
PathWeights path_weights(double dx1, double dx2);

/// All walks of length two from `node` whose first step lies on `side`.
/// The second step may go to any neighbour of the intermediate node except the origin.
std::vector<TwoPath> two_paths(const NetworkMesh& mesh, int node, Side side);

struct PathUpwind {
  TwoPath path;
};
struct Central {};
struct OneSided {};
struct Analytic {};
using DerivativeMode = std::variant<Central, PathUpwind, OneSided, Analytic>;

struct DerivativeResult {
  double value = 0.0;
  bool fallback = false;  ///< central requested at a leaf; one-sided used instead
};

/**
 * dR/dx at a node.
 *  - Central: (mean radius of children - parent radius) / (parent edge + mean child edge).
 *  - PathUpwind: second-order one-sided stencil along the supplied path; the
 *    result is the slope in the path direction.
 *  - OneSided: inward second-order stencil at a leaf, expressed along +x.
 *  - Analytic: closed-form derivative of an analytic profile at the node's x.
 */
DerivativeResult radius_derivative(const NetworkMesh& mesh, const RadiusProfile& profile, int node,
                                   const DerivativeMode& mode);

/// Central/one-sided dR/dx at every node (the slope used for wind and coefficients).
std::vector<double> node_radius_slopes(const NetworkMesh& mesh);

/// Same differencing rules as radius_derivative, applied to an arbitrary nodal field.
double central_derivative(const NetworkMesh& mesh, std::span<const double> values, int node);
double one_sided_derivative(const NetworkMesh& mesh, std::span<const double> values, int leaf);
/// Derivative of a nodal field at every node (central inside, one-sided at leaves), along +x.
std::vector<double> nodal_derivative(const NetworkMesh& mesh, std::span<const double> values);

/// Mean length of the edges incident to a node.
double mean_incident_length(const NetworkMesh& mesh, int node);

// ---------------------------------------------------------------------------

template <class RadiusFn>
NetworkMesh make_cable(double x0, double x1, int n, RadiusFn&& radius_at) {
  if (n < 2) throw MeshError("cable needs at least two nodes");
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  const double h = (x1 - x0) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = (i == n - 1) ? x1 : x0 + h * static_cast<double>(i);
    nodes.push_back({i, {x, 0.0, 0.0}, radius_at(x)});
    if (i > 0) edges.push_back({i - 1, i, std::nullopt});
  }
  return NetworkMesh(std::move(nodes), std::move(edges), 0);
}

}  // namespace fjnet
