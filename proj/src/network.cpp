#include "fjnet/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace fjnet {

namespace {

double euclidean(const Node& p, const Node& q) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = p.position[static_cast<std::size_t>(k)] - q.position[static_cast<std::size_t>(k)];
    s += d * d;
  }
  return std::sqrt(s);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw MeshError("cannot format value");
  return std::string(buf.data(), end);
}

double parse_double(const std::string& tok, int line) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || end != tok.data() + tok.size() || !std::isfinite(v))
    throw MeshError("line " + std::to_string(line) + ": expected a number, got '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, int line) {
  int v = 0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || end != tok.data() + tok.size())
    throw MeshError("line " + std::to_string(line) + ": expected an integer id, got '" + tok + "'");
  return v;
}

}  // namespace

NetworkMesh::NetworkMesh(std::vector<Node> nodes, std::vector<Edge> edges, int root_id)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  if (nodes_.empty()) throw MeshError("mesh has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!(n.radius > 0.0) || !std::isfinite(n.radius))
      throw MeshError("node " + std::to_string(n.id) + ": radius must be positive");
    if (!index_.emplace(n.id, static_cast<int>(i)).second)
      throw MeshError("duplicate node id " + std::to_string(n.id));
  }
  if (!index_.contains(root_id)) throw MeshError("root " + std::to_string(root_id) + " is not a node");
  root_ = index_.at(root_id);

  adjacency_.resize(nodes_.size());
  lengths_.reserve(edges_.size());
  // Union-find detects cycles (including duplicate edges) while edges are added.
  std::vector<int> uf(nodes_.size());
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int v) {
    while (uf[static_cast<std::size_t>(v)] != v) {
      uf[static_cast<std::size_t>(v)] = uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(v)])];
      v = uf[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const Edge& e : edges_) {
    if (!index_.contains(e.a) || !index_.contains(e.b))
      throw MeshError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " references a missing node");
    const int ia = index_.at(e.a);
    const int ib = index_.at(e.b);
    if (ia == ib) throw MeshError("self-loop at node " + std::to_string(e.a));
    const double len = e.length ? *e.length
                                : euclidean(nodes_[static_cast<std::size_t>(ia)], nodes_[static_cast<std::size_t>(ib)]);
    if (!(len > 0.0) || !std::isfinite(len))
      throw MeshError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + ": length must be positive");
    const int ra = find(ia);
    const int rb = find(ib);
    if (ra == rb) throw MeshError("cycle detected at edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
    uf[static_cast<std::size_t>(ra)] = rb;
    lengths_.push_back(len);
    adjacency_[static_cast<std::size_t>(ia)].push_back({ib, len});
    adjacency_[static_cast<std::size_t>(ib)].push_back({ia, len});
  }
  if (edges_.size() + 1 != nodes_.size()) throw MeshError("graph is disconnected");
  if (nodes_.size() > 1 && adjacency_[static_cast<std::size_t>(root_)].size() != 1)
    throw MeshError("root " + std::to_string(root_id) + " must be a leaf");

  // Breadth-first orientation from the root.
  const std::size_t n = nodes_.size();
  orientation_.parent.assign(n, -1);
  orientation_.parent_length.assign(n, 0.0);
  orientation_.children.assign(n, {});
  orientation_.arc_length.assign(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<int> queue{root_};
  seen[static_cast<std::size_t>(root_)] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (const Link& l : adjacency_[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(l.node)]) continue;
      seen[static_cast<std::size_t>(l.node)] = 1;
      orientation_.parent[static_cast<std::size_t>(l.node)] = u;
      orientation_.parent_length[static_cast<std::size_t>(l.node)] = l.length;
      orientation_.arc_length[static_cast<std::size_t>(l.node)] = orientation_.arc_length[static_cast<std::size_t>(u)] + l.length;
      orientation_.children[static_cast<std::size_t>(u)].push_back(l.node);
      queue.push_back(l.node);
    }
  }
  if (queue.size() != n) throw MeshError("graph is disconnected");
}

int NetworkMesh::index_of(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw MeshError("unknown node id " + std::to_string(id));
  return it->second;
}

double NetworkMesh::total_length() const {
  return std::accumulate(lengths_.begin(), lengths_.end(), 0.0);
}

std::size_t NetworkMesh::max_degree() const {
  std::size_t m = 0;
  for (const auto& a : adjacency_) m = std::max(m, a.size());
  return m;
}

std::vector<int> NetworkMesh::leaves() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < adjacency_.size(); ++i)
    if (adjacency_[i].size() == 1) out.push_back(static_cast<int>(i));
  return out;
}

NetworkMesh load_mesh(std::string_view text) {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::optional<int> root;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "node") {
      if (tok.size() != 6)
        throw MeshError("line " + std::to_string(lineno) + ": node expects <id> <x> <y> <z> <radius>");
      Node n;
      n.id = parse_int(tok[1], lineno);
      for (std::size_t k = 0; k < 3; ++k) n.position[k] = parse_double(tok[2 + k], lineno);
      n.radius = parse_double(tok[5], lineno);
      if (!(n.radius > 0.0))
        throw MeshError("line " + std::to_string(lineno) + ": radius must be positive");
      nodes.push_back(n);
    } else if (kw == "edge") {
      if (tok.size() != 3 && tok.size() != 4)
        throw MeshError("line " + std::to_string(lineno) + ": edge expects <idA> <idB> [length]");
      Edge e{parse_int(tok[1], lineno), parse_int(tok[2], lineno), std::nullopt};
      if (tok.size() == 4) {
        e.length = parse_double(tok[3], lineno);
        if (!(*e.length > 0.0))
          throw MeshError("line " + std::to_string(lineno) + ": edge length must be positive");
      }
      edges.push_back(e);
    } else if (kw == "root") {
      if (tok.size() != 2) throw MeshError("line " + std::to_string(lineno) + ": root expects <id>");
      if (root) throw MeshError("line " + std::to_string(lineno) + ": root declared twice");
      root = parse_int(tok[1], lineno);
    } else {
      throw MeshError("line " + std::to_string(lineno) + ": unknown keyword '" + kw + "'");
    }
  }
  if (!root) throw MeshError("missing root declaration");
  return NetworkMesh(std::move(nodes), std::move(edges), *root);
}

NetworkMesh load_mesh_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MeshError("cannot open geometry file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_mesh(ss.str());
}

std::string save_mesh(const NetworkMesh& mesh) {
  std::string out;
  for (const Node& n : mesh.nodes()) {
    out += "node " + std::to_string(n.id);
    for (double p : n.position) out += " " + format_double(p);
    out += " " + format_double(n.radius) + "\n";
  }
  for (const Edge& e : mesh.edges()) {
    out += "edge " + std::to_string(e.a) + " " + std::to_string(e.b);
    if (e.length) out += " " + format_double(*e.length);
    out += "\n";
  }
  out += "root " + std::to_string(mesh.root_id()) + "\n";
  return out;
}

NetworkMesh refine(const NetworkMesh& mesh, int levels) {
  if (levels < 0) throw MeshError("refinement levels must be nonnegative");
  std::vector<Node> nodes(mesh.nodes().begin(), mesh.nodes().end());
  std::vector<Edge> edges(mesh.edges().begin(), mesh.edges().end());
  for (int level = 0; level < levels; ++level) {
    std::unordered_map<int, std::size_t> pos;
    int next_id = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      pos[nodes[i].id] = i;
      next_id = std::max(next_id, nodes[i].id + 1);
    }
    std::vector<Edge> split;
    split.reserve(2 * edges.size());
    for (const Edge& e : edges) {
      const Node& a = nodes[pos.at(e.a)];
      const Node& b = nodes[pos.at(e.b)];
      Node mid;
      mid.id = next_id++;
      for (std::size_t k = 0; k < 3; ++k) mid.position[k] = 0.5 * (a.position[k] + b.position[k]);
      mid.radius = 0.5 * (a.radius + b.radius);
      std::optional<double> half;
      if (e.length) half = 0.5 * *e.length;
      split.push_back({e.a, mid.id, half});
      split.push_back({mid.id, e.b, half});
      nodes.push_back(mid);
    }
    edges = std::move(split);
  }
  return NetworkMesh(std::move(nodes), std::move(edges), mesh.root_id());
}

const Orientation& orient(const NetworkMesh& mesh) { return mesh.orientation(); }

// ---------------------------------------------------------------------------

double RadiusProfile::radius(double x) const {
  if (const auto* c = std::get_if<Cone>(&kind_)) return 1.0 + c->lambda * x;
  if (const auto* s = std::get_if<Sinusoid>(&kind_)) return std::sin(s->gamma * x);
  throw MeshError("tabulated profile has no closed form");
}

double RadiusProfile::derivative(double x) const {
  if (const auto* c = std::get_if<Cone>(&kind_)) return c->lambda;
  if (const auto* s = std::get_if<Sinusoid>(&kind_)) return s->gamma * std::cos(s->gamma * x);
  throw MeshError("tabulated profile has no closed form");
}

PathWeights path_weights(double dx1, double dx2) {
  const double r = 1.0 / (dx1 * dx2 * (dx1 + dx2));
  return {-r * (2.0 * dx1 * dx2 + dx2 * dx2), r * (dx1 + dx2) * (dx1 + dx2), -r * dx1 * dx1};
}

std::vector<TwoPath> two_paths(const NetworkMesh& mesh, int node, Side side) {
  const Orientation& o = mesh.orientation();
  std::vector<int> firsts;
  if (side == Side::TowardRoot) {
    if (o.parent[static_cast<std::size_t>(node)] >= 0) firsts.push_back(o.parent[static_cast<std::size_t>(node)]);
  } else {
    firsts = o.children[static_cast<std::size_t>(node)];
  }
  std::vector<TwoPath> out;
  for (int first : firsts) {
    double dx1 = 0.0;
    for (const Link& l : mesh.neighbors(node))
      if (l.node == first) dx1 = l.length;
    for (const Link& l : mesh.neighbors(first)) {
      if (l.node == node) continue;
      out.push_back({node, first, l.node, dx1, l.length});
    }
  }
  return out;
}

namespace {

// Inward 2-paths from a leaf (toward its single neighbour and beyond).
std::vector<TwoPath> inward_paths(const NetworkMesh& mesh, int leaf) {
  const Orientation& o = mesh.orientation();
  return two_paths(mesh, leaf, o.parent[static_cast<std::size_t>(leaf)] >= 0 ? Side::TowardRoot : Side::AwayFromRoot);
}

// +1 when walking inward from the leaf goes along +x (only for the root).
double inward_sign(const NetworkMesh& mesh, int leaf) { return leaf == mesh.root() ? 1.0 : -1.0; }

}  // namespace

double central_derivative(const NetworkMesh& mesh, std::span<const double> values, int node) {
  const Orientation& o = mesh.orientation();
  const auto i = static_cast<std::size_t>(node);
  const auto& kids = o.children[i];
  if (o.parent[i] < 0 || kids.empty()) return one_sided_derivative(mesh, values, node);
  double right = 0.0;
  double right_len = 0.0;
  for (int c : kids) {
    right += values[static_cast<std::size_t>(c)];
    right_len += o.parent_length[static_cast<std::size_t>(c)];
  }
  const double m = static_cast<double>(kids.size());
  right /= m;
  right_len /= m;
  return (right - values[static_cast<std::size_t>(o.parent[i])]) / (o.parent_length[i] + right_len);
}

double one_sided_derivative(const NetworkMesh& mesh, std::span<const double> values, int leaf) {
  const auto paths = inward_paths(mesh, leaf);
  const double sign = inward_sign(mesh, leaf);
  if (paths.empty()) {
    const Link& l = mesh.neighbors(leaf).front();
    return sign * (values[static_cast<std::size_t>(l.node)] - values[static_cast<std::size_t>(leaf)]) / l.length;
  }
  double sum = 0.0;
  for (const TwoPath& p : paths) {
    const PathWeights w = path_weights(p.dx1, p.dx2);
    sum += w.w0 * values[static_cast<std::size_t>(p.origin)] + w.w1 * values[static_cast<std::size_t>(p.first)] +
           w.w2 * values[static_cast<std::size_t>(p.second)];
  }
  return sign * sum / static_cast<double>(paths.size());
}

std::vector<double> nodal_derivative(const NetworkMesh& mesh, std::span<const double> values) {
  std::vector<double> out(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) out[i] = central_derivative(mesh, values, static_cast<int>(i));
  return out;
}

DerivativeResult radius_derivative(const NetworkMesh& mesh, const RadiusProfile& profile, int node,
                                   const DerivativeMode& mode) {
  std::vector<double> radii(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) radii[i] = mesh.radius(static_cast<int>(i));
  if (std::holds_alternative<Central>(mode)) {
    return {central_derivative(mesh, radii, node), mesh.is_leaf(node) || mesh.size() == 1};
  }
  if (std::holds_alternative<OneSided>(mode)) return {one_sided_derivative(mesh, radii, node), false};
  if (const auto* pu = std::get_if<PathUpwind>(&mode)) {
    const TwoPath& p = pu->path;
    const PathWeights w = path_weights(p.dx1, p.dx2);
    return {w.w0 * radii[static_cast<std::size_t>(p.origin)] + w.w1 * radii[static_cast<std::size_t>(p.first)] +
                w.w2 * radii[static_cast<std::size_t>(p.second)],
            false};
  }
  return {profile.derivative(mesh.x(node)), false};
}

std::vector<double> node_radius_slopes(const NetworkMesh& mesh) {
  std::vector<double> radii(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) radii[i] = mesh.radius(static_cast<int>(i));
  return nodal_derivative(mesh, radii);
}

double mean_incident_length(const NetworkMesh& mesh, int node) {
  double s = 0.0;
  for (const Link& l : mesh.neighbors(node)) s += l.length;
  return s / static_cast<double>(mesh.degree(node));
}

}  // namespace fjnet
