#include "fjnet/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace fjnet {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Column of each leaf in the boundary maps.
std::unordered_map<int, int> leaf_columns(const NetworkMesh& mesh) {
  std::unordered_map<int, int> col;
  const auto leaves = mesh.leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) col[leaves[k]] = static_cast<int>(k);
  return col;
}

std::vector<TwoPath> inward_paths(const NetworkMesh& mesh, int leaf) {
  return two_paths(mesh, leaf, leaf == mesh.root() ? Side::AwayFromRoot : Side::TowardRoot);
}

double inward_sign(const NetworkMesh& mesh, int leaf) { return leaf == mesh.root() ? 1.0 : -1.0; }

// Inward one-sided stencil at a leaf (path direction), averaged over the inward
// 2-paths. Appends (column, weight) pairs; first order if no 2-path exists.
void inward_stencil(const NetworkMesh& mesh, int leaf, std::vector<std::pair<int, double>>& out) {
  const auto paths = inward_paths(mesh, leaf);
  if (paths.empty()) {
    const Link& l = mesh.neighbors(leaf).front();
    out.emplace_back(leaf, -1.0 / l.length);
    out.emplace_back(l.node, 1.0 / l.length);
    return;
  }
  const double share = 1.0 / static_cast<double>(paths.size());
  for (const TwoPath& p : paths) {
    const PathWeights w = path_weights(p.dx1, p.dx2);
    out.emplace_back(p.origin, share * w.w0);
    out.emplace_back(p.first, share * w.w1);
    out.emplace_back(p.second, share * w.w2);
  }
}

std::vector<double> radii_of(const NetworkMesh& mesh) {
  std::vector<double> r(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) r[i] = mesh.radius(static_cast<int>(i));
  return r;
}

SparseMatrix mul(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix r = a * b;
  return r;
}

SparseMatrix diagonal(const std::vector<double>& d) {
  Triplets t;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) t.emplace_back(static_cast<int>(i), static_cast<int>(i), d[i]);
  return from_triplets(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()), t);
}

// Interior rows of the central first difference along +x; leaf rows left empty.
SparseMatrix central_interior(const NetworkMesh& mesh) {
  const Orientation& o = mesh.orientation();
  Triplets t;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const auto& kids = o.children[i];
    if (o.parent[i] < 0 || kids.empty()) continue;
    const double m = static_cast<double>(kids.size());
    double right_len = 0.0;
    for (int c : kids) right_len += o.parent_length[static_cast<std::size_t>(c)];
    const double span = o.parent_length[i] + right_len / m;
    const int row = static_cast<int>(i);
    for (int c : kids) t.emplace_back(row, c, 1.0 / (m * span));
    t.emplace_back(row, o.parent[i], -1.0 / span);
  }
  const auto n = static_cast<Eigen::Index>(mesh.size());
  return from_triplets(n, n, t);
}

// Outward derivative at each leaf estimated from the nodal field itself.
SparseMatrix leaf_outward_derivative(const NetworkMesh& mesh) {
  const auto leaves = mesh.leaves();
  Triplets t;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    std::vector<std::pair<int, double>> st;
    inward_stencil(mesh, leaves[k], st);
    for (auto [c, w] : st) t.emplace_back(static_cast<int>(k), c, -w);
  }
  return from_triplets(static_cast<Eigen::Index>(leaves.size()), static_cast<Eigen::Index>(mesh.size()), t);
}

}  // namespace

void SpatialOperator::set_neumann(const Vector& outward_derivative) {
  if (outward_derivative.size() != boundary_map.cols())
    throw std::invalid_argument("Neumann data must have one value per leaf");
  boundary_affine = boundary_map * outward_derivative;
}

Vector LateralFluxField::at(double t, std::size_t n) const {
  Vector J = base.size() == 0 ? Vector::Zero(static_cast<Eigen::Index>(n)) : base;
  for (const FluxWindow& w : windows) {
    if (t < w.t_start || t > w.t_end) continue;
    for (int i : w.nodes) J[i] += w.strength;
  }
  return J;
}

LinearRows assemble_laplacian(const NetworkMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const auto cols = leaf_columns(mesh);
  Triplets tm;
  Triplets tb;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    const auto nb = mesh.neighbors(i);
    if (nb.empty()) throw std::invalid_argument("isolated node " + std::to_string(mesh.node(i).id));
    if (nb.size() == 1) {
      // Ghost node mirrored across the leaf: c_ghost = c_1 + 2 h g.
      const double h = nb[0].length;
      const double w = 2.0 / (2.0 * h * h);
      tm.emplace_back(i, nb[0].node, 2.0 * w);
      tm.emplace_back(i, i, -2.0 * w);
      tb.emplace_back(i, cols.at(i), 2.0 / h);
      continue;
    }
    double span = 0.0;
    for (const Link& l : nb) span += l.length;
    double diag = 0.0;
    for (const Link& l : nb) {
      const double w = 2.0 / (span * l.length);
      tm.emplace_back(i, l.node, w);
      diag += w;
    }
    tm.emplace_back(i, i, -diag);
  }
  LinearRows out;
  out.matrix = from_triplets(n, n, tm);
  out.boundary = from_triplets(n, static_cast<Eigen::Index>(cols.size()), tb);
  return out;
}

std::vector<double> node_diffusion(const NetworkMesh& mesh, const ModelSpec& spec) {
  const auto slopes = node_radius_slopes(mesh);
  // Kalinay's temporal correction extends the Zwanzig expansion, so its spatial part is Zwanzig's.
  ModelSpec s = spec;
  if (s.kind == ModelKind::KalinayTemporal) s.kind = ModelKind::Zwanzig;
  std::vector<double> d(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) d[i] = diffusion_coefficient(s, slopes[i]);
  return d;
}

LinearRows assemble_advection(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const auto cols = leaf_columns(mesh);
  const Orientation& o = mesh.orientation();
  const auto radii = radii_of(mesh);
  const auto slopes = node_radius_slopes(mesh);
  const auto dcoef = node_diffusion(mesh, spec);
  LinearRows out;
  Triplets tm;
  Triplets tb;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double scale = 2.0 * dcoef[ui] / radii[ui];
    if (mesh.is_leaf(i)) {
      // dc/ds along the inward path is minus the outward Neumann value.
      std::vector<std::pair<int, double>> st;
      inward_stencil(mesh, i, st);
      double dr_in = 0.0;
      for (auto [c, w] : st) dr_in += w * radii[static_cast<std::size_t>(c)];
      if (dr_in != 0.0) tb.emplace_back(i, cols.at(i), -scale * dr_in);
      continue;
    }
    const double slope = slopes[ui];
    if (slope == 0.0) continue;
    const Side side = slope > 0.0 ? Side::AwayFromRoot : Side::TowardRoot;
    const auto paths = two_paths(mesh, i, side);
    if (!paths.empty()) {
      for (const TwoPath& p : paths) {
        const PathWeights w = path_weights(p.dx1, p.dx2);
        const double dr = w.w0 * radii[ui] + w.w1 * radii[static_cast<std::size_t>(p.first)] +
                          w.w2 * radii[static_cast<std::size_t>(p.second)];
        const double k = scale * dr;
        tm.emplace_back(i, i, k * w.w0);
        tm.emplace_back(i, p.first, k * w.w1);
        tm.emplace_back(i, p.second, k * w.w2);
      }
      continue;
    }
    // No 2-path on the wind side: first-order one-step upwinding.
    std::vector<int> firsts = side == Side::AwayFromRoot ? o.children[ui] : std::vector<int>{o.parent[ui]};
    for (int f : firsts) {
      double len = 0.0;
      for (const Link& l : mesh.neighbors(i))
        if (l.node == f) len = l.length;
      const double dr = (radii[static_cast<std::size_t>(f)] - radii[ui]) / len;
      const double k = scale * dr;
      tm.emplace_back(i, i, -k / len);
      tm.emplace_back(i, f, k / len);
    }
    out.notes.push_back("node " + std::to_string(mesh.node(i).id) + ": first-order upwind (no 2-path on wind side)");
  }
  (void)profile;
  out.matrix = from_triplets(n, n, tm);
  out.boundary = from_triplets(n, static_cast<Eigen::Index>(cols.size()), tb);
  return out;
}

LinearRows assemble_third_order(const NetworkMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const auto cols = leaf_columns(mesh);
  const LinearRows lap = assemble_laplacian(mesh);
  const SparseMatrix central = central_interior(mesh);
  LinearRows out;
  out.matrix = mul(central, lap.matrix);
  out.boundary = mul(central, lap.boundary);

  // Leaf closures, written in the inward coordinate s and mapped to +x:
  //   c'''_s = (c2 - 4 c1 + 3 c0) / (2 h^3) + c'_s / h^2,  c'_s = -g.
  Triplets tm;
  Triplets tb;
  for (int leaf : mesh.leaves()) {
    const auto paths = inward_paths(mesh, leaf);
    if (paths.empty())
      throw std::invalid_argument("boundary branch at node " + std::to_string(mesh.node(leaf).id) +
                                  " has fewer than 3 nodes");
    const double sign = inward_sign(mesh, leaf);
    const double h = paths.front().dx1;
    const double h3 = 2.0 * h * h * h;
    const double share = 1.0 / static_cast<double>(paths.size());
    tm.emplace_back(leaf, leaf, sign * 3.0 / h3);
    tm.emplace_back(leaf, paths.front().first, sign * -4.0 / h3);
    for (const TwoPath& p : paths) tm.emplace_back(leaf, p.second, sign * share / h3);
    tb.emplace_back(leaf, cols.at(leaf), -sign / (h * h));
  }
  out.matrix += from_triplets(n, n, tm);
  out.boundary += from_triplets(n, static_cast<Eigen::Index>(cols.size()), tb);
  out.matrix.prune(0.0);
  out.boundary.prune(0.0);
  return out;
}

SparseMatrix first_derivative_matrix(const NetworkMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.size());
  Triplets t;
  for (int leaf : mesh.leaves()) {
    std::vector<std::pair<int, double>> st;
    inward_stencil(mesh, leaf, st);
    const double sign = inward_sign(mesh, leaf);
    for (auto [c, w] : st) t.emplace_back(leaf, c, sign * w);
  }
  return central_interior(mesh) + from_triplets(n, n, t);
}

SpatialOperator assemble_model(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const LinearRows lap = assemble_laplacian(mesh);
  SpatialOperator op;
  op.boundary_nodes = mesh.leaves();
  op.mass_diag = Vector::Ones(n);

  if (spec.kind == ModelKind::SimpleDiffusion) {
    op.matrix = spec.D0 * lap.matrix;
    op.boundary_map = spec.D0 * lap.boundary;
  } else if (spec.kind == ModelKind::ExpandedFlux) {
    const LinearRows adv = assemble_advection(mesh, profile, spec);
    const LinearRows third = assemble_third_order(mesh);
    const auto radii = radii_of(mesh);
    const auto slopes = node_radius_slopes(mesh);
    std::vector<double> expansion(mesh.size());
    std::vector<double> ratio(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const double dx = mean_incident_length(mesh, static_cast<int>(i));
      expansion[i] = dx * dx * slopes[i] / (4.0 * radii[i]);
      ratio[i] = slopes[i] / radii[i];
      op.mass_diag[static_cast<Eigen::Index>(i)] = effj_mass_factor(dx, radii[i], slopes[i]);
    }
    const SparseMatrix e = diagonal(expansion);
    const SparseMatrix q = diagonal(ratio);
    const SparseMatrix hm = mul(q, lap.matrix) + third.matrix;
    const SparseMatrix hb = mul(q, lap.boundary) + third.boundary;
    op.matrix = spec.D0 * (lap.matrix + mul(e, hm)) + adv.matrix;
    op.boundary_map = spec.D0 * (lap.boundary + mul(e, hb)) + adv.boundary;
    op.notes = adv.notes;
  } else {
    const LinearRows adv = assemble_advection(mesh, profile, spec);
    const SparseMatrix d = diagonal(node_diffusion(mesh, spec));
    op.matrix = mul(d, lap.matrix) + adv.matrix;
    op.boundary_map = mul(d, lap.boundary) + adv.boundary;
    op.notes = adv.notes;
    if (spec.kind == ModelKind::KalinayTemporal) {
      const auto factor = kalinay_mass_factors(mesh, spec.epsilon);
      for (std::size_t i = 0; i < factor.size(); ++i) op.mass_diag[static_cast<Eigen::Index>(i)] = factor[i];
    }
  }
  op.matrix.prune(0.0);
  op.boundary_map.prune(0.0);
  op.boundary_affine = Vector::Zero(n);
  return op;
}

SparseMatrix lateral_operator(const NetworkMesh& mesh, const ModelSpec& spec) {
  const auto radii = radii_of(mesh);
  std::vector<double> lead(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) lead[i] = 2.0 / radii[i];
  SparseMatrix op = diagonal(lead);
  if (spec.kind != ModelKind::ExpandedFlux) return op;

  // (dx^2 / 12R) ((2/R) R' J' + J'' + J'''/3); boundary data for J'' and J'''
  // comes from one-sided estimates of J' at the leaves.
  const auto slopes = node_radius_slopes(mesh);
  std::vector<double> scale(mesh.size());
  std::vector<double> advect(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double dx = mean_incident_length(mesh, static_cast<int>(i));
    scale[i] = dx * dx / (12.0 * radii[i]);
    advect[i] = 2.0 * slopes[i] / radii[i];
  }
  const LinearRows lap = assemble_laplacian(mesh);
  const LinearRows third = assemble_third_order(mesh);
  const SparseMatrix g = leaf_outward_derivative(mesh);
  const SparseMatrix second = lap.matrix + mul(lap.boundary, g);
  const SparseMatrix cubic = third.matrix + mul(third.boundary, g);
  const SparseMatrix bracket = mul(diagonal(advect), first_derivative_matrix(mesh)) + second + (1.0 / 3.0) * cubic;
  op += mul(diagonal(scale), bracket);
  op.prune(0.0);
  return op;
}

Vector assemble_lateral(const NetworkMesh& mesh, const RadiusProfile& /*profile*/, const ModelSpec& spec,
                        const Vector& J) {
  return lateral_operator(mesh, spec) * J;
}

Vector assemble_lateral(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec,
                        const LateralFluxField& field, double t) {
  return assemble_lateral(mesh, profile, spec, field.at(t, mesh.size()));
}

void write_coordinate(std::ostream& os, const SparseMatrix& m) {
  // Row-major storage iterates rows in order and columns sorted within a row.
  SparseMatrix c = m;
  c.makeCompressed();
  const auto old = os.precision(17);
  for (Eigen::Index r = 0; r < c.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(c, r); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  os.precision(old);
}

}  // namespace fjnet
