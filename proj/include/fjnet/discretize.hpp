/**
 * @file discretize.hpp
 * @brief Sparse assembly of the semi-discrete right-hand side on a network.
 *
 * Every spatial term is linear in the nodal concentrations c and in the
 * Neumann data g (outward normal derivative at each leaf), so each assembly
 * returns a pair (M, B) with term = M c + B g. A full model is then
 *
 *     mass_diag .* dc/dt = matrix * c + boundary_affine + source
 *
 * and one forward-Euler step costs a single sparse matrix-vector product.
 */
#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

#include "fjnet/models.hpp"
#include "fjnet/network.hpp"

namespace fjnet {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// term = matrix * c + boundary * g, with g indexed like NetworkMesh::leaves().
struct LinearRows {
  SparseMatrix matrix;
  SparseMatrix boundary;
  std::vector<std::string> notes;  ///< stencil fallbacks taken during assembly
};

struct SpatialOperator {
  SparseMatrix matrix;
  SparseMatrix boundary_map;
  std::vector<int> boundary_nodes;  ///< dense leaf indices; column order of boundary_map
  Vector boundary_affine;           ///< boundary_map * g for the current Neumann data
  Vector mass_diag;
  std::vector<std::string> notes;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
  /// Refresh boundary_affine from outward normal derivatives at the leaves.
  void set_neumann(const Vector& outward_derivative);
};

/// Branched central second difference: row i gets 2/(S dx_j) on c_j and minus
/// their sum on c_i, S = sum of incident lengths. Leaves use a mirrored ghost node.
LinearRows assemble_laplacian(const NetworkMesh& mesh);

/// D(x) (2/R) dR/dx dc/dx by second-order upwinding summed over the 2-paths on
/// the wind side (the side toward which R grows). Leaves take dc/dx from the
/// Neumann data.
LinearRows assemble_advection(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec);

/// d3c/dx3 along +x: central difference of the Laplacian rows inside, one-sided
/// closures with Neumann data at the leaves. Throws if a leaf has no inward 2-path.
LinearRows assemble_third_order(const NetworkMesh& mesh);

/// First derivative along +x: central inside, second-order one-sided at leaves.
SparseMatrix first_derivative_matrix(const NetworkMesh& mesh);

/// Per-node diffusion coefficient of the model (corrections use the central dR/dx).
/// KalinayTemporal takes the Zwanzig coefficient beneath its temporal factor.
std::vector<double> node_diffusion(const NetworkMesh& mesh, const ModelSpec& spec);

/// Lateral flux density J through the tube wall: a constant nodal part plus
/// windows during which a fixed density is added at selected nodes.
struct FluxWindow {
  std::vector<int> nodes;  ///< dense indices
  double strength = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;  ///< inclusive
};

struct LateralFluxField {
  Vector base;  ///< empty means zero
  std::vector<FluxWindow> windows;

  Vector at(double t, std::size_t n) const;
};

/// Full right-hand side and temporal mass diagonal of the chosen model.
SpatialOperator assemble_model(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec);

/// Linear map from nodal lateral flux density J to the source vector of the model.
SparseMatrix lateral_operator(const NetworkMesh& mesh, const ModelSpec& spec);

/// Source vector for a nodal lateral flux J (lateral_operator(mesh, spec) * J).
Vector assemble_lateral(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec,
                        const Vector& J);
Vector assemble_lateral(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec,
                        const LateralFluxField& field, double t);

/// Debug dump: `row col value` lines sorted by (row, col).
void write_coordinate(std::ostream& os, const SparseMatrix& m);

}  // namespace fjnet
