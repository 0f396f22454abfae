/**
 * @file stability.hpp
 * @brief Pre-flight von Neumann checks for the explicit branched schemes.
 *
 * Diffusion (branched FTCS): alpha * beta <= 1 at every node, with
 * alpha = 2 D dt / sum(dx_j) and beta = sum(1 / dx_j).
 *
 * Upwinded radius term: |1 + A0 - A1 + A2| <= 1, where A_i = dt D sum over the
 * wind-side 2-paths of (2/R) (dR/dx)_path r A_i, i.e. the amplification factor
 * evaluated at the highest frequency xi = pi.
 */
#pragma once

#include <limits>
#include <string>
#include <vector>

#include "fjnet/discretize.hpp"
#include "fjnet/models.hpp"
#include "fjnet/network.hpp"

namespace fjnet {

struct StabilityReport {
  std::vector<bool> node_pass;
  int binding_node = -1;  ///< node id limiting dt_max (-1 if unconstrained)
  double alpha_beta = 0.0;     ///< max over nodes of alpha * beta
  double advection_rho = 0.0;  ///< max over nodes of |1 + A0 - A1 + A2|
  double dt_max = std::numeric_limits<double>::infinity();
  std::vector<std::string> warnings;
  bool extrapolated = false;  ///< some node has degree > 3

  bool pass() const;
};

StabilityReport check_diffusion(const NetworkMesh& mesh, double D, double dt);

StabilityReport check_advection(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec,
                                double dt);

/// Both checks for a model, plus the warnings about the unproved combination:
/// high-order expansion rows dominating the diffusion rows, and |rho(xi)| > 1
/// at any sampled frequency.
StabilityReport check_model(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec, double dt);

}  // namespace fjnet
