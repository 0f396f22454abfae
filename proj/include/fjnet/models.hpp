/**
 * @file models.hpp
 * @brief Model variants and their closed-form coefficient functions.
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fjnet/network.hpp"

namespace fjnet {

enum class ModelKind {
  SimpleDiffusion,
  FickJacobs,
  Zwanzig,
  RegueraRubi,
  KalinayPercus,
  KalinayTemporal,
  ExpandedFlux,
};

struct ModelSpec {
  ModelKind kind = ModelKind::FickJacobs;
  double D0 = 1.0;
  double epsilon = 1.0;  ///< KalinayTemporal scaling; 1 in every reference run

  /// Throws std::invalid_argument unless D0 > 0 and epsilon > 0.
  void validate() const;
};

/// Short names used in configs and tables: "simple", "FJ", "Zw", "RR", "KP", "Kal", "EF-FJ".
std::string model_name(ModelKind kind);
ModelKind parse_model(std::string_view name);
/// The six models compared against analytic solutions (everything but SimpleDiffusion).
std::vector<ModelKind> comparison_models();

/// Effective diffusion coefficient. Corrections depend on R' only through even functions.
double diffusion_coefficient(const ModelSpec& spec, double rprime);

/// g(x) = (x/2) (atan(s)/s + (s/3) atan(s) - 1), s = sqrt(eps) R'. Series near s = 0.
double kalinay_g(double x, double rprime, double epsilon);

/// 1 + dg/dx at a node; g sampled at every node and differenced like dR/dx.
/// Only defined on unbranched channels (g depends on the global axial coordinate).
double kalinay_mass_factor(const NetworkMesh& mesh, const RadiusProfile& profile, int node, double epsilon = 1.0);
std::vector<double> kalinay_mass_factors(const NetworkMesh& mesh, double epsilon = 1.0);

/// 1 + dx^2 R'^2 / (12 R^2): temporal factor of the expanded-flux model.
double effj_mass_factor(double dx_local, double R, double rprime);

}  // namespace fjnet
