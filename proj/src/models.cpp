#include "fjnet/models.hpp"

#include <cmath>
#include <stdexcept>

namespace fjnet {

namespace {

constexpr double kSeriesCutoff = 1e-6;

// atan(s)/s, even in s.
double atan_ratio(double s) {
  if (std::abs(s) < kSeriesCutoff) return 1.0 - s * s / 3.0;
  return std::atan(s) / s;
}

}  // namespace

void ModelSpec::validate() const {
  if (!(D0 > 0.0)) throw std::invalid_argument("D0 must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::SimpleDiffusion: return "simple";
    case ModelKind::FickJacobs: return "FJ";
    case ModelKind::Zwanzig: return "Zw";
    case ModelKind::RegueraRubi: return "RR";
    case ModelKind::KalinayPercus: return "KP";
    case ModelKind::KalinayTemporal: return "Kal";
    case ModelKind::ExpandedFlux: return "EF-FJ";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  for (ModelKind k : {ModelKind::SimpleDiffusion, ModelKind::FickJacobs, ModelKind::Zwanzig, ModelKind::RegueraRubi,
                      ModelKind::KalinayPercus, ModelKind::KalinayTemporal, ModelKind::ExpandedFlux})
    if (model_name(k) == name) return k;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::vector<ModelKind> comparison_models() {
  return {ModelKind::ExpandedFlux, ModelKind::FickJacobs,    ModelKind::Zwanzig,
          ModelKind::RegueraRubi,  ModelKind::KalinayPercus, ModelKind::KalinayTemporal};
}

double diffusion_coefficient(const ModelSpec& spec, double rprime) {
  const double r2 = rprime * rprime;
  switch (spec.kind) {
    case ModelKind::Zwanzig: return spec.D0 / (1.0 + r2 / 2.0);
    case ModelKind::RegueraRubi: return spec.D0 / std::cbrt(1.0 + r2 / 4.0);
    case ModelKind::KalinayPercus: return spec.D0 * atan_ratio(rprime / 2.0);
    default: return spec.D0;
  }
}

double kalinay_g(double x, double rprime, double epsilon) {
  const double s = std::sqrt(epsilon) * rprime;
  double bracket = 0.0;
  if (std::abs(s) < kSeriesCutoff) {
    // atan(s)/s + (s/3) atan(s) - 1 = -s^2/3 + s^2/3 + O(s^4) = (1/5 - 1/9) s^4 + ...
    bracket = (4.0 / 45.0) * s * s * s * s;
  } else {
    bracket = std::atan(s) / s + (s / 3.0) * std::atan(s) - 1.0;
  }
  return 0.5 * x * bracket;
}

std::vector<double> kalinay_mass_factors(const NetworkMesh& mesh, double epsilon) {
  if (mesh.max_degree() > 2)
    throw std::invalid_argument("Kalinay temporal correction is only defined on unbranched channels");
  const std::vector<double> slopes = node_radius_slopes(mesh);
  std::vector<double> g(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) g[i] = kalinay_g(mesh.x(static_cast<int>(i)), slopes[i], epsilon);
  std::vector<double> factor = nodal_derivative(mesh, g);
  for (double& f : factor) f += 1.0;
  return factor;
}

double kalinay_mass_factor(const NetworkMesh& mesh, const RadiusProfile& /*profile*/, int node, double epsilon) {
  return kalinay_mass_factors(mesh, epsilon).at(static_cast<std::size_t>(node));
}

double effj_mass_factor(double dx_local, double R, double rprime) {
  return 1.0 + dx_local * dx_local * rprime * rprime / (12.0 * R * R);
}

}  // namespace fjnet
