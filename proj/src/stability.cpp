#include "fjnet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace fjnet {

namespace {

// Slack for round-off when a step size sits exactly on a stability boundary.
constexpr double kRoundoff = 1e-12;

struct Amplification {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;  // per unit dt
};

// Split each advection row into origin, distance-1 and distance-2 weights.
std::vector<Amplification> amplification_weights(const NetworkMesh& mesh, const SparseMatrix& adv) {
  std::vector<Amplification> out(mesh.size());
  for (Eigen::Index r = 0; r < adv.outerSize(); ++r) {
    const int i = static_cast<int>(r);
    for (SparseMatrix::InnerIterator it(adv, r); it; ++it) {
      const int j = static_cast<int>(it.col());
      auto& a = out[static_cast<std::size_t>(i)];
      if (j == i) {
        a.a0 += it.value();
        continue;
      }
      bool adjacent = false;
      for (const Link& l : mesh.neighbors(i)) adjacent = adjacent || l.node == j;
      (adjacent ? a.a1 : a.a2) += it.value();
    }
  }
  return out;
}

StabilityReport advection_report(const NetworkMesh& mesh, const std::vector<Amplification>& amp,
                                 const std::vector<double>& mass, double dt) {
  StabilityReport rep;
  rep.node_pass.assign(mesh.size(), true);
  bool rho_warned = false;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double m = mass.empty() ? 1.0 : mass[i];
    const double k = (amp[i].a0 - amp[i].a1 + amp[i].a2) / m;
    const double rho = std::abs(1.0 + dt * k);
    rep.advection_rho = std::max(rep.advection_rho, rho);
    rep.node_pass[i] = rho <= 1.0 + kRoundoff;
    const double node_dt = k > 0.0 ? 0.0 : (k < 0.0 ? -2.0 / k : std::numeric_limits<double>::infinity());
    if (node_dt < rep.dt_max) {
      rep.dt_max = node_dt;
      rep.binding_node = mesh.node(static_cast<int>(i)).id;
    }
    // The xi = pi condition is only shown to be necessary; sample the full symbol.
    if (!rho_warned) {
      constexpr int kSamples = 64;
      for (int s = 0; s <= kSamples; ++s) {
        const double xi = std::numbers::pi * s / kSamples;
        const std::complex<double> z = std::polar(1.0, xi);
        const std::complex<double> sym = 1.0 + dt / m * (amp[i].a0 + amp[i].a1 * z + amp[i].a2 * z * z);
        if (std::abs(sym) > 1.0 + kRoundoff) {
          rep.warnings.push_back("node " + std::to_string(mesh.node(static_cast<int>(i)).id) +
                                 ": |rho(xi)| > 1 at xi = " + std::to_string(xi));
          rho_warned = true;
          break;
        }
      }
    }
  }
  return rep;
}

}  // namespace

bool StabilityReport::pass() const {
  return std::all_of(node_pass.begin(), node_pass.end(), [](bool b) { return b; });
}

StabilityReport check_diffusion(const NetworkMesh& mesh, double D, double dt) {
  StabilityReport rep;
  rep.node_pass.assign(mesh.size(), true);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const auto nb = mesh.neighbors(static_cast<int>(i));
    double span = 0.0;
    double inv = 0.0;
    for (const Link& l : nb) {
      span += l.length;
      inv += 1.0 / l.length;
    }
    if (nb.size() > 3) rep.extrapolated = true;
    const double alpha = 2.0 * D * dt / span;
    const double ab = alpha * inv;
    rep.alpha_beta = std::max(rep.alpha_beta, ab);
    rep.node_pass[i] = ab <= 1.0 + kRoundoff;
    const double node_dt = span / (2.0 * D * inv);
    if (node_dt < rep.dt_max) {
      rep.dt_max = node_dt;
      rep.binding_node = mesh.node(static_cast<int>(i)).id;
    }
  }
  if (rep.extrapolated) rep.warnings.push_back("degree > 3 nodes present: diffusion bound extrapolated");
  return rep;
}

StabilityReport check_advection(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec,
                                double dt) {
  const LinearRows adv = assemble_advection(mesh, profile, spec);
  return advection_report(mesh, amplification_weights(mesh, adv.matrix), {}, dt);
}

StabilityReport check_model(const NetworkMesh& mesh, const RadiusProfile& profile, const ModelSpec& spec,
                            double dt) {
  const SpatialOperator op = assemble_model(mesh, profile, spec);
  std::vector<double> mass(op.mass_diag.data(), op.mass_diag.data() + op.mass_diag.size());
  const auto dcoef = node_diffusion(mesh, spec);
  double d_eff = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) d_eff = std::max(d_eff, dcoef[i] / mass[i]);

  StabilityReport rep = check_diffusion(mesh, d_eff, dt);
  if (spec.kind != ModelKind::SimpleDiffusion) {
    const LinearRows adv = assemble_advection(mesh, profile, spec);
    const StabilityReport a = advection_report(mesh, amplification_weights(mesh, adv.matrix), mass, dt);
    rep.advection_rho = a.advection_rho;
    for (std::size_t i = 0; i < mesh.size(); ++i) rep.node_pass[i] = rep.node_pass[i] && a.node_pass[i];
    if (a.dt_max < rep.dt_max) {
      rep.dt_max = a.dt_max;
      rep.binding_node = a.binding_node;
    }
    rep.warnings.insert(rep.warnings.end(), a.warnings.begin(), a.warnings.end());
  }
  if (spec.kind == ModelKind::ExpandedFlux) {
    // Compare the dx^2-scaled expansion rows with the plain diffusion rows.
    const LinearRows lap = assemble_laplacian(mesh);
    const LinearRows adv = assemble_advection(mesh, profile, spec);
    const SparseMatrix expansion = op.matrix - spec.D0 * lap.matrix - adv.matrix;
    for (Eigen::Index r = 0; r < expansion.outerSize(); ++r) {
      double e = 0.0;
      double d = 0.0;
      for (SparseMatrix::InnerIterator it(expansion, r); it; ++it) e += std::abs(it.value());
      for (SparseMatrix::InnerIterator it(lap.matrix, r); it; ++it) d += spec.D0 * std::abs(it.value());
      if (e > d) {
        rep.warnings.push_back("node " + std::to_string(mesh.node(static_cast<int>(r)).id) +
                               ": expansion terms exceed the diffusion row norm");
        break;
      }
    }
  }
  return rep;
}

}  // namespace fjnet
