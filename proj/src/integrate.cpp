#include "fjnet/integrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fjnet {

namespace {

void check_finite(const Vector& c, const NetworkMesh* mesh, long step_index) {
  if (c.allFinite()) return;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::isfinite(c[i])) continue;
    const int id = mesh ? mesh->node(static_cast<int>(i)).id : static_cast<int>(i);
    throw NumericalError("non-finite concentration at node " + std::to_string(id) + ", step " +
                             std::to_string(step_index),
                         id, step_index);
  }
}

}  // namespace

SimState step(const SimState& state, const SpatialOperator& op, const Vector& source, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Vector rhs = op.matrix * state.c;
  if (op.boundary_affine.size() == rhs.size()) rhs += op.boundary_affine;
  if (source.size() == rhs.size()) rhs += source;
  SimState next;
  next.c = state.c + dt * rhs.cwiseQuotient(op.mass_diag);
  next.step_index = state.step_index + 1;
  next.t = static_cast<double>(next.step_index) * dt;
  check_finite(next.c, nullptr, next.step_index);
  return next;
}

BoundaryValue BoundaryValue::constant(double v) {
  BoundaryValue b;
  b.fn_ = [v](double) { return v; };
  return b;
}

BoundaryValue BoundaryValue::table(std::vector<double> times, std::vector<double> values) {
  if (times.empty() || times.size() != values.size())
    throw std::invalid_argument("boundary table needs matching, nonempty time and value columns");
  if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("boundary table times must be sorted");
  BoundaryValue b;
  b.time_dependent_ = true;
  b.fn_ = [times = std::move(times), values = std::move(values)](double t) {
    if (t < times.front() || t > times.back())
      throw std::out_of_range("boundary data undefined at t = " + std::to_string(t));
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.end()) return values.back();
    const auto k = static_cast<std::size_t>(it - times.begin());
    if (k == 0) return values.front();
    const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return (1.0 - w) * values[k - 1] + w * values[k];
  };
  return b;
}

BoundaryValue BoundaryValue::analytic(std::function<double(double)> fn) {
  BoundaryValue b;
  b.time_dependent_ = true;
  b.fn_ = std::move(fn);
  return b;
}

double BoundaryValue::at(double t) const { return fn_(t); }

Vector BoundaryData::values(const NetworkMesh& mesh, double t) const {
  const auto leaves = mesh.leaves();
  Vector g(static_cast<Eigen::Index>(leaves.size()));
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const int id = mesh.node(leaves[k]).id;
    if (auto it = by_id.find(id); it != by_id.end()) {
      g[static_cast<Eigen::Index>(k)] = it->second.at(t);
    } else if (fallback) {
      g[static_cast<Eigen::Index>(k)] = fallback->at(t);
    } else {
      throw std::invalid_argument("no boundary data for leaf node " + std::to_string(id));
    }
  }
  return g;
}

bool BoundaryData::time_dependent() const {
  if (fallback && fallback->time_dependent()) return true;
  return std::any_of(by_id.begin(), by_id.end(), [](const auto& kv) { return kv.second.time_dependent(); });
}

void ConstraintPolicy::validate() const {
  if (!(c_lo < c_hi)) throw std::invalid_argument("constraint thresholds need c_lo < c_hi");
}

LateralFluxField LateralSchedule::resolve(const NetworkMesh& mesh) const {
  LateralFluxField f;
  for (const Window& w : windows) {
    FluxWindow fw;
    for (int id : w.node_ids) fw.nodes.push_back(mesh.index_of(id));
    fw.strength = w.strength;
    fw.t_start = w.t_start;
    fw.t_end = w.t_end;
    f.windows.push_back(std::move(fw));
  }
  return f;
}

Vector apply_constraints(const SimState& state, const ConstraintPolicy& policy, const LateralFluxField& scheduled,
                         double t) {
  Vector J = scheduled.at(t, static_cast<std::size_t>(state.c.size()));
  for (Eigen::Index i = 0; i < J.size(); ++i) {
    if (state.c[i] > policy.c_hi) {
      J[i] = -policy.outflow_strength;
    } else if (state.c[i] < policy.c_lo) {
      J[i] = 0.0;
    }
  }
  return J;
}

long step_count(double dt, double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (t_end < 0.0) throw std::invalid_argument("t_end must be nonnegative");
  return static_cast<long>(std::llround(std::ceil(t_end / dt - 1e-9)));
}

Trajectory run(const RunSetup& setup) {
  if (setup.mesh == nullptr) throw std::invalid_argument("run needs a mesh");
  const NetworkMesh& mesh = *setup.mesh;
  if (setup.initial.size() != static_cast<Eigen::Index>(mesh.size()))
    throw std::invalid_argument("initial condition has the wrong length");
  if (setup.record_every < 1) throw std::invalid_argument("record_every must be at least 1");
  if (setup.policy) setup.policy->validate();

  Trajectory traj;
  traj.stability = check_model(mesh, setup.profile, setup.spec, setup.dt);
  traj.warnings = traj.stability.warnings;
  if (!traj.stability.pass()) {
    const std::string msg = "stability check failed (dt = " + std::to_string(setup.dt) +
                            ", dt_max = " + std::to_string(traj.stability.dt_max) + ", binding node " +
                            std::to_string(traj.stability.binding_node) + ")";
    if (!setup.force) throw NumericalError(msg, traj.stability.binding_node, 0);
    traj.warnings.push_back(msg + "; continuing because of --force");
  }

  SpatialOperator op = assemble_model(mesh, setup.profile, setup.spec);
  traj.warnings.insert(traj.warnings.end(), op.notes.begin(), op.notes.end());
  const bool moving_boundary = setup.boundary.time_dependent();
  op.set_neumann(setup.boundary.values(mesh, 0.0));

  std::optional<SparseMatrix> lateral;
  if (setup.lateral) lateral = lateral_operator(mesh, setup.spec);

  SimState state;
  state.c = setup.initial;
  check_finite(state.c, &mesh, 0);

  auto effective_flux = [&](const SimState& s) -> Vector {
    if (!setup.lateral) return {};
    if (setup.policy) return apply_constraints(s, *setup.policy, *setup.lateral, s.t);
    return setup.lateral->at(s.t, mesh.size());
  };

  const long n_steps = step_count(setup.dt, setup.t_end);
  Vector J = effective_flux(state);
  traj.snapshots.push_back({state.t, 0, state.c, J});
  Vector rhs(state.c.size());
  for (long n = 0; n < n_steps; ++n) {
    if (moving_boundary && n > 0) op.set_neumann(setup.boundary.values(mesh, state.t));
    rhs.noalias() = op.matrix * state.c;
    rhs += op.boundary_affine;
    if (lateral) rhs.noalias() += *lateral * J;
    state.c += setup.dt * rhs.cwiseQuotient(op.mass_diag);
    state.step_index = n + 1;
    state.t = static_cast<double>(state.step_index) * setup.dt;
    check_finite(state.c, &mesh, state.step_index);
    J = effective_flux(state);
    if (state.step_index % setup.record_every == 0 || state.step_index == n_steps)
      traj.snapshots.push_back({state.t, state.step_index, state.c, J});
  }
  return traj;
}

double median_step_time(const SpatialOperator& op, int repeats) {
  Vector c = Vector::Ones(static_cast<Eigen::Index>(op.size()));
  Vector rhs(c.size());
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repeats));
  for (int k = 0; k < repeats; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    rhs.noalias() = op.matrix * c;
    rhs += op.boundary_affine;
    c += 1e-12 * rhs.cwiseQuotient(op.mass_diag);
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::nth_element(times.begin(), times.begin() + repeats / 2, times.end());
  return times[static_cast<std::size_t>(repeats / 2)];
}

}  // namespace fjnet
