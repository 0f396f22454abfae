/**
 * @file integrate.hpp
 * @brief Forward-Euler integration with Neumann data, lateral flux and
 *        threshold-triggered flux constraints.
 */
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fjnet/discretize.hpp"
#include "fjnet/stability.hpp"

namespace fjnet {

/// Non-finite values or a failed stability pre-flight.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int node_id = -1, long step = -1)
      : std::runtime_error(what), node_id(node_id), step(step) {}
  int node_id;
  long step;
};

struct SimState {
  double t = 0.0;
  Vector c;
  long step_index = 0;
};

/// c <- c + dt * (matrix c + boundary_affine + source) ./ mass_diag; t = (step+1) dt.
SimState step(const SimState& state, const SpatialOperator& op, const Vector& source, double dt);

/// Neumann value provider: outward normal derivative dc/dn at one leaf.
/// Positive values drive material into the domain.
class BoundaryValue {
 public:
  static BoundaryValue constant(double v);
  /// Piecewise-linear table; undefined outside [times.front(), times.back()].
  static BoundaryValue table(std::vector<double> times, std::vector<double> values);
  static BoundaryValue analytic(std::function<double(double)> fn);

  double at(double t) const;
  bool time_dependent() const { return time_dependent_; }

 private:
  std::function<double(double)> fn_;
  bool time_dependent_ = false;
};

/// Per-leaf Neumann data keyed by node id (ids survive refinement).
struct BoundaryData {
  std::map<int, BoundaryValue> by_id;
  std::optional<BoundaryValue> fallback;  ///< applies to leaves without an entry

  /// Values ordered like mesh.leaves(); throws if a leaf has no provider.
  Vector values(const NetworkMesh& mesh, double t) const;
  bool time_dependent() const;
};

struct ConstraintPolicy {
  double c_hi = 6.0;  ///< above this the node switches to outflow
  double c_lo = 4.0;  ///< below this lateral flux is switched off
  double outflow_strength = 1.0;

  void validate() const;
};

/// Scheduled lateral flux with node ids, resolved per mesh.
struct LateralSchedule {
  struct Window {
    std::vector<int> node_ids;
    double strength = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
  };
  std::vector<Window> windows;

  LateralFluxField resolve(const NetworkMesh& mesh) const;
};

/// Override the scheduled field with the threshold policy using the state at
/// the start of the step: c > c_hi -> -outflow_strength, c < c_lo -> 0.
Vector apply_constraints(const SimState& state, const ConstraintPolicy& policy, const LateralFluxField& scheduled,
                         double t);

struct Snapshot {
  double t = 0.0;
  long step = 0;
  Vector c;
  Vector J;  ///< effective lateral flux applied in the step that starts here
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  StabilityReport stability;
  std::vector<std::string> warnings;
};

struct RunSetup {
  const NetworkMesh* mesh = nullptr;
  RadiusProfile profile;
  ModelSpec spec;
  BoundaryData boundary;
  Vector initial;
  std::optional<LateralFluxField> lateral;
  std::optional<ConstraintPolicy> policy;
  double dt = 0.0;
  double t_end = 0.0;
  long record_every = 1;
  bool force = false;  ///< run even if the stability pre-flight fails
};

/// Number of steps covering [0, t_end] with step dt.
long step_count(double dt, double t_end);

Trajectory run(const RunSetup& setup);

/// Median wall time in seconds of `repeats` matrix-vector steps with the operator.
double median_step_time(const SpatialOperator& op, int repeats = 1000);

}  // namespace fjnet
