// Run configuration: one INI document per experiment.
#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fjnet/integrate.hpp"
#include "fjnet/verify.hpp"

namespace fjnet {

// Bad configuration or unreadable input. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GeometryKind { Cone, Sinusoid, Cable, File };

struct GeometryConfig {
  GeometryKind kind = GeometryKind::Cone;
  double lambda = 0.2;  // cone
  double gamma = 0.5;   // sinusoid
  int N = 160;          // cone, sinusoid, cable
  double x0 = 0.0;      // cable
  double x1 = 1.0;      // cable
  double radius = 1.0;  // cable
  std::filesystem::path path;  // file, resolved against the config directory
  int refine = 0;              // file
};

struct ConvergenceConfig {
  std::vector<int> node_counts;  // analytic domains
  int levels = 5;                // geometry files
  std::vector<ModelKind> models;
};

struct RunConfig {
  std::filesystem::path source;
  std::string text;  // raw document, echoed into the manifest

  GeometryConfig geometry;
  ModelSpec model;
  double dt = 2e-4;
  double t_end = 10.0;
  long record_every = 0;  // 0: first and last step only

  BoundaryData boundary;  // geometry files and cables; analytic domains use the exact solution
  double initial_value = 1.0;
  std::optional<LateralSchedule> lateral;
  std::optional<ConstraintPolicy> constraints;

  std::vector<ModelKind> compare_models;
  ConvergenceConfig convergence;
  std::filesystem::path output_dir = "out";

  bool analytic() const;
  AnalyticExperiment analytic_experiment() const;  // throws ConfigError if not analytic
  BranchedExperiment branched_experiment() const;  // geometry file without refinement applied
  NetworkMesh mesh() const;                        // the mesh a simulate run uses
  RadiusProfile profile() const;
};

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace fjnet
