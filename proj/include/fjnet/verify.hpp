/**
 * @file verify.hpp
 * @brief Analytic reference solutions, relative L1 error and convergence drivers.
 *
 * Both analytic channels are built from the heat kernel
 *     u(x, t) = (s^2 / 2 pi)^(1/4) (s^2 + D0 t)^(-1/2) exp(-(x - a0)^2 / (4 (s^2 + D0 t)))
 * which maps to the integrated concentration G = c pi R^2 as
 *     cone:      G = (1 + lambda x) u
 *     sinusoid:  G = exp(D0 gamma^2 t) sin(gamma x) u
 */
#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fjnet/integrate.hpp"

namespace fjnet {

struct ConeParams {
  double lambda = 0.2;
  double sigma = 4.0;
  double a0 = 0.0;
  double D0 = 1.0;
};

struct SinusoidParams {
  double gamma = 0.5;
  double sigma = 2.0;
  double a0 = 1.0;
  double D0 = 1.0;
};

double cone_exact(double x, double t, const ConeParams& p);
double sinusoid_exact(double x, double t, const SinusoidParams& p);

/// Local concentration c = G / (pi R^2) and its x-derivative.
double cone_concentration(double x, double t, const ConeParams& p);
double cone_concentration_dx(double x, double t, const ConeParams& p);
double sinusoid_concentration(double x, double t, const SinusoidParams& p);
double sinusoid_concentration_dx(double x, double t, const SinusoidParams& p);

struct ErrorReport {
  double l1 = 0.0;
  int N = 0;
  double dx = 0.0;
  double t = 0.0;
};

/// Mean of |(G - G_hat) / G| over points with |G| >= 1e-12 max|G|. Throws if none qualify.
double l1_error(std::span<const double> exact, std::span<const double> numeric);

/// Least-squares slope of log(error) against log(dx).
double fit_slope(std::span<const double> dx, std::span<const double> error);

/// Cone on [0, 10] or sinusoid on [1, pi/gamma - 1], Neumann data from the exact solution.
struct AnalyticExperiment {
  std::variant<ConeParams, SinusoidParams> domain;
  double x0 = 0.0;
  double x1 = 10.0;
  int N = 160;
  double dt = 2e-4;
  double t_end = 10.0;

  static AnalyticExperiment cone(double lambda, int N = 160);
  static AnalyticExperiment sinusoid(double gamma, int N = 160);

  double D0() const;
  RadiusProfile profile() const;
  NetworkMesh mesh() const;
  /// Exact G at (x, t).
  double exact(double x, double t) const;
  BoundaryData boundary(const NetworkMesh& mesh) const;
  Vector initial(const NetworkMesh& mesh) const;
};

struct AnalyticResult {
  ErrorReport error;
  std::vector<double> x;
  std::vector<double> G_exact;
  std::vector<double> G_numeric;
  Trajectory trajectory;
};

/// Run one model on the analytic domain and measure the L1 error at t_end.
AnalyticResult run_analytic(const AnalyticExperiment& exp, ModelKind model, long record_every = 0);

struct ConvergenceResult {
  std::vector<ErrorReport> levels;
  std::vector<double> local_slopes;  ///< slope between consecutive levels (NaN for the first)
  double slope = 0.0;                ///< least-squares fit over all levels
};

ConvergenceResult convergence_study(const AnalyticExperiment& base, ModelKind model, std::span<const int> node_counts);

/// Branched experiment on a geometry file refined level by level.
struct BranchedExperiment {
  NetworkMesh base;
  BoundaryData boundary;
  double initial_value = 1.0;
  std::optional<LateralSchedule> lateral;
  std::optional<ConstraintPolicy> policy;
  double D0 = 1.0;
  double dt = 1e-5;
  double t_end = 10.0;
};

/// Final state of one branched run, keyed by node id.
struct BranchedRun {
  NetworkMesh mesh;
  Trajectory trajectory;
};

BranchedRun run_branched(const BranchedExperiment& exp, ModelKind model, int level, long record_every = 0);

/// Relative L1 error of `run` at its nodes against `reference` at the same node ids (G = c pi R^2).
double branched_error(const BranchedRun& run, const BranchedRun& reference);

/// Errors of each model at refinement levels 0..levels-1, measured against the
/// finest expanded-flux run. Index [model][level].
struct BranchedConvergence {
  std::vector<ModelKind> models;
  std::vector<std::vector<ErrorReport>> errors;
  std::vector<std::vector<double>> local_slopes;
  std::vector<double> slopes;
};

BranchedConvergence branched_convergence(const BranchedExperiment& exp, std::span<const ModelKind> models,
                                         int levels);

}  // namespace fjnet
