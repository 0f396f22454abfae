#include "fjnet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fjnet {

namespace {

constexpr double kPi = std::numbers::pi;

double heat_kernel(double x, double t, double sigma, double a0, double D0) {
  const double s2 = sigma * sigma;
  const double spread = s2 + D0 * t;
  const double d = x - a0;
  return std::pow(s2 / (2.0 * kPi), 0.25) / std::sqrt(spread) * std::exp(-d * d / (4.0 * spread));
}

double heat_kernel_dx(double x, double t, double sigma, double a0, double D0) {
  const double spread = sigma * sigma + D0 * t;
  return -(x - a0) / (2.0 * spread) * heat_kernel(x, t, sigma, a0, D0);
}

}  // namespace

double cone_exact(double x, double t, const ConeParams& p) {
  return (1.0 + p.lambda * x) * heat_kernel(x, t, p.sigma, p.a0, p.D0);
}

double sinusoid_exact(double x, double t, const SinusoidParams& p) {
  return std::exp(p.D0 * p.gamma * p.gamma * t) * std::sin(p.gamma * x) * heat_kernel(x, t, p.sigma, p.a0, p.D0);
}

double cone_concentration(double x, double t, const ConeParams& p) {
  return heat_kernel(x, t, p.sigma, p.a0, p.D0) / (kPi * (1.0 + p.lambda * x));
}

double cone_concentration_dx(double x, double t, const ConeParams& p) {
  const double R = 1.0 + p.lambda * x;
  const double u = heat_kernel(x, t, p.sigma, p.a0, p.D0);
  const double ux = heat_kernel_dx(x, t, p.sigma, p.a0, p.D0);
  return (ux * R - p.lambda * u) / (kPi * R * R);
}

double sinusoid_concentration(double x, double t, const SinusoidParams& p) {
  return std::exp(p.D0 * p.gamma * p.gamma * t) * heat_kernel(x, t, p.sigma, p.a0, p.D0) /
         (kPi * std::sin(p.gamma * x));
}

double sinusoid_concentration_dx(double x, double t, const SinusoidParams& p) {
  const double R = std::sin(p.gamma * x);
  const double Rx = p.gamma * std::cos(p.gamma * x);
  const double u = heat_kernel(x, t, p.sigma, p.a0, p.D0);
  const double ux = heat_kernel_dx(x, t, p.sigma, p.a0, p.D0);
  return std::exp(p.D0 * p.gamma * p.gamma * t) * (ux * R - Rx * u) / (kPi * R * R);
}

double l1_error(std::span<const double> exact, std::span<const double> numeric) {
  if (exact.size() != numeric.size()) throw std::invalid_argument("l1_error: length mismatch");
  double peak = 0.0;
  for (double g : exact) peak = std::max(peak, std::abs(g));
  const double floor = 1e-12 * peak;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if (!(std::abs(exact[i]) >= floor) || exact[i] == 0.0) continue;
    sum += std::abs((exact[i] - numeric[i]) / exact[i]);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("l1_error: every exact value is below the relative floor");
  return sum / static_cast<double>(used);
}

double fit_slope(std::span<const double> dx, std::span<const double> error) {
  if (dx.size() != error.size() || dx.size() < 2) throw std::invalid_argument("fit_slope needs two or more points");
  const double n = static_cast<double>(dx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double lx = std::log(dx[i]);
    const double ly = std::log(error[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

AnalyticExperiment AnalyticExperiment::cone(double lambda, int N) {
  AnalyticExperiment e;
  e.domain = ConeParams{lambda, 4.0, 0.0, 1.0};
  e.x0 = 0.0;
  e.x1 = 10.0;
  e.N = N;
  return e;
}

AnalyticExperiment AnalyticExperiment::sinusoid(double gamma, int N) {
  AnalyticExperiment e;
  e.domain = SinusoidParams{gamma, 2.0, 1.0, 1.0};
  e.x0 = 1.0;
  e.x1 = kPi / gamma - 1.0;
  e.N = N;
  return e;
}

double AnalyticExperiment::D0() const {
  return std::visit([](const auto& p) { return p.D0; }, domain);
}

RadiusProfile AnalyticExperiment::profile() const {
  if (const auto* c = std::get_if<ConeParams>(&domain)) return RadiusProfile(Cone{c->lambda});
  return RadiusProfile(Sinusoid{std::get<SinusoidParams>(domain).gamma});
}

NetworkMesh AnalyticExperiment::mesh() const {
  const RadiusProfile prof = profile();
  return make_cable(x0, x1, N, [&](double x) { return prof.radius(x); });
}

double AnalyticExperiment::exact(double x, double t) const {
  if (const auto* c = std::get_if<ConeParams>(&domain)) return cone_exact(x, t, *c);
  return sinusoid_exact(x, t, std::get<SinusoidParams>(domain));
}

BoundaryData AnalyticExperiment::boundary(const NetworkMesh& mesh) const {
  auto dcdx = [dom = domain](double x, double t) {
    if (const auto* c = std::get_if<ConeParams>(&dom)) return cone_concentration_dx(x, t, *c);
    return sinusoid_concentration_dx(x, t, std::get<SinusoidParams>(dom));
  };
  BoundaryData b;
  for (int leaf : mesh.leaves()) {
    const double x = mesh.x(leaf);
    // Outward normal is -x at the root end and +x at the far end.
    const double sign = leaf == mesh.root() ? -1.0 : 1.0;
    b.by_id.emplace(mesh.node(leaf).id, BoundaryValue::analytic([=](double t) { return sign * dcdx(x, t); }));
  }
  return b;
}

Vector AnalyticExperiment::initial(const NetworkMesh& mesh) const {
  Vector c(static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const int k = static_cast<int>(i);
    const double R = mesh.radius(k);
    c[static_cast<Eigen::Index>(i)] = exact(mesh.x(k), 0.0) / (kPi * R * R);
  }
  return c;
}

AnalyticResult run_analytic(const AnalyticExperiment& exp, ModelKind model, long record_every) {
  const NetworkMesh mesh = exp.mesh();
  RunSetup setup;
  setup.mesh = &mesh;
  setup.profile = exp.profile();
  setup.spec = ModelSpec{model, exp.D0(), 1.0};
  setup.boundary = exp.boundary(mesh);
  setup.initial = exp.initial(mesh);
  setup.dt = exp.dt;
  setup.t_end = exp.t_end;
  const long steps = step_count(exp.dt, exp.t_end);
  setup.record_every = record_every > 0 ? record_every : std::max(1L, steps);

  AnalyticResult res;
  res.trajectory = run(setup);
  const Snapshot& last = res.trajectory.snapshots.back();
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const int k = static_cast<int>(i);
    const double R = mesh.radius(k);
    res.x.push_back(mesh.x(k));
    res.G_exact.push_back(exp.exact(mesh.x(k), last.t));
    res.G_numeric.push_back(last.c[static_cast<Eigen::Index>(i)] * kPi * R * R);
  }
  res.error.l1 = l1_error(res.G_exact, res.G_numeric);
  res.error.N = exp.N;
  res.error.dx = (exp.x1 - exp.x0) / static_cast<double>(exp.N - 1);
  res.error.t = last.t;
  return res;
}

namespace {

std::vector<double> local_slopes_of(const std::vector<ErrorReport>& levels) {
  std::vector<double> out{std::numeric_limits<double>::quiet_NaN()};
  for (std::size_t k = 1; k < levels.size(); ++k)
    out.push_back(std::log(levels[k].l1 / levels[k - 1].l1) / std::log(levels[k].dx / levels[k - 1].dx));
  return out;
}

double slope_of(const std::vector<ErrorReport>& levels) {
  std::vector<double> dx;
  std::vector<double> err;
  for (const ErrorReport& r : levels) {
    if (!(r.l1 > 0.0)) continue;
    dx.push_back(r.dx);
    err.push_back(r.l1);
  }
  if (dx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return fit_slope(dx, err);
}

}  // namespace

ConvergenceResult convergence_study(const AnalyticExperiment& base, ModelKind model, std::span<const int> node_counts) {
  if (node_counts.size() < 3) throw std::invalid_argument("convergence study needs at least 3 levels");
  ConvergenceResult out;
  for (int n : node_counts) {
    AnalyticExperiment e = base;
    e.N = n;
    out.levels.push_back(run_analytic(e, model).error);
  }
  out.local_slopes = local_slopes_of(out.levels);
  out.slope = slope_of(out.levels);
  return out;
}

// ---------------------------------------------------------------------------

BranchedRun run_branched(const BranchedExperiment& exp, ModelKind model, int level, long record_every) {
  BranchedRun out{refine(exp.base, level), {}};
  RunSetup setup;
  setup.mesh = &out.mesh;
  setup.profile = RadiusProfile{};
  setup.spec = ModelSpec{model, exp.D0, 1.0};
  setup.boundary = exp.boundary;
  setup.initial = Vector::Constant(static_cast<Eigen::Index>(out.mesh.size()), exp.initial_value);
  if (exp.lateral) setup.lateral = exp.lateral->resolve(out.mesh);
  setup.policy = exp.policy;
  setup.dt = exp.dt;
  setup.t_end = exp.t_end;
  const long steps = step_count(exp.dt, exp.t_end);
  setup.record_every = record_every > 0 ? record_every : std::max(1L, steps);
  out.trajectory = run(setup);
  return out;
}

double branched_error(const BranchedRun& run, const BranchedRun& reference) {
  const Vector& c = run.trajectory.snapshots.back().c;
  const Vector& ref = reference.trajectory.snapshots.back().c;
  std::vector<double> exact;
  std::vector<double> numeric;
  for (std::size_t i = 0; i < run.mesh.size(); ++i) {
    const Node& n = run.mesh.node(static_cast<int>(i));
    const int j = reference.mesh.index_of(n.id);
    const double area = kPi * n.radius * n.radius;
    exact.push_back(ref[j] * area);
    numeric.push_back(c[static_cast<Eigen::Index>(i)] * area);
  }
  return l1_error(exact, numeric);
}

BranchedConvergence branched_convergence(const BranchedExperiment& exp, std::span<const ModelKind> models,
                                         int levels) {
  if (levels < 3) throw std::invalid_argument("convergence study needs at least 3 levels");
  const BranchedRun reference = run_branched(exp, ModelKind::ExpandedFlux, levels - 1);
  const double base_dx = exp.base.total_length() / static_cast<double>(exp.base.edges().size());
  BranchedConvergence out;
  out.models.assign(models.begin(), models.end());
  for (ModelKind m : models) {
    std::vector<ErrorReport> errs;
    for (int level = 0; level < levels; ++level) {
      ErrorReport r;
      const bool is_reference = m == ModelKind::ExpandedFlux && level == levels - 1;
      const BranchedRun run = is_reference ? reference : run_branched(exp, m, level);
      r.l1 = branched_error(run, reference);
      r.N = static_cast<int>(run.mesh.size());
      r.dx = base_dx / std::pow(2.0, level);
      r.t = run.trajectory.snapshots.back().t;
      errs.push_back(r);
    }
    out.local_slopes.push_back(local_slopes_of(errs));
    out.slopes.push_back(slope_of(errs));
    out.errors.push_back(std::move(errs));
  }
  return out;
}

}  // namespace fjnet
