#include "fjnet/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace fjnet {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

fs::path output_dir(const RunConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = opt.out.empty() ? cfg.output_dir : opt.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest_base(const RunConfig& cfg, const std::string& command, const NetworkMesh& mesh) {
  json m;
  m["command"] = command;
  m["config_path"] = cfg.source.string();
  m["config"] = cfg.text;
  m["model"] = model_name(cfg.model.kind);
  m["nodes"] = mesh.size();
  m["geometry_hash"] = geometry_hash(mesh);
  m["timestamp"] = utc_timestamp();
  return m;
}

void write_manifest(const fs::path& dir, const json& m) {
  std::ofstream f = open_out(dir / "manifest.json");
  f << m.dump(2) << '\n';
}

void write_levels(const fs::path& path, const std::vector<ErrorReport>& levels, const std::vector<double>& slopes) {
  std::ofstream f = open_out(path);
  f << "level,N,dx,l1,slope\n";
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const ErrorReport& r = levels[k];
    f << k << ',' << r.N << ',' << num(r.dx) << ',' << num(r.l1) << ',' << num(slopes[k]) << '\n';
  }
}

std::string sci(double v) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(3) << v;
  return ss.str();
}

}  // namespace

std::string geometry_hash(const NetworkMesh& mesh) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : save_mesh(mesh)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const NetworkMesh mesh = cfg.mesh();
  RunSetup setup;
  setup.mesh = &mesh;
  setup.profile = cfg.profile();
  setup.spec = cfg.model;
  setup.dt = cfg.dt;
  setup.t_end = cfg.t_end;
  setup.force = opt.force;
  const long steps = step_count(cfg.dt, cfg.t_end);
  setup.record_every = cfg.record_every > 0 ? cfg.record_every : std::max(1L, steps);
  if (cfg.analytic()) {
    const AnalyticExperiment e = cfg.analytic_experiment();
    setup.boundary = e.boundary(mesh);
    setup.initial = e.initial(mesh);
  } else {
    setup.boundary = cfg.boundary;
    setup.initial = Vector::Constant(static_cast<Eigen::Index>(mesh.size()), cfg.initial_value);
  }
  if (cfg.lateral) setup.lateral = cfg.lateral->resolve(mesh);
  setup.policy = cfg.constraints;

  const fs::path dir = output_dir(cfg, opt);
  const Trajectory traj = run(setup);
  for (const std::string& w : traj.warnings) log << "warning: " << w << '\n';

  const Orientation& o = mesh.orientation();
  std::ofstream f = open_out(dir / "trajectory.csv");
  f << "t,node_id,x_arc,c,G\n";
  for (const Snapshot& s : traj.snapshots) {
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const Node& n = mesh.node(static_cast<int>(i));
      const double c = s.c[static_cast<Eigen::Index>(i)];
      f << num(s.t) << ',' << n.id << ',' << num(o.arc_length[i]) << ',' << num(c) << ','
        << num(c * std::numbers::pi * n.radius * n.radius) << '\n';
    }
  }

  json m = manifest_base(cfg, "simulate", mesh);
  m["dt"] = cfg.dt;
  m["dt_max"] = traj.stability.dt_max;
  m["steps"] = steps;
  m["stability_pass"] = traj.stability.pass();
  m["warnings"] = traj.warnings;
  m["median_step_seconds"] = median_step_time(assemble_model(mesh, setup.profile, cfg.model));
  write_manifest(dir, m);
  log << "simulated " << steps << " steps on " << mesh.size() << " nodes with " << model_name(cfg.model.kind)
      << "; wrote " << (dir / "trajectory.csv").string() << '\n';
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  AnalyticExperiment e = cfg.analytic_experiment();
  const fs::path dir = output_dir(cfg, opt);
  std::ofstream f = open_out(dir / "compare.csv");
  f << "model,l1\n";
  json rows = json::object();
  log << "model   l1\n";
  for (ModelKind k : cfg.compare_models) {
    const AnalyticResult r = run_analytic(e, k);
    f << model_name(k) << ',' << num(r.error.l1) << '\n';
    rows[model_name(k)] = r.error.l1;
    log << std::left << std::setw(8) << model_name(k) << sci(r.error.l1) << '\n';
  }
  json m = manifest_base(cfg, "compare", e.mesh());
  m["dt"] = cfg.dt;
  m["t_end"] = cfg.t_end;
  m["l1"] = rows;
  write_manifest(dir, m);
  return kExitOk;
}

int cmd_convergence(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log) {
  const fs::path dir = output_dir(cfg, opt);
  json slopes = json::object();
  NetworkMesh base = cfg.mesh();
  if (cfg.analytic()) {
    const AnalyticExperiment e = cfg.analytic_experiment();
    for (ModelKind k : cfg.convergence.models) {
      const ConvergenceResult r = convergence_study(e, k, cfg.convergence.node_counts);
      write_levels(dir / ("convergence_" + model_name(k) + ".csv"), r.levels, r.local_slopes);
      slopes[model_name(k)] = r.slope;
      log << model_name(k) << ": fitted slope " << num(r.slope) << '\n';
    }
  } else {
    const BranchedExperiment e = cfg.branched_experiment();
    base = e.base;
    const BranchedConvergence r = branched_convergence(e, cfg.convergence.models, cfg.convergence.levels);
    for (std::size_t k = 0; k < r.models.size(); ++k) {
      const std::string name = model_name(r.models[k]);
      write_levels(dir / ("convergence_" + name + ".csv"), r.errors[k], r.local_slopes[k]);
      slopes[name] = r.slopes[k];
      log << name << ": fitted slope " << num(r.slopes[k]) << '\n';
    }
  }
  json m = manifest_base(cfg, "convergence", base);
  m["dt"] = cfg.dt;
  m["slopes"] = slopes;
  write_manifest(dir, m);
  return kExitOk;
}

int cmd_stability(const RunConfig& cfg, const CommandOptions&, std::ostream& log) {
  const NetworkMesh mesh = cfg.mesh();
  const StabilityReport rep = check_model(mesh, cfg.profile(), cfg.model, cfg.dt);
  log << "model        " << model_name(cfg.model.kind) << '\n'
      << "nodes        " << mesh.size() << '\n'
      << "dt           " << num(cfg.dt) << '\n'
      << "dt_max       " << num(rep.dt_max) << '\n'
      << "binding node " << rep.binding_node << '\n'
      << "alpha*beta   " << num(rep.alpha_beta) << "  (limit 1)\n"
      << "advection    " << num(rep.advection_rho) << "  (limit 1)\n";
  std::size_t failed = 0;
  for (bool b : rep.node_pass) failed += b ? 0 : 1;
  for (const std::string& w : rep.warnings) log << "warning: " << w << '\n';
  log << (rep.pass() ? "PASS" : "FAIL") << " (" << failed << " of " << mesh.size() << " nodes fail)\n";
  return rep.pass() ? kExitOk : kExitNumerical;
}

int run_command(Command cmd, const fs::path& config, const CommandOptions& opt, std::ostream& log,
                std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config);
    return cmd(cfg, opt, log);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace fjnet
