#include "fjnet/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace fjnet {

namespace {

using boost::property_tree::ptree;

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double to_double(const std::string& word, const std::string& where) {
  double v = 0.0;
  const char* end = word.data() + word.size();
  auto [p, ec] = std::from_chars(word.data(), end, v);
  if (ec != std::errc{} || p != end || !std::isfinite(v))
    throw ConfigError(where + ": expected a number, got '" + word + "'");
  return v;
}

long to_long(const std::string& word, const std::string& where) {
  long v = 0;
  const char* end = word.data() + word.size();
  auto [p, ec] = std::from_chars(word.data(), end, v);
  if (ec != std::errc{} || p != end) throw ConfigError(where + ": expected an integer, got '" + word + "'");
  return v;
}

// Accessor for one section that remembers which keys were read.
class Section {
 public:
  Section(const ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    if (!tree_) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return it->second.data();
  }

  std::string str(const std::string& key, const std::string& fallback) { return raw(key).value_or(fallback); }

  std::string required(const std::string& key) {
    auto v = raw(key);
    if (!v) throw ConfigError("missing key [" + name_ + "] " + key);
    return *v;
  }

  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? to_double(*v, where(key)) : fallback;
  }

  double positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0)) throw ConfigError(where(key) + " must be positive");
    return v;
  }

  long integer(const std::string& key, long fallback) {
    auto v = raw(key);
    return v ? to_long(*v, where(key)) : fallback;
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& kv : *tree_)
      if (!seen_.count(kv.first)) throw ConfigError("unknown key " + where(kv.first));
  }

 private:
  const ptree* tree_;
  std::string name_;
  std::set<std::string> seen_;
};

const ptree* child(const ptree& root, const std::string& name) {
  auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

std::vector<ModelKind> parse_models(const std::string& text, const std::string& where) {
  std::vector<ModelKind> out;
  for (const std::string& w : split_words(text)) {
    try {
      out.push_back(parse_model(w));
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (out.empty()) throw ConfigError(where + ": no models listed");
  return out;
}

// "0.5" or "table 0:1 5:2 10:0"
BoundaryValue parse_boundary_value(const std::string& text, const std::string& where) {
  const auto words = split_words(text);
  if (words.empty()) throw ConfigError(where + ": empty value");
  if (words.front() != "table") {
    if (words.size() != 1) throw ConfigError(where + ": expected a number or 'table t:v ...'");
    return BoundaryValue::constant(to_double(words.front(), where));
  }
  std::vector<double> times;
  std::vector<double> values;
  for (std::size_t k = 1; k < words.size(); ++k) {
    const auto colon = words[k].find(':');
    if (colon == std::string::npos) throw ConfigError(where + ": table entries are t:v pairs");
    times.push_back(to_double(words[k].substr(0, colon), where));
    values.push_back(to_double(words[k].substr(colon + 1), where));
  }
  try {
    return BoundaryValue::table(std::move(times), std::move(values));
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void parse_geometry(Section s, RunConfig& cfg, const std::filesystem::path& base_dir) {
  GeometryConfig& g = cfg.geometry;
  const std::string kind = s.required("kind");
  if (kind == "cone") {
    g.kind = GeometryKind::Cone;
    g.lambda = s.number("lambda", g.lambda);
    if (g.lambda <= -0.1) throw ConfigError(s.where("lambda") + " makes 1 + lambda x vanish on [0, 10]");
  } else if (kind == "sinusoid") {
    g.kind = GeometryKind::Sinusoid;
    g.gamma = s.positive("gamma", g.gamma);
    if (!(std::numbers::pi / g.gamma - 1.0 > 1.0)) throw ConfigError(s.where("gamma") + " leaves an empty interval");
  } else if (kind == "cable") {
    g.kind = GeometryKind::Cable;
    g.x0 = s.number("x0", g.x0);
    g.x1 = s.number("x1", g.x1);
    g.radius = s.positive("radius", g.radius);
    if (!(g.x1 > g.x0)) throw ConfigError(s.where("x1") + " must exceed x0");
  } else if (kind == "file") {
    g.kind = GeometryKind::File;
    g.path = s.required("path");
    if (g.path.is_relative()) g.path = base_dir / g.path;
    g.refine = static_cast<int>(s.integer("refine", 0));
    if (g.refine < 0) throw ConfigError(s.where("refine") + " must be nonnegative");
    if (!std::filesystem::exists(g.path)) throw ConfigError("geometry file not found: " + g.path.string());
  } else {
    throw ConfigError(s.where("kind") + ": expected cone, sinusoid, cable or file, got '" + kind + "'");
  }
  if (g.kind != GeometryKind::File) {
    g.N = static_cast<int>(s.integer("N", g.N));
    if (g.N < 3) throw ConfigError(s.where("N") + " must be at least 3");
  }
  s.reject_unknown();
}

void parse_lateral_window(Section s, LateralSchedule& sched) {
  LateralSchedule::Window w;
  for (const std::string& id : split_words(s.required("nodes")))
    w.node_ids.push_back(static_cast<int>(to_long(id, s.where("nodes"))));
  w.strength = s.number("strength", 0.0);
  w.t_start = s.number("t_start", 0.0);
  w.t_end = s.number("t_end", 0.0);
  if (w.t_end < w.t_start) throw ConfigError(s.where("t_end") + " precedes t_start");
  sched.windows.push_back(std::move(w));
  s.reject_unknown();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ptree root;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig cfg;
  cfg.text = text;
  static const std::set<std::string> known = {"geometry", "model", "time", "boundary", "initial",
                                              "constraints", "compare", "convergence", "output"};
  for (const auto& kv : root) {
    if (!kv.second.data().empty()) throw ConfigError("key '" + kv.first + "' outside any section");
    if (!known.count(kv.first) && kv.first.rfind("lateral", 0) != 0)
      throw ConfigError("unknown section [" + kv.first + "]");
  }

  if (!child(root, "geometry")) throw ConfigError("missing section [geometry]");
  parse_geometry(Section(child(root, "geometry"), "geometry"), cfg, base_dir);

  {
    Section s(child(root, "model"), "model");
    try {
      cfg.model.kind = parse_model(s.str("name", "EF-FJ"));
    } catch (const std::exception& e) {
      throw ConfigError(s.where("name") + ": " + e.what());
    }
    cfg.model.D0 = s.positive("D0", 1.0);
    cfg.model.epsilon = s.positive("epsilon", 1.0);
    s.reject_unknown();
  }
  {
    Section s(child(root, "time"), "time");
    cfg.dt = s.positive("dt", cfg.dt);
    cfg.t_end = s.number("t_end", cfg.t_end);
    if (cfg.t_end < 0.0) throw ConfigError(s.where("t_end") + " must be nonnegative");
    cfg.record_every = s.integer("record_every", 0);
    if (cfg.record_every < 0) throw ConfigError(s.where("record_every") + " must be nonnegative");
    s.reject_unknown();
  }
  if (const ptree* b = child(root, "boundary")) {
    for (const auto& kv : *b) {
      const std::string where = "[boundary] " + kv.first;
      BoundaryValue v = parse_boundary_value(kv.second.data(), where);
      if (kv.first == "default") {
        cfg.boundary.fallback = std::move(v);
      } else {
        cfg.boundary.by_id.emplace(static_cast<int>(to_long(kv.first, where)), std::move(v));
      }
    }
  }
  {
    Section s(child(root, "initial"), "initial");
    cfg.initial_value = s.number("value", 1.0);
    s.reject_unknown();
  }
  for (const auto& kv : root) {
    if (kv.first.rfind("lateral", 0) != 0) continue;
    if (!cfg.lateral) cfg.lateral.emplace();
    parse_lateral_window(Section(&kv.second, kv.first), *cfg.lateral);
  }
  if (const ptree* c = child(root, "constraints")) {
    Section s(c, "constraints");
    ConstraintPolicy p;
    p.c_hi = s.number("c_hi", p.c_hi);
    p.c_lo = s.number("c_lo", p.c_lo);
    p.outflow_strength = s.number("outflow_strength", p.outflow_strength);
    if (!(p.c_lo < p.c_hi)) throw ConfigError("[constraints] needs c_lo < c_hi");
    cfg.constraints = p;
    s.reject_unknown();
  }
  {
    Section s(child(root, "compare"), "compare");
    cfg.compare_models = parse_models(s.str("models", "EF-FJ FJ Zw RR KP Kal"), s.where("models"));
    s.reject_unknown();
  }
  {
    Section s(child(root, "convergence"), "convergence");
    for (const std::string& w : split_words(s.str("N", "40 80 160 320"))) {
      const long n = to_long(w, s.where("N"));
      if (n < 3) throw ConfigError(s.where("N") + " entries must be at least 3");
      cfg.convergence.node_counts.push_back(static_cast<int>(n));
    }
    cfg.convergence.levels = static_cast<int>(s.integer("levels", 5));
    cfg.convergence.models = parse_models(s.str("models", "EF-FJ FJ"), s.where("models"));
    s.reject_unknown();
  }
  {
    Section s(child(root, "output"), "output");
    cfg.output_dir = s.str("dir", "out");
    s.reject_unknown();
  }

  if (!cfg.analytic() && !cfg.boundary.fallback) {
    // Leaves without explicit data are sealed.
    cfg.boundary.fallback = BoundaryValue::constant(0.0);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig cfg = parse_config(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
  cfg.source = path;
  return cfg;
}

bool RunConfig::analytic() const {
  return geometry.kind == GeometryKind::Cone || geometry.kind == GeometryKind::Sinusoid;
}

AnalyticExperiment RunConfig::analytic_experiment() const {
  if (!analytic()) throw ConfigError("this command needs an analytic geometry (cone or sinusoid)");
  AnalyticExperiment e = geometry.kind == GeometryKind::Cone ? AnalyticExperiment::cone(geometry.lambda, geometry.N)
                                                             : AnalyticExperiment::sinusoid(geometry.gamma, geometry.N);
  std::visit([&](auto& p) { p.D0 = model.D0; }, e.domain);
  e.dt = dt;
  e.t_end = t_end;
  return e;
}

BranchedExperiment RunConfig::branched_experiment() const {
  if (geometry.kind != GeometryKind::File) throw ConfigError("this command needs a geometry file");
  BranchedExperiment e{load_mesh_file(geometry.path.string()), boundary, initial_value, lateral, constraints};
  e.D0 = model.D0;
  e.dt = dt;
  e.t_end = t_end;
  return e;
}

NetworkMesh RunConfig::mesh() const {
  switch (geometry.kind) {
    case GeometryKind::Cone:
    case GeometryKind::Sinusoid: return analytic_experiment().mesh();
    case GeometryKind::Cable: {
      const double r = geometry.radius;
      return make_cable(geometry.x0, geometry.x1, geometry.N, [r](double) { return r; });
    }
    case GeometryKind::File: return refine(load_mesh_file(geometry.path.string()), geometry.refine);
  }
  throw ConfigError("unreachable geometry kind");
}

RadiusProfile RunConfig::profile() const {
  if (analytic()) return analytic_experiment().profile();
  return RadiusProfile{};
}

}  // namespace fjnet
