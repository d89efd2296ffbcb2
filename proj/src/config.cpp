#include "geoentropy/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "geoentropy/error.hpp"
#include "json.hpp"

namespace geoentropy {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where.empty() ? "config" : where, "must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(join(where, k), "unknown key");
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

double positive(const json& j, const std::string& field) {
  double v = number(j, field);
  if (!(v > 0.0)) throw ConfigError(field, "must be positive");
  return v;
}

std::size_t count(const json& j, const std::string& field, std::size_t min = 0) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(field, "must be an integer");
  auto v = j.get<std::int64_t>();
  if (v < static_cast<std::int64_t>(min)) throw ConfigError(field, "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::vector<double> grid(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "must be a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    double v = positive(j[i], field + "[" + std::to_string(i) + "]");
    if (!out.empty() && !(v > out.back())) throw ConfigError(field, "must be strictly ascending");
    out.push_back(v);
  }
  return out;
}

Coords vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "must be a nonempty array of numbers");
  Coords out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

ManifoldSpec manifold_spec(const json& j, const std::string& where) {
  only_keys(j, where, {"kind", "points", "dims", "level", "levels", "radii", "factors"});
  ManifoldSpec s;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError(join(where, "kind"), "must be a string");
  s.kind = j["kind"].get<std::string>();
  static const std::set<std::string> kinds{"torus", "circle", "interval", "sphere", "shell", "mapping-torus",
                                           "product"};
  if (!kinds.count(s.kind))
    throw ConfigError(join(where, "kind"),
                      "unknown manifold kind '" + s.kind +
                          "' (torus, circle, interval, sphere, shell, mapping-torus, product)");
  if (j.contains("points")) s.points = count(j["points"], join(where, "points"), 2);
  if (j.contains("dims")) s.dims = count(j["dims"], join(where, "dims"), 1);
  if (j.contains("level")) s.level = count(j["level"], join(where, "level"));
  if (j.contains("levels")) s.levels = count(j["levels"], join(where, "levels"), 1);
  if (j.contains("radii")) s.radii = grid(j["radii"], join(where, "radii"));
  if (s.kind == "product") {
    if (!j.contains("factors") || !j["factors"].is_array() || j["factors"].size() != 2)
      throw ConfigError(join(where, "factors"), "product needs an array of two manifolds");
    for (std::size_t i = 0; i < 2; ++i)
      s.factors.push_back(manifold_spec(j["factors"][i], join(where, "factors[" + std::to_string(i) + "]")));
  }
  return s;
}

StructureSpec structure_spec(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "must be an object");
  StructureSpec s;
  if (j.contains("scale")) {
    only_keys(j, where, {"scale", "of"});
    s.kind = StructureSpec::Kind::scale;
    s.gamma = positive(j["scale"], join(where, "scale"));
    if (!j.contains("of")) throw ConfigError(join(where, "of"), "scale needs the structure to scale");
    s.children.push_back(structure_spec(j["of"], join(where, "of")));
    return s;
  }
  if (j.contains("direct_sum")) {
    only_keys(j, where, {"direct_sum"});
    s.kind = StructureSpec::Kind::direct_sum;
    auto& parts = j["direct_sum"];
    if (!parts.is_array() || parts.size() != 2)
      throw ConfigError(join(where, "direct_sum"), "must be an array of two structures");
    for (std::size_t i = 0; i < 2; ++i)
      s.children.push_back(structure_spec(parts[i], join(where, "direct_sum[" + std::to_string(i) + "]")));
    return s;
  }
  only_keys(j, where, {"zoo", "manifold", "params", "inner"});
  if (!j.contains("zoo") || !j["zoo"].is_string())
    throw ConfigError(join(where, "zoo"), "must name a zoo structure (or use scale / direct_sum)");
  s.name = j["zoo"].get<std::string>();
  const ZooEntry* entry = nullptr;
  for (auto& e : zoo_entries())
    if (e.name == s.name) entry = &e;
  if (!entry) throw ConfigError(join(where, "zoo"), "unknown zoo structure '" + s.name + "'");
  if (j.contains("manifold")) {
    s.manifold = manifold_spec(j["manifold"], join(where, "manifold"));
    s.has_manifold = true;
  }
  if (j.contains("params")) {
    auto& p = j["params"];
    if (!p.is_object()) throw ConfigError(join(where, "params"), "must be an object of numbers");
    for (auto& [k, v] : p.items()) s.params[k] = number(v, join(where, "params." + k));
  }
  if (s.name == "poisson-pi-x") {
    if (!j.contains("inner")) throw ConfigError(join(where, "inner"), "poisson-pi-x needs an inner vector field");
    auto inner = structure_spec(j["inner"], join(where, "inner"));
    if (inner.kind != StructureSpec::Kind::zoo || !zoo_entry(inner.name).vector_field)
      throw ConfigError(join(where, "inner"), "must be a vector-field zoo structure");
    s.children.push_back(std::move(inner));
  } else if (j.contains("inner")) {
    throw ConfigError(join(where, "inner"), "only poisson-pi-x takes an inner field");
  }
  return s;
}

PointPredicate predicate(const json& j, const std::string& where) {
  PointPredicate p;
  if (j.is_string() && j.get<std::string>() == "all") return p;
  if (!j.is_object()) throw ConfigError(where, "must be \"all\" or an object with ball, box or ids");
  only_keys(j, where, {"ball", "box", "ids"});
  if (j.size() != 1) throw ConfigError(where, "give exactly one of ball, box, ids");
  if (j.contains("ball")) {
    auto& b = j["ball"];
    only_keys(b, join(where, "ball"), {"center", "radius"});
    p.kind = PointPredicate::Kind::ball;
    if (!b.contains("center")) throw ConfigError(join(where, "ball.center"), "missing");
    if (!b.contains("radius")) throw ConfigError(join(where, "ball.radius"), "missing");
    p.center = vec(b["center"], join(where, "ball.center"));
    p.radius = number(b["radius"], join(where, "ball.radius"));
    if (p.radius < 0.0) throw ConfigError(join(where, "ball.radius"), "must be nonnegative");
  } else if (j.contains("box")) {
    auto& b = j["box"];
    only_keys(b, join(where, "box"), {"min", "max"});
    p.kind = PointPredicate::Kind::box;
    if (!b.contains("min") || !b.contains("max")) throw ConfigError(join(where, "box"), "needs min and max");
    p.lo = vec(b["min"], join(where, "box.min"));
    p.hi = vec(b["max"], join(where, "box.max"));
    if (p.lo.size() != p.hi.size()) throw ConfigError(join(where, "box"), "min and max differ in length");
  } else {
    auto& ids = j["ids"];
    if (!ids.is_array() || ids.empty()) throw ConfigError(join(where, "ids"), "must be a nonempty array");
    p.kind = PointPredicate::Kind::ids;
    for (std::size_t i = 0; i < ids.size(); ++i)
      p.ids.push_back(static_cast<PointId>(count(ids[i], join(where, "ids[" + std::to_string(i) + "]"))));
  }
  return p;
}

void solver_block(const json& j, EntropyOptions& o) {
  only_keys(j, "solver", {"mode", "width", "seed", "budget"});
  std::uint64_t seed = j.contains("seed") ? count(j["seed"], "solver.seed") : 0;
  std::string mode = "exhaustive";
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw ConfigError("solver.mode", "must be \"exhaustive\" or \"beam\"");
    mode = j["mode"].get<std::string>();
  }
  if (mode == "exhaustive") {
    if (j.contains("width")) throw ConfigError("solver.width", "only beam mode takes a width");
    o.mode = SolveMode::exhaustive();
    o.mode.seed = seed;
  } else if (mode == "beam") {
    if (!j.contains("width")) throw ConfigError("solver.width", "beam mode needs a width");
    o.mode = SolveMode::beam(count(j["width"], "solver.width", 1), seed);
  } else {
    throw ConfigError("solver.mode", "must be \"exhaustive\" or \"beam\"");
  }
  if (j.contains("budget")) o.mode.budget = count(j["budget"], "solver.budget", 1);
}

ExperimentConfig from_json(const json& j) {
  only_keys(j, "", {"structure", "r_grid", "epsilon_grid", "steps", "speed_subdivision", "snap_tolerance",
                    "solver", "count_method", "fit_window", "compute_D", "pursuer_speed", "leaf_probe_r",
                    "jobs", "lemma_rho", "local", "flow", "checks", "outputs"});
  ExperimentConfig c;
  if (!j.contains("structure")) throw ConfigError("structure", "missing");
  c.structure = structure_spec(j["structure"], "structure");
  auto& o = c.entropy;
  if (!j.contains("r_grid")) throw ConfigError("r_grid", "missing");
  o.r_grid = grid(j["r_grid"], "r_grid");
  if (!j.contains("epsilon_grid")) throw ConfigError("epsilon_grid", "missing");
  o.epsilon_grid = grid(j["epsilon_grid"], "epsilon_grid");
  if (j.contains("steps")) o.steps = count(j["steps"], "steps", 1);
  if (j.contains("speed_subdivision"))
    o.matrix.moves.speed_subdivision = count(j["speed_subdivision"], "speed_subdivision", 1);
  if (j.contains("snap_tolerance") && !j["snap_tolerance"].is_null()) {
    o.matrix.moves.snap_tolerance = number(j["snap_tolerance"], "snap_tolerance");
    if (o.matrix.moves.snap_tolerance < 0.0) throw ConfigError("snap_tolerance", "must be nonnegative");
  }
  if (j.contains("solver")) solver_block(j["solver"], o);
  if (j.contains("count_method")) {
    auto& m = j["count_method"];
    if (m == "greedy") o.method = CountMethod::greedy;
    else if (m == "exact") o.method = CountMethod::exact;
    else throw ConfigError("count_method", "must be \"greedy\" or \"exact\"");
  }
  if (j.contains("fit_window")) {
    o.fit_window = count(j["fit_window"], "fit_window");
    if (o.fit_window != 0 && o.fit_window < 3) throw ConfigError("fit_window", "must be 0 (default) or at least 3");
  }
  if (j.contains("compute_D")) {
    if (!j["compute_D"].is_boolean()) throw ConfigError("compute_D", "must be true or false");
    o.compute_D = j["compute_D"].get<bool>();
  }
  if (j.contains("pursuer_speed") && !j["pursuer_speed"].is_null())
    o.matrix.pursuer_speed = positive(j["pursuer_speed"], "pursuer_speed");
  if (j.contains("leaf_probe_r")) o.matrix.leaf_probe_r = number(j["leaf_probe_r"], "leaf_probe_r");
  if (j.contains("jobs")) o.matrix.jobs = count(j["jobs"], "jobs", 1);
  if (j.contains("lemma_rho")) o.lemma_rho = grid(j["lemma_rho"], "lemma_rho");
  if (o.r_grid.size() < 3) throw ConfigError("r_grid", "slope fits need at least 3 values");
  if (o.fit_window > o.r_grid.size()) throw ConfigError("fit_window", "exceeds the r grid length");

  if (j.contains("local")) {
    auto& l = j["local"];
    only_keys(l, "local", {"K", "U", "V"});
    LocalBlock b;
    for (const char* key : {"K", "U", "V"})
      if (!l.contains(key)) throw ConfigError(std::string("local.") + key, "missing");
    b.K = predicate(l["K"], "local.K");
    b.U = predicate(l["U"], "local.U");
    b.V = predicate(l["V"], "local.V");
    c.local = b;
  }
  if (j.contains("flow")) {
    auto& f = j["flow"];
    only_keys(f, "flow", {"r_grid", "epsilon_grid", "time_step", "fit_window"});
    FlowBlock b;
    b.r_grid = f.contains("r_grid") ? grid(f["r_grid"], "flow.r_grid") : o.r_grid;
    b.epsilon_grid = f.contains("epsilon_grid") ? grid(f["epsilon_grid"], "flow.epsilon_grid") : o.epsilon_grid;
    if (f.contains("time_step")) b.time_step = positive(f["time_step"], "flow.time_step");
    if (f.contains("fit_window")) b.fit_window = count(f["fit_window"], "flow.fit_window");
    if (b.r_grid.size() < 3) throw ConfigError("flow.r_grid", "slope fits need at least 3 values");
    c.flow = b;
  }
  if (j.contains("checks")) {
    auto& k = j["checks"];
    only_keys(k, "checks", {"gammas", "zero_tolerance", "vector_tolerance", "flow_tolerance",
                            "additivity_tolerance", "poisson_tolerance", "rho_grid", "spread"});
    auto& p = c.checks;
    if (k.contains("gammas")) p.gammas = grid(k["gammas"], "checks.gammas");
    if (k.contains("zero_tolerance")) p.zero_tolerance = positive(k["zero_tolerance"], "checks.zero_tolerance");
    if (k.contains("vector_tolerance")) p.vector_tolerance = positive(k["vector_tolerance"], "checks.vector_tolerance");
    if (k.contains("flow_tolerance")) p.flow_tolerance = positive(k["flow_tolerance"], "checks.flow_tolerance");
    if (k.contains("additivity_tolerance"))
      p.additivity_tolerance = positive(k["additivity_tolerance"], "checks.additivity_tolerance");
    if (k.contains("poisson_tolerance"))
      p.poisson_tolerance = positive(k["poisson_tolerance"], "checks.poisson_tolerance");
    if (k.contains("rho_grid")) p.rho_grid = grid(k["rho_grid"], "checks.rho_grid");
    if (k.contains("spread")) {
      if (!k["spread"].is_boolean()) throw ConfigError("checks.spread", "must be true or false");
      p.spread = k["spread"].get<bool>();
    }
  }
  if (j.contains("outputs")) {
    auto& out = j["outputs"];
    only_keys(out, "outputs", {"dir", "prefix", "matrices"});
    if (out.contains("dir")) {
      if (!out["dir"].is_string()) throw ConfigError("outputs.dir", "must be a string");
      c.outputs.dir = out["dir"].get<std::string>();
    }
    if (out.contains("prefix")) {
      if (!out["prefix"].is_string() || out["prefix"].get<std::string>().empty())
        throw ConfigError("outputs.prefix", "must be a nonempty string");
      c.outputs.prefix = out["prefix"].get<std::string>();
    }
    if (out.contains("matrices")) {
      if (!out["matrices"].is_boolean()) throw ConfigError("outputs.matrices", "must be true or false");
      c.outputs.matrices = out["matrices"].get<bool>();
    }
  }
  return c;
}

// 1-based line of the first occurrence of "key" for the last component of a
// dotted field path, 0 when not found.
std::size_t line_of(std::string_view text, const std::string& field) {
  std::string key = field;
  if (auto dot = key.rfind('.'); dot != std::string::npos) key = key.substr(dot + 1);
  if (auto br = key.find('['); br != std::string::npos) key = key.substr(0, br);
  auto pos = text.find("\"" + key + "\"");
  if (pos == std::string_view::npos) return 0;
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n';
  return line;
}

}  // namespace

std::vector<PointId> select_points(const SampledManifold& m, const PointPredicate& p) {
  std::vector<PointId> out;
  switch (p.kind) {
    case PointPredicate::Kind::all:
      for (PointId i = 0; i < m.size(); ++i) out.push_back(i);
      break;
    case PointPredicate::Kind::ids:
      for (PointId i : p.ids) {
        if (i >= m.size()) throw InvalidArgument("point id " + std::to_string(i) + " out of range");
        out.push_back(i);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      break;
    case PointPredicate::Kind::ball: {
      if (p.center.size() != m.dim()) throw InvalidArgument("ball center has the wrong dimension");
      Coords c = m.chart().canonical(p.center);
      for (PointId i = 0; i < m.size(); ++i)
        if (m.chart().distance(c, m.coords(i)) <= p.radius + 1e-12) out.push_back(i);
      break;
    }
    case PointPredicate::Kind::box:
      if (p.lo.size() != m.dim()) throw InvalidArgument("box bounds have the wrong dimension");
      for (PointId i = 0; i < m.size(); ++i) {
        auto x = m.coords(i);
        bool in = true;
        for (std::size_t k = 0; k < m.dim(); ++k) in = in && x[k] >= p.lo[k] - 1e-12 && x[k] <= p.hi[k] + 1e-12;
        if (in) out.push_back(i);
      }
      break;
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  try {
    return parse_config(text);
  } catch (const ConfigError& e) {
    std::size_t line = e.field() == "config" ? 0 : line_of(text, e.field());
    std::string where = path + (line ? ":" + std::to_string(line) : std::string()) + ": ";
    throw ConfigError::at(where, e);
  }
}

SolveMode parse_mode(std::string_view text, std::uint64_t seed) {
  if (text == "exhaustive") {
    auto m = SolveMode::exhaustive();
    m.seed = seed;
    return m;
  }
  if (text.starts_with("beam:")) {
    auto digits = text.substr(5);
    std::size_t width = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), width);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && width >= 1) return SolveMode::beam(width, seed);
  }
  throw ConfigError("--mode", "must be exhaustive or beam:<width> with width >= 1");
}

}  // namespace geoentropy
