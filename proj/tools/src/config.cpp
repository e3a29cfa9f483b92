#include "mjost_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mjost::cli {

namespace {

using nlohmann::json;

// Reads one JSON object and remembers which keys were consumed so that
// leftovers can be reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(key_path(key) + ": required key missing");
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(key_path(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(key_path(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key_path(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    return has(key) ? numbers(key) : fallback;
  }

  Obj object(const std::string& key) { return Obj(at(key), key_path(key)); }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ConfigError(key_path(key) + ": unknown key");
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

IntervalFunction parse_function(Obj o, double x_max) {
  const std::string type = o.string("type");
  IntervalFunction f;
  if (type == "constant") {
    const double v = o.number("value");
    f = IntervalFunction::constant(x_max, v);
  } else if (type == "power") {
    const double c = o.number("coeff");
    const double e = o.number("exponent");
    f = IntervalFunction::smooth(x_max, [c, e](double x) { return cplx(c * std::pow(1.0 + x, e), 0.0); });
  } else if (type == "piecewise_constant") {
    const auto bp = o.numbers("breakpoints");
    const auto values = o.numbers("values");
    if (bp.size() < 2 || bp.front() != 0.0 || bp.back() != x_max)
      throw ConfigError(o.key_path("breakpoints") + ": must start at 0 and end at X_max");
    if (values.size() + 1 != bp.size())
      throw ConfigError(o.key_path("values") + ": need one value per interval");
    std::vector<Piece> pieces;
    for (double v : values) pieces.push_back(Constant{v});
    try {
      f = IntervalFunction(bp, std::move(pieces));
    } catch (const ParameterError& e) {
      throw ConfigError(o.key_path("breakpoints") + ": " + e.what());
    }
  } else {
    throw ConfigError(o.key_path("type") + ": unknown function type '" + type + "'");
  }
  o.finish();
  return f;
}

PotentialFamily parse_family(Obj o, double x_max) {
  const std::string name = o.string("family");
  PotentialFamily fam;
  if (name == "delta_comb") {
    DeltaComb c;
    c.positions = o.numbers("positions");
    c.weights = o.numbers("weights");
    c.tail_mass = o.number("tail_mass", 0.0);
    c.cell_local = o.boolean("cell_local", false);
    fam = c;
  } else if (name == "power_comb") {
    const double amp = o.number("amplitude", 1.0);
    const double alpha = o.number("alpha");
    fam = power_law_comb(amp, alpha, x_max, o.boolean("cell_local", false));
  } else if (name == "oscillatory") {
    fam = Oscillatory{o.number("a"), o.number("b")};
  } else if (name == "plus_minus_one") {
    fam = PlusMinusOne{};
  } else if (name == "classical_l1") {
    fam = ClassicalL1{parse_function(o.object("tau"), x_max)};
  } else if (name == "custom") {
    auto sigma = parse_function(o.object("sigma"), x_max);
    auto tau = parse_function(o.object("tau"), x_max);
    fam = Custom{sigma, tau};
  } else {
    throw ConfigError(o.key_path("family") + ": unknown family '" + name + "'");
  }
  o.finish();
  return fam;
}

JostMethod parse_method(const std::string& s, const std::string& path) {
  if (s == "direct") return JostMethod::direct;
  if (s == "series") return JostMethod::series;
  throw ConfigError(path + ": expected 'direct' or 'series'");
}

void parse_jost(Obj o, JostBlock& b) {
  b.E = o.number("E", b.E);
  if (o.has("method")) b.method = parse_method(o.string("method"), o.key_path("method"));
  b.n_max = o.integer("n_max", b.n_max);
  b.adaptive_order = o.boolean("adaptive_order", b.adaptive_order);
  b.output_spacing = o.number("output_spacing", b.output_spacing);
  b.rel_tol = o.number("rel_tol", b.rel_tol);
  b.abs_tol = o.number("abs_tol", b.abs_tol);
  b.p = o.number("p", b.p);
  b.M_max = o.integer("M_max", b.M_max);
  o.finish();
  if (!(b.E > 0.0)) throw ConfigError(o.key_path("E") + ": must be positive");
  if (b.n_max < 0 || b.n_max > 8) throw ConfigError(o.key_path("n_max") + ": must lie in [0, 8]");
  if (!(b.output_spacing > 0.0)) throw ConfigError(o.key_path("output_spacing") + ": must be positive");
}

void parse_sweep(Obj o, RunConfig& rc) {
  SweepConfig& s = rc.sweep;
  s.E_min = o.number("E_min", s.E_min);
  s.E_max = o.number("E_max", s.E_max);
  s.n_energies = o.integer("n_energies", s.n_energies);
  s.M_list = o.numbers("M_list", s.M_list);
  s.c_threshold = o.number("c_threshold", s.c_threshold);
  s.s = o.integer("s", s.s);
  s.gamma = o.number("gamma", s.gamma);
  s.p = o.number("p", s.p);
  s.M_max = o.integer("M_max", s.M_max);
  s.checkpoints = o.numbers("checkpoints", s.checkpoints);
  s.threads = o.integer("threads", s.threads);
  s.jost.integrator.rel_tol = o.number("rel_tol", s.jost.integrator.rel_tol);
  s.jost.integrator.abs_tol = o.number("abs_tol", s.jost.integrator.abs_tol);
  rc.c_grid = o.numbers("c_grid", {});
  if (o.has("summary_path")) rc.summary_path = o.string("summary_path");
  o.finish();
  if (s.M_max < 1 || s.M_max > MartingaleStructure::kMaxLevels)
    throw ConfigError(o.key_path("M_max") + ": must lie in [1, 16]");
}

void parse_martingale(Obj o, MartingaleBlock& b) {
  b.p = o.number("p", b.p);
  b.gamma = o.number("gamma", b.gamma);
  b.M_max = o.integer("M_max", b.M_max);
  b.E = o.number("E", b.E);
  o.finish();
  if (!(b.p >= 1.0)) throw ConfigError(o.key_path("p") + ": must be at least 1");
  if (!(b.gamma >= 0.0)) throw ConfigError(o.key_path("gamma") + ": must be nonnegative");
  if (b.M_max < 1 || b.M_max > MartingaleStructure::kMaxLevels)
    throw ConfigError(o.key_path("M_max") + ": must lie in [1, 16]");
  if (!(b.E > 0.0)) throw ConfigError(o.key_path("E") + ": must be positive");
}

void parse_series_check(Obj o, SeriesCheckBlock& b) {
  b.n_max = o.integer("n_max", b.n_max);
  b.oracle = o.boolean("oracle", b.oracle);
  b.oracle_max_order = o.integer("oracle_max_order", b.oracle_max_order);
  b.oracle_x1 = o.number("oracle_x1", b.oracle_x1);
  b.E = o.number("E", b.E);
  b.p = o.number("p", b.p);
  b.gamma = o.number("gamma", b.gamma);
  b.M_max = o.integer("M_max", b.M_max);
  b.grid_density = o.number("grid_density", b.grid_density);
  o.finish();
  if (b.n_max < 1 || b.n_max > 8) throw ConfigError(o.key_path("n_max") + ": must lie in [1, 8]");
  if (!(b.oracle_x1 > 0.0)) throw ConfigError(o.key_path("oracle_x1") + ": must be positive");
  if (!(b.E > 0.0)) throw ConfigError(o.key_path("E") + ": must be positive");
  if (!(b.p >= 1.0)) throw ConfigError(o.key_path("p") + ": must be at least 1");
  if (b.M_max < 1 || b.M_max > MartingaleStructure::kMaxLevels)
    throw ConfigError(o.key_path("M_max") + ": must lie in [1, 16]");
  if (!(b.grid_density > 0.0)) throw ConfigError(o.key_path("grid_density") + ": must be positive");
}

const char* block_key(Command c) {
  switch (c) {
    case Command::decompose: return "decompose";
    case Command::jost: return "jost";
    case Command::sweep: return "sweep";
    case Command::martingale: return "martingale";
    case Command::series_check: return "series_check";
  }
  return "";
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "decompose") return Command::decompose;
  if (name == "jost") return Command::jost;
  if (name == "sweep") return Command::sweep;
  if (name == "martingale") return Command::martingale;
  if (name == "series-check") return Command::series_check;
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) { return c == Command::series_check ? "series-check" : block_key(c); }

RunConfig parse_config(const std::string& json_text, Command command) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  Obj root(doc, "");
  RunConfig rc;
  rc.command = command;
  rc.X_max = root.number("X_max", rc.X_max);
  if (!(rc.X_max > 0.0) || !std::isfinite(rc.X_max)) throw ConfigError("X_max: must be positive and finite");
  rc.sweep.X_max = rc.X_max;
  if (!root.has("potential")) throw ConfigError("potential.family: required key missing");
  {
    Obj pot = root.object("potential");
    if (!pot.has("family")) throw ConfigError("potential.family: required key missing");
    rc.family = parse_family(std::move(pot), rc.X_max);
  }
  rc.sweep.family = rc.family;
  if (root.has("output_path")) rc.output_path = root.string("output_path");
  if (root.has("log_level")) rc.log_level = root.string("log_level");

  for (Command other : {Command::decompose, Command::jost, Command::sweep, Command::martingale,
                        Command::series_check})
    if (other != command && root.has(block_key(other)))
      throw ConfigError(std::string(block_key(other)) + ": block does not belong to command '" +
                        command_name(command) + "'");

  const std::string key = block_key(command);
  const json empty = json::object();
  Obj block = root.has(key) ? root.object(key) : Obj(empty, key);
  switch (command) {
    case Command::decompose: block.finish(); break;
    case Command::jost: parse_jost(std::move(block), rc.jost); break;
    case Command::sweep: parse_sweep(std::move(block), rc); break;
    case Command::martingale: parse_martingale(std::move(block), rc.martingale); break;
    case Command::series_check: parse_series_check(std::move(block), rc.series_check); break;
  }
  root.finish();
  return rc;
}

RunConfig load_config(const std::string& path, Command command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), command);
}

}  // namespace mjost::cli
