#include "coevo/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "coevo/errors.hpp"

namespace coevo {

namespace {

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Binder {
  std::function<void(const std::string&, int)> set;
  std::function<std::string()> get;
};

int parse_int(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const int out = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + v + "'", line);
  }
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + v + "'", line);
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("expected true/false, got '" + v + "'", line);
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::map<std::string, Binder> bind(RunConfig& c) {
  std::map<std::string, Binder> keys;
  auto bind_int = [&keys](const char* name, int& ref) {
    keys[name] = {[&ref](const std::string& v, int line) { ref = parse_int(v, line); },
                  [&ref] { return std::to_string(ref); }};
  };
  auto bind_double = [&keys](const char* name, double& ref) {
    keys[name] = {[&ref](const std::string& v, int line) { ref = parse_double(v, line); },
                  [&ref] { return fmt_double(ref); }};
  };
  auto bind_bool = [&keys](const char* name, bool& ref) {
    keys[name] = {[&ref](const std::string& v, int line) { ref = parse_bool(v, line); },
                  [&ref] { return ref ? std::string("true") : std::string("false"); }};
  };

  bind_int("population_size", c.population_size);
  bind_int("jobs", c.jobs);

  bind_int("t_steps", c.engine.t_steps);
  bind_int("k_min", c.engine.k_min);
  bind_double("eta", c.engine.eta);
  bind_double("baseline_beta", c.engine.baseline_beta);

  bind_double("rate_a", c.evolve.rate_a);
  bind_double("rate_m", c.evolve.rate_m);
  bind_double("crossover_rate", c.evolve.crossover_rate);
  bind_double("game_rate", c.evolve.game_rate);
  bind_double("param_sigma", c.evolve.param_sigma);

  bind_double("theta_fix", c.ltm.theta_fix);
  bind_int("g_fix", c.ltm.g_fix);
  bind_double("lambda", c.ltm.lambda);

  bind_double("link1", c.env.l1);
  bind_double("link2", c.env.l2);
  bind_double("v_max", c.env.v_max);
  bind_double("dt", c.env.dt);
  bind_double("joint_lo", c.env.joint_lo);
  bind_double("joint_hi", c.env.joint_hi);
  bind_bool("obstructed", c.env.obstructed);
  bind_double("obstruct_lo", c.env.obstruct_lo);
  bind_double("obstruct_hi", c.env.obstruct_hi);
  bind_double("start_shoulder", c.env.start_shoulder);
  bind_double("start_elbow", c.env.start_elbow);

  bind_double("shc_sigma", c.shc_sigma);
  bind_double("shc_p_worse", c.shc_p_worse);
  bind_int("mi_window", c.mi_window);
  bind_int("mi_bins", c.mi_bins);
  return keys;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::map<std::string, Binder> keys = bind(config);
  std::set<std::string> assigned;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected 'key = value', got '" + line + "'", line_no);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = keys.find(key);
    if (it == keys.end()) throw ParseError("unknown key '" + key + "'", line_no);
    if (!assigned.insert(key).second) {
      throw ParseError("duplicate key '" + key + "'", line_no);
    }
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no);
    it->second.set(value, line_no);
  }
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& config) {
  RunConfig copy = config;
  std::map<std::string, Binder> keys = bind(copy);
  std::string out;
  for (const auto& [key, binder] : keys) {
    out += key;
    out += " = ";
    out += binder.get();
    out += '\n';
  }
  return out;
}

}  // namespace coevo
