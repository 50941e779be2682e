#include "fvproj/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fvproj {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("value of '" + std::string(key) + "' is not a number: '" + std::string(v) + "'");
  }
  return out;
}

long to_long(std::string_view key, std::string_view v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("value of '" + std::string(key) + "' is not an integer: '" + std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "0" || v == "false" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError("value of '" + std::string(key) + "' is not a boolean: '" + std::string(v) + "'");
}

SolverMethod to_method(std::string_view key, std::string_view v) {
  if (auto m = parse_solver_method(v)) {
    return *m;
  }
  throw ConfigError("unknown solver '" + std::string(v) + "' for '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (!(k > 0.0)) {
    throw ConfigError("time step k must be positive");
  }
  if (steps < 2) {
    throw ConfigError("step count N must be at least 2");
  }
  if (!(reynolds > 0.0)) {
    throw ConfigError("Reynolds number must be positive");
  }
  if (mesh.empty() && mesh_level < 0) {
    throw ConfigError("mesh level must be non-negative");
  }
  if (cadence < 0) {
    throw ConfigError("cadence must be non-negative");
  }
  if (!(perturbation_gain > 0.0)) {
    throw ConfigError("perturbation_gain must be positive");
  }
  try {
    momentum_solver.validate();
    pressure_solver.validate();
    init_solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void apply_setting(RunConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  const std::string_view key = trim(assignment.substr(0, eq));
  const std::string_view value = trim(assignment.substr(eq + 1));
  if (key.empty()) {
    throw ConfigError("empty key in '" + std::string(assignment) + "'");
  }
  if (key == "mesh") {
    c.mesh = std::string(value);
  } else if (key == "level") {
    c.mesh_level = static_cast<int>(to_long(key, value));
  } else if (key == "k") {
    c.k = to_double(key, value);
  } else if (key == "steps" || key == "N") {
    c.steps = static_cast<int>(to_long(key, value));
  } else if (key == "Re" || key == "reynolds") {
    c.reynolds = to_double(key, value);
  } else if (key == "problem") {
    c.problem = std::string(value);
  } else if (key == "momentum_solver") {
    c.momentum_solver.method = to_method(key, value);
  } else if (key == "pressure_solver") {
    c.pressure_solver.method = to_method(key, value);
  } else if (key == "momentum_rtol") {
    c.momentum_solver.rtol = to_double(key, value);
  } else if (key == "pressure_rtol") {
    c.pressure_solver.rtol = to_double(key, value);
  } else if (key == "solver_rtol") {
    c.momentum_solver.rtol = c.pressure_solver.rtol = to_double(key, value);
  } else if (key == "atol") {
    c.momentum_solver.atol = c.pressure_solver.atol = to_double(key, value);
  } else if (key == "max_iterations") {
    const long n = to_long(key, value);
    if (n < 0) {
      throw ConfigError("max_iterations must be non-negative");
    }
    c.momentum_solver.max_iterations = c.pressure_solver.max_iterations = static_cast<std::size_t>(n);
  } else if (key == "restart") {
    c.momentum_solver.restart = c.pressure_solver.restart = static_cast<int>(to_long(key, value));
  } else if (key == "output_dir" || key == "out") {
    c.output_dir = std::string(value);
  } else if (key == "cadence") {
    c.cadence = static_cast<int>(to_long(key, value));
  } else if (key == "allow_degenerate") {
    c.allow_degenerate = to_bool(key, value);
  } else if (key == "perturbation_gain") {
    c.perturbation_gain = to_double(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

RunConfig parse_run_config(std::istream& in, RunConfig base, std::string_view source) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string_view body = trim(line);
    if (body.empty()) {
      continue;
    }
    try {
      apply_setting(base, body);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigFileError("cannot open configuration file " + path.string());
  }
  RunConfig cfg = parse_run_config(in, std::move(base), path.string());
  // A relative mesh path is resolved against the configuration file.
  if (!cfg.mesh.empty() && std::filesystem::path(cfg.mesh).is_relative()) {
    const auto candidate = path.parent_path() / cfg.mesh;
    if (std::filesystem::exists(candidate)) {
      cfg.mesh = candidate.string();
    }
  }
  return cfg;
}

}  // namespace fvproj
