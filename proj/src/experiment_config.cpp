#include "ealab/experiment_config.hpp"

#include "ealab/reports.hpp"

#include <cstddef>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ealab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for '" + key + "': " + value);
  }
  if (used != value.size())
    throw std::invalid_argument("config: bad number for '" + key + "': " + value);
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for '" + key + "': " + value);
  }
  if (used != value.size())
    throw std::invalid_argument("config: bad integer for '" + key + "': " + value);
  return v;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (resolution <= 0)
    throw std::invalid_argument("config: resolution must be positive");
  if (!(alpha > 0)) throw std::invalid_argument("config: alpha must be positive");
  if (!(dt > 0)) throw std::invalid_argument("config: dt must be positive");
  if (!(t_final > 0))
    throw std::invalid_argument("config: t_final must be positive");
  if (!(lambda > 0))
    throw std::invalid_argument("config: lambda must be positive");
  if (!(r > 0)) throw std::invalid_argument("config: r must be positive");
  if (d <= 0) throw std::invalid_argument("config: d must be positive");
  if (direction_set < 0)
    throw std::invalid_argument("config: direction_set must be non-negative");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    if (!seen.insert(key).second)
      throw std::invalid_argument("config: duplicate key '" + key + "'");

    if (key == "resolution") {
      config.resolution = static_cast<int>(parse_long(key, value));
    } else if (key == "alpha") {
      config.alpha = parse_double(key, value);
    } else if (key == "dt") {
      config.dt = parse_double(key, value);
    } else if (key == "t_final") {
      config.t_final = parse_double(key, value);
    } else if (key == "lambda") {
      config.lambda = parse_double(key, value);
    } else if (key == "r") {
      config.r = parse_double(key, value);
    } else if (key == "d") {
      config.d = static_cast<int>(parse_long(key, value));
    } else if (key == "direction_set") {
      config.direction_set = static_cast<int>(parse_long(key, value));
    } else if (key == "parameter_file") {
      config.parameter_file = value;
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "seed") {
      const long s = parse_long(key, value);
      if (s < 0) throw std::invalid_argument("config: seed must be non-negative");
      config.seed = static_cast<unsigned long>(s);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("config: cannot open: " + path);
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config_text(text.str());
}

std::string format_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "resolution = " << config.resolution << "\n";
  out << "alpha = " << format_g17(config.alpha) << "\n";
  out << "dt = " << format_g17(config.dt) << "\n";
  out << "t_final = " << format_g17(config.t_final) << "\n";
  out << "lambda = " << format_g17(config.lambda) << "\n";
  out << "r = " << format_g17(config.r) << "\n";
  out << "d = " << config.d << "\n";
  out << "direction_set = " << config.direction_set << "\n";
  if (!config.parameter_file.empty())
    out << "parameter_file = " << config.parameter_file << "\n";
  if (!config.output_dir.empty())
    out << "output_dir = " << config.output_dir << "\n";
  out << "seed = " << config.seed << "\n";
  return out.str();
}

}  // namespace ealab
