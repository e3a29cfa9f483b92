#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mjost/jost.hpp"
#include "mjost/sweep.hpp"

namespace mjost::cli {

/// Malformed configuration; the message names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { decompose, jost, sweep, martingale, series_check };

Command parse_command(const std::string& name);
std::string command_name(Command c);

struct JostBlock {
  double E = 1.0;
  JostMethod method = JostMethod::direct;
  int n_max = 8;
  bool adaptive_order = false;  // series: cut the order with the B_1 tail bound
  double output_spacing = 1.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // Structure used when adaptive_order is set.
  double p = 2.0;
  int M_max = 10;
};

struct MartingaleBlock {
  double p = 2.0;
  double gamma = 0.0;
  int M_max = 10;
  double E = 1.0;
};

struct SeriesCheckBlock {
  int n_max = 4;
  bool oracle = true;
  int oracle_max_order = 3;
  double oracle_x1 = 5.0;  // M_n oracle comparison on [0, oracle_x1]
  double E = 1.0;
  double p = 2.0;
  double gamma = 0.0;
  int M_max = 10;
  double grid_density = 4.0;
};

struct RunConfig {
  Command command = Command::decompose;
  PotentialFamily family;
  double X_max = 200.0;
  JostBlock jost;
  SweepConfig sweep;
  std::vector<double> c_grid;
  std::optional<std::string> summary_path;
  MartingaleBlock martingale;
  SeriesCheckBlock series_check;
  std::optional<std::string> output_path;
  std::optional<std::string> log_level;
};

/// Parses a JSON document for `command`. Unknown keys, missing required keys,
/// wrong types and blocks of other commands are ConfigErrors.
RunConfig parse_config(const std::string& json_text, Command command);
RunConfig load_config(const std::string& path, Command command);

}  // namespace mjost::cli
