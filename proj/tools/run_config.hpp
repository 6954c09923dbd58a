#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ntscorisk::cli {

// Every knob a subcommand may read. Defaults here, then the --config JSON,
// then explicit flags.
struct RunConfig {
  std::string input_path;
  std::string output_path;
  std::string weights_path;
  std::string ks_output_path;
  std::string json_output_path;
  std::string index_symbol = "INDEX";
  double zeta = 0.05;
  double eta = 0.05;
  std::size_t samples = 100000;
  std::uint64_t seed = 20221115;
  double delta = 4e-4;
  int iters = 200;
  int points = 51;
  std::string method = "quadrature";
  std::string measure = "cocvar";
  std::size_t periods = 2500;
  bool percent = false;

  void validate(bool uses_mcs) const;
};

// Flags captured by the parser; unset members leave the config untouched.
struct ConfigOverrides {
  std::optional<std::string> input_path, output_path, weights_path, ks_output_path, json_output_path;
  std::optional<std::string> index_symbol, method, measure;
  std::optional<double> zeta, eta, delta;
  std::optional<std::size_t> samples, periods;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters, points;
  bool percent = false;
};

// Reads a JSON object whose keys match RunConfig member names.
void apply_config_file(RunConfig& config, const std::string& path);
void apply_overrides(RunConfig& config, const ConfigOverrides& flags);

}  // namespace ntscorisk::cli
