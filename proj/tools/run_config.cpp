#include "run_config.hpp"

#include <json.hpp>
#include <set>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/io.hpp"

namespace ntscorisk::cli {

namespace {

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <class T>
void take(const std::optional<T>& src, T& dst) {
  if (src) dst = *src;
}

}  // namespace

void RunConfig::validate(bool uses_mcs) const {
  if (!(zeta > 0.0 && zeta < 1.0) || !(eta > 0.0 && eta < 1.0)) throw InputError("zeta and eta must lie in (0, 1)");
  if (method != "quadrature" && method != "mcs") throw InputError("method must be 'quadrature' or 'mcs'");
  if (measure != "covar" && measure != "cocvar") throw InputError("measure must be 'covar' or 'cocvar'");
  if (uses_mcs && samples < 1000) throw InputError("Monte-Carlo runs need at least 1000 samples");
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  if (iters < 0) throw InputError("iters must be nonnegative");
  if (points < 2) throw InputError("points must be at least 2");
}

void apply_config_file(RunConfig& config, const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("config " + path + " does not parse: " + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  static const std::set<std::string> known{
      "input_path", "output_path", "weights_path", "ks_output_path", "json_output_path", "index_symbol",
      "zeta",       "eta",         "samples",      "seed",           "delta",            "iters",
      "points",     "method",      "measure",      "periods",        "percent"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw InputError("unknown config key '" + item.key() + "'");
  }
  take(j, "input_path", config.input_path);
  take(j, "output_path", config.output_path);
  take(j, "weights_path", config.weights_path);
  take(j, "ks_output_path", config.ks_output_path);
  take(j, "json_output_path", config.json_output_path);
  take(j, "index_symbol", config.index_symbol);
  take(j, "zeta", config.zeta);
  take(j, "eta", config.eta);
  take(j, "samples", config.samples);
  take(j, "seed", config.seed);
  take(j, "delta", config.delta);
  take(j, "iters", config.iters);
  take(j, "points", config.points);
  take(j, "method", config.method);
  take(j, "measure", config.measure);
  take(j, "periods", config.periods);
  take(j, "percent", config.percent);
}

void apply_overrides(RunConfig& config, const ConfigOverrides& flags) {
  take(flags.input_path, config.input_path);
  take(flags.output_path, config.output_path);
  take(flags.weights_path, config.weights_path);
  take(flags.ks_output_path, config.ks_output_path);
  take(flags.json_output_path, config.json_output_path);
  take(flags.index_symbol, config.index_symbol);
  take(flags.method, config.method);
  take(flags.measure, config.measure);
  take(flags.zeta, config.zeta);
  take(flags.eta, config.eta);
  take(flags.delta, config.delta);
  take(flags.samples, config.samples);
  take(flags.periods, config.periods);
  take(flags.seed, config.seed);
  take(flags.iters, config.iters);
  take(flags.points, config.points);
  if (flags.percent) config.percent = true;
}

}  // namespace ntscorisk::cli
