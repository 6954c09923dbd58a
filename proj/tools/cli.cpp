#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/estimate.hpp"
#include "ntscorisk/io.hpp"
#include "ntscorisk/optimize.hpp"
#include "ntscorisk/risk.hpp"
#include "ntscorisk/sensitivity.hpp"
#include "ntscorisk/simulation.hpp"
#include "run_config.hpp"

namespace ntscorisk::cli {

namespace {

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Writes to the output path or, without one, to `out`.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

MarketModel require_model(const RunConfig& cfg) {
  if (cfg.input_path.empty()) throw InputError("--input (model JSON) is required");
  return load_model(cfg.input_path);
}

std::vector<double> weights_or_equal(const RunConfig& cfg, const MarketModel& model, bool required) {
  std::vector<double> w;
  if (cfg.weights_path.empty()) {
    if (required) throw InputError("--weights is required");
    w = Weights::equal(model.num_assets()).vector();
  } else {
    w = load_weights(cfg.weights_path);
  }
  if (w.size() != model.num_assets()) {
    std::ostringstream msg;
    msg << "weights have " << w.size() << " entries; the model has " << model.num_assets() << " assets";
    throw InfeasibleWeights(msg.str());
  }
  static_cast<void>(Weights(w));
  return w;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.input_path.empty()) throw InputError("--input (return CSV) is required");
  const auto panel = read_return_csv(cfg.input_path, cfg.index_symbol);
  const auto report = fit_market_model(panel);
  emit(cfg.output_path, fit_report_to_json(report), out);
  std::string ks_path = cfg.ks_output_path;
  if (ks_path.empty() && !cfg.output_path.empty()) ks_path = sibling_path(cfg.output_path, ".ks.csv");
  if (!ks_path.empty()) write_text_file(ks_path, ks_table_csv(report));
  return kOk;
}

int cmd_risk(const RunConfig& cfg, std::ostream& out) {
  const auto model = require_model(cfg);
  const auto w = weights_or_equal(cfg, model, true);
  const RiskContext ctx(model, {cfg.zeta, cfg.eta});
  const auto quad = quadrature_report(ctx, w);
  if (cfg.method == "mcs") {
    const auto bank = make_bank(ctx.grid(), cfg.samples, cfg.seed);
    emit(cfg.output_path, risk_report_to_json(mcs_report(ctx, w, bank), &quad), out);
  } else {
    emit(cfg.output_path, risk_report_to_json(quad), out);
  }
  return kOk;
}

int cmd_mct(const RunConfig& cfg, std::ostream& out) {
  const auto model = require_model(cfg);
  const auto w = weights_or_equal(cfg, model, true);
  const RiskContext ctx(model, {cfg.zeta, cfg.eta});
  MctPair pair;
  if (cfg.method == "mcs") {
    pair = mct_both(ctx, w, make_bank(ctx.grid(), cfg.samples, cfg.seed));
  } else {
    pair = mct_both(ctx, w);
  }
  const double scale = cfg.percent ? 100.0 : 1.0;
  std::ostringstream csv;
  csv << "symbol,mct_covar,rank_covar,mct_cocvar,rank_cocvar\n";
  double sum_covar = 0.0;
  double sum_cocvar = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    csv << model.symbol(j + 1) << ',' << num(scale * pair.covar.values[j]) << ',' << pair.covar.ranks[j] << ','
        << num(scale * pair.cocvar.values[j]) << ',' << pair.cocvar.ranks[j] << '\n';
    sum_covar += w[j] * pair.covar.values[j];
    sum_cocvar += w[j] * pair.cocvar.values[j];
  }
  // Footer: weighted MCT sums, which reproduce portfolio CoVaR and CoCVaR.
  csv << "euler_sum," << num(scale * sum_covar) << ",," << num(scale * sum_cocvar) << ",\n";
  emit(cfg.output_path, csv.str(), out);
  if (!cfg.json_output_path.empty()) {
    const auto& chosen = measure_from_string(cfg.measure) == Measure::CoVaR ? pair.covar : pair.cocvar;
    write_text_file(cfg.json_output_path, mct_to_json(chosen, model));
  }
  return kOk;
}

int cmd_frontier(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = require_model(cfg);
  const RiskContext ctx(model, {cfg.zeta, cfg.eta});
  const auto w0 = weights_or_equal(cfg, model, false);
  const auto points = efficient_frontier(ctx, cfg.points, w0);
  const double scale = cfg.percent ? 100.0 : 1.0;
  std::ostringstream csv;
  csv << "mu_star,cocvar";
  for (std::size_t j = 1; j <= model.num_assets(); ++j) csv << ",w_" << j;
  csv << '\n';
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  int failures = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    csv << num(p.mu_star) << ',' << num(scale * p.cocvar);
    for (double v : p.w) csv << ',' << num(v);
    csv << '\n';
    doc.push_back({{"mu_star", p.mu_star},
                   {"cocvar", p.cocvar},
                   {"expected_return", p.expected_return},
                   {"converged", p.converged},
                   {"iterations", p.iterations},
                   {"w", p.w}});
    if (!p.converged) {
      ++failures;
      err << "frontier point " << k << " (mu_star=" << num(p.mu_star) << "): no convergence after " << p.iterations
          << " iterations\n";
    }
  }
  emit(cfg.output_path, csv.str(), out);
  if (!cfg.json_output_path.empty()) write_text_file(cfg.json_output_path, doc.dump(2) + "\n");
  return failures == 0 ? kOk : kNumericalError;
}

int cmd_budget(const RunConfig& cfg, std::ostream& out) {
  const auto model = require_model(cfg);
  const auto w0 = weights_or_equal(cfg, model, false);
  const RiskContext ctx(model, {cfg.zeta, cfg.eta});
  BudgetOptions opts;
  opts.measure = measure_from_string(cfg.measure);
  opts.delta = cfg.delta;
  opts.iterations = cfg.iters;
  opts.bank_size = cfg.samples;
  opts.seed = cfg.seed;
  const auto trace = budget_iterate(ctx, w0, opts);
  const double scale = cfg.percent ? 100.0 : 1.0;
  std::ostringstream csv;
  csv << "iter,risk,ret,covar,cocvar";
  for (std::size_t j = 1; j <= model.num_assets(); ++j) csv << ",w_" << j;
  csv << '\n';
  nlohmann::ordered_json doc;
  doc["measure"] = to_string(trace.measure);
  doc["delta"] = cfg.delta;
  doc["box_halfwidth"] = trace.box_halfwidth;
  doc["iterations"] = nlohmann::ordered_json::array();
  for (const auto& it : trace.iterations) {
    csv << it.iter << ',' << num(scale * it.risk(trace.measure)) << ',' << num(it.expected_return) << ','
        << num(scale * it.covar) << ',' << num(scale * it.cocvar);
    for (double v : it.w) csv << ',' << num(v);
    csv << '\n';
    doc["iterations"].push_back({{"iter", it.iter},
                                 {"risk", it.risk(trace.measure)},
                                 {"ret", it.expected_return},
                                 {"covar", it.covar},
                                 {"cocvar", it.cocvar},
                                 {"w", it.w}});
  }
  emit(cfg.output_path, csv.str(), out);
  if (!cfg.json_output_path.empty()) write_text_file(cfg.json_output_path, doc.dump(2) + "\n");
  return kOk;
}

// Weekday dates from 2010-01-04 so simulated panels look like trading data.
std::vector<std::string> business_days(std::size_t n) {
  using namespace std::chrono;
  std::vector<std::string> out;
  out.reserve(n);
  sys_days day = year{2010} / January / 4;
  while (out.size() < n) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) {
      const year_month_day ymd{day};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                    static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
      out.emplace_back(buf);
    }
    day += days{1};
  }
  return out;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const auto model = require_model(cfg);
  const auto draws = simulate_std_nts(model.nts, cfg.periods, cfg.seed);
  ReturnPanel panel;
  panel.dates = business_days(cfg.periods);
  panel.index_symbol = model.symbol(0);
  for (std::size_t k = 0; k < model.mu.size(); ++k) {
    panel.symbols.push_back(model.symbol(k));
    std::vector<double> s(cfg.periods);
    for (std::size_t i = 0; i < cfg.periods; ++i)
      s[i] = model.mu[k] + model.sigma[k] * draws(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    panel.series.push_back(std::move(s));
  }
  std::ostringstream csv;
  write_return_csv(csv, panel);
  emit(cfg.output_path, csv.str(), out);
  return kOk;
}

struct Flags {
  std::string config_path;
  ConfigOverrides o;
};

// Registers the shared flags on a subcommand; each writes into `flags` only when given.
void add_common(CLI::App* sub, Flags& flags) {
  auto str = [&](const char* name, std::optional<std::string>& dst, const char* help) {
    sub->add_option_function<std::string>(name, [&dst](const std::string& v) { dst = v; }, help);
  };
  sub->add_option("--config", flags.config_path, "JSON config; explicit flags override it");
  str("-i,--input", flags.o.input_path, "input file (return CSV for fit, model JSON otherwise)");
  str("-o,--output", flags.o.output_path, "output file (stdout when omitted)");
  str("--weights", flags.o.weights_path, "weights JSON (array or {\"weights\": [...]})");
  str("--json", flags.o.json_output_path, "additional JSON output");
  str("--index", flags.o.index_symbol, "index column symbol");
  str("--method", flags.o.method, "quadrature or mcs");
  str("--measure", flags.o.measure, "covar or cocvar");
  sub->add_option_function<double>("--zeta", [&](double v) { flags.o.zeta = v; }, "index distress level");
  sub->add_option_function<double>("--eta", [&](double v) { flags.o.eta = v; }, "portfolio tail level");
  sub->add_option_function<double>("--delta", [&](double v) { flags.o.delta = v; }, "budget step size");
  sub->add_option_function<std::size_t>("--samples", [&](std::size_t v) { flags.o.samples = v; },
                                        "Monte-Carlo sample count M");
  sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { flags.o.seed = v; }, "random seed");
  sub->add_option_function<int>("--iters", [&](int v) { flags.o.iters = v; }, "budget iterations L");
  sub->add_option_function<int>("--points", [&](int v) { flags.o.points = v; }, "frontier points");
  sub->add_flag("--percent", flags.o.percent, "render risk figures in percent");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Systemic tail risk (CoVaR, CoCVaR) under a multivariate normal tempered stable market"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* fit = app.add_subcommand("fit", "fit a market model to a return CSV");
  CLI::App* risk = app.add_subcommand("risk", "CoVaR and CoCVaR report for given weights");
  CLI::App* mct = app.add_subcommand("mct", "marginal contributions to CoVaR and CoCVaR");
  CLI::App* frontier = app.add_subcommand("frontier", "mean-CoCVaR efficient frontier");
  CLI::App* budget = app.add_subcommand("budget", "iterative risk budgeting trace");
  CLI::App* simulate = app.add_subcommand("simulate", "simulate a return CSV from a model");
  for (CLI::App* sub : {fit, risk, mct, frontier, budget, simulate}) add_common(sub, flags);
  fit->add_option_function<std::string>("--ks-output", [&](const std::string& v) { flags.o.ks_output_path = v; },
                                        "KS table CSV (default: next to --output)");
  simulate->add_option_function<std::size_t>("--periods", [&](std::size_t v) { flags.o.periods = v; },
                                             "number of simulated periods");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    RunConfig cfg;
    if (!flags.config_path.empty()) apply_config_file(cfg, flags.config_path);
    apply_overrides(cfg, flags.o);
    const bool uses_mcs = (cfg.method == "mcs" && !fit->parsed() && !simulate->parsed()) || budget->parsed();
    cfg.validate(uses_mcs);
    if (fit->parsed()) return cmd_fit(cfg, out);
    if (risk->parsed()) return cmd_risk(cfg, out);
    if (mct->parsed()) return cmd_mct(cfg, out);
    if (frontier->parsed()) return cmd_frontier(cfg, out, err);
    if (budget->parsed()) return cmd_budget(cfg, out);
    return cmd_simulate(cfg, out);
  } catch (const InfeasibleWeights& e) {
    err << "error: " << e.what() << '\n';
    return kWeightsError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const FitNotConverged& e) {
    err << "error: " << e.what() << '\n';
    return kFitError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace ntscorisk::cli
