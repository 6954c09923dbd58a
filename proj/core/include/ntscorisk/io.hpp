#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ntscorisk/estimate.hpp"
#include "ntscorisk/market.hpp"
#include "ntscorisk/risk.hpp"
#include "ntscorisk/sensitivity.hpp"

namespace ntscorisk {

// Model documents carry "schema": kModelSchema and "version": kModelVersion,
// then symbols, mu, sigma, alpha, theta, beta and Sigma (row-major, (N+1)^2).
inline constexpr const char* kModelSchema = "ntscorisk.model";
inline constexpr int kModelVersion = 1;

std::string model_to_json(const MarketModel& model);
// Parses and validates; unknown keys are ignored so fit reports load as models.
MarketModel model_from_json(const std::string& text);
MarketModel load_model(const std::filesystem::path& path);
void save_model(const MarketModel& model, const std::filesystem::path& path);

// Model document plus "ks": [{symbol, statistic, pvalue}].
std::string fit_report_to_json(const FitReport& report);
// symbol,ks_statistic,ks_pvalue
std::string ks_table_csv(const FitReport& report);

// {zeta, eta, var_index, covar, cocvar, method, M, stderr}; M and stderr only
// when present. A quadrature reference is nested under "quadrature".
std::string risk_report_to_json(const RiskReport& report, const RiskReport* quadrature = nullptr);

// [{symbol, mct, rank}] with symbols for asset slots 1..N.
std::string mct_to_json(const MctVector& mct, const MarketModel& model);

// A JSON array, or an object with a "weights" array. Returned unvalidated.
std::vector<double> weights_from_json(const std::string& text);
std::vector<double> load_weights(const std::filesystem::path& path);

// Header `date,<SYM1>,...`; errors name the line and column.
ReturnPanel parse_return_csv(std::istream& in, const std::string& index_symbol);
ReturnPanel read_return_csv(const std::filesystem::path& path, const std::string& index_symbol);
void write_return_csv(std::ostream& out, const ReturnPanel& panel);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ntscorisk
