#include "ntscorisk/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "ntscorisk/errors.hpp"

namespace ntscorisk {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json model_document(const MarketModel& model) {
  model.validate();
  const std::size_t d = model.mu.size();
  ordered_json j;
  j["schema"] = kModelSchema;
  j["version"] = kModelVersion;
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i < d; ++i) symbols.push_back(model.symbol(i));
  j["symbols"] = symbols;
  j["mu"] = model.mu;
  j["sigma"] = model.sigma;
  j["alpha"] = model.nts.sub.alpha;
  j["theta"] = model.nts.sub.theta;
  j["beta"] = model.nts.beta;
  std::vector<double> sigma;
  sigma.reserve(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      sigma.push_back(model.nts.corr(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
  j["Sigma"] = sigma;
  return j;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("model document is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("model field '") + key + "' has the wrong type");
  }
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace

std::string model_to_json(const MarketModel& model) { return model_document(model).dump(2) + "\n"; }

MarketModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("model JSON does not parse: ") + e.what());
  }
  if (!j.is_object()) throw InputError("model JSON must be an object");
  if (j.contains("schema") && j["schema"] != kModelSchema) throw InputError("unexpected model schema");
  if (j.contains("version") && j["version"] != kModelVersion) throw InputError("unsupported model schema version");
  MarketModel m;
  m.mu = field<std::vector<double>>(j, "mu");
  m.sigma = field<std::vector<double>>(j, "sigma");
  m.nts.sub.alpha = field<double>(j, "alpha");
  m.nts.sub.theta = field<double>(j, "theta");
  m.nts.beta = field<std::vector<double>>(j, "beta");
  if (j.contains("symbols")) m.symbols = field<std::vector<std::string>>(j, "symbols");
  const auto sigma = field<std::vector<double>>(j, "Sigma");
  const std::size_t d = m.mu.size();
  if (sigma.size() != d * d) throw InputError("Sigma must hold (N+1)^2 row-major entries");
  m.nts.corr.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      m.nts.corr(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sigma[r * d + c];
  m.validate();
  return m;
}

MarketModel load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

void save_model(const MarketModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

std::string fit_report_to_json(const FitReport& report) {
  auto j = model_document(report.model);
  ordered_json ks = ordered_json::array();
  for (std::size_t i = 0; i < report.ks_stats.size(); ++i) {
    ordered_json row;
    row["symbol"] = report.model.symbol(i);
    row["statistic"] = report.ks_stats[i];
    row["pvalue"] = report.ks_pvalues[i];
    ks.push_back(row);
  }
  j["ks"] = ks;
  return j.dump(2) + "\n";
}

std::string ks_table_csv(const FitReport& report) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "symbol,ks_statistic,ks_pvalue\n";
  for (std::size_t i = 0; i < report.ks_stats.size(); ++i)
    out << report.model.symbol(i) << ',' << report.ks_stats[i] << ',' << report.ks_pvalues[i] << '\n';
  return out.str();
}

std::string risk_report_to_json(const RiskReport& report, const RiskReport* quadrature) {
  ordered_json j;
  j["zeta"] = report.levels.zeta;
  j["eta"] = report.levels.eta;
  j["var_index"] = report.var_index;
  j["covar"] = report.covar;
  j["cocvar"] = report.cocvar;
  j["method"] = to_string(report.method);
  if (report.samples) j["M"] = *report.samples;
  if (report.std_error) j["stderr"] = *report.std_error;
  if (quadrature) {
    ordered_json q;
    q["var_index"] = quadrature->var_index;
    q["covar"] = quadrature->covar;
    q["cocvar"] = quadrature->cocvar;
    j["quadrature"] = q;
  }
  return j.dump(2) + "\n";
}

std::string mct_to_json(const MctVector& mct, const MarketModel& model) {
  ordered_json arr = ordered_json::array();
  for (std::size_t j = 0; j < mct.values.size(); ++j) {
    ordered_json row;
    row["symbol"] = model.symbol(j + 1);
    row["mct"] = mct.values[j];
    row["rank"] = mct.ranks[j];
    arr.push_back(row);
  }
  return arr.dump(2) + "\n";
}

std::vector<double> weights_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("weights JSON does not parse: ") + e.what());
  }
  if (j.is_object() && j.contains("weights")) j = j["weights"];
  if (!j.is_array()) throw InputError("weights must be a JSON array or {\"weights\": [...]}");
  std::vector<double> w;
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError("weights must be numbers");
    w.push_back(v.get<double>());
  }
  return w;
}

std::vector<double> load_weights(const std::filesystem::path& path) { return weights_from_json(read_text_file(path)); }

ReturnPanel parse_return_csv(std::istream& in, const std::string& index_symbol) {
  ReturnPanel panel;
  panel.index_symbol = index_symbol;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "date") throw InputError("line 1: header must be date,<SYM1>,<SYM2>,...");
  panel.symbols.assign(header.begin() + 1, header.end());
  panel.series.resize(panel.symbols.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    const std::size_t row = panel.dates.size() + 1;
    auto where = [&](std::size_t col) {
      std::ostringstream s;
      s << "row " << row << " (line " << line_no << "), column " << col + 1;
      if (col > 0 && col <= panel.symbols.size()) s << " (" << panel.symbols[col - 1] << ")";
      return s.str();
    };
    if (cells.size() != header.size()) {
      std::ostringstream s;
      s << "row " << row << " (line " << line_no << "): expected " << header.size() << " fields, found "
        << cells.size();
      throw InputError(s.str());
    }
    if (!iso_date(cells[0])) throw InputError(where(0) + ": '" + cells[0] + "' is not an ISO date");
    panel.dates.push_back(cells[0]);
    for (std::size_t k = 1; k < cells.size(); ++k) {
      const std::string& c = cells[k];
      if (c.empty() || c == "NA" || c == "NaN" || c == "nan") throw InputError(where(k) + ": missing value");
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size() || !std::isfinite(v))
        throw InputError(where(k) + ": cannot parse '" + c + "'");
      panel.series[k - 1].push_back(v);
    }
  }
  if (panel.dates.empty()) throw InputError("return CSV has no data rows");
  panel.column(index_symbol);
  return panel;
}

ReturnPanel read_return_csv(const std::filesystem::path& path, const std::string& index_symbol) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_return_csv(in, index_symbol);
}

void write_return_csv(std::ostream& out, const ReturnPanel& panel) {
  out << "date";
  for (const auto& s : panel.symbols) out << ',' << s;
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < panel.dates.size(); ++r) {
    out << panel.dates[r];
    for (const auto& s : panel.series) {
      const auto res = std::to_chars(buf, buf + sizeof buf, s[r]);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

}  // namespace ntscorisk
