#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "ntscorisk/errors.hpp"
#include "ntscorisk/io.hpp"
#include "random_models.hpp"

using namespace ntscorisk;

namespace {

std::string error_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    parse_return_csv(in, "IDX");
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("model JSON round trip is exact") {
  std::mt19937_64 rng(1);
  auto m = ntscorisk::testing::random_model(rng, 4);
  const auto text = model_to_json(m);
  const auto back = model_from_json(text);
  CHECK(back.symbols == m.symbols);
  CHECK(back.mu == m.mu);
  CHECK(back.sigma == m.sigma);
  CHECK(back.nts.sub.alpha == m.nts.sub.alpha);
  CHECK(back.nts.sub.theta == m.nts.sub.theta);
  CHECK(back.nts.beta == m.nts.beta);
  CHECK(back.nts.corr == m.nts.corr);
  CHECK(model_to_json(back) == text);
  CHECK(text.find("\"schema\": \"ntscorisk.model\"") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "ntscorisk_io_model.json";
  save_model(m, path);
  CHECK(load_model(path).mu == m.mu);
  std::filesystem::remove(path);
}

TEST_CASE("model JSON is validated") {
  const auto good = model_to_json(ntscorisk::testing::symmetric_model(2));
  CHECK_THROWS_AS(model_from_json("{"), InputError);
  CHECK_THROWS_AS(model_from_json("[]"), InputError);
  auto wrong_schema = good;
  wrong_schema.replace(wrong_schema.find("ntscorisk.model"), 15, "something.else");
  CHECK_THROWS_AS(model_from_json(wrong_schema), InputError);
  auto no_theta = good;
  no_theta.replace(no_theta.find("\"theta\""), 7, "\"thetb\"");
  CHECK_THROWS_WITH_AS(model_from_json(no_theta), doctest::Contains("theta"), InputError);
  auto bad_alpha = good;
  bad_alpha.replace(bad_alpha.find("\"alpha\": 1.2"), 12, "\"alpha\": 2.5");
  CHECK_THROWS_AS(model_from_json(bad_alpha), InputError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), InputError);
}

TEST_CASE("bundled model loads") {
  const auto m = ntscorisk::testing::bundled_model();
  CHECK(m.num_assets() == 5);
  CHECK(m.symbols.front() == "INDEX");
}

TEST_CASE("return CSV parsing") {
  const std::string csv =
      "date,A,IDX\n"
      "2020-01-02,0.01,-0.002\n"
      "\n"
      "2020-01-03,-1.5e-3,0.004\n";
  std::istringstream in(csv);
  const auto panel = parse_return_csv(in, "IDX");
  CHECK(panel.symbols == std::vector<std::string>{"A", "IDX"});
  CHECK(panel.dates == std::vector<std::string>{"2020-01-02", "2020-01-03"});
  CHECK(panel.series[0] == std::vector<double>{0.01, -1.5e-3});
  CHECK(panel.column("IDX") == 1);

  std::ostringstream out;
  write_return_csv(out, panel);
  std::istringstream again(out.str());
  const auto back = parse_return_csv(again, "IDX");
  CHECK(back.series == panel.series);
  CHECK(back.dates == panel.dates);
}

TEST_CASE("return CSV errors name the location") {
  CHECK(error_of("day,A,IDX\n2020-01-02,1,2\n").find("header") != std::string::npos);
  CHECK(error_of("date,A,IDX\n2020-01-02,0.1,0.2\n2020-01-03,,0.1\n") ==
        "row 2 (line 3), column 2 (A): missing value");
  CHECK(error_of("date,A,IDX\n2020-01-02,0.1,abc\n") == "row 1 (line 2), column 3 (IDX): cannot parse 'abc'");
  CHECK(error_of("date,A,IDX\n2020-01-02,0.1\n").find("expected 3 fields, found 2") != std::string::npos);
  CHECK(error_of("date,A,IDX\n01/02/2020,0.1,0.2\n").find("not an ISO date") != std::string::npos);
  CHECK(error_of("date,A,IDX\n").find("no data rows") != std::string::npos);
  CHECK(error_of("date,A,B\n2020-01-02,0.1,0.2\n").find("IDX") != std::string::npos);
  CHECK(error_of("date,A,IDX\n2020-01-02,0.1,NA\n").find("missing value") != std::string::npos);
}

TEST_CASE("weights JSON") {
  CHECK(weights_from_json("[0.25, 0.75]") == std::vector<double>{0.25, 0.75});
  CHECK(weights_from_json(R"({"weights": [0.5, 0.5]})") == std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(weights_from_json("[0.5, \"x\"]"), InputError);
  CHECK_THROWS_AS(weights_from_json("{\"w\": [1]}"), InputError);
  CHECK_THROWS_AS(weights_from_json("not json"), InputError);
}

TEST_CASE("risk report JSON") {
  RiskReport q;
  q.covar = 0.05;
  q.cocvar = 0.07;
  const auto text = risk_report_to_json(q);
  CHECK(text.find("\"method\": \"quadrature\"") != std::string::npos);
  CHECK(text.find("stderr") == std::string::npos);
  CHECK(text.find("\"M\"") == std::string::npos);

  RiskReport mc = q;
  mc.method = Method::Mcs;
  mc.samples = 1000;
  mc.std_error = 0.001;
  const auto both = risk_report_to_json(mc, &q);
  CHECK(both.find("\"M\": 1000") != std::string::npos);
  CHECK(both.find("\"stderr\"") != std::string::npos);
  CHECK(both.find("\"quadrature\"") != std::string::npos);
}

TEST_CASE("MCT and KS tables") {
  const auto m = ntscorisk::testing::symmetric_model(2);
  MctVector v;
  v.values = {0.1, 0.05};
  v.ranks = {2, 1};
  const auto text = mct_to_json(v, m);
  CHECK(text.find("\"symbol\": \"A1\"") != std::string::npos);
  CHECK(text.find("\"rank\": 1") != std::string::npos);

  FitReport r;
  r.model = m;
  r.ks_stats = {0.01, 0.02, 0.03};
  r.ks_pvalues = {0.5, 0.4, 0.3};
  const auto csv = ks_table_csv(r);
  CHECK(csv.rfind("symbol,ks_statistic,ks_pvalue\nINDEX,0.01,0.5\n", 0) == 0);
  CHECK(fit_report_to_json(r).find("\"ks\"") != std::string::npos);
}
