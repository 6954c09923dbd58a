#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ntscorisk/io.hpp"

namespace fs = std::filesystem;
using ntscorisk::cli::run_cli;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ntscorisk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::string kData = NTSCORISK_DATA_DIR;
const std::string kModel = kData + "/synthetic_model.json";
const std::string kReturns = kData + "/synthetic_returns.csv";

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "ntscorisk_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

const std::string kEqualWeights = "[0.2, 0.2, 0.2, 0.2, 0.2]";

}  // namespace

TEST_CASE("fit writes a loadable model and a KS table") {
  const auto out = (scratch() / "fitted.json").string();
  const auto r = run({"fit", "-i", kReturns, "-o", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto model = ntscorisk::load_model(out);
  CHECK(model.num_assets() == 5);
  CHECK(model.symbols.front() == "INDEX");
  const auto ks = ntscorisk::read_text_file((scratch() / "fitted.ks.csv").string());
  const auto rows = csv_rows(ks);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"symbol", "ks_statistic", "ks_pvalue"});

  SUBCASE("repeat runs are byte identical") {
    const auto again = run({"fit", "-i", kReturns});
    CHECK(again.code == 0);
    CHECK(again.out == ntscorisk::read_text_file(out));
  }
}

TEST_CASE("fit reports the bad cell") {
  const auto bad = write("bad.csv", "date,INDEX,A\n2020-01-02,0.01,0.02\n2020-01-03,0.01,\n");
  const auto r = run({"fit", "-i", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 2 (line 3), column 3 (A): missing value") != std::string::npos);
  CHECK(run({"fit"}).code == 2);
  CHECK(run({"fit", "-i", kReturns, "--index", "NOPE"}).code == 2);
}

TEST_CASE("risk report") {
  const auto w = write("w.json", kEqualWeights);
  const auto q = run({"risk", "-i", kModel, "--weights", w});
  REQUIRE_MESSAGE(q.code == 0, q.err);
  const auto jq = nlohmann::json::parse(q.out);
  CHECK(jq["cocvar"].get<double>() >= jq["covar"].get<double>());
  CHECK_FALSE(jq.contains("stderr"));
  CHECK(jq["method"] == "quadrature");

  const auto m1 = run({"risk", "-i", kModel, "--weights", w, "--method", "mcs", "--samples", "20000", "--seed", "5"});
  const auto m2 = run({"risk", "-i", kModel, "--weights", w, "--method", "mcs", "--samples", "20000", "--seed", "5"});
  REQUIRE(m1.code == 0);
  CHECK(m1.out == m2.out);
  const auto jm = nlohmann::json::parse(m1.out);
  CHECK(jm["M"] == 20000);
  CHECK(jm["stderr"].get<double>() > 0.0);
  CHECK(jm["quadrature"]["cocvar"] == jq["cocvar"]);

  CHECK(run({"risk", "-i", kModel, "--weights", w, "--method", "mcs", "--samples", "10"}).code == 2);
  CHECK(run({"risk", "-i", kModel, "--weights", w, "--zeta", "1.5"}).code == 2);
  CHECK(run({"risk", "-i", kModel}).code == 2);
}

TEST_CASE("bad weights exit with code 4") {
  CHECK(run({"risk", "-i", kModel, "--weights", write("neg.json", "[-0.2, 0.3, 0.3, 0.3, 0.3]")}).code == 4);
  CHECK(run({"risk", "-i", kModel, "--weights", write("short.json", "[0.5, 0.5]")}).code == 4);
  CHECK(run({"mct", "-i", kModel, "--weights", write("sum.json", "[0.3, 0.3, 0.3, 0.3, 0.3]")}).code == 4);
}

TEST_CASE("mct table") {
  const auto w = write("w.json", kEqualWeights);
  const auto r = run({"mct", "-i", kModel, "--weights", w});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"symbol", "mct_covar", "rank_covar", "mct_cocvar", "rank_cocvar"});
  std::vector<int> ranks;
  for (std::size_t i = 1; i <= 5; ++i) ranks.push_back(std::stoi(rows[i][2]));
  std::sort(ranks.begin(), ranks.end());
  CHECK(ranks == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(rows[6][0] == "euler_sum");

  const auto risk = nlohmann::json::parse(run({"risk", "-i", kModel, "--weights", w}).out);
  CHECK(std::stod(rows[6][1]) == doctest::Approx(risk["covar"].get<double>()).epsilon(0.01));
  CHECK(std::stod(rows[6][3]) == doctest::Approx(risk["cocvar"].get<double>()).epsilon(0.01));

  const auto pct = run({"mct", "-i", kModel, "--weights", w, "--percent"});
  CHECK(std::stod(csv_rows(pct.out)[6][3]) == doctest::Approx(100.0 * std::stod(rows[6][3])).epsilon(1e-12));

  const auto json_path = (scratch() / "mct.json").string();
  CHECK(run({"mct", "-i", kModel, "--weights", w, "--json", json_path, "--measure", "covar"}).code == 0);
  const auto j = nlohmann::json::parse(ntscorisk::read_text_file(json_path));
  REQUIRE(j.size() == 5);
  CHECK(j[0]["symbol"] == "ALPHA");
}

TEST_CASE("frontier sweep") {
  const auto r = run({"frontier", "-i", kModel, "--points", "6"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0][0] == "mu_star");
  CHECK(rows[0].size() == 7);
  std::vector<double> risk;
  for (std::size_t i = 1; i < rows.size(); ++i) risk.push_back(std::stod(rows[i][1]));
  const auto best = std::min_element(risk.begin(), risk.end());
  for (auto it = best; it + 1 != risk.end(); ++it) CHECK(*(it + 1) >= *it - 1e-9);
}

TEST_CASE("budget trace") {
  const auto r = run({"budget", "-i", kModel, "--samples", "20000"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 202);  // header plus iterations 0..200
  CHECK(rows[0][0] == "iter");
  CHECK(rows.back()[0] == "200");
  CHECK(std::stod(rows.back()[1]) < std::stod(rows[1][1]));
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][2]) >= std::stod(rows[i - 1][2]) - 1e-10);
}

TEST_CASE("config file and flag precedence") {
  const auto cfg = write("cfg.json", R"({"iters": 5, "samples": 20000, "measure": "covar"})");
  const auto r = run({"budget", "-i", kModel, "--config", cfg, "--iters", "3"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(csv_rows(r.out).size() == 5);
  CHECK(run({"budget", "-i", kModel, "--config", write("typo.json", R"({"iter": 5})")}).code == 2);
}

TEST_CASE("simulate then refit") {
  const auto csv = (scratch() / "sim.csv").string();
  const auto r = run({"simulate", "-i", kModel, "--periods", "300", "--seed", "3", "-o", csv});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto panel = ntscorisk::read_return_csv(csv, "INDEX");
  CHECK(panel.length() == 300);
  CHECK(panel.dates.front() == "2010-01-04");
  CHECK(panel.dates[5] == "2010-01-11");
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"risk", "--zeta", "abc"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}
