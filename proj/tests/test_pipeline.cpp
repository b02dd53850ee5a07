#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rescyc/pipeline.hpp"

using namespace rescyc;
namespace fs = std::filesystem;

namespace {

const std::string kAppendixCsv = std::string(RESCYC_SOURCE_DIR) + "/tests/data/appendix_cycle.csv";
const std::string kSampleCsv = std::string(RESCYC_DATA_DIR) + "/nasdaq_2013_2018.csv";

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("rescyc_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

RunConfig appendix_config(const std::string& out_dir) {
  RunConfig cfg;
  cfg.input = kAppendixCsv;
  cfg.out_dir = out_dir;
  cfg.normalize = false;
  cfg.smooth = false;
  cfg.tau_days = 1;
  cfg.p_rr = 0.01;
  cfg.p_et = 0.5;
  cfg.restab_denominator = RestabDenominator::appendix;
  return cfg;
}

} // namespace

TEST_CASE("config file parsing") {
  TempDir dir("config");
  const std::string path = dir.str() + "/run.conf";
  write(path,
        "# comment\n"
        "metric.p_rr = 0.002\n"
        "metric.restab_denominator = appendix  # trailing comment\n"
        "\n"
        "preprocess.smooth = false\n"
        "cycles.tau_days = 5\n"
        "dynamics.seed = 7\n"
        "input = data.csv\n");
  RunConfig cfg;
  load_config_file(cfg, path);
  CHECK(cfg.p_rr == 0.002);
  CHECK(cfg.restab_denominator == RestabDenominator::appendix);
  CHECK_FALSE(cfg.smooth);
  CHECK(cfg.tau_days == 5);
  CHECK(cfg.seed == 7);
  CHECK(cfg.input == "data.csv");
  CHECK(cfg.p_et == 0.8); // untouched keys keep their defaults

  write(path, "nonsense.key = 1\n");
  CHECK_THROWS_AS(load_config_file(cfg, path), ConfigError);
  write(path, "just a line\n");
  CHECK_THROWS_AS(load_config_file(cfg, path), ConfigError);
  write(path, "metric.p_rr = abc\n");
  CHECK_THROWS_AS(load_config_file(cfg, path), ConfigError);
}

TEST_CASE("worked-example CSV end to end") {
  TempDir dir("appendix");
  std::ostringstream out, err;
  const int status = cmd_analyze(appendix_config(dir.str()), out, err);
  CAPTURE(err.str());
  REQUIRE(status == 0);

  const auto table = detail::read_csv_table(dir.str() + "/metrics.csv");
  REQUIRE(table.rows.size() == 1);
  const auto& row = table.rows[0];
  CHECK(row[table.column("t_pre")] == "1");
  CHECK(row[table.column("t_event")] == "2");
  CHECK(row[table.column("t_post")] == "5");
  CHECK(detail::to_double(row[table.column("ri")]) == Catch::Approx(0.020).margin(0.001));
  CHECK(detail::to_double(row[table.column("r_m")]) == Catch::Approx(0.12).margin(0.001));
  CHECK(detail::to_double(row[table.column("r_e")]) == Catch::Approx(0.5).margin(0.001));
  CHECK(row[table.column("recovery_type")] == "leveled");

  const auto cycles = detail::read_cycles_csv(dir.str() + "/cycles.csv");
  REQUIRE(cycles.size() == 1);
  CHECK(cycles[0].p_pre == Catch::Approx(0.4));
  CHECK(cycles[0].p_event == Catch::Approx(0.1));
}

TEST_CASE("metrics rows keep the original cycle numbering across skips") {
  PerformanceSeries series{"s", {0.5, 0.5, 0.5, 0.4, 0.5, 0.3, 0.5}, false};
  const std::vector<ResilienceCycle> cycles = {
      {0, 1, 2, 0.5, 0.5, 0.5}, // degenerate, skipped by scoring
      {2, 3, 4, 0.5, 0.4, 0.5},
      {4, 5, 6, 0.5, 0.3, 0.5},
  };
  const ScoredBatch batch = score_all(cycles, series, ToleranceConfig{});
  const std::string csv = metrics_to_csv(batch);
  CHECK(csv.find("\n1,2,3,4,") != std::string::npos);
  CHECK(csv.find("\n2,4,5,6,") != std::string::npos);
  CHECK(csv.find("\n0,") == std::string::npos);
}

TEST_CASE("monotone input yields zero cycles and a warning") {
  TempDir dir("monotone");
  const std::string input = dir.str() + "/up.csv";
  std::string csv = "Date,Close\n";
  for (int d = 0; d < 30; ++d)
    csv += Date(18000 + d).to_iso() + "," + std::to_string(100 + d) + "\n";
  write(input, csv);

  RunConfig cfg;
  cfg.input = input;
  cfg.out_dir = dir.str();
  std::ostringstream out, err;
  const int status = cmd_analyze(cfg, out, err);
  REQUIRE(status == 0);
  CHECK(out.str().find("warning") != std::string::npos);
  CHECK(detail::read_csv_table(dir.str() + "/metrics.csv").rows.empty());
}

TEST_CASE("missing input is a data error") {
  RunConfig cfg;
  cfg.input = "/nonexistent/nothing.csv";
  std::ostringstream out, err;
  CHECK(cmd_analyze(cfg, out, err) == 2);
  CHECK(!err.str().empty());
}

TEST_CASE("fit needs enough positive scores") {
  TempDir dir("thin");
  write(dir.str() + "/metrics.csv",
        "cycle,ri\n0,0.5\n1,0.25\n2,0\n");
  RunConfig cfg;
  cfg.out_dir = dir.str();
  std::ostringstream out, err;
  CHECK(cmd_fit(cfg, out, err) == 2);
  CHECK(err.str().find("10") != std::string::npos);
}

TEST_CASE("analyze, fit and sweep on the bundled series") {
  TempDir dir("sample");
  RunConfig cfg;
  cfg.input = kSampleCsv;
  cfg.out_dir = dir.str();
  cfg.reps = 120;
  cfg.batch_size = 30;

  std::ostringstream out, err;
  REQUIRE(cmd_analyze(cfg, out, err) == 0);
  REQUIRE(cmd_fit(cfg, out, err) == 0);
  REQUIRE(cmd_sweep(cfg, out, err) == 0);
  CAPTURE(err.str());

  const auto metrics = detail::read_csv_table(dir.str() + "/metrics.csv");
  CHECK(metrics.rows.size() >= 30);
  CHECK(metrics.rows.size() == 46); // regression snapshot for the bundled series
  const std::size_t ri_col = metrics.column("ri");
  for (const auto& row : metrics.rows)
    CHECK(detail::to_double(row[ri_col]) >= 0.0);

  const auto fit = nlohmann::json::parse(slurp(dir.str() + "/fit.json"));
  CHECK(fit.at("alpha").get<double>() > 1.0);
  CHECK(fit.at("p_mean").get<double>() >= 0.0);
  CHECK(fit.at("p_values").size() == 4); // 120 reps in batches of 30

  const auto rr = detail::read_csv_table(dir.str() + "/sensitivity_rr.csv");
  CHECK(rr.rows.size() == 20);
  const auto et = detail::read_csv_table(dir.str() + "/sensitivity_et.csv");
  CHECK(et.rows.size() == 112);

  SECTION("reruns are byte-identical") {
    const std::string cycles_a = slurp(dir.str() + "/cycles.csv");
    const std::string metrics_a = slurp(dir.str() + "/metrics.csv");
    const std::string fit_a = slurp(dir.str() + "/fit.json");
    const std::string rr_a = slurp(dir.str() + "/sensitivity_rr.csv");
    std::ostringstream out2, err2;
    REQUIRE(cmd_analyze(cfg, out2, err2) == 0);
    REQUIRE(cmd_fit(cfg, out2, err2) == 0);
    REQUIRE(cmd_sweep(cfg, out2, err2) == 0);
    CHECK(slurp(dir.str() + "/cycles.csv") == cycles_a);
    CHECK(slurp(dir.str() + "/metrics.csv") == metrics_a);
    CHECK(slurp(dir.str() + "/fit.json") == fit_a);
    CHECK(slurp(dir.str() + "/sensitivity_rr.csv") == rr_a);
  }
}

TEST_CASE("report summarizes artifacts") {
  TempDir dir("report");
  RunConfig cfg;
  cfg.out_dir = dir.str();
  std::ostringstream empty_out, err;
  REQUIRE(cmd_report(cfg, empty_out, err) == 0);
  CHECK(empty_out.str().find("no artifacts") != std::string::npos);

  cfg.input = kAppendixCsv;
  RunConfig run = appendix_config(dir.str());
  std::ostringstream out;
  REQUIRE(cmd_analyze(run, out, err) == 0);
  std::ostringstream report;
  REQUIRE(cmd_report(run, report, err) == 0);
  CHECK(report.str().find("metrics.csv: 1 cycles") != std::string::npos);
  CHECK(report.str().find("top cycles") != std::string::npos);
}

namespace {

class ScriptedTransport : public HttpTransport {
public:
  explicit ScriptedTransport(HttpResponse response) : response_(std::move(response)) {}
  HttpResponse get(const std::string&) override { return response_; }

private:
  HttpResponse response_;
};

} // namespace

TEST_CASE("fetch caches the parsed series") {
  TempDir dir("fetch");
  std::string csv = "Date,Close\n";
  for (int d = 0; d < 8; ++d) csv += Date(19000 + d).to_iso() + "," + std::to_string(10 + d) + "\n";

  RunConfig cfg;
  cfg.out_dir = dir.str();
  cfg.fetch_symbol = "TEST";
  ScriptedTransport ok({200, csv});
  std::ostringstream out, err;
  REQUIRE(cmd_fetch(cfg, ok, out, err) == 0);
  const PriceSeries cached = parse_csv(slurp(dir.str() + "/TEST.csv"), "TEST", 2);
  CHECK(cached.size() == 8);

  ScriptedTransport not_found({404, ""});
  std::ostringstream out2, err2;
  CHECK(cmd_fetch(cfg, not_found, out2, err2) == 2);
  CHECK(err2.str().find("404") != std::string::npos);
}
