#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <string>

#include "test_util.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

std::string cli_path() {
  const char* p = std::getenv("RESERVE_CLI");
  REQUIRE_MESSAGE(p != nullptr, "RESERVE_CLI not set");
  return p;
}

std::string data_file(const std::string& name) {
  const char* p = std::getenv("RESERVE_TEST_DATA");
  REQUIRE_MESSAGE(p != nullptr, "RESERVE_TEST_DATA not set");
  return (std::filesystem::path(p) / name).string();
}

CliResult run_cli(const std::string& args) {
  const std::string cmd =
      "RESERVE_OUTPUT_DIR= " + cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.output.append(buf, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

nlohmann::json run_json(const std::string& args) {
  const auto r = run_cli(args);
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  return nlohmann::json::parse(r.output);
}

}  // namespace

TEST_CASE("fit-classical reports the published estimates") {
  const auto j = run_json("fit-classical --input " + data_file("table2.csv"));
  CHECK(j["metadata"]["kind"] == "classical");
  CHECK(j["triangle"]["k"] == 5);
  CHECK(j["triangle"]["n"] == 15);
  CHECK(j["classical"]["method"] == "mle");
  CHECK(j["classical"]["coefficients"]["tau"].get<double>() ==
        test_util::near(6.99639, 5e-5));
  CHECK(j["classical"]["reserve"].get<double>() ==
        test_util::near(33634.89, 0.05));
  CHECK(j["classical"]["dispersion"]["z_stat"].get<double>() ==
        test_util::near(-6.3414, 0.1));
  CHECK(j["classical"]["dispersion"]["p_value"].get<double>() > 0.99);
}

TEST_CASE("fit-classical honors the least-squares estimator flag") {
  const auto j = run_json("fit-classical --estimator ls --input " +
                          data_file("table2.csv"));
  CHECK(j["classical"]["method"] == "least-squares");
  CHECK(!j["classical"].contains("std_errors"));
  CHECK(!j["classical"].contains("dispersion"));
}

TEST_CASE("fit-hybrid runs the whole pipeline") {
  const auto j = run_json("fit-hybrid --input " + data_file("table2.csv"));
  CHECK(j["metadata"]["kind"] == "hybrid");
  CHECK(j["hybrid"]["converged"] == true);
  CHECK(j["hybrid"]["r2_fuzzy"].get<double>() ==
        test_util::near(0.9986105, 1e-4));
  CHECK(j["reserves"]["pi"].get<double>() == 1.0);
  CHECK(j["reserves"]["crisp_value"].get<double>() ==
        test_util::near(33387.49, 0.05));
  CHECK(j["reserves"]["cells"].size() == 10);
}

TEST_CASE("the reported crisp value follows from the reported total") {
  const auto j = run_json("fit-hybrid --pi 0.5 --input " +
                          data_file("table2.csv"));
  const auto& total = j["reserves"]["total"];
  const double l = total["left"].get<double>();
  const double c = total["center"].get<double>();
  const double r = total["right"].get<double>();
  const double pi = 0.5;
  const double expected = (1 - pi) * (c - l) / 2.0 + pi * (c + r) / 2.0;
  CHECK(j["reserves"]["crisp_value"].get<double>() ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("json output is byte-identical across runs") {
  const std::string args = "fit-hybrid --input " + data_file("table2.csv");
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
}

TEST_CASE("compare verdict agrees with the indices it reports") {
  const auto j = run_json("compare --input " + data_file("table2.csv"));
  CHECK(j["metadata"]["kind"] == "compare");
  const double r2c = j["comparison"]["classical_r_squared"].get<double>();
  const double r2f = j["comparison"]["hybrid_r2_fuzzy"].get<double>();
  const std::string verdict = j["comparison"]["verdict"].get<std::string>();
  if (r2f > r2c + 1e-8) {
    CHECK(verdict == "hybrid");
  } else if (r2c > r2f + 1e-8) {
    CHECK(verdict == "classical");
  } else {
    CHECK(verdict == "tie");
  }
  CHECK(j["comparison"]["hybrid_crisp_reserve"].get<double>() ==
        test_util::near(33387.49, 0.05));
}

TEST_CASE("compare calls a tie on an exactly log-linear triangle") {
  const auto path =
      std::filesystem::temp_directory_path() / "reserve_cli_exact.csv";
  {
    std::ofstream out(path);
    out << std::setprecision(17);
    const double tau = 6.0, alpha[] = {0.0, 0.2, -0.1},
                 gamma[] = {0.0, 0.5, 0.7};
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        if (i + j <= 4) out << std::exp(tau + alpha[i - 1] + gamma[j - 1]);
        out << (j < 3 ? "," : "\n");
      }
    }
  }
  const auto j = run_json("compare --input " + path.string());
  CHECK(j["comparison"]["classical_r_squared"].get<double>() ==
        test_util::near(1.0, 1e-8));
  CHECK(j["comparison"]["hybrid_r2_fuzzy"].get<double>() ==
        test_util::near(1.0, 1e-8));
  CHECK(j["comparison"]["verdict"] == "tie");
  std::filesystem::remove(path);
}

TEST_CASE("text format renders the report tables") {
  const auto r = run_cli("fit-hybrid --format text --input " +
                         data_file("table2.csv"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("Total Reserve") != std::string::npos);
  CHECK(r.output.find("Fuzzy total reserve") != std::string::npos);
  CHECK(r.output.find("R^2_F") != std::string::npos);
}

TEST_CASE("csv format writes one file per table") {
  const auto dir = std::filesystem::temp_directory_path() / "reserve_cli_csv";
  std::filesystem::remove_all(dir);
  const auto r = run_cli("fit-hybrid --format csv --output " + dir.string() +
                         " --input " + data_file("table2.csv"));
  CHECK(r.exit_code == 0);
  for (const char* name :
       {"coefficients.csv", "fitted.csv", "predictions.csv", "summary.csv"}) {
    CHECK_MESSAGE(std::filesystem::exists(dir / name), name);
  }
  std::ifstream summary(dir / "summary.csv");
  std::string text((std::istreambuf_iterator<char>(summary)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("crisp_reserve") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv format without an output directory is a usage error") {
  const auto r = run_cli("fit-hybrid --format csv --input " +
                         data_file("table2.csv"));
  CHECK(r.exit_code == 1);
}

TEST_CASE("missing input file exits 1") {
  const auto r = run_cli("fit-classical --input /nonexistent/triangle.csv");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("cannot read") != std::string::npos);
}

TEST_CASE("invalid triangle data exits 2") {
  const auto path =
      std::filesystem::temp_directory_path() / "reserve_cli_bad.csv";
  std::ofstream(path) << "100,0\n50,\n";
  const auto r = run_cli("fit-classical --input " + path.string());
  CHECK(r.exit_code == 2);
  std::filesystem::remove(path);
}

TEST_CASE("missing subcommand exits 1") {
  const auto r = run_cli("");
  CHECK(r.exit_code != 0);
}
