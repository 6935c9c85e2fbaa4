#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "reserving/report.hpp"

namespace {

using reserving::OutputFormat;
using reserving::RunConfig;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& format,
                        std::string& estimator, std::string& output) {
  cmd->add_option("--input", cfg.input_path, "Triangle CSV file")->required();
  cmd->add_option("--pi", cfg.pi, "Risk aversion parameter in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--tol", cfg.tol, "FLS convergence tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", cfg.max_iter, "FLS sweep cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", format, "Report format: json|csv|text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  cmd->add_option("--estimator", estimator,
                  "Classical estimator: mle|ls")
      ->check(CLI::IsMember({"mle", "ls"}));
  cmd->add_flag("--strict", cfg.strict,
                "Treat non-convergence as a failure (exit 3)");
  cmd->add_flag("--emit-intermediates", cfg.emit_intermediates,
                "Include the fuzzified triangle in the report");
  cmd->add_option("--output", output,
                  "Output directory (default: $RESERVE_OUTPUT_DIR; report "
                  "goes to stdout when unset)");
}

int emit(const nlohmann::ordered_json& report, const RunConfig& cfg) {
  std::string rendered;
  switch (cfg.output_format) {
    case OutputFormat::Json:
      rendered = report.dump(2) + "\n";
      break;
    case OutputFormat::Text:
      rendered = reserving::render_text(report);
      break;
    case OutputFormat::Csv:
      if (!cfg.output_dir) {
        std::cerr << "error: --format csv needs an output directory "
                     "(--output or RESERVE_OUTPUT_DIR)\n";
        return 1;
      }
      break;
  }
  if (cfg.output_dir) {
    std::filesystem::create_directories(*cfg.output_dir);
    if (cfg.output_format == OutputFormat::Csv) {
      reserving::write_csv(report, *cfg.output_dir);
    } else {
      const auto ext =
          cfg.output_format == OutputFormat::Json ? ".json" : ".txt";
      std::ofstream out(*cfg.output_dir /
                        ("report" + std::string(ext)));
      out << rendered;
    }
  } else {
    std::cout << rendered;
  }
  return 0;
}

int run(const std::string& kind, const RunConfig& cfg) {
  const std::string bytes = read_file(cfg.input_path);
  const auto result = kind == "classical" ? reserving::run_classical(cfg)
                                          : reserving::run_hybrid(cfg);
  const auto report = reserving::build_report(result, cfg, kind, bytes);
  return emit(report, cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Claims reserving with classical and hybrid fuzzy log-Poisson "
               "regression"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format = "json";
  std::string estimator = "mle";
  std::string output;

  auto* fit_classical = app.add_subcommand(
      "fit-classical", "Fit the classical log-Poisson model");
  auto* fit_hybrid = app.add_subcommand(
      "fit-hybrid", "Run the full hybrid fuzzy least-squares pipeline");
  auto* compare = app.add_subcommand(
      "compare", "Fit both models and compare goodness of fit");
  for (auto* cmd : {fit_classical, fit_hybrid, compare}) {
    add_common_options(cmd, cfg, format, estimator, output);
  }

  CLI11_PARSE(app, argc, argv);

  cfg.output_format = format == "csv"    ? OutputFormat::Csv
                      : format == "text" ? OutputFormat::Text
                                         : OutputFormat::Json;
  cfg.estimator = estimator == "ls" ? reserving::FitMethod::LeastSquares
                                    : reserving::FitMethod::MleIrls;
  if (!output.empty()) {
    cfg.output_dir = output;
  } else if (const char* env = std::getenv("RESERVE_OUTPUT_DIR");
             env && *env) {
    cfg.output_dir = std::string(env);
  }

  if (!std::ifstream(cfg.input_path).good()) {
    std::cerr << "error: cannot read input file '" << cfg.input_path << "'\n";
    return 1;
  }

  try {
    if (fit_classical->parsed()) return run("classical", cfg);
    if (fit_hybrid->parsed()) return run("hybrid", cfg);
    return run("compare", cfg);
  } catch (const reserving::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const reserving::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
