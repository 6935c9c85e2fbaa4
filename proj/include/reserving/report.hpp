#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "reserving/classical.hpp"
#include "reserving/hybrid.hpp"

namespace reserving {

enum class OutputFormat { Json, Csv, Text };

struct RunConfig {
  std::string input_path;
  double pi = 1.0;
  double tol = 1e-12;
  int max_iter = 200000;
  OutputFormat output_format = OutputFormat::Json;
  FitMethod estimator = FitMethod::MleIrls;
  bool emit_intermediates = false;
  bool strict = false;
  std::optional<std::filesystem::path> output_dir;
};

/// Everything one pipeline run produced. Optional stages are absent when the
/// subcommand did not run them.
struct PipelineResult {
  RunOffTriangle triangle;
  ClassicalFit classical;
  std::optional<DispersionTest> dispersion;
  double classical_reserve_value = 0.0;
  std::optional<HybridFit> hybrid;
  std::optional<FuzzyTriangle> fuzzy_triangle;
  std::optional<FuzzyReserve> reserves;
};

/// Runs the classical stage: parse, fit per cfg.estimator, dispersion test
/// (MLE only), reserve.
PipelineResult run_classical(const RunConfig& cfg);

/// Runs the full pipeline: classical MLE, residuals, fuzzification, fuzzy
/// least squares, goodness of fit, fuzzy and crisp reserves.
PipelineResult run_hybrid(const RunConfig& cfg);

/// Deterministic JSON report (insertion-ordered keys, round-trip exact
/// doubles). `kind` is "classical", "hybrid" or "compare".
nlohmann::ordered_json build_report(const PipelineResult& result,
                                    const RunConfig& cfg,
                                    const std::string& kind,
                                    const std::string& input_bytes);

/// Table-style renderings mirroring the JSON content.
std::string render_text(const nlohmann::ordered_json& report);

/// Writes one CSV file per table (coefficients, fitted, predictions,
/// summary) into dir.
void write_csv(const nlohmann::ordered_json& report,
               const std::filesystem::path& dir);

/// FNV-1a 64-bit digest of the input bytes, hex-encoded.
std::string input_digest(std::string_view bytes);

}  // namespace reserving
