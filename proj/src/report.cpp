#include "reserving/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace reserving {
namespace {

constexpr const char* kToolName = "fuzzy-reserve";
constexpr const char* kToolVersion = "1.0.0";

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json:
      return "json";
    case OutputFormat::Csv:
      return "csv";
    case OutputFormat::Text:
      return "text";
  }
  return "json";
}

nlohmann::ordered_json coefficient_map(const std::vector<std::string>& names,
                                       const Eigen::VectorXd& values) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (int i = 0; i < values.size(); ++i) obj[names[i]] = values(i);
  return obj;
}

nlohmann::ordered_json tfn_json(const Tfn& t) {
  return {{"left", t.left}, {"center", t.center}, {"right", t.right}};
}

nlohmann::ordered_json classical_json(const PipelineResult& r) {
  const auto& fit = r.classical;
  const auto names = coefficient_labels(r.triangle.k());
  nlohmann::ordered_json j;
  j["method"] = fit.method == FitMethod::MleIrls ? "mle" : "least-squares";
  j["coefficients"] = coefficient_map(names, fit.beta);
  if (fit.std_errors.size() > 0) {
    j["std_errors"] = coefficient_map(names, fit.std_errors);
    j["z_stats"] = coefficient_map(names, fit.z_stats);
    j["p_values"] = coefficient_map(names, fit.p_values);
  }
  j["r_squared"] = fit.r_squared;
  j["reserve"] = r.classical_reserve_value;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  if (r.dispersion) {
    j["dispersion"] = {{"z_stat", r.dispersion->z_stat},
                       {"p_value", r.dispersion->p_value},
                       {"alternative", "greater"}};
  }
  return j;
}

nlohmann::ordered_json hybrid_json(const PipelineResult& r) {
  const auto& fit = *r.hybrid;
  const auto names = coefficient_labels(r.triangle.k());
  nlohmann::ordered_json j;
  j["params"] = {{"beta", coefficient_map(names, fit.params.beta)},
                 {"theta", fit.params.theta},
                 {"delta", fit.params.delta},
                 {"lambda", fit.params.lambda},
                 {"mu", fit.params.mu}};
  j["fsst"] = fit.gof.fsst;
  j["fssr"] = fit.gof.fssr;
  j["fsse"] = fit.gof.fsse;
  j["r2_fuzzy"] = fit.gof.r2_fuzzy;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  auto fitted = nlohmann::ordered_json::array();
  const auto order = cell_order(r.triangle);
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    fitted.push_back({{"origin", order[idx].origin},
                      {"dev", order[idx].dev},
                      {"log_left", fit.fitted_log_left(idx)},
                      {"log_center", fit.fitted_log_center(idx)},
                      {"log_right", fit.fitted_log_right(idx)}});
  }
  j["fitted"] = std::move(fitted);
  return j;
}

nlohmann::ordered_json reserves_json(const PipelineResult& r) {
  const auto& res = *r.reserves;
  nlohmann::ordered_json j;
  j["pi"] = res.pi;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& [cell, tfn] : res.cells) {
    auto entry = nlohmann::ordered_json{{"origin", cell.origin},
                                        {"dev", cell.dev}};
    entry.update(tfn_json(tfn));
    cells.push_back(std::move(entry));
  }
  j["cells"] = std::move(cells);
  j["total"] = tfn_json(res.total);
  j["crisp_value"] = res.crisp_value;
  return j;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string num(const nlohmann::ordered_json& v) { return v.dump(); }

}  // namespace

std::string input_digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setfill('0') << std::setw(16) << hash;
  return out.str();
}

PipelineResult run_classical(const RunConfig& cfg) {
  std::ifstream in(cfg.input_path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  PipelineResult result{parse_triangle(buf.str())};
  result.classical = cfg.estimator == FitMethod::MleIrls
                         ? fit_mle(result.triangle)
                         : fit_least_squares(result.triangle);
  if (cfg.estimator == FitMethod::MleIrls) {
    result.dispersion = dispersion_test(result.triangle, result.classical);
  }
  result.classical_reserve_value =
      classical_reserve(result.triangle, result.classical);
  return result;
}

PipelineResult run_hybrid(const RunConfig& cfg) {
  RunConfig classical_cfg = cfg;
  classical_cfg.estimator = FitMethod::MleIrls;  // residuals come from MLE
  PipelineResult result = run_classical(classical_cfg);
  const auto res = residuals(result.triangle, result.classical);
  result.fuzzy_triangle = fuzzify(result.triangle, res);
  const Eigen::MatrixXd x = build_design_matrix(result.triangle);
  ConvergenceOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  result.hybrid = fit_hybrid(*result.fuzzy_triangle, x, opts);
  if (cfg.strict && !result.hybrid->converged) {
    throw NotConverged("fuzzy least squares hit the iteration cap");
  }
  result.reserves =
      total_reserve(predict_fuzzy(*result.hybrid, result.triangle), cfg.pi);
  return result;
}

nlohmann::ordered_json build_report(const PipelineResult& result,
                                    const RunConfig& cfg,
                                    const std::string& kind,
                                    const std::string& input_bytes) {
  nlohmann::ordered_json report;
  report["metadata"] = {
      {"tool", kToolName},
      {"version", kToolVersion},
      {"kind", kind},
      {"input_path", cfg.input_path},
      {"input_digest", input_digest(input_bytes)},
      {"config",
       {{"pi", cfg.pi},
        {"tol", cfg.tol},
        {"max_iter", cfg.max_iter},
        {"format", format_name(cfg.output_format)},
        {"estimator",
         cfg.estimator == FitMethod::MleIrls ? "mle" : "least-squares"},
        {"strict", cfg.strict},
        {"emit_intermediates", cfg.emit_intermediates}}}};
  report["triangle"] = {{"k", result.triangle.k()}, {"n", result.triangle.n()}};

  report["classical"] = classical_json(result);
  if (result.hybrid) report["hybrid"] = hybrid_json(result);
  if (result.reserves) report["reserves"] = reserves_json(result);
  if (cfg.emit_intermediates && result.fuzzy_triangle) {
    auto cells = nlohmann::ordered_json::array();
    const auto order = cell_order(result.triangle);
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
      auto entry = nlohmann::ordered_json{{"origin", order[idx].origin},
                                          {"dev", order[idx].dev}};
      entry.update(tfn_json(result.fuzzy_triangle->cells[idx]));
      cells.push_back(std::move(entry));
    }
    report["fuzzified"] = std::move(cells);
  }
  if (kind == "compare" && result.hybrid) {
    const double r2c = result.classical.r_squared;
    const double r2f = result.hybrid->gof.r2_fuzzy;
    std::string verdict = "tie";
    if (r2f > r2c + 1e-8) verdict = "hybrid";
    if (r2c > r2f + 1e-8) verdict = "classical";
    report["comparison"] = {{"classical_r_squared", r2c},
                            {"hybrid_r2_fuzzy", r2f},
                            {"classical_reserve", result.classical_reserve_value},
                            {"hybrid_crisp_reserve",
                             result.reserves ? result.reserves->crisp_value
                                             : 0.0},
                            {"verdict", verdict}};
  }
  return report;
}

std::string render_text(const nlohmann::ordered_json& report) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "== " << report["metadata"]["tool"].get<std::string>() << " "
      << report["metadata"]["kind"].get<std::string>() << " ==\n";
  out << "input: " << report["metadata"]["input_path"].get<std::string>()
      << "  (" << report["metadata"]["input_digest"].get<std::string>()
      << ")\n\n";

  const auto& cls = report["classical"];
  out << "Classical fit (" << cls["method"].get<std::string>() << ")\n";
  out << std::left << std::setw(12) << "coefficient" << std::right
      << std::setw(16) << "estimate";
  const bool have_se = cls.contains("std_errors");
  if (have_se) out << std::setw(16) << "std error" << std::setw(16) << "p-value";
  out << "\n";
  for (const auto& [name, value] : cls["coefficients"].items()) {
    out << std::left << std::setw(12) << name << std::right << std::setw(16)
        << value.get<double>();
    if (have_se) {
      out << std::setw(16) << cls["std_errors"][name].get<double>()
          << std::setw(16) << cls["p_values"][name].get<double>();
    }
    out << "\n";
  }
  out << "R^2 = " << cls["r_squared"].get<double>()
      << "    Total Reserve = " << cls["reserve"].get<double>() << "\n";
  if (cls.contains("dispersion")) {
    out << "Overdispersion test: Z = "
        << cls["dispersion"]["z_stat"].get<double>()
        << ", p-value = " << cls["dispersion"]["p_value"].get<double>()
        << "\n";
  }

  if (report.contains("hybrid")) {
    const auto& hy = report["hybrid"];
    out << "\nHybrid fuzzy least-squares fit (" << hy["iterations"]
        << " sweeps, "
        << (hy["converged"].get<bool>() ? "converged" : "NOT converged")
        << ")\n";
    for (const auto& [name, value] : hy["params"]["beta"].items()) {
      out << std::left << std::setw(12) << name << std::right << std::setw(18)
          << value.get<double>() << "\n";
    }
    out << "theta = " << hy["params"]["theta"].get<double>()
        << "  lambda = " << hy["params"]["lambda"].get<double>()
        << "  delta = " << hy["params"]["delta"].get<double>()
        << "  mu = " << hy["params"]["mu"].get<double>() << "\n";
    out << "R^2_F = " << hy["r2_fuzzy"].get<double>() << "\n";
    out << "\nFitted log-scale channels\n";
    out << std::left << std::setw(10) << "cell" << std::right << std::setw(14)
        << "left" << std::setw(14) << "center" << std::setw(14) << "right"
        << "\n";
    for (const auto& row : hy["fitted"]) {
      std::ostringstream cell;
      cell << "(" << row["origin"] << "," << row["dev"] << ")";
      out << std::left << std::setw(10) << cell.str() << std::right
          << std::setw(14) << row["log_left"].get<double>() << std::setw(14)
          << row["log_center"].get<double>() << std::setw(14)
          << row["log_right"].get<double>() << "\n";
    }
  }

  if (report.contains("reserves")) {
    const auto& res = report["reserves"];
    out << "\nPredicted fuzzy cells\n";
    out << std::left << std::setw(10) << "cell" << std::right << std::setw(14)
        << "left" << std::setw(14) << "center" << std::setw(14) << "right"
        << "\n";
    for (const auto& row : res["cells"]) {
      std::ostringstream cell;
      cell << "(" << row["origin"] << "," << row["dev"] << ")";
      out << std::left << std::setw(10) << cell.str() << std::right
          << std::setw(14) << row["left"].get<double>() << std::setw(14)
          << row["center"].get<double>() << std::setw(14)
          << row["right"].get<double>() << "\n";
    }
    out << "Fuzzy total reserve = (" << res["total"]["left"].get<double>()
        << ", " << res["total"]["center"].get<double>() << ", "
        << res["total"]["right"].get<double>() << ")\n";
    out << "Crisp reserve at pi = " << res["pi"].get<double>() << ": "
        << res["crisp_value"].get<double>() << "\n";
  }

  if (report.contains("comparison")) {
    const auto& cmp = report["comparison"];
    out << "\nComparison\n";
    out << "classical R^2      = " << cmp["classical_r_squared"].get<double>()
        << "   reserve = " << cmp["classical_reserve"].get<double>() << "\n";
    out << "hybrid    R^2_F    = " << cmp["hybrid_r2_fuzzy"].get<double>()
        << "   reserve = " << cmp["hybrid_crisp_reserve"].get<double>()
        << "\n";
    out << "verdict: " << cmp["verdict"].get<std::string>() << " preferred\n";
  }
  return out.str();
}

void write_csv(const nlohmann::ordered_json& report,
               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    std::ofstream out(dir / "coefficients.csv");
    const auto& cls = report["classical"];
    const bool have_se = cls.contains("std_errors");
    out << "coefficient,estimate";
    if (have_se) out << ",std_error,z_stat,p_value";
    if (report.contains("hybrid")) out << ",hybrid_estimate";
    out << "\n";
    for (const auto& [name, value] : cls["coefficients"].items()) {
      out << csv_escape(name) << "," << num(value);
      if (have_se) {
        out << "," << num(cls["std_errors"][name]) << ","
            << num(cls["z_stats"][name]) << "," << num(cls["p_values"][name]);
      }
      if (report.contains("hybrid")) {
        out << "," << num(report["hybrid"]["params"]["beta"][name]);
      }
      out << "\n";
    }
  }

  if (report.contains("hybrid")) {
    std::ofstream out(dir / "fitted.csv");
    out << "origin,dev,log_left,log_center,log_right\n";
    for (const auto& row : report["hybrid"]["fitted"]) {
      out << row["origin"] << "," << row["dev"] << "," << num(row["log_left"])
          << "," << num(row["log_center"]) << "," << num(row["log_right"])
          << "\n";
    }
  }

  if (report.contains("reserves")) {
    std::ofstream out(dir / "predictions.csv");
    out << "origin,dev,left,center,right\n";
    for (const auto& row : report["reserves"]["cells"]) {
      out << row["origin"] << "," << row["dev"] << "," << num(row["left"])
          << "," << num(row["center"]) << "," << num(row["right"]) << "\n";
    }
  }

  {
    std::ofstream out(dir / "summary.csv");
    out << "key,value\n";
    out << "classical_r_squared," << num(report["classical"]["r_squared"])
        << "\n";
    out << "classical_reserve," << num(report["classical"]["reserve"]) << "\n";
    if (report["classical"].contains("dispersion")) {
      out << "dispersion_z," << num(report["classical"]["dispersion"]["z_stat"])
          << "\n";
      out << "dispersion_p,"
          << num(report["classical"]["dispersion"]["p_value"]) << "\n";
    }
    if (report.contains("hybrid")) {
      out << "r2_fuzzy," << num(report["hybrid"]["r2_fuzzy"]) << "\n";
      out << "fls_iterations," << num(report["hybrid"]["iterations"]) << "\n";
    }
    if (report.contains("reserves")) {
      const auto& res = report["reserves"];
      out << "fuzzy_reserve_left," << num(res["total"]["left"]) << "\n";
      out << "fuzzy_reserve_center," << num(res["total"]["center"]) << "\n";
      out << "fuzzy_reserve_right," << num(res["total"]["right"]) << "\n";
      out << "crisp_reserve," << num(res["crisp_value"]) << "\n";
    }
  }
}

}  // namespace reserving
