#include "reserving/classical.hpp"

#include <cmath>

namespace reserving {
namespace {

Eigen::VectorXd observed_payments(const RunOffTriangle& t) {
  Eigen::VectorXd y(t.n());
  int r = 0;
  for (const auto& c : cell_order(t)) y(r++) = t.cell(c.origin, c.dev);
  return y;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double threshold = 1e-12 * sv(0);
  if (sv(sv.size() - 1) <= threshold) {
    throw Singular("normal-equations matrix is rank deficient");
  }
  return svd.solve(b);
}

ClassicalFit fit_least_squares(const RunOffTriangle& t) {
  if (t.k() < 2) throw DataError("fitting requires k >= 2");
  const Eigen::MatrixXd x = build_design_matrix(t);
  const Eigen::VectorXd y = observed_payments(t);
  const Eigen::VectorXd log_y = y.array().log();

  ClassicalFit fit;
  fit.method = FitMethod::LeastSquares;
  fit.beta = solve_spd(x.transpose() * x, x.transpose() * log_y);
  const Eigen::VectorXd eta = x * fit.beta;
  fit.fitted_means = eta.array().exp();
  const double sse = (log_y - eta).squaredNorm();
  const double sst =
      (log_y.array() - log_y.mean()).matrix().squaredNorm();
  fit.r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  fit.converged = true;
  fit.iterations = 1;
  return fit;
}

ClassicalFit fit_mle(const RunOffTriangle& t, double tol, int max_iter) {
  if (t.k() < 2) throw DataError("fitting requires k >= 2");
  const int n = t.n();
  const int p = 2 * t.k() - 1;
  if (n <= p) throw DegreesOfFreedomExhausted();
  const Eigen::MatrixXd x = build_design_matrix(t);
  const Eigen::VectorXd y = observed_payments(t);

  ClassicalFit fit;
  fit.method = FitMethod::MleIrls;
  fit.beta = fit_least_squares(t).beta;

  Eigen::MatrixXd xtwx(p, p);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd mu = (x * fit.beta).array().exp();
    const Eigen::VectorXd z =
        x * fit.beta + ((y - mu).array() / mu.array()).matrix();
    const Eigen::MatrixXd xw = x.transpose() * mu.asDiagonal();
    xtwx = xw * x;
    const Eigen::VectorXd next = solve_spd(xtwx, xw * z);
    const double change = (next - fit.beta).cwiseAbs().maxCoeff();
    fit.beta = next;
    fit.iterations = it;
    if (change < tol) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) {
    throw NotConverged("IRLS did not converge within the iteration cap");
  }

  fit.fitted_means = (x * fit.beta).array().exp();
  // Wald statistics from the observed information at convergence.
  const Eigen::MatrixXd cov =
      xtwx.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  fit.std_errors = cov.diagonal().array().sqrt();
  fit.z_stats = fit.beta.array() / fit.std_errors.array();
  fit.p_values.resize(p);
  for (int i = 0; i < p; ++i) {
    fit.p_values(i) = 2.0 * (1.0 - normal_cdf(std::abs(fit.z_stats(i))));
  }
  fit.r_squared = classical_r_squared(t, fit);
  return fit;
}

ResidualSet residuals(const RunOffTriangle& t, const ClassicalFit& fit) {
  const int n = t.n();
  const int p = 2 * t.k() - 1;
  if (n <= p) throw DegreesOfFreedomExhausted();
  const Eigen::VectorXd y = observed_payments(t);
  ResidualSet res;
  res.n = n;
  res.p = p;
  res.pearson =
      (y - fit.fitted_means).array() / fit.fitted_means.array().sqrt();
  res.adjusted = std::sqrt(double(n) / double(n - p)) * res.pearson;
  return res;
}

DispersionTest dispersion_test(const RunOffTriangle& t,
                               const ClassicalFit& fit) {
  const int n = t.n();
  const Eigen::VectorXd y = observed_payments(t);
  const Eigen::VectorXd mu = fit.fitted_means;
  const Eigen::ArrayXd d =
      ((y - mu).array().square() - y.array()) / mu.array();
  const double mean = d.mean();
  const double var = (d - mean).square().sum() / (n - 1);
  if (var <= 0.0) throw ZeroVariance();
  DispersionTest test;
  test.z_stat = std::sqrt(double(n)) * mean / std::sqrt(var);
  test.p_value = 1.0 - normal_cdf(test.z_stat);
  return test;
}

double classical_reserve(const RunOffTriangle& t, const ClassicalFit& fit) {
  const int k = t.k();
  double total = 0.0;
  for (const auto& c : future_cells(t)) {
    total += std::exp(design_row(k, c.origin, c.dev) * fit.beta);
  }
  return total;
}

double classical_r_squared(const RunOffTriangle& t, const ClassicalFit& fit) {
  const Eigen::VectorXd y = observed_payments(t);
  const double sse = (y - fit.fitted_means).squaredNorm();
  const double sst = (y.array() - y.mean()).matrix().squaredNorm();
  return sst > 0.0 ? 1.0 - sse / sst : 1.0;
}

}  // namespace reserving
