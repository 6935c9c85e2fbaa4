#pragma once

#include <Eigen/Dense>

#include "reserving/triangle.hpp"

namespace reserving {

enum class FitMethod { MleIrls, LeastSquares };

/// Result of fitting ln E(Y_ij) = tau + alpha_i + gamma_j on the observed
/// cells. Wald statistics are populated for the MLE fit only.
struct ClassicalFit {
  Eigen::VectorXd beta;          // (tau, alpha_2..alpha_k, gamma_2..gamma_k)
  FitMethod method = FitMethod::MleIrls;
  Eigen::VectorXd fitted_means;  // exp(X beta), canonical cell order
  Eigen::VectorXd std_errors;    // empty for least squares
  Eigen::VectorXd z_stats;
  Eigen::VectorXd p_values;
  double r_squared = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct DispersionTest {
  double z_stat = 0.0;
  double p_value = 0.0;  // one-sided, alternative psi > 1
};

struct ResidualSet {
  Eigen::VectorXd pearson;
  Eigen::VectorXd adjusted;  // sqrt(n/(n-p)) * pearson
  int n = 0;
  int p = 0;
};

/// Poisson maximum likelihood via iteratively reweighted least squares,
/// initialized from the log-scale least-squares fit. Converges when the
/// largest coefficient change drops below tol. r_squared is reported on the
/// original scale.
ClassicalFit fit_mle(const RunOffTriangle& t, double tol = 1e-10,
                     int max_iter = 100);

/// Ordinary least squares of ln Y on the design matrix; no standard errors,
/// r_squared on the log scale.
ClassicalFit fit_least_squares(const RunOffTriangle& t);

/// Pearson residuals (Y - mu)/sqrt(mu) and their sqrt(n/(n-p)) adjustment.
ResidualSet residuals(const RunOffTriangle& t, const ClassicalFit& fit);

/// Overdispersion test against psi > 1: with d = ((Y - mu)^2 - Y)/mu,
/// z = sqrt(n) * mean(d)/sd(d) and p = 1 - Phi(z).
DispersionTest dispersion_test(const RunOffTriangle& t,
                               const ClassicalFit& fit);

/// Sum of fitted means over the unobserved cells.
double classical_reserve(const RunOffTriangle& t, const ClassicalFit& fit);

/// 1 - SSE/SST over observed cells on the original scale.
double classical_r_squared(const RunOffTriangle& t, const ClassicalFit& fit);

/// Standard normal CDF.
double normal_cdf(double x);

/// Rank-revealing solve of A x = b for symmetric positive semi-definite A;
/// throws Singular when the effective rank at threshold 1e-12 * s_max is
/// deficient.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace reserving
