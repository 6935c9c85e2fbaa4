#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "reserving/classical.hpp"
#include "reserving/fuzzy.hpp"
#include "reserving/triangle.hpp"

namespace reserving {

/// Fuzzified triangle: per observed cell an endpoint TFN whose center is the
/// observed payment, plus the log-scale channel vectors in canonical cell
/// order.
struct FuzzyTriangle {
  std::vector<Tfn> cells;
  Eigen::VectorXd log_left;
  Eigen::VectorXd log_center;
  Eigen::VectorXd log_right;
};

struct HybridParams {
  Eigen::VectorXd beta;  // (tau, alpha_2..alpha_k, gamma_2..gamma_k)
  double theta = 1.0;
  double delta = 1.0;
  double lambda = 0.0;
  double mu = 0.0;
};

struct ConvergenceOptions {
  double tol = 1e-12;
  int max_iter = 200000;
};

struct GoodnessOfFit {
  double fsst = 0.0;
  double fssr = 0.0;
  double fsse = 0.0;
  double r2_fuzzy = 0.0;
};

/// Converged fuzzy least-squares fit. fitted_log_* hold the three fitted
/// channels on the log scale: center = X beta, left = center*theta + lambda,
/// right = center*delta + mu.
struct HybridFit {
  HybridParams params;
  Eigen::VectorXd fitted_log_left;
  Eigen::VectorXd fitted_log_center;
  Eigen::VectorXd fitted_log_right;
  GoodnessOfFit gof;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // S after each sweep, nonincreasing
};

/// Per-cell fuzzy predictions for the unobserved cells, their component-wise
/// total, and the defuzzified crisp value at risk aversion pi.
struct FuzzyReserve {
  std::vector<std::pair<CellIndex, Tfn>> cells;
  Tfn total;
  double crisp_value = 0.0;
  double pi = 1.0;
};

/// Builds the fuzzy triangle from adjusted residuals:
///   Y^L = Y - |r'|/2,  Y^c = Y,  Y^R = Y + |r'|/2.
/// Throws NonPositiveLeftChannel if a left channel would be <= 0.
FuzzyTriangle fuzzify(const RunOffTriangle& t, const ResidualSet& res);

/// Fits the three-channel model by cycling the block updates
/// (beta, theta, lambda, delta, mu), each the exact minimizer of
///   S = |Yc' - Xb|^2 + |YL' - Xb*theta - 1*lambda|^2
///     + |YR' - Xb*delta - 1*mu|^2
/// in its block, until the largest parameter change in a sweep is below
/// opts.tol. A capped fit is returned with converged = false.
HybridFit fit_hybrid(const FuzzyTriangle& ft, const Eigen::MatrixXd& x,
                     const ConvergenceOptions& opts = {});

/// FSST/FSSR/FSSE over the three log-scale channels against the channel
/// means of the observations, and their ratio R^2_F = FSSR/FSST.
GoodnessOfFit goodness_of_fit(const FuzzyTriangle& ft, const HybridFit& fit);

/// Predicts a TFN for every unobserved cell by exponentiating the three
/// fitted log channels. The channels may cross for large cells (theta > 1
/// stretches, delta < 1 shrinks); the TFN takes the sorted triple so that
/// left <= center <= right always holds.
FuzzyReserve predict_fuzzy(const HybridFit& fit, const RunOffTriangle& t);

/// Sums the per-cell predictions component-wise and defuzzifies at pi.
FuzzyReserve total_reserve(FuzzyReserve pred, double pi);

}  // namespace reserving
