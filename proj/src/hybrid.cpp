#include "reserving/hybrid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace reserving {

FuzzyTriangle fuzzify(const RunOffTriangle& t, const ResidualSet& res) {
  const auto order = cell_order(t);
  const int n = static_cast<int>(order.size());
  FuzzyTriangle ft;
  ft.cells.reserve(n);
  ft.log_left.resize(n);
  ft.log_center.resize(n);
  ft.log_right.resize(n);
  for (int r = 0; r < n; ++r) {
    const double y = t.cell(order[r].origin, order[r].dev);
    const double half = std::abs(res.adjusted(r)) / 2.0;
    const double left = y - half;
    const double right = y + half;
    if (!(left > 0.0)) {
      std::ostringstream msg;
      msg << "fuzzification makes the left channel of cell ("
          << order[r].origin << "," << order[r].dev << ") non-positive ("
          << left << ")";
      throw NonPositiveLeftChannel(msg.str());
    }
    ft.cells.push_back({left, y, right});
    ft.log_left(r) = std::log(left);
    ft.log_center(r) = std::log(y);
    ft.log_right(r) = std::log(right);
  }
  return ft;
}

HybridFit fit_hybrid(const FuzzyTriangle& ft, const Eigen::MatrixXd& x,
                     const ConvergenceOptions& opts) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (n < p) throw DegreesOfFreedomExhausted();
  const Eigen::VectorXd& yc = ft.log_center;
  const Eigen::VectorXd& yl = ft.log_left;
  const Eigen::VectorXd& yr = ft.log_right;

  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::VectorXd xt1 = x.transpose() * Eigen::VectorXd::Ones(n);
  const double denom_guard = 1e-12 * yc.squaredNorm();

  HybridFit fit;
  auto& prm = fit.params;
  prm.beta = solve_spd(xtx, x.transpose() * yc);  // center-channel OLS start
  prm.theta = 1.0;
  prm.delta = 1.0;
  prm.lambda = 0.0;
  prm.mu = 0.0;

  const auto objective = [&] {
    return (yc - x * prm.beta).squaredNorm() +
           (yl - (x * prm.beta * prm.theta).eval() -
            Eigen::VectorXd::Constant(n, prm.lambda))
               .squaredNorm() +
           (yr - (x * prm.beta * prm.delta).eval() -
            Eigen::VectorXd::Constant(n, prm.mu))
               .squaredNorm();
  };

  fit.objective_trace.reserve(256);
  Eigen::JacobiSVD<Eigen::MatrixXd> xtx_svd(
      xtx, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = xtx_svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0)) {
    throw Singular("X^T X is rank deficient");
  }
  for (int sweep = 1; sweep <= opts.max_iter; ++sweep) {
    double change = 0.0;

    // beta, the joint minimizer across the three channels.
    const Eigen::VectorXd rhs =
        x.transpose() * yc +
        prm.theta * (x.transpose() * yl - xt1 * prm.lambda) +
        prm.delta * (x.transpose() * yr - xt1 * prm.mu);
    const Eigen::VectorXd beta_next =
        xtx_svd.solve(rhs) /
        (1.0 + prm.theta * prm.theta + prm.delta * prm.delta);
    change = std::max(change, (beta_next - prm.beta).cwiseAbs().maxCoeff());
    prm.beta = beta_next;

    const double quad = prm.beta.dot(xtx * prm.beta);
    if (quad <= denom_guard) {
      throw Singular("beta^T X^T X beta is numerically zero");
    }
    const double proj1 = prm.beta.dot(xt1);

    const double theta_next =
        (prm.beta.dot(x.transpose() * yl) - proj1 * prm.lambda) / quad;
    change = std::max(change, std::abs(theta_next - prm.theta));
    prm.theta = theta_next;

    const double lambda_next = (yl.sum() - proj1 * prm.theta) / n;
    change = std::max(change, std::abs(lambda_next - prm.lambda));
    prm.lambda = lambda_next;

    const double delta_next =
        (prm.beta.dot(x.transpose() * yr) - proj1 * prm.mu) / quad;
    change = std::max(change, std::abs(delta_next - prm.delta));
    prm.delta = delta_next;

    const double mu_next = (yr.sum() - proj1 * prm.delta) / n;
    change = std::max(change, std::abs(mu_next - prm.mu));
    prm.mu = mu_next;

    fit.objective_trace.push_back(objective());
    fit.iterations = sweep;
    if (change < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  fit.fitted_log_center = x * prm.beta;
  fit.fitted_log_left =
      (prm.theta * fit.fitted_log_center).array() + prm.lambda;
  fit.fitted_log_right =
      (prm.delta * fit.fitted_log_center).array() + prm.mu;
  fit.gof = goodness_of_fit(ft, fit);
  return fit;
}

GoodnessOfFit goodness_of_fit(const FuzzyTriangle& ft, const HybridFit& fit) {
  const auto channel_sums = [](const Eigen::VectorXd& obs,
                               const Eigen::VectorXd& fitted) {
    const double mean = obs.mean();
    const double sst = (obs.array() - mean).matrix().squaredNorm();
    const double ssr = (fitted.array() - mean).matrix().squaredNorm();
    const double sse = (obs - fitted).squaredNorm();
    return std::array<double, 3>{sst, ssr, sse};
  };
  const auto c = channel_sums(ft.log_center, fit.fitted_log_center);
  const auto l = channel_sums(ft.log_left, fit.fitted_log_left);
  const auto r = channel_sums(ft.log_right, fit.fitted_log_right);

  GoodnessOfFit gof;
  gof.fsst = c[0] + l[0] + r[0];
  gof.fssr = c[1] + l[1] + r[1];
  gof.fsse = c[2] + l[2] + r[2];
  if (gof.fsst <= 0.0) throw DegenerateVariance();
  gof.r2_fuzzy = gof.fssr / gof.fsst;
  return gof;
}

FuzzyReserve predict_fuzzy(const HybridFit& fit, const RunOffTriangle& t) {
  const int k = t.k();
  if (k < 2) throw NothingToPredict();
  const auto& prm = fit.params;
  FuzzyReserve pred;
  for (const auto& c : future_cells(t)) {
    const double center_log = design_row(k, c.origin, c.dev) * prm.beta;
    std::array<double, 3> v{std::exp(center_log * prm.theta + prm.lambda),
                            std::exp(center_log),
                            std::exp(center_log * prm.delta + prm.mu)};
    std::sort(v.begin(), v.end());
    pred.cells.emplace_back(c, Tfn{v[0], v[1], v[2]});
  }
  return pred;
}

FuzzyReserve total_reserve(FuzzyReserve pred, double pi) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw PiOutOfRange();
  std::vector<Tfn> tfns;
  tfns.reserve(pred.cells.size());
  for (const auto& [cell, tfn] : pred.cells) tfns.push_back(tfn);
  pred.total = sum_tfn(tfns);
  pred.pi = pi;
  pred.crisp_value = expected_value(pred.total, pi);
  return pred;
}

}  // namespace reserving
