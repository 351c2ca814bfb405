#include "priosim/triggering.hpp"

#include <cmath>

#include "priosim/errors.hpp"
#include "priosim/gamma.hpp"

namespace priosim {

Eigen::MatrixXd propagated_variance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_v,
                                    int h) {
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  for (int s = 0; s < h; ++s) {
    var += power * sigma_v * power.transpose();
    power = A * power;
  }
  return var;
}

ErrorStatistics ErrorStatistics::make(const LtiModel& model, const Eigen::MatrixXd& F_ii,
                                      const Eigen::VectorXd& e_max, int horizon) {
  if (horizon < 0) throw ConfigError("ErrorStatistics: horizon must be non-negative");
  ErrorStatistics stats;
  stats.horizon = horizon;
  stats.var_h = propagated_variance(model.A, model.sigma_v, horizon + 1);
  stats.var_0 = propagated_variance(model.A, model.sigma_v, 1);
  // Noiseless (or otherwise singular) models get a vanishing ridge so the
  // inverse exists; the threshold then becomes effectively infinite and the
  // priority collapses to zero for any finite error, which is the intended
  // "nothing to report" behavior.
  const int n = model.state_dim();
  for (Eigen::MatrixXd* var : {&stats.var_h, &stats.var_0}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*var);
    if (es.eigenvalues().minCoeff() <= 0.0) *var += 1e-30 * Eigen::MatrixXd::Identity(n, n);
  }
  stats.var_h_inv = stats.var_h.inverse();
  stats.var_0_inv = stats.var_0.inverse();
  stats.e_max = e_max;
  stats.delta_h = mahalanobis_sq(e_max, stats.var_h_inv);
  stats.delta_0 = mahalanobis_sq(e_max, stats.var_0_inv);
  stats.closed_loop = model.A + model.B * F_ii;
  return stats;
}

double mahalanobis_sq(const Eigen::VectorXd& e, const Eigen::MatrixXd& v_inverse) {
  return e.dot(v_inverse * e);
}

Eigen::VectorXd propagate_error_mean(const Eigen::MatrixXd& closed_loop,
                                     const Eigen::VectorXd& e, int horizon) {
  Eigen::VectorXd out = e;
  for (int s = 0; s <= horizon; ++s) out = closed_loop * out;
  return out;
}

double priority_exceedance(double delta, double d_sq, int n) {
  if (d_sq >= delta) return 1.0;
  return chi_square_tail(delta - d_sq, n);
}

double priority(double delta, double d_sq, int n) {
  if (d_sq <= delta) return 0.5 * chi_square_tail(delta - d_sq, n);
  // Threshold exceeded: reverse the arguments to score how unlikely the
  // error is to fall back below, keeping the score increasing in d_sq.
  return 1.0 - 0.5 * chi_square_tail(d_sq - delta, n);
}

double priority_chernoff(double delta, double d_sq, int n) {
  if (d_sq <= delta) return 0.5 * chi_square_tail_chernoff(delta - d_sq, n);
  return 1.0 - 0.5 * chi_square_tail_chernoff(d_sq - delta, n);
}

int quantize_priority(double p, int bits) {
  if (bits < 1) throw ConfigError("quantize_priority: bits must be >= 1");
  const int top = (1 << bits) - 1;
  const int q = static_cast<int>(std::floor(p * top + 0.5));
  return std::max(0, std::min(top, q));
}

int quantize_with_saturation(double p, const Eigen::VectorXd& e, const Eigen::VectorXd& e_max,
                             int bits) {
  if (bits < 1) throw ConfigError("quantize_with_saturation: bits must be >= 1");
  for (int c = 0; c < e.size(); ++c)
    if (std::fabs(e(c)) > e_max(c)) return (1 << bits) - 1;
  return quantize_priority(p, bits);
}

}  // namespace priosim
