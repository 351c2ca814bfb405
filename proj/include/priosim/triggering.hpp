#ifndef PRIOSIM_TRIGGERING_HPP_
#define PRIOSIM_TRIGGERING_HPP_

#include <Eigen/Dense>

#include "priosim/dynamics.hpp"

namespace priosim {

// Precomputed per-agent error statistics for the scheduling horizon H and
// for the instantaneous (H = 0) re-check. var(h) is the propagated noise
// covariance sum_{s=0}^{h} A^s sigma_v (A^s)^T; both inverses are cached so
// per-round work is a quadratic form.
struct ErrorStatistics {
  int horizon = 1;
  Eigen::MatrixXd var_h, var_h_inv;  // covariance at horizon H (H+1 noise terms)
  Eigen::MatrixXd var_0, var_0_inv;  // covariance at horizon 0 (one noise term)
  double delta_h = 0.0;              // threshold in squared-Mahalanobis units
  double delta_0 = 0.0;
  Eigen::VectorXd e_max;             // per-component saturation bounds
  Eigen::MatrixXd closed_loop;       // A + B F_ii, used for mean propagation

  static ErrorStatistics make(const LtiModel& model, const Eigen::MatrixXd& F_ii,
                              const Eigen::VectorXd& e_max, int horizon);
};

// sum_{s=0}^{h-1} A^s sigma_v (A^s)^T (h noise terms).
Eigen::MatrixXd propagated_variance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& sigma_v,
                                    int h);

double mahalanobis_sq(const Eigen::VectorXd& e, const Eigen::MatrixXd& v_inverse);

// Predicted error mean h+1 steps ahead with no communication in between:
// (A + B F_ii)^{h+1} e.
Eigen::VectorXd propagate_error_mean(const Eigen::MatrixXd& closed_loop,
                                     const Eigen::VectorXd& e, int horizon);

// Probability that the squared Mahalanobis distance of an n-dimensional
// standard normal exceeds delta - d_sq; 1 once the threshold is exceeded.
double priority_exceedance(double delta, double d_sq, int n);

// Priority score in [0, 1], strictly increasing in d_sq. The non-exceeded
// branch maps the exceedance probability to [0, 0.5]; past the threshold the
// complement of the fall-back probability is mapped to [0.5, 1], so the
// score crosses the 0.5 transmit threshold exactly when d_sq crosses delta.
double priority(double delta, double d_sq, int n);

// Same score family evaluated with the Chernoff tail surrogate; induces the
// same ranking and is the one used in the per-round hot path.
double priority_chernoff(double delta, double d_sq, int n);

int quantize_priority(double p, int bits);

// Saturation rule: any |e| component above e_max forces the top value.
int quantize_with_saturation(double p, const Eigen::VectorXd& e, const Eigen::VectorXd& e_max,
                             int bits);

}  // namespace priosim

#endif  // PRIOSIM_TRIGGERING_HPP_
