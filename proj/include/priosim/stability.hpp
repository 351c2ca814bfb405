#ifndef PRIOSIM_STABILITY_HPP_
#define PRIOSIM_STABILITY_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "priosim/dynamics.hpp"
#include "priosim/sim.hpp"

namespace priosim {

// Rounds within which every agent is guaranteed service under the fairness
// argument: ceil(2 N / M_C).
int horizon_rounds(int n_agents, int m_ctrl);

double spectral_norm(const Eigen::MatrixXd& M);

// Noise-whitening transform W with W sigma_v W^T = I (symmetric inverse
// square root).
Eigen::MatrixXd whitening_transform(const Eigen::MatrixXd& sigma_v);

// Spectral norm of the closed-loop matrix A + B F_ii expressed in whitened
// coordinates; the contraction/expansion rate entering the drift bound.
double whitened_closed_loop_norm(const LtiModel& model, const Eigen::MatrixXd& F_ii);

// Monte Carlo check of the one-step drift bound
//   E[d^2(e(k+1)) | e(k)] <= ||A_w||_2^2 d^2(e(k)) + n
// with d^2 the sigma_v-whitened squared norm and e(k+1) = (A + B F) e(k) + v.
struct DriftCheck {
  double lhs_mean = 0.0;
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

DriftCheck drift_bound_mc(const LtiModel& model, const Eigen::MatrixXd& F_ii,
                          const Eigen::VectorXd& e0, int samples, uint64_t seed);

// Mean-square-boundedness monitor: the series is cut into consecutive
// windows of `window` rounds, each reduced to its mean; the verdict compares
// the sup over the second half of the windows against the sup over the first.
struct MsbVerdict {
  bool stable = false;
  double sup_first = 0.0;
  double sup_second = 0.0;
  double growth = 0.0;
  int windows = 0;
};

MsbVerdict msb_monitor(const std::vector<double>& series, int window, double growth_factor);

// Sum over agents of ||x_i||^2 per round, the series the monitor consumes.
std::vector<double> state_norm_series(const SimResult& result);

// Exhaustive per-agent classification of consecutive service windows of
// length ceil(2N / M_C), evaluated in order:
//   BelowThreshold: whitened error is below the trigger threshold at the end.
//   Transmitted:    the agent transmitted successfully inside the window.
//   DippedBelow:    no transmission, but the error dipped below the threshold.
//   NeverServed:    everything else (persistently above, never scheduled).
enum class WindowCase { BelowThreshold = 0, Transmitted, DippedBelow, NeverServed };

struct WindowClass {
  int agent = 0;
  int64_t start = 0;
  WindowCase kind = WindowCase::BelowThreshold;
  double final_d_sq = 0.0;
  double bound = 0.0;  // post-reset drift bound; only set for Transmitted
};

std::vector<WindowClass> classify_windows(const SimResult& result);

struct CaseReport {
  std::array<int64_t, 4> counts{};  // indexed by WindowCase
  int64_t windows = 0;
  // Transmitted-case spot check: realized end-of-window error over its
  // post-reset drift bound, averaged across windows.
  double c2_mean_ratio = 0.0;
  double c2_stderr = 0.0;
  bool c2_pass = false;
};

CaseReport stability_case_report(const SimResult& result);

}  // namespace priosim

#endif  // PRIOSIM_STABILITY_HPP_
