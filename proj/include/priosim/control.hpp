#ifndef PRIOSIM_CONTROL_HPP_
#define PRIOSIM_CONTROL_HPP_

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "priosim/dynamics.hpp"

namespace priosim {

// Quadratic cost weights: per-agent state/input penalties plus a shared
// pairwise synchronization penalty.
struct CostSpec {
  std::vector<Eigen::MatrixXd> Q;  // n x n PSD, one per agent
  Eigen::MatrixXd Q_sync;          // n x n PSD, identical across pairs
  std::vector<Eigen::MatrixXd> R;  // m x m PD, one per agent
};

// Feedback matrices of the distributed controller. F stores N*N blocks of
// size m x n in row-major (i, j) order; omega[i] lists the agents j != i
// with a non-zero F_ij.
struct GainSet {
  int n_agents = 0;
  int state_dim = 0;
  int input_dim = 0;
  std::vector<Eigen::MatrixXd> F;
  std::vector<std::vector<int>> omega;

  const Eigen::MatrixXd& block(int i, int j) const { return F[i * n_agents + j]; }
  Eigen::MatrixXd& block(int i, int j) { return F[i * n_agents + j]; }
};

// Builds the block cost matrices for the augmented system: diagonal blocks
// Q_i + (N-1) Q_sync, off-diagonal blocks -Q_sync, block-diagonal R.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_augmented_cost(
    const std::vector<LtiModel>& models, const CostSpec& cost);

// Infinite-horizon DARE solution by fixed-point iteration from P = Q.
// Convergence is max-abs element change below tol.
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           double tol = 1e-10, long max_iter = 1000000);

// LQR gain K such that u = K x minimizes the cost (negative feedback built in).
Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                         double tol = 1e-10, long max_iter = 1000000);

// Offline synthesis of the full distributed gain set.
GainSet synthesize_gains(const std::vector<LtiModel>& models, const CostSpec& cost);

// u_i = F_ii x_i + sum_{j in omega_i} F_ij xhat_ij. estimates(j) must return
// agent i's current estimate of agent j for every j in omega_i.
template <typename EstimateFn>
Eigen::VectorXd control_input(int agent, const Eigen::VectorXd& x,
                              const EstimateFn& estimates, const GainSet& gains) {
  Eigen::VectorXd u = gains.block(agent, agent) * x;
  for (int j : gains.omega[agent]) u.noalias() += gains.block(agent, j) * estimates(j);
  return u;
}

// Spectral radius of the closed-loop augmented matrix blkdiag(A_i) + blkdiag(B_i) F.
double closed_loop_spectral_radius(const std::vector<LtiModel>& models, const GainSet& gains);

double spectral_radius(const Eigen::MatrixXd& M);

// Plain-text round-trip so synthesis and simulation can run as separate
// CLI invocations.
void save_gains(const GainSet& gains, const std::string& path);
GainSet load_gains(const std::string& path);

}  // namespace priosim

#endif  // PRIOSIM_CONTROL_HPP_
