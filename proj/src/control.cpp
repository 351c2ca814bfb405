#include "priosim/control.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "priosim/errors.hpp"

namespace priosim {

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_augmented_cost(
    const std::vector<LtiModel>& models, const CostSpec& cost) {
  const int N = static_cast<int>(models.size());
  if (N == 0) throw ConfigError("build_augmented_cost: no agents");
  if (static_cast<int>(cost.Q.size()) != N || static_cast<int>(cost.R.size()) != N)
    throw ConfigError("build_augmented_cost: Q/R count must match agent count");
  const int n = models[0].state_dim();
  const int m = models[0].input_dim();
  for (const auto& model : models)
    if (model.state_dim() != n || model.input_dim() != m)
      throw ConfigError("build_augmented_cost: agents must share state/input dimensions");
  if (cost.Q_sync.rows() != n || cost.Q_sync.cols() != n)
    throw ConfigError("build_augmented_cost: Q_sync dimension mismatch");

  Eigen::MatrixXd Qt = Eigen::MatrixXd::Zero(N * n, N * n);
  Eigen::MatrixXd Rt = Eigen::MatrixXd::Zero(N * m, N * m);
  for (int i = 0; i < N; ++i) {
    if (cost.Q[i].rows() != n || cost.Q[i].cols() != n)
      throw ConfigError("build_augmented_cost: Q_i dimension mismatch");
    if (cost.R[i].rows() != m || cost.R[i].cols() != m)
      throw ConfigError("build_augmented_cost: R_i dimension mismatch");
    Qt.block(i * n, i * n, n, n) = cost.Q[i] + (N - 1) * cost.Q_sync;
    Rt.block(i * m, i * m, m, m) = cost.R[i];
    for (int j = 0; j < N; ++j)
      if (j != i) Qt.block(i * n, j * n, n, n) = -cost.Q_sync;
  }
  return {Qt, Rt};
}

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           double tol, long max_iter) {
  Eigen::MatrixXd P = Q;
  for (long it = 0; it < max_iter; ++it) {
    Eigen::MatrixXd BtP = B.transpose() * P;
    Eigen::MatrixXd gain = (R + BtP * B).ldlt().solve(BtP * A);
    // Joseph form: a sum of PSD terms, immune to the cancellation that makes
    // the textbook update A'PA - A'PB(R+B'PB)^-1 B'PA blow up on large
    // block systems with unstable A.
    Eigen::MatrixXd Acl = A - B * gain;
    Eigen::MatrixXd next = Q + gain.transpose() * R * gain + Acl.transpose() * P * Acl;
    next = 0.5 * (next + next.transpose());
    const double diff = (next - P).cwiseAbs().maxCoeff();
    P = next;
    if (diff < tol) return P;
  }
  throw ContractError("solve_dare: Riccati iteration did not converge");
}

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                         double tol, long max_iter) {
  Eigen::MatrixXd P = solve_dare(A, B, Q, R, tol, max_iter);
  Eigen::MatrixXd BtP = B.transpose() * P;
  return -(R + BtP * B).ldlt().solve(BtP * A);
}

GainSet synthesize_gains(const std::vector<LtiModel>& models, const CostSpec& cost) {
  const int N = static_cast<int>(models.size());
  const int n = models[0].state_dim();
  const int m = models[0].input_dim();

  Eigen::MatrixXd At = Eigen::MatrixXd::Zero(N * n, N * n);
  Eigen::MatrixXd Bt = Eigen::MatrixXd::Zero(N * n, N * m);
  for (int i = 0; i < N; ++i) {
    At.block(i * n, i * n, n, n) = models[i].A;
    Bt.block(i * n, i * m, n, m) = models[i].B;
  }
  auto [Qt, Rt] = build_augmented_cost(models, cost);
  Eigen::MatrixXd K = lqr_gain(At, Bt, Qt, Rt);

  GainSet gains;
  gains.n_agents = N;
  gains.state_dim = n;
  gains.input_dim = m;
  gains.F.resize(static_cast<size_t>(N) * N);
  gains.omega.resize(N);
  const double coupling_tol = 1e-9;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      Eigen::MatrixXd block = K.block(i * m, j * n, m, n);
      if (i != j && block.cwiseAbs().maxCoeff() < coupling_tol)
        block.setZero();
      else if (i != j)
        gains.omega[i].push_back(j);
      gains.block(i, j) = block;
    }
  }
  return gains;
}

double spectral_radius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

double closed_loop_spectral_radius(const std::vector<LtiModel>& models, const GainSet& gains) {
  const int N = gains.n_agents;
  const int n = gains.state_dim;
  Eigen::MatrixXd cl = Eigen::MatrixXd::Zero(N * n, N * n);
  for (int i = 0; i < N; ++i) {
    cl.block(i * n, i * n, n, n) = models[i].A;
    for (int j = 0; j < N; ++j)
      cl.block(i * n, j * n, n, n) += models[i].B * gains.block(i, j);
  }
  return spectral_radius(cl);
}

void save_gains(const GainSet& gains, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_gains: cannot open " + path);
  out << "priosim-gains 1\n"
      << gains.n_agents << ' ' << gains.state_dim << ' ' << gains.input_dim << '\n';
  out << std::setprecision(17);
  for (int i = 0; i < gains.n_agents; ++i)
    for (int j = 0; j < gains.n_agents; ++j) {
      out << i << ' ' << j << '\n';
      const Eigen::MatrixXd& block = gains.block(i, j);
      for (int r = 0; r < block.rows(); ++r) {
        for (int c = 0; c < block.cols(); ++c) out << (c ? " " : "") << block(r, c);
        out << '\n';
      }
    }
}

GainSet load_gains(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_gains: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "priosim-gains" || version != 1)
    throw ConfigError("load_gains: unrecognized gain file format");
  GainSet gains;
  in >> gains.n_agents >> gains.state_dim >> gains.input_dim;
  if (!in || gains.n_agents <= 0 || gains.state_dim <= 0 || gains.input_dim <= 0)
    throw ConfigError("load_gains: malformed header");
  gains.F.assign(static_cast<size_t>(gains.n_agents) * gains.n_agents,
                 Eigen::MatrixXd::Zero(gains.input_dim, gains.state_dim));
  gains.omega.resize(gains.n_agents);
  for (int blocks = 0; blocks < gains.n_agents * gains.n_agents; ++blocks) {
    int i = 0, j = 0;
    in >> i >> j;
    Eigen::MatrixXd block(gains.input_dim, gains.state_dim);
    for (int r = 0; r < block.rows(); ++r)
      for (int c = 0; c < block.cols(); ++c) in >> block(r, c);
    if (!in) throw ConfigError("load_gains: truncated gain file");
    gains.block(i, j) = block;
    if (i != j && block.cwiseAbs().maxCoeff() >= 1e-9) gains.omega[i].push_back(j);
  }
  return gains;
}

}  // namespace priosim
