#include "priosim/dynamics.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "priosim/errors.hpp"

namespace priosim {

void LtiModel::validate() const {
  const int n = state_dim();
  if (A.rows() != A.cols()) throw ConfigError("LtiModel: A must be square");
  if (B.rows() != n) throw ConfigError("LtiModel: B row count must match state dimension");
  if (sigma_v.rows() != n || sigma_v.cols() != n)
    throw ConfigError("LtiModel: sigma_v must be n x n");
  if (!sigma_v.isApprox(sigma_v.transpose(), 1e-12))
    throw ConfigError("LtiModel: sigma_v must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_v);
  if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw ConfigError("LtiModel: sigma_v must be positive semi-definite");
}

LtiModel make_cartpole_model(const CartpoleParams& p, double dt, double noise_std) {
  if (dt <= 0.0) throw ConfigError("make_cartpole_model: dt must be positive");
  if (p.cart_mass <= 0.0 || p.pole_mass <= 0.0 || p.pole_com_length <= 0.0 || p.gravity <= 0.0)
    throw ConfigError("make_cartpole_model: physical parameters must be positive");

  const double M = p.cart_mass;
  const double m = p.pole_mass;
  const double l = p.pole_com_length;
  const double g = p.gravity;

  // Linearized equations (massless rod, frictionless):
  //   theta_dd = ((M+m) g theta - u) / (M l)
  //   s_dd     = (u - m g theta) / M
  Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(4, 4);
  Ac(0, 2) = 1.0;
  Ac(1, 3) = 1.0;
  Ac(2, 0) = (M + m) * g / (M * l);
  Ac(3, 0) = -m * g / M;
  Eigen::MatrixXd Bc = Eigen::MatrixXd::Zero(4, 1);
  Bc(2, 0) = -1.0 / (M * l);
  Bc(3, 0) = 1.0 / M;

  // ZOH: exp([[Ac, Bc], [0, 0]] dt) = [[A, B], [0, I]]
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(5, 5);
  aug.topLeftCorner(4, 4) = Ac;
  aug.topRightCorner(4, 1) = Bc;
  Eigen::MatrixXd expm = (aug * dt).exp();

  LtiModel model;
  model.A = expm.topLeftCorner(4, 4);
  model.B = expm.topRightCorner(4, 1);
  model.sigma_v = noise_std * noise_std * Eigen::MatrixXd::Identity(4, 4);
  model.dt = dt;
  return model;
}

bool disturbance_active(const DisturbanceSpec& d, int64_t step) {
  return step >= d.start_step && step < d.end_step;
}

void apply_hold(const DisturbanceSpec& d, int64_t step, Eigen::VectorXd& x) {
  if (!disturbance_active(d, step)) return;
  const int n = static_cast<int>(x.size());
  if (d.component < 0 || d.component >= n)
    throw ConfigError("DisturbanceSpec: component index out of range");
  // The apparatus is physically held still: the whole state is pinned at the
  // equilibrium except the displaced component. Clamping only one component
  // while the feedback keeps acting on the rest is not realizable (and the
  // linearized pole subsystem is unstable with the cart bolted down).
  x.setZero();
  x(d.component) = d.held_value;
}

Eigen::VectorXd step(const LtiModel& model, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& noise) {
  if (x.size() != model.state_dim() || u.size() != model.input_dim() ||
      noise.size() != model.state_dim())
    throw ConfigError("step: dimension mismatch");
  return model.A * x + model.B * u + noise;
}

NoiseSampler::NoiseSampler(const Eigen::MatrixXd& sigma_v) {
  if (sigma_v.rows() != sigma_v.cols() || !sigma_v.isApprox(sigma_v.transpose(), 1e-12))
    throw ConfigError("NoiseSampler: covariance must be square and symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_v);
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-12 * scale)
      throw ConfigError("NoiseSampler: covariance must be positive semi-definite");
    ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  factor_ = es.eigenvectors() * ev.asDiagonal();
}

Eigen::VectorXd NoiseSampler::sample(RngStream& rng) const {
  return factor_ * rng.gaussian_vector(static_cast<int>(factor_.cols()));
}

Eigen::VectorXd sample_noise(RngStream& rng, const Eigen::MatrixXd& sigma_v) {
  return NoiseSampler(sigma_v).sample(rng);
}

}  // namespace priosim
