#ifndef PRIOSIM_DYNAMICS_HPP_
#define PRIOSIM_DYNAMICS_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "priosim/rng.hpp"

namespace priosim {

// Discrete-time stochastic LTI model x(k+1) = A x(k) + B u(k) + v(k),
// v ~ N(0, sigma_v). dt records the discretization step, which equals the
// network update interval.
struct LtiModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd sigma_v;
  double dt = 0.0;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  void validate() const;  // throws ConfigError on inconsistent dimensions / non-PSD noise
};

// State layout for cart-pole agents: (theta [rad], s [m], theta_dot, s_dot).
struct CartpoleParams {
  double cart_mass = 1.0;        // kg
  double pole_mass = 0.1;        // kg
  double pole_com_length = 0.3;  // m, pivot to center of mass
  double gravity = 9.81;         // m/s^2
};

// Zero-order-hold discretization of the cart-pole linearized about the
// upright equilibrium. The produced A is open-loop unstable for any dt > 0.
LtiModel make_cartpole_model(const CartpoleParams& params, double dt, double noise_std);

// Physically holds the agent still over [start, end): the state is pinned at
// the equilibrium except for `component`, which is displaced to held_value.
struct DisturbanceSpec {
  int agent = 0;
  int64_t start_step = 0;
  int64_t end_step = 0;
  int component = 0;
  double held_value = 0.0;
};

bool disturbance_active(const DisturbanceSpec& d, int64_t step);
void apply_hold(const DisturbanceSpec& d, int64_t step, Eigen::VectorXd& x);

Eigen::VectorXd step(const LtiModel& model, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& noise);

// Draws v ~ N(0, sigma_v). Factorization is cached so per-round sampling is
// a single matrix-vector product.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Eigen::MatrixXd& sigma_v);
  Eigen::VectorXd sample(RngStream& rng) const;

 private:
  Eigen::MatrixXd factor_;  // factor * factor^T = sigma_v
};

Eigen::VectorXd sample_noise(RngStream& rng, const Eigen::MatrixXd& sigma_v);

}  // namespace priosim

#endif  // PRIOSIM_DYNAMICS_HPP_
