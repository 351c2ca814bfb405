#ifndef PRIOSIM_CONFIG_HPP_
#define PRIOSIM_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "priosim/control.hpp"
#include "priosim/dynamics.hpp"
#include "priosim/netsim.hpp"

namespace priosim {

enum class Mode { Predictive, Periodic };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

// One agent class = one documented cart-pole parameter set plus its process
// noise level. Heterogeneity across classes shows up as different physical
// parameters (hence slightly different A, B) and noise covariances.
struct ClassParams {
  CartpoleParams cartpole;
  double noise_std = 1e-4;
};

struct ScenarioConfig {
  int schema_version = 1;
  Mode mode = Mode::Predictive;
  uint64_t seed = 1;
  int64_t rounds = 10000;
  double update_interval_s = 0.1;

  NetworkConfig network;  // network.m_ctrl <= 0 means: derive from the budget

  // triggering
  double p_delta = 0.5;
  int horizon = 1;
  Eigen::VectorXd e_max;

  // cost weights (diagonal forms; identical across agents)
  Eigen::VectorXd q_diag;
  Eigen::VectorXd q_sync_diag;
  double r_scalar = 0.1;

  std::vector<std::string> roster;  // class name per agent, size N
  std::map<std::string, ClassParams> classes;
  std::vector<DisturbanceSpec> disturbances;

  bool track_clamp = false;        // clamp |s| to the physical track half-length
  double track_half_length = 0.25;

  int cost_window = 50;            // moving-average window for the cost series
  double msb_growth_factor = 1.2;  // second-half / first-half sup tolerance

  std::string trace_path;  // empty: no CSV written
  std::string gains_path;  // empty: synthesize in-process

  void validate() const;
  // m_ctrl resolved for this config's mode (derived from the budget if unset).
  int resolved_m_ctrl() const;
  NetworkConfig resolved_network() const;
};

ScenarioConfig reference_scenario();

ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& config, const std::string& path);

std::vector<LtiModel> build_models(const ScenarioConfig& config);
CostSpec build_cost(const ScenarioConfig& config);

}  // namespace priosim

#endif  // PRIOSIM_CONFIG_HPP_
