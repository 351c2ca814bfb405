#ifndef PRIOSIM_SIM_HPP_
#define PRIOSIM_SIM_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "priosim/config.hpp"
#include "priosim/control.hpp"
#include "priosim/netsim.hpp"
#include "priosim/triggering.hpp"

namespace priosim {

// One round of logged state, enough to recompute every derived metric.
struct RoundRecord {
  int64_t round = 0;
  std::vector<Eigen::VectorXd> x;   // true states at this round
  std::vector<Eigen::VectorXd> u;   // applied inputs
  std::vector<Eigen::VectorXd> e;   // post-round self errors x_i - xhat_ii
  std::vector<double> p_raw;        // announced horizon-H priority score
  std::vector<double> p0_raw;       // instantaneous re-check score
  std::vector<int> q;               // quantized announced priority
  std::vector<int> q0;              // quantized re-check priority
  std::vector<uint8_t> granted;     // schedule applied in this round
  std::vector<uint8_t> transmitted;
  std::vector<uint8_t> skip_mark;
  std::vector<uint8_t> has_aggregate;
  std::vector<uint32_t> delivered_to;
  std::vector<double> d_sq;         // squared Mahalanobis of the self error
  double lyapunov = 0.0;            // summed whitened error over the whole bank grid
  double cost = 0.0;                // per-round quadratic cost summand
  double realized_slots = 0.0;
};

struct SimSummary {
  int64_t rounds = 0;
  int n_agents = 0;
  int m_ctrl = 0;
  double mean_cost = 0.0;
  double mean_cost_first_half = 0.0;
  double mean_cost_second_half = 0.0;
  double mean_realized_slots = 0.0;
  int64_t total_transmissions = 0;
  int64_t total_grants = 0;
  int64_t total_skip_marks = 0;
  std::vector<int64_t> transmissions;        // per agent
  std::vector<int64_t> grants;               // per agent
  std::vector<std::vector<int64_t>> priority_histogram;  // per agent, 2^bits bins
};

struct SimResult {
  ScenarioConfig config;
  GainSet gains;
  std::vector<ErrorStatistics> stats;  // per agent
  std::vector<RoundRecord> records;
  SimSummary summary;
};

std::vector<int> periodic_baseline_schedule(int n_agents, int m_ctrl, int64_t round);

// Runs the full co-simulation: priority evaluation, in-network aggregation,
// scheduling for the next round, scheduled transmissions with the
// instantaneous re-check, estimator updates, control, and dynamics.
SimResult run_scenario(const ScenarioConfig& config);
SimResult run_scenario(const ScenarioConfig& config, const GainSet& gains);

// Round summand of the global quadratic cost: per-agent state and input terms
// plus the pairwise synchronization term.
double evaluate_cost(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& u,
                     const CostSpec& cost);

std::vector<double> moving_average(const std::vector<double>& series, int window);

SimSummary summarize(const ScenarioConfig& config, const std::vector<RoundRecord>& records);

struct ModeComparison {
  SimSummary predictive;
  SimSummary periodic;
  double cost_ratio_first_half = 0.0;   // predictive / periodic, pre-disturbance
  double cost_ratio_second_half = 0.0;  // predictive / periodic, post-disturbance
};

// Matched-seed comparison of predictive scheduling against the round-robin
// baseline on the same scenario.
ModeComparison compare_modes(const ScenarioConfig& base_config);

struct SweepComparison {
  std::vector<uint64_t> seeds;
  std::vector<ModeComparison> per_seed;
  double mean_ratio_first_half = 0.0;
  double mean_ratio_second_half = 0.0;
  double stddev_ratio_first_half = 0.0;
  double stddev_ratio_second_half = 0.0;
};

// Runs compare_modes once per seed and reports across-seed dispersion.
SweepComparison compare_modes_sweep(const ScenarioConfig& base_config,
                                    const std::vector<uint64_t>& seeds);

}  // namespace priosim

#endif  // PRIOSIM_SIM_HPP_
