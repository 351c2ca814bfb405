#include "priosim/sim.hpp"

#include <algorithm>
#include <cmath>

#include "priosim/errors.hpp"
#include "priosim/estimation.hpp"
#include "priosim/scheduler.hpp"

namespace priosim {

namespace {

constexpr uint64_t kNoiseTag = 1;
constexpr uint64_t kNetworkTag = 2;

// Estimate agent i holds of its own state at round k, before the round-k
// exchange resolves: the no-communication propagation of its round k-1 bank.
Eigen::VectorXd preround_self_estimate(const EstimatorBank& bank, const LtiModel& model,
                                       const GainSet& gains) {
  const int i = bank.owner();
  const Eigen::VectorXd& self = bank.estimate(i);
  Eigen::VectorXd u = gains.block(i, i) * self;
  for (int l : gains.omega[i]) u.noalias() += gains.block(i, l) * bank.estimate(l);
  return model.A * self + model.B * u;
}

}  // namespace

std::vector<int> periodic_baseline_schedule(int n_agents, int m_ctrl, int64_t round) {
  std::vector<int> granted;
  granted.reserve(m_ctrl);
  for (int j = 0; j < m_ctrl; ++j)
    granted.push_back(static_cast<int>((round * m_ctrl + j) % n_agents));
  std::sort(granted.begin(), granted.end());
  return granted;
}

double evaluate_cost(const std::vector<Eigen::VectorXd>& x, const std::vector<Eigen::VectorXd>& u,
                     const CostSpec& cost) {
  const int N = static_cast<int>(x.size());
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    total += x[i].dot(cost.Q[i] * x[i]);
    total += u[i].dot(cost.R[i] * u[i]);
  }
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      const Eigen::VectorXd diff = x[i] - x[j];
      total += diff.dot(cost.Q_sync * diff);
    }
  return total;
}

std::vector<double> moving_average(const std::vector<double>& series, int window) {
  if (window < 1) throw ConfigError("moving_average: window must be positive");
  const int n = static_cast<int>(series.size());
  std::vector<double> out;
  if (n < window) return out;
  out.reserve(n - window + 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += series[i];
    if (i >= window) acc -= series[i - window];
    if (i >= window - 1) out.push_back(acc / window);
  }
  return out;
}

SimSummary summarize(const ScenarioConfig& config, const std::vector<RoundRecord>& records) {
  SimSummary s;
  const int N = config.network.n_agents;
  const int bins = 1 << config.network.priority_bits;
  s.rounds = static_cast<int64_t>(records.size());
  s.n_agents = N;
  s.m_ctrl = config.resolved_m_ctrl();
  s.transmissions.assign(N, 0);
  s.grants.assign(N, 0);
  s.priority_histogram.assign(N, std::vector<int64_t>(bins, 0));

  const int64_t half = s.rounds / 2;
  double cost_sum = 0.0, cost_first = 0.0, cost_second = 0.0, slots = 0.0;
  for (const RoundRecord& r : records) {
    cost_sum += r.cost;
    (r.round < half ? cost_first : cost_second) += r.cost;
    slots += r.realized_slots;
    for (int i = 0; i < N; ++i) {
      s.transmissions[i] += r.transmitted[i];
      s.grants[i] += r.granted[i];
      s.total_skip_marks += r.skip_mark[i];
      s.priority_histogram[i][std::clamp(r.q[i], 0, bins - 1)] += 1;
    }
  }
  for (int i = 0; i < N; ++i) {
    s.total_transmissions += s.transmissions[i];
    s.total_grants += s.grants[i];
  }
  if (s.rounds > 0) {
    s.mean_cost = cost_sum / static_cast<double>(s.rounds);
    s.mean_realized_slots = slots / static_cast<double>(s.rounds);
    if (half > 0) s.mean_cost_first_half = cost_first / static_cast<double>(half);
    if (s.rounds - half > 0)
      s.mean_cost_second_half = cost_second / static_cast<double>(s.rounds - half);
  }
  return s;
}

SimResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  const std::vector<LtiModel> models = build_models(config);
  GainSet gains;
  if (!config.gains_path.empty())
    gains = load_gains(config.gains_path);
  else
    gains = synthesize_gains(models, build_cost(config));
  return run_scenario(config, gains);
}

SimResult run_scenario(const ScenarioConfig& config, const GainSet& gains) {
  config.validate();
  const int N = config.network.n_agents;
  const std::vector<LtiModel> models = build_models(config);
  const CostSpec cost = build_cost(config);
  if (gains.n_agents != N || gains.state_dim != models[0].state_dim())
    throw ContractError("run_scenario: gain set does not match the scenario");

  const NetworkConfig net = config.resolved_network();
  const int m_ctrl = net.m_ctrl;
  const int bits = net.priority_bits;
  const int p_delta_q = quantize_priority(config.p_delta, bits);
  const bool predictive = config.mode == Mode::Predictive;
  const int n = models[0].state_dim();

  SimResult result;
  result.config = config;
  result.gains = gains;
  result.stats.reserve(N);
  std::vector<NoiseSampler> samplers;
  samplers.reserve(N);
  for (int i = 0; i < N; ++i) {
    result.stats.push_back(
        ErrorStatistics::make(models[i], gains.block(i, i), config.e_max, config.horizon));
    samplers.emplace_back(models[i].sigma_v);
  }
  const std::vector<ErrorStatistics>& stats = result.stats;

  // All agents start at the equilibrium; any hold active at step 0 applies.
  std::vector<Eigen::VectorXd> x(N, Eigen::VectorXd::Zero(n));
  for (int i = 0; i < N; ++i)
    for (const DisturbanceSpec& d : config.disturbances)
      if (d.agent == i) apply_hold(d, 0, x[i]);
  std::vector<Eigen::VectorXd> x_prev = x;

  std::vector<EstimatorBank> banks;
  banks.reserve(N);
  for (int i = 0; i < N; ++i) banks.emplace_back(i, x, /*round0=*/0);

  Schedule schedule_cur;  // empty: nothing is scheduled for round 0
  std::vector<uint8_t> prev_has_agg(N, 1);

  result.records.reserve(static_cast<size_t>(config.rounds));
  std::vector<double> p_raw(N, 0.0), p0_raw(N, 0.0);
  std::vector<int> q(N, 0), q0(N, 0);
  std::vector<uint8_t> transmit(N, 0), skip(N, 0);

  for (int64_t k = 0; k < config.rounds; ++k) {
    // 1. Priority evaluation on the pre-round error.
    Schedule schedule_next;
    schedule_next.round = k + 1;
    if (predictive) {
      for (int i = 0; i < N; ++i) {
        const Eigen::VectorXd pre = banks[i].round() == k
                                        ? banks[i].estimate(i)
                                        : preround_self_estimate(banks[i], models[i], gains);
        const Eigen::VectorXd e_pre = x[i] - pre;
        const ErrorStatistics& st = stats[i];
        const double dh = mahalanobis_sq(
            propagate_error_mean(st.closed_loop, e_pre, config.horizon), st.var_h_inv);
        p_raw[i] = priority_chernoff(st.delta_h, dh, n);
        q[i] = quantize_with_saturation(p_raw[i], e_pre, st.e_max, bits);
        const double d0 =
            mahalanobis_sq(propagate_error_mean(st.closed_loop, e_pre, 0), st.var_0_inv);
        p0_raw[i] = priority_chernoff(st.delta_0, d0, n);
        q0[i] = quantize_with_saturation(p0_raw[i], e_pre, st.e_max, bits);
      }
      // 2. In-network aggregation and the schedule every agent derives for k+1.
      const PriorityAggregate agg = priority_exchange(q, m_ctrl);
      schedule_next = compute_schedule(agg, m_ctrl, p_delta_q, k + 1);
    } else {
      schedule_cur.round = k;
      schedule_cur.granted = periodic_baseline_schedule(N, m_ctrl, k);
    }

    // 3. Transmit decisions for the current round's granted slots.
    std::fill(transmit.begin(), transmit.end(), 0);
    std::fill(skip.begin(), skip.end(), 0);
    for (int agent : schedule_cur.granted) {
      if (predictive) {
        const TransmitDecision d =
            apply_schedule(agent, schedule_cur, prev_has_agg[agent] != 0, q0[agent], p_delta_q);
        transmit[agent] = d.transmit;
        skip[agent] = d.skip_mark;
      } else {
        transmit[agent] = 1;  // the baseline always uses its slot
      }
    }

    // 4. The exchange itself: deliveries and aggregate availability.
    RngStream net_rng(config.seed, kNetworkTag, 0, static_cast<uint64_t>(k));
    const RoundOutcome outcome =
        execute_round(net, k, schedule_cur.granted, transmit, skip, net_rng);

    // 5. Estimator banks advance to round k using this round's observations.
    if (banks[0].round() < k) {
      RoundObservation obs;
      obs.round = k;
      obs.kappa.assign(outcome.transmitted.begin(), outcome.transmitted.end());
      obs.payload.assign(N, std::nullopt);
      for (int j = 0; j < N; ++j)
        if (outcome.transmitted[j]) obs.payload[j] = x_prev[j];
      for (int i = 0; i < N; ++i) {
        obs.phi.assign(N, 0);
        for (int j = 0; j < N; ++j)
          obs.phi[j] = j == i ? outcome.transmitted[j]
                              : static_cast<uint8_t>((outcome.delivered_to[j] >> i) & 1u);
        banks[i].update(obs, models, gains);
      }
    }

    // 6. Control from local state and the freshly updated estimates.
    std::vector<Eigen::VectorXd> u(N);
    for (int i = 0; i < N; ++i) {
      const EstimatorBank& bank = banks[i];
      u[i] = control_input(
          i, x[i], [&bank](int j) -> const Eigen::VectorXd& { return bank.estimate(j); }, gains);
    }

    // 7. Logging.
    RoundRecord rec;
    rec.round = k;
    rec.x = x;
    rec.u = u;
    rec.e.reserve(N);
    rec.d_sq.resize(N);
    double lyap = 0.0;
    for (int i = 0; i < N; ++i) {
      rec.e.push_back(banks[i].self_error(x[i]));
      rec.d_sq[i] = mahalanobis_sq(rec.e[i], stats[i].var_0_inv);
      for (int j = 0; j < N; ++j)
        lyap += mahalanobis_sq(x[j] - banks[i].estimate(j), stats[j].var_0_inv);
    }
    rec.p_raw = p_raw;
    rec.p0_raw = p0_raw;
    rec.q = q;
    rec.q0 = q0;
    rec.granted.assign(N, 0);
    for (int agent : schedule_cur.granted) rec.granted[agent] = 1;
    rec.transmitted = outcome.transmitted;
    rec.skip_mark = outcome.skip_mark;
    rec.has_aggregate = outcome.has_final_aggregate;
    rec.delivered_to = outcome.delivered_to;
    rec.lyapunov = lyap;
    rec.cost = evaluate_cost(x, u, cost);
    rec.realized_slots = outcome.realized_slots;
    result.records.push_back(std::move(rec));

    // 8. Dynamics step with per-(agent, round) keyed noise, then any holds.
    x_prev = x;
    for (int i = 0; i < N; ++i) {
      RngStream noise_rng(config.seed, kNoiseTag, static_cast<uint64_t>(i),
                          static_cast<uint64_t>(k));
      x[i] = step(models[i], x[i], u[i], samplers[i].sample(noise_rng));
      for (const DisturbanceSpec& d : config.disturbances)
        if (d.agent == i) apply_hold(d, k + 1, x[i]);
      if (config.track_clamp)
        x[i](1) = std::clamp(x[i](1), -config.track_half_length, config.track_half_length);
    }

    schedule_cur = std::move(schedule_next);
    prev_has_agg = outcome.has_final_aggregate;
  }

  result.summary = summarize(config, result.records);
  return result;
}

ModeComparison compare_modes(const ScenarioConfig& base_config) {
  ScenarioConfig cfg = base_config;
  cfg.trace_path.clear();

  cfg.mode = Mode::Predictive;
  cfg.network.m_ctrl = 0;
  const SimResult pred = run_scenario(cfg);

  cfg.mode = Mode::Periodic;
  cfg.network.m_ctrl = 0;
  const SimResult peri = run_scenario(cfg);

  ModeComparison cmp;
  cmp.predictive = pred.summary;
  cmp.periodic = peri.summary;
  if (peri.summary.mean_cost_first_half > 0.0)
    cmp.cost_ratio_first_half =
        pred.summary.mean_cost_first_half / peri.summary.mean_cost_first_half;
  if (peri.summary.mean_cost_second_half > 0.0)
    cmp.cost_ratio_second_half =
        pred.summary.mean_cost_second_half / peri.summary.mean_cost_second_half;
  return cmp;
}

SweepComparison compare_modes_sweep(const ScenarioConfig& base_config,
                                    const std::vector<uint64_t>& seeds) {
  if (seeds.size() < 3) throw ConfigError("compare_modes_sweep: need at least 3 seeds");
  SweepComparison sweep;
  sweep.seeds = seeds;
  double s1 = 0.0, s2 = 0.0, sq1 = 0.0, sq2 = 0.0;
  for (uint64_t seed : seeds) {
    ScenarioConfig cfg = base_config;
    cfg.seed = seed;
    sweep.per_seed.push_back(compare_modes(cfg));
    const ModeComparison& c = sweep.per_seed.back();
    s1 += c.cost_ratio_first_half;
    s2 += c.cost_ratio_second_half;
    sq1 += c.cost_ratio_first_half * c.cost_ratio_first_half;
    sq2 += c.cost_ratio_second_half * c.cost_ratio_second_half;
  }
  const double m = static_cast<double>(seeds.size());
  sweep.mean_ratio_first_half = s1 / m;
  sweep.mean_ratio_second_half = s2 / m;
  sweep.stddev_ratio_first_half =
      std::sqrt(std::max(0.0, sq1 / m - sweep.mean_ratio_first_half * sweep.mean_ratio_first_half));
  sweep.stddev_ratio_second_half = std::sqrt(
      std::max(0.0, sq2 / m - sweep.mean_ratio_second_half * sweep.mean_ratio_second_half));
  return sweep;
}

}  // namespace priosim
