#include "priosim/netsim.hpp"

#include <algorithm>
#include <cmath>

#include "priosim/errors.hpp"

namespace priosim {

int aggregate_size_bytes(int n_agents, int priority_bits, int m_ctrl) {
  if (n_agents < 1 || priority_bits < 1 || m_ctrl < 1 || m_ctrl > n_agents)
    throw ConfigError("aggregate_size_bytes: invalid parameters");
  const int dense_bits = n_agents * priority_bits;
  const int id_bits = static_cast<int>(std::ceil(std::log2(static_cast<double>(n_agents))));
  const int sparse_bits = m_ctrl * priority_bits + m_ctrl * id_bits + n_agents;
  const int bits = std::min(dense_bits, sparse_bits);
  return (bits + 7) / 8;
}

namespace {

bool round_fits(const NetworkConfig& config, int m_ctrl, bool predictive, int* agg_bytes) {
  double slot_time = config.slot_us;
  int s = 0;
  if (predictive) {
    s = aggregate_size_bytes(config.n_agents, config.priority_bits, m_ctrl);
    slot_time += 4.0 * s;  // 4 us per aggregate byte on the air
  }
  if (agg_bytes) *agg_bytes = s;
  const double duration = (config.m_app + m_ctrl) * config.slots_per_message * slot_time;
  return duration <= config.round_budget_us * (1.0 + 1e-12);
}

}  // namespace

int control_bandwidth(const NetworkConfig& config, bool predictive, int* aggregate_bytes_out) {
  if (config.round_budget_us <= 0.0)
    throw ConfigError("control_bandwidth: round budget must be positive");
  int best = 0;
  int best_agg = 0;
  for (int m_ctrl = 1; m_ctrl <= config.n_agents; ++m_ctrl) {
    int agg = 0;
    if (round_fits(config, m_ctrl, predictive, &agg)) {
      best = m_ctrl;
      best_agg = agg;
    }
  }
  if (best == 0)
    throw ConfigError("control_bandwidth: budget too small for a single control message");
  if (aggregate_bytes_out) *aggregate_bytes_out = best_agg;
  return best;
}

bool PriorityAggregate::complete() const {
  return std::all_of(contributed.begin(), contributed.end(), [](uint8_t b) { return b != 0; });
}

PriorityAggregate priority_exchange(const std::vector<int>& quantized_priorities, int m_ctrl) {
  const int N = static_cast<int>(quantized_priorities.size());
  std::vector<int> order(N);
  for (int i = 0; i < N; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (quantized_priorities[a] != quantized_priorities[b])
      return quantized_priorities[a] > quantized_priorities[b];
    return a < b;  // ties broken by id ascending
  });
  PriorityAggregate agg;
  agg.contributed.assign(N, 1);
  const int take = std::min(m_ctrl, N);
  agg.top.reserve(take);
  for (int r = 0; r < take; ++r)
    agg.top.push_back({order[r], quantized_priorities[order[r]]});
  return agg;
}

RoundOutcome execute_round(const NetworkConfig& config, int64_t round,
                           const std::vector<int>& schedule,
                           const std::vector<uint8_t>& transmit,
                           const std::vector<uint8_t>& skip, RngStream& rng) {
  const int N = config.n_agents;
  if (static_cast<int>(schedule.size()) > config.m_ctrl)
    throw ContractError("execute_round: schedule exceeds M_C");

  RoundOutcome out;
  out.round = round;
  out.schedule = schedule;
  out.transmitted.assign(N, 0);
  out.skip_mark.assign(N, 0);
  out.delivered_to.assign(N, 0);
  out.has_final_aggregate.assign(N, 0);

  int used = 0;
  for (int sender : schedule) {
    out.skip_mark[sender] = skip[sender];
    if (!transmit[sender]) continue;
    out.transmitted[sender] = 1;
    ++used;
    uint32_t mask = 0;
    for (int receiver = 0; receiver < N; ++receiver) {
      if (receiver == sender) {
        mask |= 1u << receiver;  // own message is always available locally
        continue;
      }
      if (rng.uniform() >= config.p_loss) mask |= 1u << receiver;
    }
    out.delivered_to[sender] = mask;
  }

  for (int agent = 0; agent < N; ++agent)
    out.has_final_aggregate[agent] = rng.uniform() >= config.q_noagg ? 1 : 0;

  // Energy proxy: the aggregate keeps circulating for about one message
  // worth of slots even when every control slot goes unused.
  out.realized_slots = config.slots_per_message * (used + 1);
  return out;
}

}  // namespace priosim
