#ifndef PRIOSIM_NETSIM_HPP_
#define PRIOSIM_NETSIM_HPP_

#include <cstdint>
#include <vector>

#include "priosim/rng.hpp"

namespace priosim {

// Round-level abstraction of the many-to-all exchange. Slot-level coding and
// capture dynamics are collapsed into i.i.d. per-message delivery and an
// independent per-agent probability of missing the final priority aggregate.
struct NetworkConfig {
  int n_agents = 0;
  int m_app = 0;               // application messages per round
  int m_ctrl = 0;              // control messages per round
  double p_loss = 0.0;         // per-message delivery failure probability
  double q_noagg = 0.0;        // probability an agent lacks the final aggregate
  int priority_bits = 4;
  double slot_us = 380.0;
  double slots_per_message = 9.5;
  double round_budget_us = 76000.0;
};

// Bytes needed to carry all priorities: the smaller of the dense form
// (N values) and the sparse form (top M_C values + ids + contribution bits).
int aggregate_size_bytes(int n_agents, int priority_bits, int m_ctrl);

// Largest M_C whose round fits the communication budget. In predictive mode
// the aggregate rides in every packet header, so the slot time grows by
// 4 us per aggregate byte and the fit is found iteratively.
int control_bandwidth(const NetworkConfig& config, bool predictive,
                      int* aggregate_bytes_out = nullptr);

struct AggregateEntry {
  int agent = 0;
  int value = 0;
};

// Final header-carried aggregate: the M_C highest (value, id) pairs, ties to
// the lower id, plus one contribution bit per agent. In this round-level
// abstraction priorities are never lost, so the bitmap is always complete.
struct PriorityAggregate {
  std::vector<AggregateEntry> top;
  std::vector<uint8_t> contributed;

  bool complete() const;
};

PriorityAggregate priority_exchange(const std::vector<int>& quantized_priorities, int m_ctrl);

struct RoundOutcome {
  int64_t round = 0;
  std::vector<int> schedule;               // agent ids granted the M_C slots
  std::vector<uint8_t> transmitted;        // kappa per agent
  std::vector<uint8_t> skip_mark;          // granted slots announced unused
  std::vector<uint32_t> delivered_to;      // per sender, bitmask of receivers
  std::vector<uint8_t> has_final_aggregate;
  double realized_slots = 0.0;             // control-traffic slot count (energy proxy)
};

// Samples deliveries and aggregate availability for one round. transmit and
// skip are per-agent flags already resolved by the scheduling rule; only
// scheduled agents may have them set.
RoundOutcome execute_round(const NetworkConfig& config, int64_t round,
                           const std::vector<int>& schedule,
                           const std::vector<uint8_t>& transmit,
                           const std::vector<uint8_t>& skip, RngStream& rng);

}  // namespace priosim

#endif  // PRIOSIM_NETSIM_HPP_
