#ifndef PRIOSIM_SCHEDULER_HPP_
#define PRIOSIM_SCHEDULER_HPP_

#include <cstdint>
#include <vector>

#include "priosim/netsim.hpp"

namespace priosim {

// Global schedule every agent derives locally from the final aggregate:
// the top-M_C agents whose quantized priority strictly clears the threshold.
struct Schedule {
  int64_t round = 0;
  std::vector<int> granted;  // ascending agent ids, |granted| <= M_C
};

Schedule compute_schedule(const PriorityAggregate& aggregate, int m_ctrl,
                          int p_delta_quantized, int64_t round);

struct TransmitDecision {
  bool transmit = false;
  bool skip_mark = false;  // granted slot announced unused after the P0 re-check
};

// Combined rule at transmit time: send only if the schedule granted a slot,
// the final aggregate was held (otherwise the agent cannot know the global
// schedule and must stay silent), and the instantaneous re-check still
// clears the threshold.
TransmitDecision apply_schedule(int agent, const Schedule& schedule, bool has_final_aggregate,
                                int p0_quantized, int p_delta_quantized);

}  // namespace priosim

#endif  // PRIOSIM_SCHEDULER_HPP_
