#include "priosim/scheduler.hpp"

#include <algorithm>

namespace priosim {

Schedule compute_schedule(const PriorityAggregate& aggregate, int m_ctrl,
                          int p_delta_quantized, int64_t round) {
  Schedule schedule;
  schedule.round = round;
  for (const AggregateEntry& entry : aggregate.top) {
    if (static_cast<int>(schedule.granted.size()) >= m_ctrl) break;
    if (entry.value > p_delta_quantized) schedule.granted.push_back(entry.agent);
  }
  std::sort(schedule.granted.begin(), schedule.granted.end());
  return schedule;
}

TransmitDecision apply_schedule(int agent, const Schedule& schedule, bool has_final_aggregate,
                                int p0_quantized, int p_delta_quantized) {
  TransmitDecision decision;
  const bool granted =
      std::binary_search(schedule.granted.begin(), schedule.granted.end(), agent);
  if (!granted) return decision;
  if (!has_final_aggregate) return decision;  // slot stays unused, no announcement
  if (p0_quantized <= p_delta_quantized) {
    decision.skip_mark = true;
    return decision;
  }
  decision.transmit = true;
  return decision;
}

}  // namespace priosim
