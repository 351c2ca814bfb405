#ifndef PRIOSIM_TRACE_HPP_
#define PRIOSIM_TRACE_HPP_

#include <string>
#include <vector>

#include "priosim/sim.hpp"

namespace priosim {

// Wide CSV, one row per round, floats serialized with shortest round-trip
// formatting so a read-back reproduces the exact doubles.
void write_trace_csv(const SimResult& result, const std::string& path);

struct TraceData {
  int n_agents = 0;
  int state_dim = 0;
  int input_dim = 0;
  std::vector<RoundRecord> records;
};

TraceData read_trace_csv(const std::string& path);

void write_summary_json(const SimSummary& summary, const std::string& path);
SimSummary read_summary_json(const std::string& path);

// Recomputes the derived per-round and aggregate metrics from raw trace
// columns and checks them against the stored values. Returns human-readable
// mismatch descriptions; empty means everything checks out.
std::vector<std::string> recompute_check(const ScenarioConfig& config, const TraceData& trace,
                                         const SimSummary& stored);

}  // namespace priosim

#endif  // PRIOSIM_TRACE_HPP_
